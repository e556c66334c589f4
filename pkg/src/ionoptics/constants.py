"""Physical constants and dimension-tagged scalar types.

Every physical constant used anywhere in the package lives in
:data:`CONSTANTS`; other modules must not re-declare these literals.
The scalar types are thin float subclasses that validate on construction
and otherwise behave like plain floats (arithmetic decays to float on
purpose, this is tagging, not unit algebra).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


@dataclass(frozen=True)
class PhysConstants:
    """Exact SI defining constants plus the derived vacuum permittivity.

    hbar is stored as h / (2 pi) computed from the exact h, so the identity
    hbar * 2 pi == h holds to machine precision.
    """

    c: float = 2.99792458e8          # m/s, exact
    h: float = 6.62607015e-34        # J s, exact
    e: float = 1.602176634e-19       # C, exact
    k_b: float = 1.380649e-23        # J/K, exact
    eps0: float = 8.8541878128e-12   # F/m, CODATA 2018

    @property
    def hbar(self) -> float:
        """Reduced Planck constant, J s."""
        return self.h / (2.0 * math.pi)


CONSTANTS = PhysConstants()


def _checked(value: float, kind: str, allow_negative: bool) -> float:
    value = float(value)
    if math.isnan(value) or math.isinf(value):
        raise ValueError(f"{kind} must be finite, got {value!r}")
    if not allow_negative and value < 0.0:
        raise ValueError(f"{kind} must be non-negative, got {value!r}")
    return value


class Length(float):
    """Non-negative length in meters."""

    def __new__(cls, value: float) -> "Length":
        return super().__new__(cls, _checked(value, "Length", allow_negative=False))


class Frequency(float):
    """Non-negative ordinary frequency in Hz."""

    def __new__(cls, value: float) -> "Frequency":
        return super().__new__(cls, _checked(value, "Frequency", allow_negative=False))


class AngularFrequency(float):
    """Non-negative angular frequency in rad/s."""

    def __new__(cls, value: float) -> "AngularFrequency":
        return super().__new__(cls, _checked(value, "AngularFrequency", allow_negative=False))


class Dimensionless(float):
    """Finite dimensionless ratio (may be negative)."""

    def __new__(cls, value: float) -> "Dimensionless":
        return super().__new__(cls, _checked(value, "Dimensionless", allow_negative=True))


class IntensityClass(enum.Enum):
    """Coarse optical power classes used by the beam requirement table.

    The watt ranges are documentation anchors, not enforced limits:
    MILD is the microwatt class, MODEST the milliwatt class, EXTREME
    anything upwards of ~100 mW.
    """

    MILD = "mild"
    MODEST = "modest"
    EXTREME = "extreme"

    @property
    def approx_power_range_w(self) -> tuple[float, float | None]:
        return _INTENSITY_RANGES[self]

    @property
    def rank(self) -> int:
        return _INTENSITY_RANK[self]


_INTENSITY_RANGES: dict[IntensityClass, tuple[float, float | None]] = {
    IntensityClass.MILD: (1e-6, 1e-4),
    IntensityClass.MODEST: (1e-4, 1e-1),
    IntensityClass.EXTREME: (1e-1, None),
}

_INTENSITY_RANK: dict[IntensityClass, int] = {
    IntensityClass.MILD: 0,
    IntensityClass.MODEST: 1,
    IntensityClass.EXTREME: 2,
}


def angular_frequency_from_wavelength(wavelength: float) -> AngularFrequency:
    """Vacuum wavelength (m) to angular frequency (rad/s)."""
    wavelength = float(wavelength)
    if wavelength <= 0.0 or not math.isfinite(wavelength):
        raise ValueError(f"wavelength must be positive and finite, got {wavelength!r}")
    return AngularFrequency(2.0 * math.pi * CONSTANTS.c / wavelength)


def wavelength_from_angular_frequency(omega: float) -> Length:
    """Angular frequency (rad/s) to vacuum wavelength (m)."""
    omega = float(omega)
    if omega <= 0.0 or not math.isfinite(omega):
        raise ValueError(f"angular frequency must be positive and finite, got {omega!r}")
    return Length(2.0 * math.pi * CONSTANTS.c / omega)
