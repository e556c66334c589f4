"""Free-space Gaussian beam propagation across a trap chip.

Models the delivery problem: a beam focused over a chip of width L must
stay clear of the chip surface, which sits a height y_ion below the beam
axis. The figure of merit is the fraction of optical power clipped by the
chip edge, where the beam is widest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import Length


@dataclass(frozen=True)
class GaussianBeam:
    """TEM00 beam: waist radius w0 (m) at axial position z0 (m).

    Radii are 1/e^2 intensity radii. z coordinates are plain floats so
    they can be negative relative to the waist.
    """

    w0: float
    wavelength: float
    z0: float = 0.0

    def __post_init__(self) -> None:
        if not (self.w0 > 0.0 and math.isfinite(self.w0)):
            raise ValueError(f"waist must be positive and finite, got {self.w0!r}")
        if not (self.wavelength > 0.0 and math.isfinite(self.wavelength)):
            raise ValueError(f"wavelength must be positive and finite, got {self.wavelength!r}")
        if not math.isfinite(self.z0):
            raise ValueError(f"waist position must be finite, got {self.z0!r}")

    @property
    def rayleigh_range(self) -> Length:
        """z_R = pi w0^2 / lambda, m."""
        return Length(math.pi * self.w0 ** 2 / self.wavelength)


def beam_radius(beam: GaussianBeam, z: float) -> Length:
    """1/e^2 radius W(z) = w0 sqrt(1 + ((z - z0)/z_R)^2), m."""
    u = (z - beam.z0) / beam.rayleigh_range
    return Length(beam.w0 * math.sqrt(1.0 + u * u))


def optimal_waist(chip_width: float, wavelength: float) -> Length:
    """Waist that minimizes the beam radius at the chip edges.

    For a waist centered on a chip of width L, the edge radius
    W(L/2) = w0 sqrt(1 + (L lambda / (2 pi w0^2))^2) is minimized by
    w0 = sqrt(L lambda / (2 pi)), which puts the edges exactly one
    Rayleigh range from the waist (edge radius w0 sqrt(2)).
    """
    if not (chip_width > 0.0 and math.isfinite(chip_width)):
        raise ValueError(f"chip width must be positive and finite, got {chip_width!r}")
    if not (wavelength > 0.0 and math.isfinite(wavelength)):
        raise ValueError(f"wavelength must be positive and finite, got {wavelength!r}")
    return Length(math.sqrt(chip_width * wavelength / (2.0 * math.pi)))


@dataclass(frozen=True)
class ChipGeometry:
    """Trap chip of width `width` (m) with the beam axis a height
    `ion_height` (m) above the chip surface."""

    width: float
    ion_height: float

    def __post_init__(self) -> None:
        if not (self.width > 0.0 and math.isfinite(self.width)):
            raise ValueError(f"chip width must be positive and finite, got {self.width!r}")
        if not (self.ion_height > 0.0 and math.isfinite(self.ion_height)):
            raise ValueError(f"ion height must be positive and finite, got {self.ion_height!r}")


def power_fraction_below(beam_radius_m: float, clearance: float) -> float:
    """Fraction of a Gaussian beam's power beyond `clearance` on one side.

    Integrates the transverse power profile (1/e^2 radius `beam_radius_m`)
    from -inf to -clearance: 0.5 erfc(sqrt(2) clearance / W).
    """
    if not (beam_radius_m > 0.0 and math.isfinite(beam_radius_m)):
        raise ValueError(f"beam radius must be positive and finite, got {beam_radius_m!r}")
    if clearance < 0.0 or not math.isfinite(clearance):
        raise ValueError(f"clearance must be non-negative and finite, got {clearance!r}")
    return 0.5 * math.erfc(math.sqrt(2.0) * clearance / beam_radius_m)


def clipping_fraction(beam: GaussianBeam, chip: ChipGeometry) -> float:
    """Power fraction clipped by the chip surface at one chip edge.

    The beam is taken centered on the chip (waist at the middle), so the
    worst radius occurs at z - z0 = width/2.
    """
    w_edge = beam_radius(beam, beam.z0 + 0.5 * chip.width)
    return power_fraction_below(w_edge, chip.ion_height)


def chip_size_feasible(
    chip_width: float,
    wavelength: float,
    ion_height: float,
    max_clip: float = 1e-3,
) -> bool:
    """True if the best-case beam clears the chip.

    Uses the optimal waist for `chip_width`; feasible when the per-side
    clipping fraction at the chip edge stays at or below `max_clip`.
    """
    if not (0.0 < max_clip < 1.0):
        raise ValueError(f"max_clip must be in (0, 1), got {max_clip!r}")
    beam = GaussianBeam(w0=optimal_waist(chip_width, wavelength), wavelength=wavelength)
    chip = ChipGeometry(width=chip_width, ion_height=ion_height)
    return clipping_fraction(beam, chip) <= max_clip


@dataclass(frozen=True)
class LensedFiber:
    """Fiber with a hemispherical lensed tip.

    Parameters
    ----------
    fiber_na:
        Numerical aperture of the guided mode (dimensionless).
    clear_aperture:
        Usable tip diameter D, m.
    refractive_index:
        Tip material index n.
    tip_radius:
        Radius of curvature R of the lensed tip, m.
    """

    fiber_na: float
    clear_aperture: float
    refractive_index: float
    tip_radius: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.fiber_na < 1.0):
            raise ValueError(f"fiber NA must be in [0, 1), got {self.fiber_na!r}")
        if not (self.clear_aperture > 0.0 and math.isfinite(self.clear_aperture)):
            raise ValueError(f"clear aperture must be positive, got {self.clear_aperture!r}")
        if not (self.refractive_index > 1.0 and math.isfinite(self.refractive_index)):
            raise ValueError(f"refractive index must exceed 1, got {self.refractive_index!r}")
        if not (self.tip_radius > 0.0):
            raise ValueError(f"tip radius must be positive, got {self.tip_radius!r}")

    @property
    def lens_na(self) -> float:
        """Aperture-limited NA added by the tip lens: D (n - 1) / (2 R)."""
        return self.clear_aperture * (self.refractive_index - 1.0) / (2.0 * self.tip_radius)

    @property
    def focal_length(self) -> Length:
        """Paraxial focal length of the hemispherical tip, R / (n - 1), m."""
        return Length(self.tip_radius / (self.refractive_index - 1.0))

    @property
    def f_number(self) -> float:
        """Working f-number 1 / (2 (NA_lens + NA_fiber))."""
        total = self.lens_na + self.fiber_na
        if total <= 0.0:
            raise ValueError("combined NA must be positive")
        return 1.0 / (2.0 * total)

    @property
    def paraxial_valid(self) -> bool:
        """False when the combined NA reaches 1 (f-number below 0.5),
        where the small-angle model stops being meaningful."""
        return (self.lens_na + self.fiber_na) < 1.0
