"""Rate arithmetic for photon-mediated remote entanglement generation.

Entangling two ions through photon interference succeeds with some
small probability per attempt; the generation rate is that probability
times the attempt rate, and the probability scales with the square of
the photon capture fraction (both photons must be collected). These
helpers keep that bookkeeping honest, including the extrapolation
breakdown when a projected probability exceeds one.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class EntanglementBaseline:
    """A demonstrated operating point to scale from."""

    p_success: float        # probability per attempt
    event_rate_hz: float    # successful events / s

    def __post_init__(self):
        if not 0.0 < self.p_success <= 1.0:
            raise ValueError(f"success probability must be in (0, 1], got "
                             f"{self.p_success!r}")
        if self.event_rate_hz < 0.0:
            raise ValueError(f"event rate must be >= 0, got {self.event_rate_hz!r}")

    @property
    def implied_attempt_rate_hz(self) -> float:
        return self.event_rate_hz / self.p_success


@dataclass(frozen=True)
class ScaledSuccess:
    p_success: float
    saturated: bool         # True when the raw quadratic projection exceeded 1
    improvement_factor: float


def scaled_success(p_base: float, fcap_base: float, fcap_new: float) -> ScaledSuccess:
    """Project a success probability to a new capture fraction.

    The per-attempt probability goes as the capture fraction squared.
    A projection above 1 is clamped and flagged as saturated: the
    quadratic model has left its validity range, which is information,
    not an error.
    """
    if not 0.0 < p_base <= 1.0:
        raise ValueError(f"baseline probability must be in (0, 1], got {p_base!r}")
    if not fcap_base > 0.0:
        raise ValueError(f"baseline capture fraction must be > 0, got {fcap_base!r}")
    if fcap_new < 0.0:
        raise ValueError(f"capture fraction must be >= 0, got {fcap_new!r}")
    factor = (fcap_new / fcap_base) ** 2
    raw = p_base * factor
    if raw > 1.0:
        return ScaledSuccess(p_success=1.0, saturated=True, improvement_factor=factor)
    return ScaledSuccess(p_success=raw, saturated=False, improvement_factor=factor)


def event_rate(p_success: float, attempt_rate_hz: float) -> float:
    """Successful events per second for independent attempts."""
    if not 0.0 <= p_success <= 1.0:
        raise ValueError(f"success probability must be in [0, 1], got {p_success!r}")
    if attempt_rate_hz < 0.0:
        raise ValueError(f"attempt rate must be >= 0, got {attempt_rate_hz!r}")
    return p_success * attempt_rate_hz


def mean_wait_s(p_success: float, attempt_rate_hz: float) -> float:
    """Mean time between successful events, s (inf when rate is zero)."""
    rate = event_rate(p_success, attempt_rate_hz)
    if rate == 0.0:
        return float("inf")
    return 1.0 / rate


__all__ = [
    "EntanglementBaseline", "ScaledSuccess", "scaled_success",
    "event_rate", "mean_wait_s",
]
