"""Photodetector signal/noise model and qubit-state discrimination.

Models a detector reading out resonance fluorescence from a single ion:
signal electrons S = η·Φ·T_M·M and a noise budget with a thermal
(kTC) floor, excess-noise-scaled shot noise, and a background term from
dark counts. On top of that sit the two state-discrimination tools: a
Gaussian analytic bit-error-rate (BER) with optimized threshold, and a
Poisson×gain Monte Carlo used as its ground truth.

Conventions: photon fluxes in photons/s at the detector face,
integration time T_M in seconds, thresholds on the output-electron
axis. The dark qubit state defaults to producing no photons; detector
dark counts affect both states.
"""

from __future__ import annotations

import json
import math
import pathlib
from dataclasses import dataclass

import numpy as np

from .constants import CONSTANTS


@dataclass(frozen=True)
class DetectorModel:
    """Static parameters of a photodetector.

    `pixel_latency_s` is per-pixel readout latency (0 for single-element
    devices); `frame_rate_range_fps` and `pixels` are metadata used by
    readout budgeting only.
    """

    name: str
    eta: float                  # quantum efficiency
    gain_m: float               # internal gain M
    enf_f: float                # excess noise factor F
    dark_rate: float            # dark counts / s
    capacitance_f: float        # device or pixel capacitance, F
    pixel_latency_s: float = 0.0
    frame_rate_range_fps: tuple[float, float] | None = None
    pixels: int = 1

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"quantum efficiency must be in (0, 1], got {self.eta!r}")
        if self.gain_m < 1.0:
            raise ValueError(f"gain must be >= 1, got {self.gain_m!r}")
        if self.enf_f < 1.0:
            raise ValueError(f"excess noise factor must be >= 1, got {self.enf_f!r}")
        if self.dark_rate < 0.0:
            raise ValueError(f"dark rate must be >= 0, got {self.dark_rate!r}")
        if not self.capacitance_f > 0.0:
            raise ValueError(f"capacitance must be > 0, got {self.capacitance_f!r}")
        if self.pixel_latency_s < 0.0:
            raise ValueError(f"pixel latency must be >= 0, got {self.pixel_latency_s!r}")
        if self.frame_rate_range_fps is not None:
            lo, hi = self.frame_rate_range_fps
            if not 0.0 < lo <= hi:
                raise ValueError(f"bad frame rate range {self.frame_rate_range_fps!r}")
        if self.pixels < 1:
            raise ValueError(f"pixel count must be >= 1, got {self.pixels!r}")


PRESETS: dict[str, DetectorModel] = {
    "uvpc": DetectorModel("uvpc", eta=0.65, gain_m=3e4, enf_f=1.0,
                          dark_rate=2e4, capacitance_f=1e-12),
    "pmt": DetectorModel("pmt", eta=0.10, gain_m=1e6, enf_f=1.5,
                         dark_rate=500.0, capacitance_f=1e-12),
    "ccd": DetectorModel("ccd", eta=0.65, gain_m=1.0, enf_f=1.0,
                         dark_rate=100.0, capacitance_f=0.1e-12,
                         frame_rate_range_fps=(60.0, 15000.0)),
    "emccd": DetectorModel("emccd", eta=0.65, gain_m=100.0, enf_f=2.0,
                           dark_rate=100.0, capacitance_f=0.1e-12,
                           pixel_latency_s=50e-6),
    "apd": DetectorModel("apd", eta=0.50, gain_m=100.0, enf_f=10.0,
                         dark_rate=100.0, capacitance_f=1e-12),
}


def load_detectors(source: str | pathlib.Path | dict | list | None = None,
                   ) -> dict[str, DetectorModel]:
    """Detector table: built-in presets, optionally overridden from JSON.

    `source` may be a path to a JSON file, a parsed document, or None
    (presets only). The document is a list of records (or an object
    with a "detectors" list), each {"name", "eta", "gain", "enf",
    "dark_cps", "cap_farad"} plus optional "pixel_latency_s",
    "frame_rate_range_fps" ([min, max]) and "pixels". Records replace
    or extend the presets by name.
    """
    table = dict(PRESETS)
    if source is None:
        return table
    if isinstance(source, (str, pathlib.Path)):
        with open(source, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    else:
        doc = source
    if isinstance(doc, dict):
        doc = doc.get("detectors")
    if not isinstance(doc, list):
        raise ValueError("detector table must be a list of records "
                         "or an object with a 'detectors' list")
    for i, rec in enumerate(doc):
        if not isinstance(rec, dict):
            raise ValueError(f"detector record {i} must be an object")
        try:
            name = str(rec["name"])
            fr = rec.get("frame_rate_range_fps")
            model = DetectorModel(
                name=name,
                eta=float(rec["eta"]),
                gain_m=float(rec["gain"]),
                enf_f=float(rec["enf"]),
                dark_rate=float(rec["dark_cps"]),
                capacitance_f=float(rec["cap_farad"]),
                pixel_latency_s=float(rec.get("pixel_latency_s", 0.0)),
                frame_rate_range_fps=(
                    (float(fr[0]), float(fr[1])) if fr is not None else None
                ),
                pixels=int(rec.get("pixels", 1)),
            )
        except KeyError as exc:
            raise ValueError(f"detector record {i} missing field {exc.args[0]!r}") from None
        table[name] = model
    return table


@dataclass(frozen=True)
class MeasurementScenario:
    """One state-detection attempt: photon fluxes, integration time, temperature."""

    flux_bright: float          # photons/s at detector, scattering state
    t_m: float                  # integration time, s
    flux_dark: float = 0.0      # photons/s, non-scattering state
    temperature_k: float = 300.0

    def __post_init__(self):
        if self.flux_bright < 0.0 or self.flux_dark < 0.0:
            raise ValueError("photon fluxes must be >= 0, got "
                             f"{self.flux_bright!r}/{self.flux_dark!r}")
        if not self.t_m > 0.0:
            raise ValueError(f"integration time must be > 0, got {self.t_m!r}")
        if not self.temperature_k > 0.0:
            raise ValueError(f"temperature must be > 0, got {self.temperature_k!r}")


def thermal_noise_electrons(temperature_k: float = 300.0,
                            capacitance_f: float = 1e-12) -> float:
    """kTC noise floor as an electron count: sqrt(4 k_B T C)/e.

    Independent of integration time; the bound assumes the readout
    bandwidth is matched to 1/T_M.
    """
    if not temperature_k > 0.0 or not capacitance_f > 0.0:
        raise ValueError(f"temperature and capacitance must be > 0, got "
                         f"{temperature_k!r} K, {capacitance_f!r} F")
    c = CONSTANTS
    return math.sqrt(4.0 * c.k_b * temperature_k * capacitance_f) / c.e


def gain_threshold_for_shot_limit(photons_absorbed: float,
                                  temperature_k: float = 300.0,
                                  capacitance_f: float = 1e-12) -> float:
    """Minimum internal gain for the thermal floor not to dominate.

    With P photoelectrons collected per integration, gain at least
    sqrt(4 k_B T C)/(e P) keeps the kTC term below the signal scale.
    """
    if not photons_absorbed > 0.0:
        raise ValueError(f"absorbed photon count must be > 0, got {photons_absorbed!r}")
    return thermal_noise_electrons(temperature_k, capacitance_f) / photons_absorbed


def signal_and_noise_electrons(detector: DetectorModel,
                               scenario: MeasurementScenario) -> tuple[float, float]:
    """Signal S and noise-equivalent N output-electron counts.

    S = η·Φ_bright·T_M·M. N² collects the kTC floor 4k_B·T·C/e²,
    excess-noise shot term 2·(η·Φ·T_M)·M²·F, and the accumulated
    background-current electrons (dark_rate·T_M·M)².
    """
    mu_signal = detector.eta * scenario.flux_bright * scenario.t_m
    s = mu_signal * detector.gain_m
    th = thermal_noise_electrons(scenario.temperature_k, detector.capacitance_f)
    n_sq = (
        th * th
        + 2.0 * mu_signal * detector.gain_m ** 2 * detector.enf_f
        + (detector.dark_rate * scenario.t_m * detector.gain_m) ** 2
    )
    return s, math.sqrt(n_sq)


def snr(detector: DetectorModel, scenario: MeasurementScenario) -> float:
    if not scenario.flux_bright > 0.0:
        raise ValueError(f"signal flux must be > 0, got {scenario.flux_bright!r}")
    s, n = signal_and_noise_electrons(detector, scenario)
    return s / n


@dataclass(frozen=True)
class DetectionResult:
    snr: float
    ber: float
    threshold_e: float          # output electrons
    signal_electrons: float
    noise_electrons: float

    def __post_init__(self):
        if not 0.0 <= self.ber <= 0.5:
            raise ValueError(f"bit error rate must be in [0, 0.5], got {self.ber!r}")


def _state_moments(detector: DetectorModel, scenario: MeasurementScenario,
                   ) -> tuple[tuple[float, float], tuple[float, float]]:
    """Output-electron (mean, std) for the dark and bright states."""
    th = thermal_noise_electrons(scenario.temperature_k, detector.capacitance_f)
    out = []
    for flux in (scenario.flux_dark, scenario.flux_bright):
        mu = (detector.eta * flux + detector.dark_rate) * scenario.t_m
        mean = detector.gain_m * mu
        var = detector.gain_m ** 2 * detector.enf_f * mu + th * th
        out.append((mean, math.sqrt(var)))
    return out[0], out[1]


def _gauss_upper_tail(x: float) -> float:
    # P(Z > x) for standard normal
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def _ber_at(theta: float, dark: tuple[float, float],
            bright: tuple[float, float]) -> float:
    (md, sd), (mb, sb) = dark, bright
    p_dark_above = _gauss_upper_tail((theta - md) / sd)
    p_bright_below = _gauss_upper_tail((mb - theta) / sb)
    return 0.5 * (p_dark_above + p_bright_below)


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_min(fn, lo: float, hi: float, iters: int = 90) -> tuple[float, float]:
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fn(d)
        if b - a <= 1e-14 * (abs(a) + abs(b) + 1.0):
            break
    x = 0.5 * (a + b)
    return x, fn(x)


def ber_analytic(detector: DetectorModel,
                 scenario: MeasurementScenario) -> DetectionResult:
    """Minimum bit error rate over the detection threshold, Gaussian model.

    Each state's output statistic is Gaussian with mean M·μ and
    variance M²·F·μ plus the kTC floor, where μ = (η·flux + dark)·T_M.
    BER(θ) = ½[P(X_dark > θ) + P(X_bright < θ)]; a scan at resolution
    10⁻³ of the bright mean brackets the minimum and golden-section
    refines it. Indistinguishable scenarios return BER 0.5.

    Validity: below roughly ten primary electrons per window on the
    deciding side, the discrete Poisson tail exceeds this Gaussian
    tail by large factors; use `ber_monte_carlo` as ground truth
    there.
    """
    dark, bright = _state_moments(detector, scenario)
    if scenario.flux_bright > 0.0:
        s, n = signal_and_noise_electrons(detector, scenario)
        snr_value = s / n
    else:
        s, n = signal_and_noise_electrons(detector, scenario)
        snr_value = 0.0
    if scenario.flux_bright <= scenario.flux_dark:
        theta = 0.5 * (dark[0] + bright[0])
        return DetectionResult(snr=snr_value, ber=0.5, threshold_e=theta,
                               signal_electrons=s, noise_electrons=n)

    (md, sd), (mb, sb) = dark, bright
    lo = md - 5.0 * sd
    hi = mb + 5.0 * sb
    step = 1e-3 * mb
    npts = int(math.ceil((hi - lo) / step)) + 1
    npts = max(1000, min(npts, 50_000))
    thetas = [lo + (hi - lo) * i / (npts - 1) for i in range(npts)]
    values = [_ber_at(t, dark, bright) for t in thetas]
    k = min(range(npts), key=values.__getitem__)
    a = thetas[max(k - 1, 0)]
    b = thetas[min(k + 1, npts - 1)]
    theta, ber = _golden_min(lambda t: _ber_at(t, dark, bright), a, b)
    ber = min(ber, 0.5)
    return DetectionResult(snr=snr_value, ber=ber, threshold_e=theta,
                           signal_electrons=s, noise_electrons=n)


@dataclass(frozen=True)
class MonteCarloResult:
    ber: float
    ci_low: float
    ci_high: float
    trials: int
    errors_bright: int
    errors_dark: int
    bright_mean: float
    bright_var: float
    dark_mean: float
    dark_var: float


def _wilson_interval(errors: int, n: int, z: float = 1.959963984540054,
                     ) -> tuple[float, float]:
    p = errors / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2.0 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def ber_monte_carlo(detector: DetectorModel, scenario: MeasurementScenario,
                    threshold_e: float, trials: int, seed: int) -> MonteCarloResult:
    """Monte Carlo BER at a fixed threshold; ground truth for `ber_analytic`.

    Per trial and state: primary electron count n ~ Poisson(μ) with
    μ = (η·flux + dark)·T_M; the multiplied output is M·n plus gain
    spread M·sqrt((F−1)·n)·ξ plus the thermal floor, ξ and the floor
    standard normal. Output moments are exactly M·μ and M²·F·μ + kTC
    variance. Deterministic for a fixed seed; the estimate and its
    Wilson 95% interval pool both states with equal priors.
    """
    if trials < 1:
        raise ValueError(f"trial count must be >= 1, got {trials!r}")
    rng = np.random.default_rng(seed)
    th = thermal_noise_electrons(scenario.temperature_k, detector.capacitance_f)
    m, f = detector.gain_m, detector.enf_f

    def sample(flux: float) -> np.ndarray:
        mu = (detector.eta * flux + detector.dark_rate) * scenario.t_m
        n = rng.poisson(mu, size=trials).astype(np.float64)
        x = m * n
        if f > 1.0:
            x = x + m * np.sqrt((f - 1.0) * n) * rng.standard_normal(trials)
        return x + th * rng.standard_normal(trials)

    x_bright = sample(scenario.flux_bright)
    x_dark = sample(scenario.flux_dark)
    errors_bright = int(np.count_nonzero(x_bright < threshold_e))
    errors_dark = int(np.count_nonzero(x_dark > threshold_e))
    k = errors_bright + errors_dark
    n_total = 2 * trials
    ci_low, ci_high = _wilson_interval(k, n_total)
    return MonteCarloResult(
        ber=k / n_total, ci_low=ci_low, ci_high=ci_high, trials=trials,
        errors_bright=errors_bright, errors_dark=errors_dark,
        bright_mean=float(x_bright.mean()), bright_var=float(x_bright.var(ddof=1)),
        dark_mean=float(x_dark.mean()), dark_var=float(x_dark.var(ddof=1)),
    )


_TIME_GRID_LO = 1e-7   # s
_TIME_GRID_HI = 1.0    # s
_GRID_POINTS_PER_DECADE = 8


def min_integration_time(detector: DetectorModel, flux_bright: float,
                         flux_dark: float = 0.0, temperature_k: float = 300.0,
                         target_ber: float = 1e-3) -> float | None:
    """Smallest integration time whose analytic BER meets the target.

    Scans a log grid from 0.1 µs to 1 s, then bisects the bracketing
    interval (BER is monotone non-increasing in T_M). Returns None when
    the target is unreachable within 1 s.
    """
    if not 0.0 < target_ber < 0.5:
        raise ValueError(f"target error rate must be in (0, 0.5), got {target_ber!r}")

    def ber_at(t_m: float) -> float:
        sc = MeasurementScenario(flux_bright=flux_bright, t_m=t_m,
                                 flux_dark=flux_dark, temperature_k=temperature_k)
        return ber_analytic(detector, sc).ber

    decades = math.log10(_TIME_GRID_HI / _TIME_GRID_LO)
    n = int(round(decades * _GRID_POINTS_PER_DECADE)) + 1
    grid = [_TIME_GRID_LO * 10.0 ** (decades * i / (n - 1)) for i in range(n)]
    hit = None
    for i, t in enumerate(grid):
        if ber_at(t) <= target_ber:
            hit = i
            break
    if hit is None:
        return None
    if hit == 0:
        return grid[0]
    lo, hi = grid[hit - 1], grid[hit]
    for _ in range(60):
        mid = math.sqrt(lo * hi)
        if ber_at(mid) <= target_ber:
            hi = mid
        else:
            lo = mid
        if hi / lo < 1.0 + 1e-6:
            break
    return hi


@dataclass(frozen=True)
class ReadoutBudget:
    added_latency_s: float
    required_frame_rate_hz: float
    achievable_frame_rate_hz: float | None  # None when no frame-rate metadata
    frame_rate_ok: bool


def readout_budget(detector: DetectorModel, zones: int, t_m: float) -> ReadoutBudget:
    """Readout overhead for monitoring `zones` zones each integration.

    Assumes one binned pixel per zone, so per-readout latency is
    zones·pixel_latency. Frame-rate feasibility compares the needed
    1/T_M frames/s against the metadata cap shared across the zone
    pixels; detectors without frame-rate metadata are unconstrained.
    """
    if zones < 1:
        raise ValueError(f"zone count must be >= 1, got {zones!r}")
    if not t_m > 0.0:
        raise ValueError(f"integration time must be > 0, got {t_m!r}")
    added = zones * detector.pixel_latency_s
    required = 1.0 / t_m
    if detector.frame_rate_range_fps is None:
        return ReadoutBudget(added, required, None, True)
    achievable = detector.frame_rate_range_fps[1] / zones
    return ReadoutBudget(added, required, achievable, required <= achievable)


__all__ = [
    "DetectorModel", "MeasurementScenario", "DetectionResult",
    "MonteCarloResult", "ReadoutBudget", "PRESETS", "load_detectors",
    "thermal_noise_electrons", "gain_threshold_for_shot_limit",
    "signal_and_noise_electrons", "snr", "ber_analytic", "ber_monte_carlo",
    "min_integration_time", "readout_budget",
]
