"""Plano-concave fiber microcavity model for single-ion photon collection.

A short cavity is formed between a flat fiber-tip mirror (reflectance
R_f, where the mode waist sits) and a concave mirror (reflectance R_m,
radius of curvature roc). The Gaussian mode is fixed by the condition
d·(roc − d) = z_R², with z_R the Rayleigh range of the waist. From the
mirror properties follow finesse and decay rate; from the mode volume
follows the single-photon field, the vacuum Rabi frequency g0 against a
given atomic transition, the single-atom cooperativity C1 = g0²/(2Γκ),
and the fraction 2C1/(2C1+1) of spontaneous photons captured into the
cavity mode.

Lengths in meters, rates in rad/s, fields in V/m.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .constants import CONSTANTS
from .gaussian import GaussianBeam

_MODE_CONDITION_RTOL = 1e-9
_C1_CONSISTENCY_RTOL = 1e-6


@dataclass(frozen=True)
class AtomicTransition:
    """A two-level optical transition.

    `linewidth_hz` is the natural FWHM in Hz; the emission rate is
    Γ = 2π·linewidth. Passing `gamma_rad_s` instead sets Γ directly.
    """

    wavelength_m: float
    linewidth_hz: float | None = None
    gamma_rad_s: float | None = None

    def __post_init__(self):
        if not self.wavelength_m > 0.0:
            raise ValueError(f"wavelength must be > 0, got {self.wavelength_m!r}")
        if (self.linewidth_hz is None) == (self.gamma_rad_s is None):
            raise ValueError("give exactly one of linewidth_hz or gamma_rad_s")
        if self.linewidth_hz is not None and self.linewidth_hz < 0.0:
            raise ValueError(f"linewidth must be >= 0, got {self.linewidth_hz!r}")
        if self.gamma_rad_s is not None and self.gamma_rad_s < 0.0:
            raise ValueError(f"emission rate must be >= 0, got {self.gamma_rad_s!r}")

    @property
    def gamma(self) -> float:
        """Spontaneous emission rate Γ, rad/s."""
        if self.gamma_rad_s is not None:
            return self.gamma_rad_s
        return 2.0 * math.pi * self.linewidth_hz

    @property
    def omega(self) -> float:
        """Transition angular frequency, rad/s."""
        return 2.0 * math.pi * CONSTANTS.c / self.wavelength_m

    @property
    def dipole_moment(self) -> float:
        """Transition dipole moment p_d (C·m), from Γ = ω³p_d²/(3πε₀ħc³)."""
        c = CONSTANTS
        return math.sqrt(3.0 * math.pi * c.eps0 * c.hbar * c.c ** 3
                         * self.gamma / self.omega ** 3)


def emission_rate_from_dipole(wavelength_m: float, dipole_moment: float) -> float:
    """Γ = ω³·p_d²/(3πε₀ħc³); inverse of `AtomicTransition.dipole_moment`."""
    c = CONSTANTS
    omega = 2.0 * math.pi * c.c / wavelength_m
    return omega ** 3 * dipole_moment ** 2 / (3.0 * math.pi * c.eps0 * c.hbar * c.c ** 3)


DEFAULT_TRANSITION = AtomicTransition(wavelength_m=313e-9, linewidth_hz=20e6)


def max_scatter_rate(transition: AtomicTransition) -> float:
    """Saturated two-level scattering rate Γ/2, photons/s."""
    return transition.gamma / 2.0


@dataclass(frozen=True)
class CavityDesign:
    """Mirror and mode geometry of one plano-concave cavity.

    Prefer the `from_length`/`from_roc` constructors, which solve the
    mode condition d·(roc − d) = z_R² for the free parameter.
    """

    r_m: float                  # concave mirror reflectance
    r_f: float                  # fiber (flat) mirror reflectance
    roughness_sigma_m: float    # rms mirror surface roughness
    roc_m: float                # concave mirror radius of curvature
    length_m: float             # cavity length d
    waist_m: float              # mode waist at the flat mirror

    def __post_init__(self):
        if not 0.0 < self.r_m <= 1.0:
            raise ValueError(f"concave mirror reflectance must be in (0, 1], got {self.r_m!r}")
        if not 0.0 < self.r_f < 1.0:
            raise ValueError(f"fiber mirror reflectance must be in (0, 1), got {self.r_f!r}")
        if self.roughness_sigma_m < 0.0:
            raise ValueError(f"roughness must be >= 0, got {self.roughness_sigma_m!r}")
        if not self.waist_m > 0.0:
            raise ValueError(f"waist must be > 0, got {self.waist_m!r}")
        if not 0.0 < self.length_m < abs(self.roc_m):
            raise ValueError(
                f"stability needs 0 < d < |roc|, got d={self.length_m!r}, "
                f"roc={self.roc_m!r}"
            )
        # output coupling through the fiber mirror should dominate
        if (1.0 - self.r_m) > 0.1 * (1.0 - self.r_f):
            warnings.warn(
                f"concave-mirror loss 1-R_m={1.0 - self.r_m:g} is not small "
                f"against fiber-mirror transmission 1-R_f={1.0 - self.r_f:g}",
                UserWarning, stacklevel=3,
            )

    @classmethod
    def from_length(cls, waist_m: float, length_m: float, wavelength_m: float,
                    r_m: float = 1.0, r_f: float = 0.99,
                    roughness_sigma_m: float = 0.0) -> "CavityDesign":
        """Solve the concave mirror curvature from waist and length."""
        z_r = GaussianBeam(w0=waist_m, wavelength=wavelength_m).rayleigh_range
        if not length_m > 0.0:
            raise ValueError(f"cavity length must be > 0, got {length_m!r}")
        roc = length_m + z_r ** 2 / length_m
        return cls(r_m=r_m, r_f=r_f, roughness_sigma_m=roughness_sigma_m,
                   roc_m=roc, length_m=length_m, waist_m=waist_m)

    @classmethod
    def from_roc(cls, waist_m: float, roc_m: float, wavelength_m: float,
                 r_m: float = 1.0, r_f: float = 0.99,
                 roughness_sigma_m: float = 0.0, branch: str = "short",
                 ) -> "CavityDesign":
        """Solve the cavity length from waist and mirror curvature.

        d² − |roc|·d + z_R² = 0 has two stable roots; `branch` picks
        "short" (near-planar) or "long" (near-concentric). No real
        root exists when |roc| < 2·z_R.
        """
        z_r = GaussianBeam(w0=waist_m, wavelength=wavelength_m).rayleigh_range
        r = abs(roc_m)
        disc = r * r - 4.0 * z_r ** 2
        if disc < 0.0:
            raise ValueError(
                f"no cavity length satisfies the mode condition: |roc|={r:g} m "
                f"is below 2*z_R={2 * z_r:g} m for waist {waist_m:g} m"
            )
        if branch not in ("short", "long"):
            raise ValueError(f"branch must be 'short' or 'long', got {branch!r}")
        root = math.sqrt(disc)
        length = (r - root) / 2.0 if branch == "short" else (r + root) / 2.0
        return cls(r_m=r_m, r_f=r_f, roughness_sigma_m=roughness_sigma_m,
                   roc_m=r, length_m=length, waist_m=waist_m)

    def rayleigh_range(self, wavelength_m: float) -> float:
        return GaussianBeam(w0=self.waist_m, wavelength=wavelength_m).rayleigh_range

    def mode_condition_residual(self, wavelength_m: float) -> float:
        """Relative residual of d·(|roc| − d) = z_R²."""
        z_r_sq = self.rayleigh_range(wavelength_m) ** 2
        return abs(self.length_m * (abs(self.roc_m) - self.length_m) - z_r_sq) / z_r_sq


def finesse(r_m: float, r_f: float) -> float:
    """Cavity finesse −π/ln(R_m·R_f)."""
    product = r_m * r_f
    if not 0.0 < product < 1.0:
        raise ValueError(f"reflectance product must be in (0, 1), got {product!r}")
    return -math.pi / math.log(product)


def cavity_decay_kappa(length_m: float, finesse_value: float) -> float:
    """Field decay rate κ = πc/(d·F), rad/s."""
    if not length_m > 0.0 or not finesse_value > 0.0:
        raise ValueError(f"length and finesse must be > 0, got "
                         f"{length_m!r}, {finesse_value!r}")
    return math.pi * CONSTANTS.c / (length_m * finesse_value)


def scattering_loss(roughness_sigma_m: float, wavelength_m: float) -> float:
    """Per-bounce surface-scatter loss 1 − exp[−(4πσ/λ)²]."""
    if roughness_sigma_m < 0.0 or not wavelength_m > 0.0:
        raise ValueError(f"need sigma >= 0 and wavelength > 0, got "
                         f"{roughness_sigma_m!r}, {wavelength_m!r}")
    x = 4.0 * math.pi * roughness_sigma_m / wavelength_m
    return -math.expm1(-x * x)


def _alpha_correction(waist_m: float, wavelength_m: float) -> float:
    # small mode-volume correction term lambda^2 / (2 pi^2 w0^2)
    return wavelength_m ** 2 / (2.0 * math.pi ** 2 * waist_m ** 2)


def mode_volume(design: CavityDesign) -> float:
    """Effective mode volume V = π·w0²·d, m³."""
    return math.pi * design.waist_m ** 2 * design.length_m


def single_photon_field_max(design: CavityDesign, wavelength_m: float) -> float:
    """Peak field E₀ of one photon: √(4hc/(λ·V·ε₀·(1+α))), V/m."""
    c = CONSTANTS
    alpha = _alpha_correction(design.waist_m, wavelength_m)
    volume = mode_volume(design)
    return math.sqrt(4.0 * c.h * c.c / (wavelength_m * volume * c.eps0 * (1.0 + alpha)))


def field_on_axis(design: CavityDesign, wavelength_m: float, z_m: float) -> float:
    """On-axis field of one photon at distance z from the waist mirror."""
    if not 0.0 <= z_m <= design.length_m:
        raise ValueError(f"axial position must be in [0, {design.length_m!r}] m, "
                         f"got {z_m!r}")
    z_r = design.rayleigh_range(wavelength_m)
    return single_photon_field_max(design, wavelength_m) / math.sqrt(
        1.0 + (z_m / z_r) ** 2)


def vacuum_rabi_g0(transition: AtomicTransition, field_v_per_m: float) -> float:
    """Vacuum Rabi frequency g₀ = √2·p_d·E/ħ, rad/s."""
    if field_v_per_m < 0.0:
        raise ValueError(f"field amplitude must be >= 0, got {field_v_per_m!r}")
    return math.sqrt(2.0) * transition.dipole_moment * field_v_per_m / CONSTANTS.hbar


def capture_fraction(c1: float) -> float:
    """Fraction 2C₁/(2C₁+1) of emitted photons captured by the cavity."""
    if c1 < 0.0:
        raise ValueError(f"cooperativity must be >= 0, got {c1!r}")
    return 2.0 * c1 / (2.0 * c1 + 1.0)


@dataclass(frozen=True)
class CouplingReport:
    finesse: float
    kappa: float                # rad/s
    gamma: float                # rad/s
    g0: float                   # rad/s, at the reported ion position
    c1: float                   # single-atom cooperativity, waist-referenced
    f_cap: float
    g0_over_gamma: float
    g0_over_kappa: float


def coupling_report(transition: AtomicTransition, design: CavityDesign,
                    z_ion_m: float = 0.0) -> CouplingReport:
    """Single-ion coupling figures for a cavity design.

    g₀ is evaluated at the ion's axial position (default: the waist,
    the field maximum). C₁ = g₀²/(2Γκ) uses the waist g₀ and is
    cross-checked against its closed form 3λ²F/(π³w₀²(1+α)); both
    derive from the same mode algebra, so disagreement beyond 1e-6
    relative indicates an implementation fault and raises.
    """
    lam = transition.wavelength_m
    if not transition.gamma > 0.0:
        raise ValueError("transition emission rate must be > 0 for coupling figures")
    fin = finesse(design.r_m, design.r_f)
    kappa = cavity_decay_kappa(design.length_m, fin)
    g0_waist = vacuum_rabi_g0(transition, single_photon_field_max(design, lam))
    g0_ion = vacuum_rabi_g0(transition, field_on_axis(design, lam, z_ion_m))
    c1 = g0_waist ** 2 / (2.0 * transition.gamma * kappa)
    alpha = _alpha_correction(design.waist_m, lam)
    c1_closed = 3.0 * lam ** 2 * fin / (math.pi ** 3 * design.waist_m ** 2 * (1.0 + alpha))
    if abs(c1 / c1_closed - 1.0) > _C1_CONSISTENCY_RTOL:
        raise RuntimeError(
            f"cooperativity formulas disagree: rate form {c1!r} vs closed form "
            f"{c1_closed!r} — implementation fault"
        )
    return CouplingReport(
        finesse=fin, kappa=kappa, gamma=transition.gamma, g0=g0_ion,
        c1=c1, f_cap=capture_fraction(c1),
        g0_over_gamma=g0_ion / transition.gamma,
        g0_over_kappa=g0_ion / kappa,
    )


FIG_RF_VALUES = (0.99, 0.999, 0.9999)
_GRID_POINTS = 60
_GRID_RANGE = (0.1, 10.0)


@dataclass(frozen=True)
class CouplingSweepRow:
    d_over_zr: float
    g0_over_gamma: float
    g0_over_kappa: tuple[float, ...]  # aligned with the swept reflectances
    feasible: bool


def length_sweep_grid(lo: float = _GRID_RANGE[0], hi: float = _GRID_RANGE[1],
                      points: int = _GRID_POINTS) -> list[float]:
    """Log-spaced d/z_R grid used by the coupling sweep."""
    if not 0.0 < lo < hi or points < 2:
        raise ValueError(f"bad grid spec lo={lo!r} hi={hi!r} points={points!r}")
    step = math.log(hi / lo) / (points - 1)
    return [lo * math.exp(step * i) for i in range(points)]


def coupling_sweep(transition: AtomicTransition, waist_m: float = 1.5e-6,
                   r_f_values: tuple[float, ...] = FIG_RF_VALUES,
                   d_over_zr_grid: list[float] | None = None,
                   ) -> list[CouplingSweepRow]:
    """g₀/Γ and g₀/κ versus cavity length, one κ column per fiber
    reflectance, with a unity-reflectance concave mirror.

    g₀ is waist-referenced and independent of the mirror set; each row
    solves the concave mirror curvature from the mode condition.
    """
    if d_over_zr_grid is None:
        d_over_zr_grid = length_sweep_grid()
    lam = transition.wavelength_m
    z_r = GaussianBeam(w0=waist_m, wavelength=lam).rayleigh_range
    rows = []
    for x in d_over_zr_grid:
        if not x > 0.0:
            raise ValueError(f"d/z_R grid values must be > 0, got {x!r}")
        length = x * z_r
        design = CavityDesign.from_length(waist_m, length, lam, r_m=1.0,
                                          r_f=r_f_values[0])
        g0 = vacuum_rabi_g0(transition, single_photon_field_max(design, lam))
        ratios = []
        feasible = 0.0 < length < design.roc_m
        for r_f in r_f_values:
            kappa = cavity_decay_kappa(length, finesse(1.0, r_f))
            ratios.append(g0 / kappa)
        rows.append(CouplingSweepRow(
            d_over_zr=x, g0_over_gamma=g0 / transition.gamma,
            g0_over_kappa=tuple(ratios), feasible=feasible,
        ))
    return rows


def sweep_column_names(r_f_values: tuple[float, ...] = FIG_RF_VALUES) -> list[str]:
    """CSV header for `coupling_sweep` output."""
    names = ["d_over_zr", "g0_over_gamma"]
    for r_f in r_f_values:
        names.append("g0_over_kappa_Rf" + repr(r_f).replace(".", "p"))
    return names


__all__ = [
    "AtomicTransition", "CavityDesign", "CouplingReport", "CouplingSweepRow",
    "DEFAULT_TRANSITION", "FIG_RF_VALUES", "emission_rate_from_dipole",
    "max_scatter_rate", "finesse", "cavity_decay_kappa", "scattering_loss",
    "mode_volume", "single_photon_field_max", "field_on_axis",
    "vacuum_rabi_g0", "capture_fraction", "coupling_report",
    "coupling_sweep", "length_sweep_grid", "sweep_column_names",
]
