"""Beam-geometry requirement table and layout validation.

The requirement table lists, для each beam function the processor needs,
the allowed polarization labels, target ion, Raman detuning, momentum
difference class, intensity class, and zone kinds. A layout document
declares the actual beams (direction, polarization, intensity, zone)
plus the magnetic-field axis and scheme, and `validate` checks it
against five geometric/tabular rules:

R1  pure circularly polarized beams propagate along the B-field axis
R2  the B field lies in the chip plane
R3  the B-field/trap-axis angle matches the declared scheme (45 or 0 deg)
R4  each beam matches its function's table row (polarization, intensity, zone)
R5  Raman pairs: large momentum difference needs counter-propagating or
    orthogonal beams, small momentum difference needs co-propagation

Chip frame convention: x is the trap axis, z the chip normal.
"""

from __future__ import annotations

import enum
import json
import math
import pathlib
from dataclasses import dataclass

from .constants import IntensityClass

_UNIT_NORM_TOL = 1e-9


class BeamFunction(enum.Enum):
    RSRC = "rsrc"                      # resolved-sideband Raman cooling pair
    REPUMPING = "repumping"
    SINGLE_QUBIT = "single_qubit"
    TWO_QUBIT = "two_qubit"
    MEASUREMENT = "measurement"
    DOPPLER_BE = "doppler_be"
    DEPOPULATION_BE = "depopulation_be"
    DOPPLER_MG = "doppler_mg"


class BeamPolarization(enum.Enum):
    """Polarization label of a concrete beam."""

    PI = "pi"
    SIGMA_PLUS = "sigma_plus"
    SIGMA_MINUS = "sigma_minus"
    SIGMA_SUM = "sigma_sum"    # sigma+ plus sigma- superposition
    SIGMA_DIFF = "sigma_diff"  # sigma+ minus sigma- superposition


class PolarizationRequirement(enum.Enum):
    """Allowed polarization set for a table row."""

    PI = "pi"
    SIGMA_PLUS = "sigma_plus"
    SIGMA_MINUS = "sigma_minus"
    PI_OR_SIGMA = "pi_or_sigma"
    SIGMA_PLUS_OR_MINUS = "sigma_plus_or_minus"
    SIGMA_COMBINATIONS = "sigma_combinations"  # sigma+ +/- sigma- pair labels
    ANY = "any"

    @property
    def allowed_labels(self) -> frozenset[BeamPolarization]:
        return _REQUIREMENT_LABELS[self]


_REQUIREMENT_LABELS: dict[PolarizationRequirement, frozenset[BeamPolarization]] = {
    PolarizationRequirement.PI: frozenset({BeamPolarization.PI}),
    PolarizationRequirement.SIGMA_PLUS: frozenset({BeamPolarization.SIGMA_PLUS}),
    PolarizationRequirement.SIGMA_MINUS: frozenset({BeamPolarization.SIGMA_MINUS}),
    PolarizationRequirement.PI_OR_SIGMA: frozenset(
        {BeamPolarization.PI, BeamPolarization.SIGMA_PLUS, BeamPolarization.SIGMA_MINUS}
    ),
    PolarizationRequirement.SIGMA_PLUS_OR_MINUS: frozenset(
        {BeamPolarization.SIGMA_PLUS, BeamPolarization.SIGMA_MINUS}
    ),
    PolarizationRequirement.SIGMA_COMBINATIONS: frozenset(
        {BeamPolarization.SIGMA_SUM, BeamPolarization.SIGMA_DIFF}
    ),
    PolarizationRequirement.ANY: frozenset(BeamPolarization),
}

# labels that mean a single pure circular polarization (rule R1)
_PURE_CIRCULAR = frozenset({BeamPolarization.SIGMA_PLUS, BeamPolarization.SIGMA_MINUS})


class TargetIon(enum.Enum):
    BE9 = "be9"
    MG24 = "mg24"


class RamanDetuning(enum.Enum):
    HYPERFINE_MINUS_MOTIONAL = "hyperfine_minus_motional"  # qubit splitting' - trap freq
    HYPERFINE = "hyperfine"
    SQRT3_MOTIONAL_PLUS_DELTA = "sqrt3_motional_plus_delta"
    NONE = "none"


class MomentumDiff(enum.Enum):
    LARGE_DK = "large_dk"
    SMALL_DK = "small_dk"
    NONE = "none"


# canonical zone kinds; "all_gate_regions" in a row expands to the gate kinds
GATE_ZONE_KINDS = frozenset(
    {"gate_region", "single_qubit_gate_region", "two_qubit_gate_region"}
)
ZONE_KINDS = GATE_ZONE_KINDS | frozenset(
    {"measurement_region", "be_loading_zone", "mg_loading_zone"}
)

_ZONE_ALIASES = {
    "be9_loading_zone": "be_loading_zone",
    "9be_loading_zone": "be_loading_zone",
    "mg24_loading_zone": "mg_loading_zone",
    "24mg_loading_zone": "mg_loading_zone",
}


def zone_kind(zone: str) -> str:
    """Normalize a free-form zone name onto a canonical zone kind.

    Lowercases, maps separators to underscores, strips a trailing
    numeric instance suffix (``measurement_region_3``), singularizes a
    trailing ``regions``/``zones``. Raises ValueError for unknown kinds.
    """
    raw = zone
    s = "".join(ch if ch.isalnum() else "_" for ch in zone.strip().lower())
    parts = [p for p in s.split("_") if p]
    if parts and parts[-1].isdigit():
        parts = parts[:-1]
    if parts and parts[-1] in ("regions", "zones"):
        parts[-1] = parts[-1][:-1]
    kind = "_".join(parts)
    kind = _ZONE_ALIASES.get(kind, kind)
    if kind not in ZONE_KINDS:
        raise ValueError(f"unknown zone kind {raw!r} (normalized {kind!r})")
    return kind


@dataclass(frozen=True)
class BeamRequirement:
    function: BeamFunction
    polarization: PolarizationRequirement
    target_ion: TargetIon
    raman_detuning: RamanDetuning
    momentum_diff: MomentumDiff
    intensity: IntensityClass
    locations: frozenset[str]  # zone kinds or the "all_gate_regions" group

    def allowed_zone_kinds(self) -> frozenset[str]:
        kinds: set[str] = set()
        for loc in self.locations:
            if loc == "all_gate_regions":
                kinds |= GATE_ZONE_KINDS
            else:
                kinds.add(loc)
        return frozenset(kinds)

    def to_dict(self) -> dict:
        return {
            "function": self.function.value,
            "polarization": self.polarization.value,
            "target_ion": self.target_ion.value,
            "raman_detuning": self.raman_detuning.value,
            "momentum_diff": self.momentum_diff.value,
            "intensity": self.intensity.value,
            "locations": sorted(self.locations),
        }


def canonical_table() -> tuple[BeamRequirement, ...]:
    """The eight-row beam requirement table."""
    F, P, T = BeamFunction, PolarizationRequirement, TargetIon
    D, M, I = RamanDetuning, MomentumDiff, IntensityClass
    fz = frozenset
    return (
        BeamRequirement(F.RSRC, P.PI_OR_SIGMA, T.MG24, D.HYPERFINE_MINUS_MOTIONAL,
                        M.LARGE_DK, I.MODEST, fz({"all_gate_regions"})),
        BeamRequirement(F.REPUMPING, P.SIGMA_PLUS_OR_MINUS, T.MG24, D.NONE,
                        M.NONE, I.MILD, fz({"all_gate_regions"})),
        BeamRequirement(F.SINGLE_QUBIT, P.PI_OR_SIGMA, T.BE9, D.HYPERFINE,
                        M.SMALL_DK, I.MODEST, fz({"single_qubit_gate_region"})),
        BeamRequirement(F.TWO_QUBIT, P.SIGMA_COMBINATIONS, T.BE9, D.SQRT3_MOTIONAL_PLUS_DELTA,
                        M.LARGE_DK, I.EXTREME, fz({"two_qubit_gate_region"})),
        BeamRequirement(F.MEASUREMENT, P.SIGMA_MINUS, T.BE9, D.NONE,
                        M.NONE, I.MODEST, fz({"measurement_region"})),
        BeamRequirement(F.DOPPLER_BE, P.SIGMA_MINUS, T.BE9, D.NONE,
                        M.NONE, I.MILD, fz({"be_loading_zone", "measurement_region"})),
        BeamRequirement(F.DEPOPULATION_BE, P.SIGMA_MINUS, T.BE9, D.NONE,
                        M.NONE, I.MILD, fz({"be_loading_zone", "measurement_region"})),
        BeamRequirement(F.DOPPLER_MG, P.ANY, T.MG24, D.NONE,
                        M.NONE, I.MILD, fz({"mg_loading_zone"})),
    )


_TABLE_BY_FUNCTION = {row.function: row for row in canonical_table()}


@dataclass(frozen=True)
class LayoutBeam:
    function: BeamFunction
    propagation: tuple[float, float, float]  # unit vector, chip frame
    polarization: BeamPolarization
    intensity: IntensityClass
    zone: str

    @property
    def zone_kind(self) -> str:
        return zone_kind(self.zone)


class Scheme(enum.Enum):
    A = "A"  # B field 45 deg to the trap axis
    B = "B"  # B field parallel to the trap axis


@dataclass(frozen=True)
class BeamLayoutDoc:
    scheme: Scheme
    b_field: tuple[float, float, float]  # unit vector, chip frame
    beams: tuple[LayoutBeam, ...]
    relay: dict | None = None

    @property
    def b_field_axis_angle_deg(self) -> float:
        """Angle between the B-field axis and the trap axis, folded to [0, 90]."""
        angle = math.degrees(math.acos(max(-1.0, min(1.0, self.b_field[0]))))
        return min(angle, 180.0 - angle)


@dataclass(frozen=True)
class Violation:
    rule: str
    message: str

    def __str__(self) -> str:
        return f"{self.rule}: {self.message}"


def _parse_vector(raw: object, what: str) -> tuple[float, float, float]:
    if not isinstance(raw, (list, tuple)) or len(raw) != 3:
        raise ValueError(f"{what} must be a 3-vector, got {raw!r}")
    try:
        v = tuple(float(x) for x in raw)
    except (TypeError, ValueError):
        raise ValueError(f"{what} must contain numbers, got {raw!r}") from None
    if any(not math.isfinite(x) for x in v):
        raise ValueError(f"{what} must be finite, got {raw!r}")
    return v  # type: ignore[return-value]


def _parse_enum(cls, raw: object, what: str):
    try:
        return cls(raw)
    except ValueError:
        valid = ", ".join(m.value for m in cls)
        raise ValueError(f"unknown {what} {raw!r}; expected one of: {valid}") from None


def load_layout(source: str | pathlib.Path | dict) -> BeamLayoutDoc:
    """Parse a layout document from a JSON file path or a dict.

    Structural problems (bad enums, non-unit propagation vectors, zero
    B field, unknown zone kinds) raise ValueError; rule violations are
    the job of `validate`.
    """
    if isinstance(source, (str, pathlib.Path)):
        with open(source, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    else:
        doc = source
    if not isinstance(doc, dict):
        raise ValueError("layout document must be a JSON object")
    scheme = _parse_enum(Scheme, doc.get("scheme"), "scheme")
    b = _parse_vector(doc.get("b_field"), "b_field")
    norm = math.sqrt(sum(x * x for x in b))
    if norm == 0.0:
        raise ValueError("b_field must be a non-zero vector")
    b = (b[0] / norm, b[1] / norm, b[2] / norm)
    raw_beams = doc.get("beams")
    if not isinstance(raw_beams, list) or not raw_beams:
        raise ValueError("layout document needs a non-empty 'beams' list")
    beams = []
    for i, item in enumerate(raw_beams):
        if not isinstance(item, dict):
            raise ValueError(f"beam {i} must be an object")
        prop = _parse_vector(item.get("propagation"), f"beam {i} propagation")
        pnorm = math.sqrt(sum(x * x for x in prop))
        if abs(pnorm - 1.0) > _UNIT_NORM_TOL:
            raise ValueError(
                f"beam {i} propagation vector must be unit length to "
                f"{_UNIT_NORM_TOL:g} (norm {pnorm!r}); normalize it in the document"
            )
        beam = LayoutBeam(
            function=_parse_enum(BeamFunction, item.get("function"), f"beam {i} function"),
            propagation=prop,
            polarization=_parse_enum(
                BeamPolarization, item.get("polarization"), f"beam {i} polarization"
            ),
            intensity=_parse_enum(
                IntensityClass, item.get("intensity"), f"beam {i} intensity"
            ),
            zone=str(item.get("zone", "")),
        )
        beam.zone_kind  # force zone normalization; unknown kinds are parse errors
        beams.append(beam)
    relay = doc.get("relay")
    if relay is not None and not isinstance(relay, dict):
        raise ValueError("'relay' section must be an object")
    return BeamLayoutDoc(scheme=scheme, b_field=b, beams=tuple(beams), relay=relay)


def _angle_deg(u: tuple[float, float, float], v: tuple[float, float, float]) -> float:
    dot = sum(a * b for a, b in zip(u, v))
    return math.degrees(math.acos(max(-1.0, min(1.0, dot))))


def _axis_angle_deg(u, v) -> float:
    """Angle between the axes spanned by u and v, in [0, 90]."""
    angle = _angle_deg(u, v)
    return min(angle, 180.0 - angle)


_SCHEME_ANGLES = {Scheme.A: 45.0, Scheme.B: 0.0}
_RAMAN_FUNCTIONS = tuple(
    row.function for row in canonical_table() if row.momentum_diff is not MomentumDiff.NONE
)


def validate(doc: BeamLayoutDoc, tol_deg: float = 1.0) -> list[Violation]:
    """Check a parsed layout document against rules R1-R5.

    Returns an empty list when the layout is consistent. Violation
    messages identify beams by function and zone (not list position),
    so permuting the beam list permutes the violations only.
    """
    if tol_deg < 0.0:
        raise ValueError(f"tolerance must be non-negative, got {tol_deg!r}")
    violations: list[Violation] = []

    # R2: B field in the chip plane (z is the chip normal)
    out_of_plane = abs(math.degrees(math.asin(max(-1.0, min(1.0, doc.b_field[2])))))
    if out_of_plane > tol_deg:
        violations.append(
            Violation("R2", f"B field must lie in the chip plane; out-of-plane angle "
                            f"{out_of_plane:.2f} deg exceeds {tol_deg:g} deg")
        )

    # R3: scheme angle between B axis and trap axis
    want = _SCHEME_ANGLES[doc.scheme]
    got = doc.b_field_axis_angle_deg
    if abs(got - want) > tol_deg:
        violations.append(
            Violation("R3", f"scheme {doc.scheme.value} requires the B axis at "
                            f"{want:g} deg to the trap axis, got {got:.2f} deg")
        )

    # R1 and R4 are per-beam
    for beam in doc.beams:
        label = f"{beam.function.value} beam in {beam.zone}"
        if beam.polarization in _PURE_CIRCULAR:
            angle = _axis_angle_deg(beam.propagation, doc.b_field)
            if angle > tol_deg:
                violations.append(
                    Violation("R1", f"{label}: {beam.polarization.value} polarization "
                                    f"requires propagation along the B-field axis, "
                                    f"off by {angle:.2f} deg")
                )
        row = _TABLE_BY_FUNCTION[beam.function]
        if beam.polarization not in row.polarization.allowed_labels:
            allowed = ", ".join(sorted(p.value for p in row.polarization.allowed_labels))
            violations.append(
                Violation("R4", f"{label}: polarization {beam.polarization.value!r} "
                                f"not allowed for this function (expected {allowed})")
            )
        if beam.intensity is not row.intensity:
            violations.append(
                Violation("R4", f"{label}: intensity {beam.intensity.value!r} does not "
                                f"match the required {row.intensity.value!r}")
            )
        if beam.zone_kind not in row.allowed_zone_kinds():
            allowed = ", ".join(sorted(row.allowed_zone_kinds()))
            violations.append(
                Violation("R4", f"{label}: zone kind {beam.zone_kind!r} not listed for "
                                f"this function (expected {allowed})")
            )

    # R5: Raman pair geometry per (function, zone)
    groups: dict[tuple[BeamFunction, str], list[LayoutBeam]] = {}
    for beam in doc.beams:
        if beam.function in _RAMAN_FUNCTIONS:
            groups.setdefault((beam.function, beam.zone), []).append(beam)
    for (function, zone), members in sorted(
        groups.items(), key=lambda kv: (kv[0][0].value, kv[0][1])
    ):
        label = f"{function.value} pair in {zone}"
        if len(members) != 2:
            violations.append(
                Violation("R5", f"{label}: needs exactly 2 beams, found {len(members)}")
            )
            continue
        angle = _angle_deg(members[0].propagation, members[1].propagation)
        momentum = _TABLE_BY_FUNCTION[function].momentum_diff
        if momentum is MomentumDiff.LARGE_DK:
            ok = (abs(angle - 180.0) <= tol_deg) or (abs(angle - 90.0) <= tol_deg)
            if not ok:
                violations.append(
                    Violation("R5", f"{label}: large momentum difference needs "
                                    f"counter-propagating or orthogonal beams, "
                                    f"got {angle:.2f} deg")
                )
        elif momentum is MomentumDiff.SMALL_DK:
            if angle > tol_deg:
                violations.append(
                    Violation("R5", f"{label}: small momentum difference needs "
                                    f"co-propagating beams, got {angle:.2f} deg")
                )
    return violations
