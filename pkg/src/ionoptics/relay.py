"""Counter-propagating beam recycling chains.

A pair of beams (called red and blue here) is reused across several
interaction zones by retro-reflecting optics at both ends of the chip:
micromirror/microlens pairs or prisms with microlenses. Every
retro-reflection multiplies the recycled field by an amplitude
coefficient r_i, so later zones see attenuated fields.

Bookkeeping convention: the red beam consumes the right-side elements in
order, the blue beam the left-side elements, and the pair alternates
starting with the red beam. Zone k therefore sees the product
E_r * E_b * prod(first k coefficients of that interleaved order), with
ceil(k/2) of them on the red field and floor(k/2) on the blue field.
A lossless chain (all r_i = 1) keeps the product constant across zones.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field


class ElementKind(enum.Enum):
    MICROLENS_MIRROR = "microlens_mirror"
    PRISM_FACET = "prism_facet"


@dataclass(frozen=True)
class RelayElement:
    """One retro-reflection: kind, amplitude coefficient r (0 < r <= 1),
    and the focal length (m) of its imaging lens (None if not modeled)."""

    kind: ElementKind
    r: float
    focal_length: float | None = None

    def __post_init__(self) -> None:
        if not (0.0 < self.r <= 1.0):
            raise ValueError(f"amplitude coefficient must be in (0, 1], got {self.r!r}")
        if self.focal_length is not None and not (
            self.focal_length > 0.0 and math.isfinite(self.focal_length)
        ):
            raise ValueError(f"focal length must be positive, got {self.focal_length!r}")


@dataclass(frozen=True)
class RelayChain:
    """Chip of width `chip_width` (m) with retro-reflecting elements on
    both sides and entry field amplitudes for the two beams.

    `lens_centers_*` are element positions as fractions of the chip
    width; when present they must be strictly increasing within [0, 1].
    `zone_offset_fraction` is the zone-to-zone spacing as a fraction of
    the chip width (None when the chain does not model geometry).
    """

    chip_width: float
    entry_field_red: float = 1.0
    entry_field_blue: float = 1.0
    elements_right: tuple[RelayElement, ...] = ()
    elements_left: tuple[RelayElement, ...] = ()
    lens_centers_right: tuple[float, ...] | None = None
    lens_centers_left: tuple[float, ...] | None = None
    zone_offset_fraction: float | None = None

    def __post_init__(self) -> None:
        if not (self.chip_width > 0.0 and math.isfinite(self.chip_width)):
            raise ValueError(f"chip width must be positive, got {self.chip_width!r}")
        for name in ("entry_field_red", "entry_field_blue"):
            value = getattr(self, name)
            if not (value > 0.0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive, got {value!r}")
        for name, centers, elements in (
            ("lens_centers_right", self.lens_centers_right, self.elements_right),
            ("lens_centers_left", self.lens_centers_left, self.elements_left),
        ):
            if centers is None:
                continue
            if len(centers) != len(elements):
                raise ValueError(f"{name} must match its element list length")
            if any(not (0.0 <= c <= 1.0) for c in centers):
                raise ValueError(f"{name} must lie within [0, 1], got {centers!r}")
            if any(a >= b for a, b in zip(centers, centers[1:])):
                raise ValueError(f"{name} must be strictly increasing, got {centers!r}")
        if self.zone_offset_fraction is not None and not (0.0 < self.zone_offset_fraction < 1.0):
            raise ValueError(
                f"zone offset fraction must be in (0, 1), got {self.zone_offset_fraction!r}"
            )

    @property
    def n_zones(self) -> int:
        return len(self.elements_right) + len(self.elements_left) + 1

    def consumption_order(self) -> tuple[tuple[str, RelayElement], ...]:
        """(side, element) pairs in the order the pair consumes them,
        alternating sides starting from the right."""
        order: list[tuple[str, RelayElement]] = []
        for i in range(max(len(self.elements_right), len(self.elements_left))):
            if i < len(self.elements_right):
                order.append(("right", self.elements_right[i]))
            if i < len(self.elements_left):
                order.append(("left", self.elements_left[i]))
        return tuple(order)


@dataclass(frozen=True)
class ZoneReport:
    zone_index: int
    position: float           # fraction of chip width
    e_r_local: float
    e_b_local: float
    product: float
    product_deviation: float  # relative to the zone with max product

    def __post_init__(self) -> None:
        if self.product_deviation < 0.0:
            raise ValueError("product deviation must be non-negative")


@dataclass(frozen=True)
class UniformityResult:
    passed: bool
    max_deviation: float
    worst_zone: int


def prism_zone_positions(
    chip_width: float, n_lenses_per_prism: int, offset_fraction: float
) -> tuple[float, ...]:
    """Interaction-zone centers (m) for a two-prism recycling chain.

    Each prism carries `n_lenses_per_prism` microlenses, giving
    2*n + 1 zones spaced `offset_fraction` of the chip width apart and
    centered on the chip. Raises if the zones would extend past the
    chip or the lens rows would overlap.
    """
    if not (chip_width > 0.0 and math.isfinite(chip_width)):
        raise ValueError(f"chip width must be positive, got {chip_width!r}")
    if n_lenses_per_prism < 1 or int(n_lenses_per_prism) != n_lenses_per_prism:
        raise ValueError(f"need at least one lens per prism, got {n_lenses_per_prism!r}")
    if not (0.0 < offset_fraction < 1.0):
        raise ValueError(f"offset fraction must be in (0, 1), got {offset_fraction!r}")
    n_zones = 2 * int(n_lenses_per_prism) + 1
    span = (n_zones - 1) * offset_fraction
    if span > 1.0 + 1e-12:
        raise ValueError(
            f"{n_zones} zones at spacing {offset_fraction} span {span:.3f} of the "
            "chip width; zones would fall off the chip"
        )
    mid = (n_zones - 1) / 2.0
    return tuple((0.5 + (k - mid) * offset_fraction) * chip_width for k in range(n_zones))


def canonical_prism_chain(
    chip_width: float = 0.010,
    n_lenses_per_prism: int = 2,
    offset_fraction: float = 0.2,
    r_right: float = 1.0,
    r_left: float = 1.0,
    entry_field_red: float = 1.0,
    entry_field_blue: float = 1.0,
) -> RelayChain:
    """Two-prism chain with interleaved lens rows and f = chip_width/2.

    Defaults give the five-zone arrangement: four lenses at fractions
    {0.2, 0.4, 0.6, 0.8} (two per prism, alternating sides) and zones
    spaced 0.2 of the chip width, centered.
    """
    n = int(n_lenses_per_prism)
    # joint lens row: 2n lenses centered on the chip, spacing = offset
    joint = [0.5 + (i - (2 * n - 1) / 2.0) * offset_fraction for i in range(2 * n)]
    if joint[0] < 0.0 or joint[-1] > 1.0:
        raise ValueError("lens row extends past the chip")
    focal = chip_width / 2.0
    right = tuple(
        RelayElement(ElementKind.PRISM_FACET, r_right, focal) for _ in range(n)
    )
    left = tuple(RelayElement(ElementKind.PRISM_FACET, r_left, focal) for _ in range(n))
    return RelayChain(
        chip_width=chip_width,
        entry_field_red=entry_field_red,
        entry_field_blue=entry_field_blue,
        elements_right=right,
        elements_left=left,
        lens_centers_right=tuple(joint[0::2]),
        lens_centers_left=tuple(joint[1::2]),
        zone_offset_fraction=offset_fraction,
    )


def imaging_condition_ok(
    focal_length: float, d_zone_lens: float, d_lens_mirror: float, tol: float = 0.01
) -> bool:
    """True iff both relay distances match the lens focal length.

    The waist-to-waist relay re-images each zone onto the next when the
    zone-to-lens and lens-to-mirror distances both equal f (unfolded:
    a two-lens 4f unit-magnification relay). Allows a relative
    tolerance `tol` on each distance.
    """
    if not (focal_length > 0.0 and d_zone_lens > 0.0 and d_lens_mirror > 0.0):
        raise ValueError("focal length and distances must be positive")
    if tol < 0.0:
        raise ValueError(f"tolerance must be non-negative, got {tol!r}")
    return (
        abs(d_zone_lens - focal_length) <= tol * focal_length
        and abs(d_lens_mirror - focal_length) <= tol * focal_length
    )


def propagate_fields(chain: RelayChain) -> list[ZoneReport]:
    """Per-zone field amplitudes and products.

    Zone k's red field carries the right-side coefficients consumed
    before the pair reaches zone k, the blue field the left-side ones;
    the product is the cumulative prefix product over the interleaved
    consumption order. An element-free chain yields the single
    passthrough zone.
    """
    order = chain.consumption_order()
    n_zones = chain.n_zones
    positions = _zone_position_fractions(chain, n_zones)
    reports: list[ZoneReport] = []
    e_r = chain.entry_field_red
    e_b = chain.entry_field_blue
    raw: list[tuple[float, float]] = []
    for k in range(n_zones):
        raw.append((e_r, e_b))
        if k < len(order):
            side, element = order[k]
            # the red beam owns the right-side elements, blue the left
            if side == "right":
                e_r *= element.r
            else:
                e_b *= element.r
    max_product = max(er * eb for er, eb in raw)
    for k, (er, eb) in enumerate(raw):
        product = er * eb
        deviation = 0.0 if max_product == 0.0 else (max_product - product) / max_product
        reports.append(
            ZoneReport(
                zone_index=k,
                position=positions[k],
                e_r_local=er,
                e_b_local=eb,
                product=product,
                product_deviation=deviation,
            )
        )
    return reports


def _zone_position_fractions(chain: RelayChain, n_zones: int) -> list[float]:
    if n_zones == 1:
        return [0.5]
    if chain.zone_offset_fraction is not None:
        mid = (n_zones - 1) / 2.0
        return [0.5 + (k - mid) * chain.zone_offset_fraction for k in range(n_zones)]
    return [k / (n_zones - 1) for k in range(n_zones)]


def product_uniformity_check(
    reports: list[ZoneReport], tol: float = 0.01
) -> UniformityResult:
    """Pass iff every zone's product deviation stays within `tol`.

    Deviation baseline is the zone with the largest product (the first
    zone for any chain with r_i <= 1). Default tolerance is the 1%
    uniformity requirement for gate-beam intensities.
    """
    if not reports:
        raise ValueError("need at least one zone report")
    if tol < 0.0:
        raise ValueError(f"tolerance must be non-negative, got {tol!r}")
    worst = max(reports, key=lambda rep: rep.product_deviation)
    return UniformityResult(
        passed=worst.product_deviation <= tol,
        max_deviation=worst.product_deviation,
        worst_zone=worst.zone_index,
    )


_KINDS = {kind.value: kind for kind in ElementKind}


def _elements_from_json(items: object, side: str) -> tuple[RelayElement, ...]:
    if not isinstance(items, list):
        raise ValueError(f"relay {side} elements must be a list")
    elements = []
    for i, item in enumerate(items):
        if isinstance(item, dict):
            kind = item.get("kind", ElementKind.PRISM_FACET.value)
            if kind not in _KINDS:
                raise ValueError(f"unknown relay element kind {kind!r} at {side}[{i}]")
            if "r" not in item:
                raise ValueError(f"relay element {side}[{i}] missing coefficient 'r'")
            elements.append(
                RelayElement(_KINDS[kind], float(item["r"]), item.get("focal_length_m"))
            )
        else:
            raise ValueError(f"relay element {side}[{i}] must be an object")
    return tuple(elements)


def chain_from_dict(doc: dict) -> RelayChain:
    """Build a chain from the `relay` section of a layout document.

    Expected keys: chip_width_m, entry_field_red, entry_field_blue,
    elements_right, elements_left (lists of {kind, r, focal_length_m}),
    optional lens_centers_right/left and zone_offset_fraction.
    """
    if not isinstance(doc, dict):
        raise ValueError("relay section must be an object")
    try:
        chip_width = float(doc["chip_width_m"])
    except KeyError:
        raise ValueError("relay section missing 'chip_width_m'") from None
    centers_r = doc.get("lens_centers_right")
    centers_l = doc.get("lens_centers_left")
    return RelayChain(
        chip_width=chip_width,
        entry_field_red=float(doc.get("entry_field_red", 1.0)),
        entry_field_blue=float(doc.get("entry_field_blue", 1.0)),
        elements_right=_elements_from_json(doc.get("elements_right", []), "right"),
        elements_left=_elements_from_json(doc.get("elements_left", []), "left"),
        lens_centers_right=None if centers_r is None else tuple(float(c) for c in centers_r),
        lens_centers_left=None if centers_l is None else tuple(float(c) for c in centers_l),
        zone_offset_fraction=(
            None
            if doc.get("zone_offset_fraction") is None
            else float(doc["zone_offset_fraction"])
        ),
    )
