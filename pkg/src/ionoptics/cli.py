"""Command-line front end.

Subcommands mirror the library modules:

    beam waist|clip        waist sizing and chip-edge clipping
    relay check            beam-recycling zone products and uniformity
    detect snr|ber|mintime detector signal/noise and state discrimination
    cavity report|fig7b    microcavity coupling figures and length sweep
    layout validate        beam-layout rule checking
    entangle rate|scale    entanglement-generation rate arithmetic

Every subcommand accepts `--format json|csv`, `--out FILE`, and
`--seed N`. Output is deterministic: identical arguments (including the
seed) produce byte-identical bytes. Exit codes: 0 success, 1 failed
check or invalid input data, 2 usage error.

CSV outputs start with a `# schema: ionoptics.<name>.v1` comment line
followed by a header row; JSON output has sorted keys.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

from . import cavity as cav
from . import detection as det
from . import entangle as ent
from . import gaussian as gau
from . import layout as lay
from . import relay as rel


# ---------------------------------------------------------------- output

def _json_text(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _csv_text(schema: str, header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    buf.write(f"# schema: ionoptics.{schema}.v1\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _rows_from_docs(docs: list[dict]) -> tuple[list[str], list[list]]:
    header = list(docs[0].keys())
    return header, [[doc[key] for key in header] for doc in docs]


def _render(args, schema: str, docs: list[dict], single: bool) -> str:
    """Render one or many records in the requested format."""
    if args.format == "json":
        return _json_text(docs[0] if single and len(docs) == 1 else docs)
    header, rows = _rows_from_docs(docs)
    return _csv_text(schema, header, rows)


# ---------------------------------------------------------------- beam

def _cmd_beam_waist(args) -> tuple[str, int]:
    chip = args.chip_mm * 1e-3
    lam = args.lambda_nm * 1e-9
    w0 = args.waist_um * 1e-6 if args.waist_um is not None else gau.optimal_waist(chip, lam)
    beam = gau.GaussianBeam(w0=w0, wavelength=lam)
    doc = {
        "chip_mm": args.chip_mm,
        "lambda_nm": args.lambda_nm,
        "w0_um": w0 * 1e6,
        "w_edge_um": gau.beam_radius(beam, 0.5 * chip) * 1e6,
        "rayleigh_range_um": beam.rayleigh_range * 1e6,
    }
    return _render(args, "beam_waist", [doc], single=True), 0


def _cmd_beam_clip(args) -> tuple[str, int]:
    chip = args.chip_mm * 1e-3
    lam = args.lambda_nm * 1e-9
    w0 = args.waist_um * 1e-6 if args.waist_um is not None else gau.optimal_waist(chip, lam)
    beam = gau.GaussianBeam(w0=w0, wavelength=lam)
    geometry = gau.ChipGeometry(width=chip, ion_height=args.ion_height_um * 1e-6)
    clip = gau.clipping_fraction(beam, geometry)
    feasible = clip <= args.max_clip
    doc = {
        "chip_mm": args.chip_mm,
        "lambda_nm": args.lambda_nm,
        "ion_height_um": args.ion_height_um,
        "w0_um": w0 * 1e6,
        "w_edge_um": gau.beam_radius(beam, 0.5 * chip) * 1e6,
        "clip_fraction": clip,
        "max_clip": args.max_clip,
        "feasible": feasible,
    }
    return _render(args, "beam_clip", [doc], single=True), 0 if feasible else 1


# ---------------------------------------------------------------- relay

def _cmd_relay_check(args) -> tuple[str, int]:
    if args.layout:
        with open(args.layout, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        section = doc.get("relay") if isinstance(doc, dict) else None
        if section is None:
            raise ValueError(f"{args.layout} has no 'relay' section")
        chain = rel.chain_from_dict(section)
    else:
        chain = rel.canonical_prism_chain(
            chip_width=args.chip_mm * 1e-3,
            n_lenses_per_prism=args.n_lenses,
            offset_fraction=args.offset,
            r_right=args.r,
            r_left=args.r,
        )
    reports = rel.propagate_fields(chain)
    tol = args.tol_percent / 100.0
    uniformity = rel.product_uniformity_check(reports, tol=tol)
    if args.format == "json":
        doc = {
            "n_zones": chain.n_zones,
            "tolerance": tol,
            "uniform": uniformity.passed,
            "max_deviation": uniformity.max_deviation,
            "worst_zone": uniformity.worst_zone,
            "zones": [
                {
                    "zone_index": z.zone_index,
                    "position_fraction": z.position,
                    "position_m": z.position * chain.chip_width,
                    "e_r": z.e_r_local,
                    "e_b": z.e_b_local,
                    "product": z.product,
                    "deviation": z.product_deviation,
                }
                for z in reports
            ],
        }
        text = _json_text(doc)
    else:
        header = ["zone_index", "position_fraction", "position_m",
                  "e_r", "e_b", "product", "deviation"]
        rows = [[z.zone_index, z.position, z.position * chain.chip_width,
                 z.e_r_local, z.e_b_local, z.product, z.product_deviation]
                for z in reports]
        text = _csv_text("relay_zones", header, rows)
    return text, 0 if uniformity.passed else 1


# ---------------------------------------------------------------- detect

@dataclass(frozen=True)
class SweepSpec:
    """Parsed `start:stop:points[:scale]` sweep request."""

    variable: str
    scale: str
    start: float
    stop: float
    points: int

    def __post_init__(self):
        if self.scale not in ("linear", "log"):
            raise ValueError(f"sweep scale must be linear or log, got {self.scale!r}")
        if not self.start < self.stop:
            raise ValueError(f"sweep needs start < stop, got "
                             f"{self.start!r}..{self.stop!r}")
        if self.points < 2:
            raise ValueError(f"sweep needs at least 2 points, got {self.points!r}")
        if self.scale == "log" and not self.start > 0.0:
            raise ValueError("log sweep needs start > 0")

    def values(self) -> list[float]:
        n = self.points
        if self.scale == "linear":
            return [self.start + (self.stop - self.start) * i / (n - 1) for i in range(n)]
        ratio = math.log(self.stop / self.start)
        return [self.start * math.exp(ratio * i / (n - 1)) for i in range(n)]


def _parse_sweep(text: str, variable: str) -> SweepSpec:
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise ValueError(f"sweep must be START:STOP:POINTS[:log|linear], got {text!r}")
    scale = parts[3] if len(parts) == 4 else "log"
    try:
        start, stop, points = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ValueError(f"bad sweep numbers in {text!r}") from None
    return SweepSpec(variable=variable, scale=scale, start=start,
                     stop=stop, points=points)


def _detector_table(args) -> dict[str, det.DetectorModel]:
    return det.load_detectors(args.detectors)


def _pick_detectors(args) -> list[det.DetectorModel]:
    table = _detector_table(args)
    name = args.preset.lower()
    if name == "all":
        return list(table.values())
    if name not in table:
        known = ", ".join(sorted(table))
        raise ValueError(f"unknown detector preset {args.preset!r}; known: {known}")
    return [table[name]]


def _scenario(args, t_m_s: float) -> det.MeasurementScenario:
    return det.MeasurementScenario(
        flux_bright=args.flux, t_m=t_m_s,
        flux_dark=args.dark_flux, temperature_k=args.temp_k,
    )


def _detect_rows(args, detectors, times_s) -> list[dict]:
    rows = []
    for model in detectors:
        for t in times_s:
            result = det.ber_analytic(model, _scenario(args, t))
            rows.append({
                "t_m_s": t,
                "detector": model.name,
                "snr": result.snr,
                "ber": result.ber,
                "threshold_e": result.threshold_e,
            })
    return rows


def _detect_times(args) -> tuple[list[float], bool]:
    if args.sweep_tm_us:
        spec = _parse_sweep(args.sweep_tm_us, "tm_us")
        return [v * 1e-6 for v in spec.values()], True
    if args.tm_us is None:
        raise ValueError("give --tm-us or --sweep-tm-us")
    return [args.tm_us * 1e-6], False


def _cmd_detect_snr(args) -> tuple[str, int]:
    detectors = _pick_detectors(args)
    times, sweeping = _detect_times(args)
    if sweeping or len(detectors) > 1 or args.format == "csv":
        rows = _detect_rows(args, detectors, times)
        return _render(args, "detect", rows, single=False), 0
    model = detectors[0]
    s, n = det.signal_and_noise_electrons(model, _scenario(args, times[0]))
    doc = {
        "detector": model.name,
        "t_m_s": times[0],
        "snr": s / n,
        "signal_electrons": s,
        "noise_electrons": n,
    }
    return _json_text(doc), 0


def _cmd_detect_ber(args) -> tuple[str, int]:
    detectors = _pick_detectors(args)
    times, sweeping = _detect_times(args)
    if sweeping or len(detectors) > 1 or args.format == "csv":
        rows = _detect_rows(args, detectors, times)
        return _render(args, "detect", rows, single=False), 0
    model = detectors[0]
    result = det.ber_analytic(model, _scenario(args, times[0]))
    doc = {
        "detector": model.name,
        "t_m_s": times[0],
        "ber": result.ber,
        "snr": result.snr,
        "threshold_e": result.threshold_e,
    }
    if args.mc:
        mc = det.ber_monte_carlo(model, _scenario(args, times[0]),
                                 result.threshold_e, trials=args.trials,
                                 seed=args.seed)
        doc.update({
            "mc_ber": mc.ber, "mc_ci_low": mc.ci_low, "mc_ci_high": mc.ci_high,
            "trials": mc.trials, "seed": args.seed,
        })
    return _json_text(doc), 0


def _cmd_detect_mintime(args) -> tuple[str, int]:
    detectors = _pick_detectors(args)
    docs = []
    for model in detectors:
        t = det.min_integration_time(model, args.flux, args.dark_flux,
                                     args.temp_k, args.target_ber)
        doc = {"detector": model.name, "target_ber": args.target_ber}
        if t is None:
            doc["unreachable"] = True
        else:
            doc["min_time_s"] = t
        docs.append(doc)
    if args.format == "csv":
        rows = [{"detector": d["detector"], "target_ber": d["target_ber"],
                 "min_time_s": d.get("min_time_s", ""),
                 "unreachable": d.get("unreachable", False)} for d in docs]
        return _render(args, "detect_mintime", rows, single=False), 0
    return _json_text(docs[0] if len(docs) == 1 else docs), 0


# ---------------------------------------------------------------- cavity

def _cavity_transition(args) -> cav.AtomicTransition:
    return cav.AtomicTransition(wavelength_m=args.lambda_nm * 1e-9,
                                linewidth_hz=args.linewidth_mhz * 1e6)


def _cmd_cavity_report(args) -> tuple[str, int]:
    transition = _cavity_transition(args)
    w0 = args.w0_um * 1e-6
    lam = transition.wavelength_m
    z_r = gau.GaussianBeam(w0=w0, wavelength=lam).rayleigh_range
    if args.d_um is not None:
        length = args.d_um * 1e-6
    else:
        length = args.d_over_zr * z_r
    design = cav.CavityDesign.from_length(
        w0, length, lam, r_m=args.rm, r_f=args.rf,
        roughness_sigma_m=args.sigma_nm * 1e-9,
    )
    report = cav.coupling_report(transition, design, z_ion_m=args.z_ion_um * 1e-6)
    doc = {
        "w0_um": args.w0_um,
        "lambda_nm": args.lambda_nm,
        "d_um": length * 1e6,
        "d_over_zr": length / z_r,
        "z_r_um": z_r * 1e6,
        "roc_um": design.roc_m * 1e6,
        "finesse": report.finesse,
        "kappa_rad_s": report.kappa,
        "gamma_rad_s": report.gamma,
        "g0_rad_s": report.g0,
        "g0_over_gamma": report.g0_over_gamma,
        "g0_over_kappa": report.g0_over_kappa,
        "c1": report.c1,
        "f_cap": report.f_cap,
        "scattering_loss": cav.scattering_loss(design.roughness_sigma_m, lam),
        "max_scatter_rate_hz": cav.max_scatter_rate(transition),
    }
    return _render(args, "cavity_report", [doc], single=True), 0


def _cmd_cavity_fig7b(args) -> tuple[str, int]:
    transition = _cavity_transition(args)
    grid = cav.length_sweep_grid(args.min_dzr, args.max_dzr, args.points)
    rows = cav.coupling_sweep(transition, waist_m=args.w0_um * 1e-6,
                              d_over_zr_grid=grid)
    header = cav.sweep_column_names()
    docs = []
    for row in rows:
        doc = {header[0]: row.d_over_zr, header[1]: row.g0_over_gamma}
        for name, value in zip(header[2:], row.g0_over_kappa):
            doc[name] = value
        docs.append(doc)
    if args.format == "json":
        return _json_text(docs), 0
    return _csv_text("fig7b", header, [[d[k] for k in header] for d in docs]), 0


# ---------------------------------------------------------------- layout

def _cmd_layout_validate(args) -> tuple[str, int]:
    doc = lay.load_layout(args.file)
    violations = lay.validate(doc, tol_deg=args.tol_deg)
    if args.format == "json":
        text = _json_text({
            "valid": not violations,
            "violations": [{"rule": v.rule, "message": v.message}
                           for v in violations],
        })
    else:
        text = _csv_text("layout", ["rule", "message"],
                         [[v.rule, v.message] for v in violations])
    return text, 0 if not violations else 1


# ---------------------------------------------------------------- entangle

def _cmd_entangle_rate(args) -> tuple[str, int]:
    rate = ent.event_rate(args.p, args.attempt_rate)
    doc = {
        "p_success": args.p,
        "attempt_rate_hz": args.attempt_rate,
        "event_rate_hz": rate,
        "mean_wait_s": (1.0 / rate) if rate > 0.0 else None,
    }
    return _render(args, "entangle_rate", [doc], single=True), 0


def _cmd_entangle_scale(args) -> tuple[str, int]:
    scaled = ent.scaled_success(args.p_base, args.fcap_base, args.fcap_new)
    doc = {
        "p_success": scaled.p_success,
        "saturated": scaled.saturated,
        "improvement_factor": scaled.improvement_factor,
    }
    if args.attempt_rate is not None:
        rate = ent.event_rate(scaled.p_success, args.attempt_rate)
        doc["event_rate_hz"] = rate
        doc["mean_wait_s"] = (1.0 / rate) if rate > 0.0 else None
    return _render(args, "entangle_scale", [doc], single=True), 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json",
                        help="output format (default json)")
    common.add_argument("--out", metavar="FILE", default=None,
                        help="write output to FILE instead of stdout")
    common.add_argument("--seed", type=int, default=0,
                        help="random seed for sampled quantities")

    parser = argparse.ArgumentParser(
        prog="ionoptics",
        description="design calculations for integrated trapped-ion optics",
    )
    groups = parser.add_subparsers(dest="group", required=True)

    beam = groups.add_parser("beam", help="beam sizing and clipping").add_subparsers(
        dest="command", required=True)
    waist = beam.add_parser("waist", parents=[common],
                            help="optimal waist across a chip")
    waist.add_argument("--chip-mm", type=float, required=True)
    waist.add_argument("--lambda-nm", type=float, required=True)
    waist.add_argument("--waist-um", type=float, default=None,
                       help="override the optimal waist")
    waist.set_defaults(handler=_cmd_beam_waist)
    clip = beam.add_parser("clip", parents=[common],
                           help="chip-edge clipping fraction")
    clip.add_argument("--chip-mm", type=float, required=True)
    clip.add_argument("--lambda-nm", type=float, required=True)
    clip.add_argument("--ion-height-um", type=float, required=True)
    clip.add_argument("--waist-um", type=float, default=None)
    clip.add_argument("--max-clip", type=float, default=1e-3)
    clip.set_defaults(handler=_cmd_beam_clip)

    relay = groups.add_parser("relay", help="beam recycling checks").add_subparsers(
        dest="command", required=True)
    check = relay.add_parser("check", parents=[common],
                             help="zone intensity products and uniformity")
    check.add_argument("--layout", metavar="FILE", default=None,
                       help="layout JSON with a relay section")
    check.add_argument("--chip-mm", type=float, default=10.0)
    check.add_argument("--r", type=float, default=0.999,
                       help="reflectance of every recycling element")
    check.add_argument("--n-lenses", type=int, default=2,
                       help="microlenses per prism")
    check.add_argument("--offset", type=float, default=0.2,
                       help="zone spacing as a fraction of chip width")
    check.add_argument("--tol-percent", type=float, default=1.0)
    check.set_defaults(handler=_cmd_relay_check)

    detect = groups.add_parser("detect", help="detector model").add_subparsers(
        dest="command", required=True)

    def detect_common(sub):
        sub.add_argument("--preset", default="uvpc",
                         help="detector preset name or 'all'")
        sub.add_argument("--flux", type=float, default=1e6,
                         help="bright-state photons/s at the detector")
        sub.add_argument("--dark-flux", type=float, default=0.0)
        sub.add_argument("--temp-k", type=float, default=300.0)
        sub.add_argument("--detectors", metavar="FILE", default=None,
                         help="JSON detector table overriding the presets")

    snr_p = detect.add_parser("snr", parents=[common], help="signal-to-noise ratio")
    detect_common(snr_p)
    snr_p.add_argument("--tm-us", type=float, default=None)
    snr_p.add_argument("--sweep-tm-us", metavar="START:STOP:POINTS[:SCALE]",
                       default=None)
    snr_p.set_defaults(handler=_cmd_detect_snr)

    ber_p = detect.add_parser("ber", parents=[common], help="bit error rate")
    detect_common(ber_p)
    ber_p.add_argument("--tm-us", type=float, default=None)
    ber_p.add_argument("--sweep-tm-us", metavar="START:STOP:POINTS[:SCALE]",
                       default=None)
    ber_p.add_argument("--mc", action="store_true",
                       help="add a Monte Carlo check at the analytic threshold")
    ber_p.add_argument("--trials", type=int, default=100_000)
    ber_p.set_defaults(handler=_cmd_detect_ber)

    mint = detect.add_parser("mintime", parents=[common],
                             help="shortest integration time meeting a target error")
    detect_common(mint)
    mint.add_argument("--target-ber", type=float, default=1e-3)
    mint.set_defaults(handler=_cmd_detect_mintime)

    cavity = groups.add_parser("cavity", help="microcavity coupling").add_subparsers(
        dest="command", required=True)

    def cavity_common(sub):
        sub.add_argument("--w0-um", type=float, default=1.5)
        sub.add_argument("--lambda-nm", type=float, default=313.0)
        sub.add_argument("--linewidth-mhz", type=float, default=20.0)

    rep = cavity.add_parser("report", parents=[common],
                            help="coupling figures for one design")
    cavity_common(rep)
    rep.add_argument("--d-over-zr", type=float, default=1.0)
    rep.add_argument("--d-um", type=float, default=None,
                     help="cavity length (overrides --d-over-zr)")
    rep.add_argument("--rf", type=float, default=0.99)
    rep.add_argument("--rm", type=float, default=1.0)
    rep.add_argument("--sigma-nm", type=float, default=0.0)
    rep.add_argument("--z-ion-um", type=float, default=0.0)
    rep.set_defaults(handler=_cmd_cavity_report)

    fig = cavity.add_parser("fig7b", parents=[common],
                            help="coupling-rate sweep over cavity length")
    cavity_common(fig)
    fig.add_argument("--points", type=int, default=60)
    fig.add_argument("--min-dzr", type=float, default=0.1)
    fig.add_argument("--max-dzr", type=float, default=10.0)
    fig.set_defaults(handler=_cmd_cavity_fig7b)

    layout = groups.add_parser("layout", help="beam layout rules").add_subparsers(
        dest="command", required=True)
    val = layout.add_parser("validate", parents=[common],
                            help="check a layout document against the rules")
    val.add_argument("file", help="layout JSON document")
    val.add_argument("--tol-deg", type=float, default=1.0)
    val.set_defaults(handler=_cmd_layout_validate)

    entangle = groups.add_parser("entangle", help="entanglement budget").add_subparsers(
        dest="command", required=True)
    rate = entangle.add_parser("rate", parents=[common],
                               help="event rate from probability and attempts")
    rate.add_argument("--p", type=float, required=True)
    rate.add_argument("--attempt-rate", type=float, required=True)
    rate.set_defaults(handler=_cmd_entangle_rate)
    scale = entangle.add_parser("scale", parents=[common],
                                help="rescale success to a new capture fraction")
    scale.add_argument("--p-base", type=float, required=True)
    scale.add_argument("--fcap-base", type=float, required=True)
    scale.add_argument("--fcap-new", type=float, required=True)
    scale.add_argument("--attempt-rate", type=float, default=None)
    scale.set_defaults(handler=_cmd_entangle_scale)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text, code = args.handler(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 1
    _emit(args, text)
    return code


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
