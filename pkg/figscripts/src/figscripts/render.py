"""Render detector and cavity-coupling figures from CSV exports.

Consumes only the public CSV contract of the `ionoptics` command line
(`# schema: ionoptics.<name>.v1` comment line, then a header row); it
never imports that package. `render_figs <csv-dir> <out-dir>` reads
fig6a.csv, fig6b.csv, and fig7b.csv and writes fig6a.png, fig6b.png,
and fig7b.png. Output is deterministic: rerunning on the same inputs
reproduces the images byte for byte, and inputs are never modified.

Errors (missing file, wrong schema line, missing column, no data rows)
are reported per figure on stderr with the offending file and column
named; nothing is written for a failed figure and the exit code is 1.
"""

from __future__ import annotations

import argparse
import csv
import pathlib
import sys
from dataclasses import dataclass, field

from matplotlib.figure import Figure

SCHEMA_PREFIX = "# schema: "
_DPI = 150
_METADATA = {"Software": "figscripts"}


class RenderError(ValueError):
    """Input CSV cannot be rendered (schema, columns, or no data)."""


@dataclass(frozen=True)
class SeriesStyle:
    """Marker and line style for one plotted series."""

    marker: str | None
    filled: bool = True
    linestyle: str = "-"

    def plot_kwargs(self) -> dict:
        kwargs = {"linestyle": self.linestyle}
        if self.marker is not None:
            kwargs["marker"] = self.marker
            if not self.filled:
                kwargs["markerfacecolor"] = "none"
        return kwargs


# Detector marker legend: solid diamond, solid square, open circle,
# open square, solid circle.
DETECTOR_STYLES = {
    "uvpc": SeriesStyle("D", filled=True),
    "pmt": SeriesStyle("s", filled=True),
    "ccd": SeriesStyle("o", filled=False),
    "emccd": SeriesStyle("s", filled=False),
    "apd": SeriesStyle("o", filled=True),
}
_FALLBACK_STYLE = SeriesStyle("^", filled=True)

# Mirror-reflectance legend: square, circle, diamond on solid lines;
# the mirror-independent ratio is the dashed, unmarked series.
FIG7B_COLUMN_STYLES = (
    ("g0_over_gamma", "g0/Γ", SeriesStyle(None, linestyle="--")),
    ("g0_over_kappa_Rf0p99", "g0/κ, R_f=0.99", SeriesStyle("s")),
    ("g0_over_kappa_Rf0p999", "g0/κ, R_f=0.999", SeriesStyle("o")),
    ("g0_over_kappa_Rf0p9999", "g0/κ, R_f=0.9999", SeriesStyle("D")),
)


@dataclass(frozen=True)
class FigureRecipe:
    """One CSV-to-image mapping.

    Either `series_column` splits rows into series plotted from
    `y_column` (fig6a/fig6b), or `column_series` plots one series per
    named column against the shared x column (fig7b).
    """

    figure_id: str
    input_csv: pathlib.Path
    schema: str
    x_column: str
    x_label: str
    y_label: str
    x_scale: str = "log"
    y_scale: str = "log"
    y_column: str | None = None
    series_column: str | None = None
    series_styles: dict[str, SeriesStyle] = field(default_factory=dict)
    column_series: tuple[tuple[str, str, SeriesStyle], ...] = ()

    @property
    def required_columns(self) -> tuple[str, ...]:
        if self.series_column is not None:
            return (self.x_column, self.series_column, self.y_column)
        return (self.x_column,) + tuple(name for name, _, _ in self.column_series)


def default_recipes(csv_dir: pathlib.Path | str) -> list[FigureRecipe]:
    """The three standard figures rendered by `render_figs`."""
    csv_dir = pathlib.Path(csv_dir)
    fig6 = dict(
        schema="ionoptics.detect.v1",
        x_column="t_m_s",
        x_label="integration time (s)",
        series_column="detector",
        series_styles=dict(DETECTOR_STYLES),
    )
    return [
        FigureRecipe(figure_id="fig6a", input_csv=csv_dir / "fig6a.csv",
                     y_column="snr", y_label="signal-to-noise ratio",
                     **fig6),
        FigureRecipe(figure_id="fig6b", input_csv=csv_dir / "fig6b.csv",
                     y_column="ber", y_label="bit error rate",
                     **fig6),
        FigureRecipe(figure_id="fig7b", input_csv=csv_dir / "fig7b.csv",
                     schema="ionoptics.fig7b.v1",
                     x_column="d_over_zr",
                     x_label="cavity length / Rayleigh range",
                     y_label="coupling rate ratio",
                     column_series=FIG7B_COLUMN_STYLES),
    ]


def load_table(recipe: FigureRecipe) -> list[dict[str, str]]:
    """Read and validate the recipe's CSV; return its data rows."""
    path = recipe.input_csv
    try:
        raw = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise RenderError(f"{path.name}: input file not found") from None
    lines = raw.splitlines()
    if not lines or not lines[0].startswith(SCHEMA_PREFIX):
        raise RenderError(f"{path.name}: missing '{SCHEMA_PREFIX.strip()}' comment line")
    found = lines[0][len(SCHEMA_PREFIX):].strip()
    if found != recipe.schema:
        raise RenderError(
            f"{path.name}: expected schema {recipe.schema!r}, found {found!r}")
    reader = csv.DictReader(lines[1:])
    header = reader.fieldnames or []
    for column in recipe.required_columns:
        if column not in header:
            raise RenderError(f"{path.name}: missing column {column!r}")
    rows = list(reader)
    if not rows:
        raise RenderError(f"{path.name}: no data rows")
    return rows


def build_figure(recipe: FigureRecipe, rows: list[dict[str, str]]) -> Figure:
    """Plot the validated rows; one line per series."""
    fig = Figure(figsize=(6.4, 4.8))
    ax = fig.add_subplot(111)
    if recipe.series_column is not None:
        order: list[str] = []
        grouped: dict[str, list[tuple[float, float]]] = {}
        for row in rows:
            key = row[recipe.series_column]
            if key not in grouped:
                order.append(key)
                grouped[key] = []
            grouped[key].append((float(row[recipe.x_column]),
                                 float(row[recipe.y_column])))
        for key in order:
            style = recipe.series_styles.get(key, _FALLBACK_STYLE)
            xs, ys = zip(*grouped[key])
            ax.plot(xs, ys, label=key, **style.plot_kwargs())
    else:
        xs = [float(row[recipe.x_column]) for row in rows]
        for column, label, style in recipe.column_series:
            ys = [float(row[column]) for row in rows]
            ax.plot(xs, ys, label=label, **style.plot_kwargs())
    ax.set_xscale(recipe.x_scale)
    ax.set_yscale(recipe.y_scale)
    ax.set_xlabel(recipe.x_label)
    ax.set_ylabel(recipe.y_label)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    return fig


def render(recipe: FigureRecipe, out_path: pathlib.Path | str) -> pathlib.Path:
    """Validate, plot, and write one image; nothing is written on error."""
    rows = load_table(recipe)
    fig = build_figure(recipe, rows)
    out_path = pathlib.Path(out_path)
    fig.savefig(out_path, format="png", dpi=_DPI, metadata=dict(_METADATA))
    return out_path


def run(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render_figs",
        description="render fig6a/fig6b/fig7b images from CSV exports")
    parser.add_argument("csv_dir", help="directory holding fig6a.csv, "
                                        "fig6b.csv, fig7b.csv")
    parser.add_argument("out_dir", help="directory for the rendered images")
    args = parser.parse_args(argv)

    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    failed = False
    for recipe in default_recipes(args.csv_dir):
        try:
            target = render(recipe, out_dir / f"{recipe.figure_id}.png")
        except (RenderError, OSError) as exc:
            print(f"error: {recipe.figure_id}: {exc}", file=sys.stderr)
            failed = True
        else:
            print(f"wrote {target}")
    return 1 if failed else 0


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
