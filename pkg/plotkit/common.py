"""Shared plumbing for the plot scripts: schema-checked CSV loading, the
pinned styling profile, and a generic line-figure renderer.

Every plotted number comes straight out of the CSV; nothing is recomputed.
"""

import argparse
import csv
import json
import math
import pathlib
import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .schema import CSV_COLUMNS, SCHEMA_VERSION  # noqa: E402


class PlotkitError(Exception):
    """Base error for the plotting scripts."""


class SchemaError(PlotkitError):
    """CSV header or manifest does not match the expected schema version."""


class NoDataError(PlotkitError):
    """Nothing to plot: empty CSV or every row failed."""


_STRING_COLUMNS = {"experiment", "scheme", "channel", "initial_state",
                   "frame", "method", "status", "error", "wigner_file"}
_BOOL_COLUMNS = {"cd"}

# pinned styling profile: re-rendering the same inputs must be pixel-identical
STYLE = {
    "figure.figsize": (6.0, 4.2),
    "figure.dpi": 130,
    "savefig.dpi": 130,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.markersize": 4.5,
    "legend.fontsize": 8.5,
    "svg.hashsalt": "plotkit",
}

_MARKERS = ["o", "s", "^", "v", "D", "x", "*", "P", "<", ">"]


def _coerce(col: str, raw: str):
    if raw == "":
        return None
    if col in _STRING_COLUMNS:
        return raw
    if col in _BOOL_COLUMNS:
        return raw == "true"
    value = float(raw)
    return value


def load_rows(path) -> list[dict]:
    """Typed rows from a simulator CSV; drops failed rows.

    Raises SchemaError on a header mismatch and NoDataError when nothing
    plottable remains.
    """
    path = pathlib.Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise NoDataError(f"{path}: empty file") from None
        if header != CSV_COLUMNS:
            raise SchemaError(
                f"{path}: header does not match schema_version "
                f"{SCHEMA_VERSION} ({len(header)} columns, expected "
                f"{len(CSV_COLUMNS)})")
        rows = [{c: _coerce(c, v) for c, v in zip(header, rec)}
                for rec in reader if rec]
    if not rows:
        raise NoDataError(f"{path}: no data rows")
    ok = [r for r in rows if r["status"] == "ok"]
    if not ok:
        raise NoDataError(f"{path}: all {len(rows)} rows are flagged failed")
    dropped = len(rows) - len(ok)
    if dropped:
        print(f"note: ignoring {dropped} failed row(s)", file=sys.stderr)
    return ok


def load_manifest(csv_path, manifest_path=None) -> dict | None:
    """Sibling manifest for series labelling; None when absent."""
    csv_path = pathlib.Path(csv_path)
    path = (pathlib.Path(manifest_path) if manifest_path else
            csv_path.with_name(csv_path.stem + ".manifest.json"))
    if not path.exists():
        return None
    with open(path) as fh:
        manifest = json.load(fh)
    if manifest.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(
            f"{path}: manifest schema_version "
            f"{manifest.get('schema_version')!r}, expected {SCHEMA_VERSION}")
    return manifest


@dataclass
class FigureRecipe:
    """Column-to-axes mapping for one figure."""

    experiment: str
    csv: str
    out: str
    x: str
    y: str
    series: tuple = ()
    logy: bool = False
    xlabel: str = ""
    ylabel: str = ""
    title: str = ""
    manifest: str | None = None

    def __post_init__(self):
        for col in (self.x, self.y, *self.series):
            if col not in CSV_COLUMNS:
                raise SchemaError(f"unknown column {col!r}")


def _series_label(cols: tuple, key: tuple) -> str:
    parts = []
    for col, val in zip(cols, key):
        if col == "cd":
            parts.append("with CD" if val else "without CD")
        elif isinstance(val, float):
            parts.append(f"{col}={val:g}")
        else:
            parts.append(f"{col}={val}")
    return ", ".join(parts)


def _default_title(recipe: FigureRecipe, manifest: dict | None) -> str:
    if recipe.title:
        return recipe.title
    if manifest:
        params = manifest.get("config", {}).get("params", {})
        fixed = ", ".join(f"{k}={v:g}" for k, v in sorted(params.items())
                          if isinstance(v, (int, float)) and k != "n_max")
        return f"{recipe.experiment} ({fixed})" if fixed else recipe.experiment
    return recipe.experiment


def render(recipe: FigureRecipe) -> str:
    """Draw the recipe and write the image; returns the output path."""
    rows = load_rows(recipe.csv)
    manifest = load_manifest(recipe.csv, recipe.manifest)
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        groups.setdefault(tuple(row[c] for c in recipe.series), []).append(row)

    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for i, key in enumerate(sorted(groups, key=repr)):
            pts = [(r[recipe.x], r[recipe.y]) for r in groups[key]
                   if r[recipe.x] is not None and r[recipe.y] is not None
                   and math.isfinite(r[recipe.y])]
            pts.sort()
            if not pts:
                continue
            xs, ys = zip(*pts)
            ax.plot(xs, ys, marker=_MARKERS[i % len(_MARKERS)],
                    label=_series_label(recipe.series, key) or None)
        if recipe.logy:
            ax.set_yscale("log")
        ax.set_xlabel(recipe.xlabel or recipe.x)
        ax.set_ylabel(recipe.ylabel or recipe.y)
        ax.set_title(_default_title(recipe, manifest))
        if recipe.series:
            ax.legend()
        fig.tight_layout()
        fig.savefig(recipe.out)
        plt.close(fig)
    return recipe.out


def run_line_script(experiment: str, argv=None, **recipe_kw) -> int:
    """argparse wrapper shared by the single-axes scripts."""
    parser = argparse.ArgumentParser(
        description=f"Render the {experiment} figure from its sweep CSV.")
    parser.add_argument("--csv", required=True, help="input sweep CSV")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--manifest", default=None,
                        help="manifest path (default: sibling of the CSV)")
    args = parser.parse_args(argv)
    recipe = FigureRecipe(experiment=experiment, csv=args.csv, out=args.out,
                          manifest=args.manifest, **recipe_kw)
    try:
        out = render(recipe)
    except PlotkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0
