"""Wigner-function heatmaps from the snapshot side-car CSVs, one panel per
snapshot, on a symmetric diverging color scale centered at W=0."""

import argparse
import csv
import math
import pathlib
import sys

if __package__ in (None, ""):  # running as a plain script
    sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent))

import matplotlib.pyplot as plt
import numpy as np

from plotkit.common import (STYLE, NoDataError, PlotkitError, load_rows)


def _read_grid(path: pathlib.Path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["x", "y", "W"]:
            raise NoDataError(f"{path}: not a Wigner side-car CSV")
        data = np.array([[float(v) for v in rec] for rec in reader])
    if data.size == 0:
        raise NoDataError(f"{path}: no grid points")
    xs = np.unique(data[:, 0])
    ys = np.unique(data[:, 1])
    values = data[:, 2].reshape(len(ys), len(xs))
    return xs, ys, values


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Render Wigner heatmaps from a wigner-snapshot CSV.")
    parser.add_argument("--csv", required=True, help="snapshot index CSV")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    try:
        rows = [r for r in load_rows(args.csv) if r["wigner_file"]]
        if not rows:
            raise NoDataError(f"{args.csv}: no rows carry a wigner_file")
        base = pathlib.Path(args.csv).parent
        panels = [(r, *_read_grid(base / r["wigner_file"])) for r in rows]
    except PlotkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    n = len(panels)
    ncols = min(n, 2)
    nrows = math.ceil(n / ncols)
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(nrows, ncols,
                                 figsize=(4.6 * ncols, 4.0 * nrows),
                                 squeeze=False)
        for ax in axes.flat[n:]:
            ax.set_axis_off()
        for ax, (row, xs, ys, values) in zip(axes.flat, panels):
            vmax = max(abs(row["w_min"]), abs(row["w_max"]))
            mesh = ax.pcolormesh(xs, ys, values, cmap="RdBu_r",
                                 vmin=-vmax, vmax=vmax, shading="nearest")
            label = pathlib.Path(row["wigner_file"]).stem
            ax.set_title(label.replace("wigner_", ""))
            ax.set_xlabel("Re alpha")
            ax.set_ylabel("Im alpha")
            ax.set_aspect("equal")
            fig.colorbar(mesh, ax=ax, label="W")
        fig.tight_layout()
        fig.savefig(args.out)
        plt.close(fig)
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
