"""Gate fidelity and acquired relative phases vs the pump-phase swing:
extracted phases against the quadrature prediction, phi axes in units of pi.
"""

import argparse
import math
import pathlib
import sys

if __package__ in (None, ""):  # running as a plain script
    sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent))

import matplotlib.pyplot as plt

from plotkit.common import (STYLE, PlotkitError, load_manifest, load_rows)

PI = math.pi


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Render the gate-sweep-theta-amp figure from its CSV.")
    parser.add_argument("--csv", required=True, help="input sweep CSV")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--manifest", default=None,
                        help="manifest path (default: sibling of the CSV)")
    args = parser.parse_args(argv)
    try:
        rows = load_rows(args.csv)
        load_manifest(args.csv, args.manifest)
    except PlotkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    with plt.rc_context(STYLE):
        fig, (ax_f, ax_phi) = plt.subplots(
            1, 2, figsize=(9.0, 4.0))
        for cd, label in ((True, "with CD"), (False, "without CD")):
            pts = sorted((r["theta_amp"], r["infidelity"]) for r in rows
                         if r["cd"] is cd and r["infidelity"] is not None)
            if pts:
                ax_f.plot(*zip(*pts), marker="o", label=label)
        ax_f.set_yscale("log")
        ax_f.set_xlabel("theta_amp")
        ax_f.set_ylabel("1 - F")
        ax_f.legend()

        phased = sorted((r for r in rows if r["rel_phi_01"] is not None),
                        key=lambda r: r["theta_amp"])
        if phased:
            amps = [r["theta_amp"] for r in phased]
            ax_phi.plot(amps, [r["rel_phi_01"] / PI for r in phased],
                        marker="o", label="phi_01 - phi_00 (extracted)")
            ax_phi.plot(amps, [r["rel_phi_pred"] / PI for r in phased],
                        linestyle="--", label="quadrature prediction")
            ax_phi.plot(amps, [r["rel_phi_11"] / PI for r in phased],
                        marker="s", label="phi_11 - phi_00")
        ax_phi.set_xlabel("theta_amp")
        ax_phi.set_ylabel("relative phase / pi")
        ax_phi.legend()
        fig.tight_layout()
        fig.savefig(args.out)
        plt.close(fig)
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
