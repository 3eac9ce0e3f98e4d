"""Calibrated -pi/2 gate: infidelity vs duration for several pump
amplitudes, with and without the CD term."""


import pathlib
import sys

if __package__ in (None, ""):  # running as a plain script
    sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent))

from plotkit.common import run_line_script

def main(argv=None) -> int:
    return run_line_script(
        "gate-sweep-T-by-p", argv,
        x="T", y="infidelity", series=("p", "cd"), logy=True,
        xlabel="TK", ylabel="1 - F")


if __name__ == "__main__":
    sys.exit(main())
