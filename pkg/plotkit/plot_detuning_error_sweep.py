"""Robustness to a constant stray detuning on the un-modulated KPO."""


import pathlib
import sys

if __package__ in (None, ""):  # running as a plain script
    sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent))

from plotkit.common import run_line_script

def main(argv=None) -> int:
    return run_line_script(
        "detuning-error-sweep", argv,
        x="delta_err", y="infidelity", logy=True,
        xlabel="detuning error / K", ylabel="1 - F")


if __name__ == "__main__":
    sys.exit(main())
