"""Adiabatic loading from vacuum: infidelity vs ramp duration, with and
without the auxiliary detuning ramp."""


import pathlib
import sys

if __package__ in (None, ""):  # running as a plain script
    sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent))

from plotkit.common import run_line_script

def main(argv=None) -> int:
    return run_line_script(
        "loading", argv,
        x="T", y="infidelity", series=("j", "delta_max"), logy=True,
        xlabel="TK", ylabel="1 - F")


if __name__ == "__main__":
    sys.exit(main())
