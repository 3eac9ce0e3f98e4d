"""Robustness to a mis-scaled CD coefficient: infidelity vs xi at fixed
duration."""


import pathlib
import sys

if __package__ in (None, ""):  # running as a plain script
    sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent))

from plotkit.common import run_line_script

def main(argv=None) -> int:
    return run_line_script(
        "cd-error-sweep", argv,
        x="xi_cd", y="infidelity", logy=True,
        xlabel="CD scale xi", ylabel="1 - F")


if __name__ == "__main__":
    sys.exit(main())
