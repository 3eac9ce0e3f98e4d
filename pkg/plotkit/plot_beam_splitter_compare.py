"""Pump-phase CD scheme vs ideally tunable hopping: infidelity vs
duration per pump amplitude."""


import pathlib
import sys

if __package__ in (None, ""):  # running as a plain script
    sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent))

from plotkit.common import run_line_script

def main(argv=None) -> int:
    return run_line_script(
        "beam-splitter-compare", argv,
        x="T", y="infidelity", series=("p", "scheme"), logy=True,
        xlabel="TK", ylabel="1 - F")


if __name__ == "__main__":
    sys.exit(main())
