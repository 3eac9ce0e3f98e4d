"""Single-channel decoherence comparison: photon decay only vs dephasing
only at the same rate."""


import pathlib
import sys

if __package__ in (None, ""):  # running as a plain script
    sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent))

from plotkit.common import run_line_script

def main(argv=None) -> int:
    return run_line_script(
        "pure-decay-vs-dephasing", argv,
        x="T", y="infidelity", series=("channel", "kappa", "gamma_p"),
        logy=True, xlabel="TK", ylabel="1 - F")


if __name__ == "__main__":
    sys.exit(main())
