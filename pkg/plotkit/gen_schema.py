"""Regenerate schema.py from the simulator's documented CSV schema.

Run after any change to the primary component's CSV columns:

    python3 plotkit/gen_schema.py
"""

import pathlib

from kposim.experiments import COLUMN_NOTES, CSV_COLUMNS, SCHEMA_VERSION

HEADER = '''"""CSV schema constants shared by all plot scripts.

GENERATED by gen_schema.py from the simulator's documented CSV schema —
do not edit by hand.
"""
'''


def main() -> int:
    lines = [HEADER]
    lines.append(f"SCHEMA_VERSION = {SCHEMA_VERSION}\n")
    lines.append("CSV_COLUMNS = [")
    for col in CSV_COLUMNS:
        lines.append(f"    {col!r},")
    lines.append("]\n")
    lines.append("COLUMN_NOTES = {")
    for key, note in COLUMN_NOTES.items():
        lines.append(f"    {key!r}: {note!r},")
    lines.append("}")
    out = pathlib.Path(__file__).with_name("schema.py")
    out.write_text("\n".join(lines) + "\n")
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
