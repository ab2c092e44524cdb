"""CSV helpers with canonical formatting.

All table artifacts are written through these functions so that re-running a
command with the same seed produces byte-identical files: floats are formatted
with ``repr`` (shortest round-trip form), line endings are always LF, and no
locale-dependent formatting is involved.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

from .errors import SchemaMismatch

#: Marker written in place of a numeric value for divergent kernel entries.
DIVERGENT_CELL = "DIV"


def format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def write_csv(path, header: list[str], rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(cell) for cell in row])
    path.write_text(buf.getvalue(), encoding="utf-8")


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration as exc:
            raise SchemaMismatch(f"{path} is empty") from exc
        return header, [row for row in reader]


def require_columns(path, header: list[str], required: list[str]) -> None:
    missing = [col for col in required if col not in header]
    if missing:
        raise SchemaMismatch(f"{path} lacks required columns {missing}; has {header}")
