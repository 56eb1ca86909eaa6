"""JSON, CSV and plain-table renderers for command output.

All payloads are schema 1: JSON objects carry "schema": 1 as their first
field and CSV text starts with a "# schema=1" comment line.
"""
import csv
import io
import json
import math
import sys
from typing import Any, Dict, List, Optional, Sequence

from pydantic import BaseModel

SCHEMA_VERSION = 1
EMIT_FORMATS = ("json", "csv", "table")


def payload(model: BaseModel) -> Dict[str, Any]:
    return model.model_dump(mode="json", by_alias=True)


def to_json(data: Any) -> str:
    if isinstance(data, BaseModel):
        data = payload(data)
    if isinstance(data, dict) and "schema" not in data:
        data = {"schema": SCHEMA_VERSION, **data}
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def cell(value: Any, missing: str = "") -> str:
    if value is None:
        return missing
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return str(value)


def to_csv(columns: Sequence[str], rows: List[Dict[str, Any]], footer: Optional[str] = None) -> str:
    buffer = io.StringIO()
    buffer.write(f"# schema={SCHEMA_VERSION}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([cell(row.get(name)) for name in columns])
    if footer:
        buffer.write(f"# {footer}\n")
    return buffer.getvalue()


def to_table(columns: Sequence[str], rows: List[Dict[str, Any]], footer: Optional[str] = None) -> str:
    cells = [[cell(row.get(name), "-") for name in columns] for row in rows]
    widths = [max([len(name)] + [len(r[i]) for r in cells]) for i, name in enumerate(columns)]
    lines = ["  ".join(name.ljust(w) for name, w in zip(columns, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for r in cells:
        lines.append("  ".join(value.ljust(w) for value, w in zip(r, widths)).rstrip())
    if footer:
        lines.append(footer)
    return "\n".join(lines) + "\n"


def write_output(text: str, path: Optional[str] = None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
