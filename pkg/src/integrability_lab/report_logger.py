"""File-based report writer for experiment runs.

Writes one JSON document and one CSV table per run into the output folder:

    <out>/<name>.json
    <out>/<name>.csv

Reports carry no timestamps or host data, so identical runs produce
byte-identical files.
"""

from __future__ import annotations

import csv
import json
import logging
import os
from typing import Any

logger = logging.getLogger(__name__)


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_report(out_dir: str, name: str, data: dict[str, Any]) -> str:
    """Write `data` as pretty-printed JSON with sorted keys. Returns the file path."""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{name}.json")
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(data, f, indent=2, sort_keys=True, ensure_ascii=False)
        f.write("\n")
    logger.info("Report written: %s", path)
    return path


def write_table(out_dir: str, name: str, rows: list[dict[str, Any]]) -> str:
    """Write rows as CSV with a header from the first row's keys. Returns the file path."""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{name}.csv")
    header = list(rows[0].keys()) if rows else []
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(row.get(key)) for key in header])
    logger.info("Table written: %s (%d rows)", path, len(rows))
    return path
