"""
CSV tables with `# key=value` metadata lines before the header row.
"""

import csv
from pathlib import Path
from typing import Iterable, Optional

from atomicwrites import atomic_write
import numpy as np


def format_cell(value) -> str:
    """Floats keep 17 significant digits so they parse back bit-exactly."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    return str(value)


class TableCSVWriter:
    """Writes metadata comments, a header row and data rows."""

    def __init__(self, file, header: list[str], metadata: Optional[dict] = None):
        for key, value in (metadata or {}).items():
            file.write(f"# {key}={value}\n")
        self.writer = csv.writer(file, lineterminator="\n")
        self.writer.writerow(header)
        self.width = len(header)

    def write(self, row) -> None:
        assert len(row) == self.width, f"Row has {len(row)} cells, header {self.width}"
        self.writer.writerow([format_cell(x) for x in row])


class TableCSVReader:
    """Reads what TableCSVWriter wrote; numeric cells become floats."""

    def __init__(self, file):
        self.metadata = {}
        lines = []
        for line in file:
            if line.startswith("# ") and not lines:
                key, _, value = line[2:].rstrip("\n").partition("=")
                self.metadata[key] = value
            else:
                lines.append(line)
        reader = csv.reader(lines)
        self.header = next(reader)
        self.rows = [[float(cell) for cell in row] for row in reader if row]


def emit_csv(
    path: Path,
    header: list[str],
    rows: Iterable,
    metadata: Optional[dict] = None,
) -> Path:
    """Atomically writes a UTF-8 CSV table."""
    with atomic_write(path, overwrite=True, encoding="utf-8", newline="") as file:
        writer = TableCSVWriter(file, header, metadata)
        for row in rows:
            writer.write(row)
    return path


def read_csv(path: Path) -> TableCSVReader:
    with open(path, "r", encoding="utf-8", newline="") as file:
        return TableCSVReader(file)
