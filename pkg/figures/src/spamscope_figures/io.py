"""CSV table access that preserves the input bytes for --dump.

Tables keep every cell as the raw string it was read as; plotting code
converts on the fly. Dumping re-emits exactly the consumed columns and
rows, so a dump of an unfiltered single-input figure byte-equals the
corresponding columns of its input file.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass


class SchemaError(Exception):
    """Input CSV lacks a column the figure kind needs."""


class EmptyData(Exception):
    """Input CSV has a header but no rows (callers render a placeholder)."""


@dataclass
class Table:
    header: list
    rows: list  # list of list-of-str, raw cells

    def __len__(self):
        return len(self.rows)

    def index(self, column: str) -> int:
        try:
            return self.header.index(column)
        except ValueError:
            raise SchemaError(f"missing column {column!r}; have {self.header}") from None

    def column(self, name: str) -> list:
        i = self.index(name)
        return [row[i] for row in self.rows]

    def floats(self, name: str) -> list:
        """Column as floats; blank cells (undefined values) become None."""
        return [float(v) if v != "" else None for v in self.column(name)]

    def require(self, columns) -> None:
        for col in columns:
            self.index(col)

    def where(self, column: str, value: str) -> "Table":
        i = self.index(column)
        return Table(self.header, [row for row in self.rows if row[i] == value])

    def distinct(self, name: str) -> list:
        seen = []
        for v in self.column(name):
            if v not in seen:
                seen.append(v)
        return seen


def read_table(path) -> Table:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path} has no header row") from None
        return Table(header=header, rows=list(reader))


def dump_table(table: Table, columns, path) -> None:
    """Write the consumed columns verbatim (same writer the producer used)."""
    indices = [table.index(c) for c in columns]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(columns))
        for row in table.rows:
            writer.writerow([row[i] for i in indices])
