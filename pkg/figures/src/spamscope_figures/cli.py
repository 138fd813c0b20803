"""figures: render analytics CSV artifacts into plots.

Exit codes: 0 ok, 2 schema/config error, 4 internal error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .io import SchemaError, dump_table
from .render import KIND_SPECS, FigureSpec, consumed_tables, load_style, render


def _dump_path(base: str, index: int, total: int) -> str:
    if total == 1:
        return base
    stem, ext = os.path.splitext(base)
    return f"{stem}.{index}{ext}"


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render spamscope CSV artifacts as figures.",
    )
    parser.add_argument("--kind", required=True, choices=sorted(KIND_SPECS))
    parser.add_argument("--in", dest="inputs", action="append", required=True,
                        metavar="CSV", help="input CSV (repeat for multi-input kinds)")
    parser.add_argument("--out", required=True, help="output image (.png or .svg)")
    parser.add_argument("--style", help="JSON style overrides")
    parser.add_argument("--where", action="append", default=[], metavar="COL=VALUE",
                        help="keep only rows where COL equals VALUE")
    parser.add_argument("--dump", metavar="CSV",
                        help="re-emit the plotted input columns, byte-faithful")
    args = parser.parse_args(argv)

    try:
        where = []
        for clause in args.where:
            if "=" not in clause:
                raise SchemaError(f"bad --where clause {clause!r}, expected COL=VALUE")
            column, value = clause.split("=", 1)
            where.append((column, value))
        spec = FigureSpec(
            kind=args.kind,
            inputs=args.inputs,
            output=args.out,
            style=load_style(args.style),
            where=where,
        )
        render(spec)
        if args.dump:
            consumed = consumed_tables(spec)
            for i, (table, columns) in enumerate(consumed):
                dump_table(table, columns, _dump_path(args.dump, i, len(consumed)))
        return 0
    except (SchemaError, OSError, ValueError) as exc:
        print(f"figures error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - surfaced as exit code 4
        print(f"figures internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
