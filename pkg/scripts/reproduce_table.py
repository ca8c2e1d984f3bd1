"""Recompute the classification table for the four 4-dimensional families.

    python3 scripts/reproduce_table.py --k 1..6 --l 1..3 --format text
"""

import argparse
import sys
import time

from afspin.catalog import MAIN_FAMILIES, TableMismatch, emit_table
from afspin.cli import parse_range


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", default="1..6")
    ap.add_argument("--l", default="1..3")
    ap.add_argument("--format", choices=["text", "csv", "json"], default="text")
    args = ap.parse_args()
    start = time.perf_counter()
    try:
        table = emit_table(MAIN_FAMILIES, parse_range(args.k), parse_range(args.l))
    except TableMismatch as exc:
        print(exc, file=sys.stderr)
        return 3
    sys.stdout.write(table.render(args.format))
    print(f"# {len(table.rows)} instances in {time.perf_counter() - start:.2f}s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
