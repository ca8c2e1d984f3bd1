"""Command-line front end: ``afspin check | validate | catalog | table``.

Exit codes: 0 success, 1 usage or parse error, 2 verdict outside the
scope of the decision procedure, 3 inconsistency detected in the input or the pipeline.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field

from .catalog import FAMILIES, MAIN_FAMILIES, CatalogError, TableMismatch, emit_table, source_text
from .collector import CollectionError, consistency_check
from .presentation import ParseError, PresentationError, parse_presentation, validate_structure
from .spin import StageError, decide_spin

EXIT_OK, EXIT_USAGE, EXIT_SCOPE, EXIT_INCONSISTENT = 0, 1, 2, 3

log = logging.getLogger("afspin")


@dataclass
class CliConfig:
    command: str
    path: str | None = None
    family: str | None = None
    params: dict[str, int] = field(default_factory=dict)
    ks: list[int] = field(default_factory=list)
    ls: list[int] = field(default_factory=list)
    format: str = "text"
    verbosity: int = 0
    series_auto: bool = False
    diagnostics: bool = False


def parse_range(text: str) -> list[int]:
    """'1..4' -> [1, 2, 3, 4]; '1,3' -> [1, 3]; '' -> []."""
    out: list[int] = []
    for part in filter(None, (t.strip() for t in text.split(","))):
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _param(text: str) -> tuple[str, int]:
    name, _, value = text.partition("=")
    if not name or not value:
        raise argparse.ArgumentTypeError(f"expected NAME=INT, got {text!r}")
    try:
        return name.strip(), int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"parameter value must be an integer: {text!r}") from None


def _range(text: str) -> list[int]:
    try:
        return parse_range(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r} (use e.g. 1..4 or 1,3)") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="afspin", description="Orientability and Spin structures of infra-nilmanifolds.")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, formats=("text", "json")):
        p.add_argument("--format", choices=formats, default="text")
        p.add_argument("-v", "--verbose", action="count", default=0, dest="sub_verbose")

    p = sub.add_parser("check", help="decide orientability and Spin for a .pcp file")
    p.add_argument("path")
    p.add_argument("--param", action="append", type=_param, default=[], metavar="NAME=INT")
    p.add_argument("--series-auto", action="store_true", help="compute isolators instead of using the declared series")
    p.add_argument("--diagnostics", action="store_true", help="include case (b) data even when case (a) decides")
    common(p)

    p = sub.add_parser("validate", help="parse and check consistency only")
    p.add_argument("path")
    p.add_argument("--param", action="append", type=_param, default=[], metavar="NAME=INT")
    common(p)

    p = sub.add_parser("catalog", help="print a catalog family instance as .pcp text")
    p.add_argument("--family", required=False, choices=sorted(FAMILIES))
    p.add_argument("--k", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--list", action="store_true", help="list the catalog families")
    common(p, ("text",))

    p = sub.add_parser("table", help="run the classification table over a parameter grid")
    p.add_argument("--family", default="all", help="'all' or a comma separated list of family ids")
    p.add_argument("--k", type=_range, default=[1, 2, 3, 4])
    p.add_argument("--l", type=_range, default=[1, 2])
    common(p, ("text", "json", "csv"))
    return ap


def _read(path: str, params) -> "object":
    try:
        with open(path, encoding="utf-8") as fh:
            src = fh.read()
    except FileNotFoundError:
        raise _Exit(EXIT_USAGE, f"afspin: {path}: file not found") from None
    except OSError as exc:
        raise _Exit(EXIT_USAGE, f"afspin: {path}: {exc.strerror}") from None
    try:
        return parse_presentation(src, dict(params) or None)
    except ParseError as exc:
        raise _Exit(EXIT_USAGE, f"afspin: {path}: {exc}") from None
    except PresentationError as exc:
        raise _Exit(EXIT_USAGE, f"afspin: {path}: {exc}") from None


class _Exit(Exception):
    def __init__(self, code: int, message: str = ""):
        super().__init__(message)
        self.code = code
        self.message = message


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_check(args, out) -> int:
    p = _read(args.path, args.param)
    try:
        report = decide_spin(p, series_auto=args.series_auto, diagnostics=args.diagnostics)
    except StageError as exc:
        if args.format == "json" and exc.report is not None:
            out.write(_dump(exc.report.to_json()))
        raise _Exit(EXIT_INCONSISTENT, f"afspin: {exc}") from None
    out.write(_dump(report.to_json()) if args.format == "json" else report.summary() + "\n")
    return EXIT_SCOPE if report.out_of_scope else EXIT_OK


def cmd_validate(args, out) -> int:
    p = _read(args.path, args.param)
    v = validate_structure(p)
    try:
        cons = consistency_check(p) if v.valid else None
    except CollectionError as exc:
        raise _Exit(EXIT_INCONSISTENT, f"afspin: collection failed: {exc}") from None
    ok = v.valid and cons.passed
    data = {
        "name": p.name,
        "valid": v.valid,
        "errors": list(v.errors),
        "lattice_class": v.lattice_class,
        "series_nested": v.series_nested,
        "consistent": None if cons is None else cons.passed,
        "checked": None if cons is None else cons.checked,
        "failure": None if cons is None else cons.failure,
    }
    if args.format == "json":
        out.write(_dump(data))
    else:
        out.write(f"group {p.name}: {'valid' if v.valid else 'invalid'}\n")
        for e in v.errors:
            out.write(f"  {e}\n")
        if v.lattice_class is not None:
            out.write(f"  lattice nilpotent of class {v.lattice_class}\n")
        if cons is not None:
            verdict = "passed" if cons.passed else f"FAILED: {cons.failure}"
            out.write(f"  consistency ({cons.checked} overlaps): {verdict}\n")
    return EXIT_OK if ok else EXIT_INCONSISTENT


def cmd_catalog(args, out) -> int:
    if args.list or not args.family:
        for fid, spec in FAMILIES.items():
            ps = ", ".join(spec.params) or "-"
            out.write(f"{fid:9} params: {ps:5} holonomy {spec.holonomy:3} {spec.page_ref} {spec.q_label}\n")
        return EXIT_OK
    try:
        out.write(source_text(args.family, {"k": args.k, "l": args.l}))
    except CatalogError as exc:
        raise _Exit(EXIT_USAGE, f"afspin: {exc}") from None
    return EXIT_OK


def cmd_table(args, out) -> int:
    fams = MAIN_FAMILIES if args.family == "all" else tuple(f.strip() for f in args.family.split(",") if f.strip())
    unknown = [f for f in fams if f not in FAMILIES]
    if unknown:
        raise _Exit(EXIT_USAGE, f"afspin: unknown family {', '.join(unknown)}")
    try:
        table = emit_table(fams, args.k, args.l)
    except TableMismatch as exc:
        raise _Exit(EXIT_INCONSISTENT, f"afspin: {exc}") from None
    except StageError as exc:
        raise _Exit(EXIT_INCONSISTENT, f"afspin: {exc}") from None
    out.write(table.render(args.format))
    return EXIT_OK


COMMANDS = {"check": cmd_check, "validate": cmd_validate, "catalog": cmd_catalog, "table": cmd_table}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    verbosity = args.verbose + getattr(args, "sub_verbose", 0)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(verbosity, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=err,
    )
    try:
        return COMMANDS[args.command](args, out)
    except _Exit as exc:
        if exc.message:
            err.write(exc.message + "\n")
        return exc.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
