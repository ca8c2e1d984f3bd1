"""Parameterized presentations of the 4-dimensional families and sanity fixtures,
their expected verdicts, and the classification table."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .presentation import PcPresentation, parse_presentation, with_lattice_order
from .spin import NO, UNKNOWN, YES, SpinReport, decide_spin


class CatalogError(ValueError):
    pass


class TableMismatch(AssertionError):
    pass


F1 = """\
group F1 {
  params: k=1;
  lattice a, b, c, d;
  holonomy alpha: order 2;
  relations {
    [b,a] = 1; [c,a] = d^k; [d,a] = 1; [c,b] = d^k; [d,b] = 1; [d,c] = 1;
    alpha^2 = d;
    alpha a alpha^-1 = b^-1;
    alpha b alpha^-1 = a^-1;
    alpha d alpha^-1 = d;
    alpha c alpha^-1 = c^-1;
  }
  series { 2: d; }
}
"""

F2 = """\
group F2 {
  params: k=1, l=1;
  lattice a, b, c, d;
  holonomy alpha: order 2;
  relations {
    [b,a] = c^(2*l) d^((2*l-1)*k); [c,a] = 1; [d,a] = 1; [c,b] = d^(2*k); [d,b] = 1; [d,c] = 1;
    alpha^2 = d;
    alpha a = a alpha c;
    alpha b = b^-1 alpha;
    alpha d alpha^-1 = d;
    alpha c alpha^-1 = c^-1;
  }
  series { 2: c, d; 3: d; }
}
"""

F3 = """\
group F3 {
  params: k=1, l=1;
  lattice a, b, c, d;
  holonomy alpha: order 2;
  relations {
    [b,a] = c^(2*l); [c,a] = d^k; [d,a] = 1; [c,b] = d^-k; [d,b] = 1; [d,c] = 1;
    alpha^2 = d;
    alpha a = b alpha;
    alpha b = a alpha;
    alpha d alpha^-1 = d;
    alpha c alpha^-1 = c^-1;
  }
  series { 2: c, d; 3: d; }
}
"""

F4 = """\
group F4 {
  params: k=1, l=1;
  lattice a, b, c, d;
  holonomy alpha: order 2;
  relations {
    [b,a] = c^(2*l+1); [c,a] = d^k; [d,a] = 1; [c,b] = d^-k; [d,b] = 1; [d,c] = 1;
    alpha^2 = d;
    alpha a = b alpha;
    alpha b = a alpha;
    alpha d alpha^-1 = d;
    alpha c alpha^-1 = c^-1;
  }
  series { 2: c, d; 3: d; }
}
"""

NIL = """\
group NIL {
  params: k=1;
  lattice a, b, c, d;
  relations {
    [c,a] = d^k; [c,b] = d^k;
  }
  series { 2: d; }
}
"""

# Z^4 with a glide along a: theta = diag(1, 1, -1, -1)
FLAT_C2 = """\
group FLAT_C2 {
  lattice a, b, c, d;
  holonomy alpha: order 2;
  relations {
    alpha^2 = a;
    alpha c alpha^-1 = c^-1;
    alpha d alpha^-1 = d^-1;
  }
}
"""

# Klein bottle times T^2: theta = diag(1, -1, 1, 1)
KLEIN4 = """\
group KLEIN4 {
  lattice a, b, c, d;
  holonomy alpha: order 2;
  relations {
    alpha^2 = a;
    alpha b alpha^-1 = b^-1;
  }
}
"""

# hexagonal lattice with a rotation of order 6; crystallographic, not torsion-free
CRYST_C6 = """\
group CRYST_C6 {
  lattice a, b;
  holonomy r: order 6;
  relations {
    r^6 = 1;
    r a r^-1 = a b;
    r b r^-1 = a^-1;
  }
}
"""

# torsion-free 3-dimensional flat group with holonomy C6 (screw motion along c)
FLAT_C6 = """\
group FLAT_C6 {
  lattice a, b, c;
  holonomy r: order 6;
  relations {
    r^6 = c;
    r a r^-1 = a b;
    r b r^-1 = a^-1;
  }
}
"""


@dataclass(frozen=True)
class FamilySpec:
    id: str
    template: str
    params: tuple[str, ...]
    page_ref: str = ""
    q_label: str = ""
    nilpotency_class: int = 1
    holonomy: str = "C2"
    tabulated: bool = False
    notes: str = ""


FAMILIES: dict[str, FamilySpec] = {
    f.id: f
    for f in [
        FamilySpec("F1", F1, ("k",), "p.171", "C2", 2, tabulated=True),
        FamilySpec("F2", F2, ("k", "l"), "p.220", "<(2l,1)>", 3, tabulated=True),
        FamilySpec("F3", F3, ("k", "l"), "p.222", "<(2l,0)>", 3, tabulated=True),
        FamilySpec("F4", F4, ("k", "l"), "p.222", "<(2l+1,0)>", 3, tabulated=True),
        FamilySpec("NIL", NIL, ("k",), nilpotency_class=2, holonomy="1"),
        FamilySpec("FLAT_C2", FLAT_C2, ()),
        FamilySpec("KLEIN4", KLEIN4, ()),
        FamilySpec("CRYST_C6", CRYST_C6, (), holonomy="C6", notes="orbifold; exercises the Sylow reduction"),
        FamilySpec("FLAT_C6", FLAT_C6, (), holonomy="C6"),
    ]
}
MAIN_FAMILIES = tuple(f for f, s in FAMILIES.items() if s.tabulated)


def family(fid: str) -> FamilySpec:
    try:
        return FAMILIES[fid]
    except KeyError:
        raise CatalogError(f"unknown family {fid!r}; known: {', '.join(FAMILIES)}") from None


def _params(spec: FamilySpec, params) -> dict[str, int]:
    params = {k: v for k, v in (params or {}).items() if v is not None}
    extra = set(params) - set(spec.params)
    if extra:
        raise CatalogError(f"{spec.id} takes no parameter {', '.join(sorted(extra))}")
    out = {}
    for name in spec.params:
        v = params.get(name, 1)
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise CatalogError(f"parameter {name} = {v!r} is outside the domain (positive integers)")
        out[name] = v
    return out


def source_text(fid: str, params=None, lattice_order=None) -> str:
    spec = family(fid)
    src = spec.template
    if lattice_order is not None:
        src = with_lattice_order(src, lattice_order)
    vals = _params(spec, params)
    if vals:
        import re

        body = ", ".join(f"{k}={v}" for k, v in vals.items())
        src = re.sub(r"params:[^;]*;", f"params: {body};", src, count=1)
    return src


def instantiate_family(fid: str, params=None, lattice_order=None) -> PcPresentation:
    spec = family(fid)
    vals = _params(spec, params)
    src = spec.template
    if lattice_order is not None:
        src = with_lattice_order(src, lattice_order)
    return parse_presentation(src, vals)


@dataclass(frozen=True)
class Expected:
    orientable: bool
    spin: str
    case: str | None = None
    free_rank: int | None = None
    torsion: tuple[int, ...] | None = None


def expected_verdict(fid: str, params=None) -> Expected:
    spec = family(fid)
    vals = _params(spec, params)
    k = vals.get("k")
    if fid in MAIN_FAMILIES:
        spin = YES if k % 2 == 0 else NO
        if fid == "F4":
            torsion = (2 * k,)
        else:
            # F1: the relation alpha c alpha^-1 = c^-1 forces 2c = 0 in the abelianization
            torsion = tuple(sorted((2, 2 * k)))
        return Expected(True, spin, "b", 1, torsion)
    if fid == "NIL":
        return Expected(True, YES, "trivial-sylow")
    if fid == "FLAT_C2":
        return Expected(True, YES)
    if fid == "KLEIN4":
        return Expected(False, UNKNOWN, "out-of-scope")
    if fid == "FLAT_C6":
        return Expected(True, YES)
    if fid == "CRYST_C6":
        return Expected(True, NO, "b", 0, (2, 2, 2))
    raise CatalogError(f"no expectation recorded for {fid}")  # pragma: no cover


def compare(report: SpinReport, exp: Expected) -> list[str]:
    diffs = []

    def check(what, got, want):
        if want is not None and got != want:
            diffs.append(f"{what}: expected {want!r}, computed {got!r}")

    check("orientable", report.orientable, exp.orientable)
    check("spin", report.spin, exp.spin)
    check("case", report.case, exp.case)
    if exp.torsion is not None:
        ab = report.abelian
        check("free_rank", ab.free_rank if ab else None, exp.free_rank)
        check("torsion", ab.torsion if ab else None, exp.torsion)
    return diffs


# ---------------------------------------------------------------- table


@dataclass
class TableRow:
    family: str
    page_ref: str
    k: int | None
    l: int | None
    report: SpinReport

    def fields(self) -> dict:
        r = self.report
        return {
            "family": self.family,
            "page_ref": self.page_ref,
            "k": "" if self.k is None else self.k,
            "l": "" if self.l is None else self.l,
            "class": r.nilpotency_class,
            "orientable": r.orientable,
            "m": r.m,
            "case": r.case,
            "j": "" if r.j is None else r.j,
            "abelianization": r.abelian.shape() if r.abelian else "",
            "spin": r.spin,
        }


CSV_COLUMNS = ["family", "page_ref", "k", "l", "class", "orientable", "m", "case", "j", "abelianization", "spin"]


@dataclass
class Table:
    rows: list[TableRow] = field(default_factory=list)

    def no_spin(self, fid: str) -> list[tuple]:
        return sorted({(r.k,) if r.l is None else (r.k, r.l) for r in self.rows if r.family == fid and r.report.spin == NO})

    def render(self, fmt: str = "text") -> str:
        if fmt == "csv":
            buf = io.StringIO()
            w = csv.DictWriter(buf, CSV_COLUMNS, lineterminator="\n")
            w.writeheader()
            for row in self.rows:
                f = row.fields()
                f["orientable"] = str(f["orientable"]).lower()
                w.writerow(f)
            return buf.getvalue()
        if fmt == "json":
            out = []
            for row in self.rows:
                d = {"family": row.family, "page_ref": row.page_ref, "k": row.k, "l": row.l}
                d["class"] = row.report.nilpotency_class
                d.update(row.report.to_json())
                out.append(d)
            return json.dumps(out, indent=2, sort_keys=True) + "\n"
        if fmt != "text":
            raise CatalogError(f"unknown table format {fmt!r}")
        return self._text()

    def _text(self) -> str:
        lines = []
        fams = list(dict.fromkeys(r.family for r in self.rows))
        header = f"{'family':8} {'Q':12} {'class':5} {'holonomy':8} {'abelianization':24} no-Spin parameters"
        if fams:
            lines.append(header)
        for fid in fams:
            spec = family(fid)
            rows = [r for r in self.rows if r.family == fid]
            ks_no = sorted({r.k for r in rows if r.report.spin == NO})
            ks_all = sorted({r.k for r in rows})
            shapes = _symbolic_shape(rows)
            if ks_no and all(k % 2 for k in ks_no) and {k for k in ks_all if k % 2} == set(ks_no):
                param = f"k odd: k in {{{', '.join(map(str, ks_no))}}}"
            else:
                param = "{" + ", ".join(map(str, ks_no)) + "}"
            cls = rows[0].report.nilpotency_class
            lines.append(f"{fid:8} {spec.q_label:12} {cls!s:5} {spec.holonomy:8} {shapes[:24]:24} {param}")
        if self.rows:
            lines.append("")
            lines.append(" ".join(f"{c:>14}" if c == "abelianization" else c for c in CSV_COLUMNS))
            for row in self.rows:
                f = row.fields()
                lines.append(" ".join(str(f[c]) for c in CSV_COLUMNS))
        return "\n".join(lines) + ("\n" if lines else "")


def _symbolic_shape(rows) -> str:
    """Abelianization pattern across k, writing the C_{2k} factor symbolically."""
    pats = []
    for r in rows:
        ab = r.report.abelian
        if ab is None:
            continue
        parts = ab.shape().split(" + ")
        if r.k is not None and r.k >= 2 and f"C{2 * r.k}" in parts:
            i = len(parts) - 1 - parts[::-1].index(f"C{2 * r.k}")
            parts[i] = "C2k"
        if r.k is None or r.k >= 2:
            pats.append(" + ".join(parts))
    pats = list(dict.fromkeys(pats))
    if not pats:
        return "-"
    return pats[0] if len(pats) == 1 else "; ".join(pats)


def parameter_grid(fid: str, ks, ls):
    spec = family(fid)
    ks = list(ks) if "k" in spec.params else [None]
    ls = list(ls) if "l" in spec.params else [None]
    for k in ks:
        for l in ls:
            yield k, l


def emit_table(families=MAIN_FAMILIES, ks=range(1, 5), ls=range(1, 3), check: bool = True) -> Table:
    """Run the decision over a parameter grid.  With `check`, any verdict that
    differs from the expectation raises TableMismatch listing every diff."""
    table = Table()
    problems = []
    for fid in families:
        spec = family(fid)
        for k, l in parameter_grid(fid, ks, ls):
            params = {"k": k, "l": l}
            p = instantiate_family(fid, params)
            report = decide_spin(p)
            table.rows.append(TableRow(fid, spec.page_ref, k, l, report))
            if check:
                for d in compare(report, expected_verdict(fid, params)):
                    problems.append(f"{fid} k={k} l={l}: {d}")
    if problems:
        raise TableMismatch("table verdicts differ from expectations:\n" + "\n".join(problems))
    return table
