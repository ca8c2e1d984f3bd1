"""Orientability and Spin decision for infra-nilmanifolds with cyclic 2-Sylow holonomy.

Decision outline for an orientable quotient with 2-Sylow subgroup C_{2^m}:

* m = 0: the Sylow cover is a nilmanifold, which is parallelizable, so Spin.
* otherwise pass to Gamma(2) (preimage of the Sylow subgroup) with head t,
  put j = (n - tr theta(t)^{2^{m-1}}) / 2.  If j is not 2 mod 4 the lift of
  theta(t) to Spin(n) has order 2^m and a Spin structure exists (case a).
* if j = 2 mod 4 (case b) a Spin structure exists iff the projection
  q_*: Gamma(2)_ab -> C_{2^m} factors through C_{2^{m+1}}.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

from .collector import CollectionError, collector_for, consistency_check
from .holonomy import HolonomyError, enumerate_holonomy, sylow2_reduce
from .intlin import IntMatrix, smith_normal_form, unimodular_inverse
from .presentation import PcPresentation, validate_structure
from .series import (
    SeriesError,
    adapted_series,
    holonomy_representation,
    theta_of,
)

log = logging.getLogger(__name__)

YES, NO, UNKNOWN = "yes", "no", "unknown-out-of-scope"


class SpinError(ValueError):
    pass


class StageError(RuntimeError):
    """A pipeline stage failed; `report` holds everything computed before it."""

    def __init__(self, stage: str, message: str, report: "SpinReport | None" = None):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.message = message
        self.report = report


# ---------------------------------------------------------------- orientability and the doubling criterion


def orientability(rep) -> bool:
    return all(m.det() == 1 for m in rep.generator_matrices.values())


def lemma_gg_doubling(A: IntMatrix, m: int) -> tuple[bool, int]:
    """(doubles, j) where j = (n - tr A^{2^{m-1}}) / 2.

    `doubles` says the lift of A to Spin(n) has order 2^{m+1}.
    """
    if m < 1:
        raise SpinError("the doubling criterion needs m >= 1")
    half = A.power(1 << (m - 1))
    if half.is_identity() or not (half @ half).is_identity():
        raise SpinError(f"matrix does not have order exactly {1 << m}")
    n = A.rows
    diff = n - half.trace()
    if diff % 2:
        raise SpinError("n - trace is odd; the involution is not integral with +-1 eigenvalues")
    j = diff // 2
    return j % 4 == 2, j


def _monomial_product(a: tuple[int, tuple[int, ...]], b: tuple[int, tuple[int, ...]]):
    """Product of signed Clifford monomials with e_i^2 = -1 and e_i e_j = -e_j e_i."""
    sign = a[0] * b[0]
    word = list(a[1]) + list(b[1])
    # bubble sort, one sign flip per swap of distinct symbols
    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(word) - 1:
            if word[i] > word[i + 1]:
                word[i], word[i + 1] = word[i + 1], word[i]
                sign = -sign
                changed = True
            elif word[i] == word[i + 1]:
                del word[i : i + 2]
                sign = -sign
                changed = True
                continue
            i += 1
    return sign, tuple(word)


def clifford_oracle(P) -> int:
    """Order of the Spin lift e_P of the involution diag(-1 on P, +1 elsewhere)."""
    P = tuple(sorted(set(P)))
    if len(P) % 2:
        raise SpinError("an odd number of sign changes is not orientation preserving")
    sq = _monomial_product((1, P), (1, P))
    if sq[1]:
        raise AssertionError("square of a monomial must be a scalar")
    return 2 if sq[0] == 1 else 4


# ---------------------------------------------------------------- abelianization


@dataclass(frozen=True)
class AbelianStructure:
    free_rank: int
    torsion: tuple[int, ...]
    # (order, image in Z/2^m) per nontrivial cyclic factor; order 0 is a free factor
    q_images: tuple[tuple[int, int], ...]
    modulus: int

    @property
    def m(self) -> int:
        return self.modulus.bit_length() - 1

    def shape(self) -> str:
        parts = ["Z"] * self.free_rank + [f"C{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "1"

    def to_json(self) -> dict:
        return {
            "free_rank": self.free_rank,
            "torsion": list(self.torsion),
            "q_images": [{"order": d, "image": a} for d, a in self.q_images],
        }


def relation_matrix(p: PcPresentation) -> IntMatrix:
    """Rows are abelianized relators, columns the generators in global order."""
    gens = p.generators
    idx = {g: i for i, g in enumerate(gens)}
    rows = []

    def ab(word):
        v = [0] * len(gens)
        for g, e in word:
            v[idx[g]] += e
        return v

    for h, r in p.head_gens:
        v = [-x for x in ab(p.power(h))]
        v[idx[h]] += r
        rows.append(v)
    for (x, y), w in p.conjugation_relations.items():
        v = [-t for t in ab(w)]
        v[idx[y]] += 1
        if any(v):
            rows.append(v)
    return IntMatrix.from_rows(rows, len(gens))


def abelianize(p: PcPresentation, q: tuple[int, ...], modulus: int) -> AbelianStructure:
    """Gamma_ab with the images of its cyclic factors under the map given on
    generators by `q` (values mod `modulus`)."""
    A = relation_matrix(p)
    N = A.cols
    if any(sum(a * b for a, b in zip(A.row(i), q)) % modulus for i in range(A.rows)):
        raise SpinError("q_* is not well defined on the abelianization")
    if A.rows:
        snf = smith_normal_form(A)
        diag = list(snf.diagonal)
        vinv = unimodular_inverse(snf.V)
    else:
        diag, vinv = [], IntMatrix.identity(N)
    diag += [0] * (N - len(diag))
    images = vinv.apply(q)
    factors = []
    for d, a in zip(diag, images):
        if d != 1:
            factors.append((d, a % modulus))
    torsion = tuple(sorted(d for d, _ in factors if d))
    free = sum(1 for d, _ in factors if d == 0)
    factors.sort(key=lambda f: (f[0] == 0, f[0]))
    if modulus > 1 and not any(a % 2 for _, a in factors):
        raise SpinError("q_* is not surjective")
    return AbelianStructure(free, torsion, tuple(factors), modulus)


def abelianize_with_q(p: PcPresentation) -> AbelianStructure:
    """Abelianization of a group with a single head of order 2^m, together
    with the images of the factors under the projection onto C_{2^m}."""
    if p.n_heads != 1:
        raise SpinError("expected exactly one head generator")
    (h, r), = p.head_gens
    if r < 2 or r & (r - 1):
        raise SpinError(f"head order {r} is not a power of 2 with m >= 1")
    q = (1,) + (0,) * p.dimension
    return abelianize(p, q, r)


def factors_through_double(a: AbelianStructure, m: int) -> tuple[bool, list[dict]]:
    """Does q_*: A -> C_{2^m} lift to C_{2^{m+1}}?  Checked factor by factor."""
    mod, big = 1 << m, 1 << (m + 1)
    witness, ok = [], True
    for d, img in a.q_images:
        img %= mod
        if d == 0:
            x = img
        else:
            x = next((x for x in (img, img + mod) if (d * x) % big == 0), None)
        ok = ok and x is not None
        witness.append({"order": d, "image": img, "lift": x})
    return ok, witness


# ---------------------------------------------------------------- report


@dataclass
class SpinReport:
    name: str
    n: int | None = None
    orientable: bool | None = None
    holonomy_order: int | None = None
    m: int | None = None
    case: str | None = None
    j: int | None = None
    theta: dict[str, IntMatrix] = field(default_factory=dict)
    theta_orders: dict[str, int] = field(default_factory=dict)
    sylow_theta: IntMatrix | None = None
    abelian: AbelianStructure | None = None
    factors_through: bool | None = None
    witness: list[dict] | None = None
    spin: str = UNKNOWN
    nilpotency_class: int | None = None
    series_source: str | None = None
    stage_errors: list[dict] = field(default_factory=list)
    diagnostics: dict[str, Any] | None = None

    @property
    def out_of_scope(self) -> bool:
        return self.spin == UNKNOWN

    def to_json(self) -> dict:
        spin = {YES: True, NO: False}.get(self.spin)
        out = {
            "name": self.name,
            "n": self.n,
            "orientable": self.orientable,
            "holonomy_order": self.holonomy_order,
            "m": self.m,
            "case": self.case,
            "j": self.j,
            "theta": {
                h: {
                    "matrix": M.tolist(),
                    "trace": M.trace(),
                    "det": M.det(),
                    "order": self.theta_orders.get(h),
                }
                for h, M in self.theta.items()
            },
            "abelianization": self.abelian.to_json() if self.abelian else None,
            "factors_through": self.factors_through,
            "witness": self.witness,
            "spin": spin,
            "stage_errors": list(self.stage_errors),
        }
        if self.diagnostics is not None:
            out["diagnostics"] = self.diagnostics
        return out

    def summary(self) -> str:
        lines = [f"group {self.name}: n={self.n}, class {self.nilpotency_class}"]
        if self.orientable is not None:
            lines.append(f"  orientable: {'yes' if self.orientable else 'no'}")
        for h, M in self.theta.items():
            lines.append(f"  theta({h}) = {M.tolist()}  trace {M.trace()}  det {M.det()}")
        if self.holonomy_order is not None:
            lines.append(f"  |F| = {self.holonomy_order}, m = {self.m}")
        if self.case:
            lines.append(f"  case: {self.case}" + (f", j = {self.j}" if self.j is not None else ""))
        if self.abelian:
            lines.append(f"  abelianization: {self.abelian.shape()}")
            imgs = ", ".join(f"{'Z' if d == 0 else 'C%d' % d}->{a}" for d, a in self.abelian.q_images)
            lines.append(f"  q_* images: {imgs}")
        if self.factors_through is not None:
            lines.append(f"  factors through C_{2 * self.abelian.modulus}: {self.factors_through}")
        lines.append(f"  spin: {self.spin}")
        for e in self.stage_errors:
            lines.append(f"  error in {e['stage']}: {e['message']}")
        return "\n".join(lines)


def _stage(report, stage, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except (SeriesError, HolonomyError, SpinError, CollectionError, ValueError) as exc:
        report.stage_errors.append({"stage": stage, "message": str(exc)})
        raise StageError(stage, str(exc), report) from exc


def decide_spin(
    p: PcPresentation,
    series_auto: bool = False,
    sylow_lift=None,
    diagnostics: bool = False,
) -> SpinReport:
    report = SpinReport(p.name)

    def fail(stage, msg):
        report.stage_errors.append({"stage": stage, "message": msg})
        raise StageError(stage, msg, report)

    v = _stage(report, "validate", validate_structure, p)
    if not v.valid:
        fail("validate", "; ".join(v.errors))
    cons = _stage(report, "consistency", consistency_check, p)
    if not cons.passed:
        fail("consistency", cons.failure)

    s = _stage(report, "series", adapted_series, p, series_auto)
    report.n, report.nilpotency_class, report.series_source = s.dimension, s.nilpotency_class, s.source
    rep = _stage(report, "holonomy_representation", holonomy_representation, p, s)
    report.theta = dict(rep.generator_matrices)
    report.theta_orders = dict(rep.image_orders)

    report.orientable = orientability(rep)
    H = _stage(report, "holonomy", enumerate_holonomy, p)
    report.holonomy_order = H.order
    report.m = H.sylow2.m
    if not report.orientable:
        report.case = "out-of-scope"
        return report
    if not H.sylow2.cyclic:
        report.case = "out-of-scope"
        return report
    if report.m == 0:
        report.case, report.spin = "trivial-sylow", YES
        return report

    g2 = _stage(report, "sylow", sylow2_reduce, p, H, sylow_lift)
    cons2 = _stage(report, "sylow", consistency_check, g2)
    if not cons2.passed:
        fail("sylow", f"reduced presentation is inconsistent: {cons2.failure}")
    s2 = _stage(report, "series", adapted_series, g2, series_auto)
    rep2 = _stage(report, "holonomy_representation", holonomy_representation, g2, s2)
    (A,) = rep2.generator_matrices.values()
    report.sylow_theta = A
    doubles, j = _stage(report, "doubling", lemma_gg_doubling, A, report.m)
    report.j = j

    if not doubles:
        report.case, report.spin = "a", YES
        if diagnostics:
            report.diagnostics = _case_b_diagnostics(report, p, g2, H)
        return report

    report.case = "b"
    ab = _stage(report, "abelianization", abelianize_with_q, g2)
    ok, witness = factors_through_double(ab, report.m)
    report.abelian, report.factors_through, report.witness = ab, ok, witness
    report.spin = YES if ok else NO
    if diagnostics:
        report.diagnostics = _case_b_diagnostics(report, p, g2, H)
    return report


def _case_b_diagnostics(report, p, g2, H) -> dict:
    """Case-(b) data for Gamma(2) and, when F is cyclic, the same test run on Gamma itself."""
    m = report.m
    out: dict[str, Any] = {}
    try:
        ab = abelianize_with_q(g2)
        ok, w = factors_through_double(ab, m)
        out["sylow_cover"] = {"abelianization": ab.to_json(), "factors_through": ok, "witness": w}
    except SpinError as exc:
        out["sylow_cover"] = {"error": str(exc)}
    gen = next((e for e, o in zip(H.elements, H.element_orders) if o == H.order), None)
    if gen is None or p.n_heads == 0:
        out["direct"] = None
        return out
    mod = 1 << m
    powers = H.generated(gen)
    image = {x: i % mod for i, x in enumerate(powers)}
    q = []
    for i in range(p.n_heads):
        unit = tuple(int(t == i) for t in range(p.n_heads))
        q.append(image[unit])
    q += [0] * p.dimension
    try:
        ab = abelianize(p, tuple(q), mod)
        ok, w = factors_through_double(ab, m)
        out["direct"] = {"abelianization": ab.to_json(), "factors_through": ok, "witness": w}
    except SpinError as exc:
        out["direct"] = {"error": str(exc)}
    return out


def theta_of_lift(p: PcPresentation, lift, series_auto: bool = False) -> IntMatrix:
    """theta of an arbitrary element of Gamma on the series of Gamma."""
    return theta_of(p, adapted_series(p, series_auto), tuple(lift), collector_for(p))
