"""Collection from the left in a polycyclic presentation.

Elements are exponent vectors (``NormalWord``), head exponents first and
reduced modulo their relative orders.  Moving ``g^d`` left past a collected
tail conjugates the tail by ``g^d``: for ``d = -1`` this uses the stored
relation ``g y g^-1``, for ``d = +1`` the derived ``g^-1 y g``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence

from .presentation import PcPresentation, Word, invert_word, parse_word

NormalWord = tuple[int, ...]
Syllables = list[tuple[int, int]]

DEFAULT_STEP_BUDGET = 10**7


class CollectionError(RuntimeError):
    """Collection could not finish: budget exhausted or relations inconsistent."""


def step_budget() -> int:
    raw = os.environ.get("AFSPIN_STEP_BUDGET")
    return int(raw) if raw else DEFAULT_STEP_BUDGET


def _inv(syl: Sequence[tuple[int, int]]) -> Syllables:
    return [(g, -e) for g, e in reversed(syl)]


def _pow(syl: Sequence[tuple[int, int]], e: int) -> Syllables:
    if len(syl) == 1:
        g, x = syl[0]
        return [(g, x * e)]
    base = list(syl) if e > 0 else _inv(syl)
    return base * abs(e)


class Collector:
    """Normal forms for one presentation.  Derived relations are memoised."""

    def __init__(self, p: PcPresentation, budget: int | None = None):
        self.p = p
        self.gens = p.generators
        self.N = len(self.gens)
        self.idx = {g: i for i, g in enumerate(self.gens)}
        self.orders = p.relative_orders
        self.budget = budget if budget is not None else step_budget()
        self._raw_phi = {
            (self.idx[x], self.idx[y]): self._syl(w) for (x, y), w in p.conjugation_relations.items()
        }
        self._raw_pow = {self.idx[h]: self._syl(p.power(h)) for h in p.head_names}
        self._phi: dict[tuple[int, int], Syllables] = {}
        self._psi: dict[tuple[int, int], Syllables] = {}
        self._pow: dict[int, Syllables] = {}
        self._busy: set = set()

    # -- conversions

    def _syl(self, word: Iterable) -> Syllables:
        out = []
        for g, e in word:
            if e:
                out.append((g if isinstance(g, int) else self.idx[g], e))
        return out

    def to_word(self, nw: NormalWord) -> Word:
        return tuple((self.gens[i], e) for i, e in enumerate(nw) if e)

    @staticmethod
    def syllables(nw: NormalWord) -> Syllables:
        return [(i, e) for i, e in enumerate(nw) if e]

    def unit(self, i: int) -> NormalWord:
        return tuple(int(k == i) for k in range(self.N))

    @property
    def identity(self) -> NormalWord:
        return (0,) * self.N

    # -- relations

    def _guard(self, key, fn):
        if key in self._busy:
            raise CollectionError(f"cyclic dependency while deriving relation {key}")
        self._busy.add(key)
        try:
            return fn()
        finally:
            self._busy.discard(key)

    def _below(self, g: int, w: NormalWord, what: str) -> Syllables:
        if any(w[: g + 1]):
            raise CollectionError(
                f"{what} does not lie in the subgroup generated by generators after {self.gens[g]}"
            )
        return self.syllables(w)

    def power_word(self, g: int) -> Syllables:
        if g not in self._pow:
            raw = self._raw_pow.get(g, [])
            if any(k <= g for k, _ in raw):
                raise CollectionError(f"power relation of {self.gens[g]} uses an earlier generator")
            w = self._guard(("pow", g), lambda: self.collect(raw))
            self._pow[g] = self._below(g, w, f"{self.gens[g]}^{self.orders[g]}")
        return self._pow[g]

    def phi(self, g: int, j: int) -> Syllables:
        """g y g^-1 for y = gens[j]."""
        key = (g, j)
        if key not in self._phi:
            raw = self._raw_phi.get(key)
            if raw is None:
                self._phi[key] = [(j, 1)]
            else:
                if any(k <= g for k, _ in raw):
                    raise CollectionError(
                        f"filtration violation in relation {self.gens[g]} {self.gens[j]} {self.gens[g]}^-1"
                    )
                w = self._guard(("phi",) + key, lambda: self.collect(raw))
                self._phi[key] = self._below(g, w, "conjugation relation")
        return self._phi[key]

    def psi(self, g: int, j: int) -> Syllables:
        """g^-1 y g for y = gens[j], derived from the stored relations."""
        key = (g, j)
        if key not in self._psi:
            if (g, j) not in self._raw_phi:
                self._psi[key] = [(j, 1)]
            else:
                self._psi[key] = self._guard(("psi",) + key, lambda: self._derive_psi(g, j))
        return self._psi[key]

    def apply_phi(self, g: int, syl: Sequence[tuple[int, int]]) -> NormalWord:
        word: Syllables = []
        for k, e in syl:
            word.extend(_pow(self.phi(g, k), e))
        return self.collect(word)

    def _derive_psi(self, g: int, j: int) -> Syllables:
        r = self.orders[g]
        if r:
            # g^-1 = w^-1 g^(r-1) with w = g^r central in <g>
            cur: NormalWord = self.unit(j)
            for _ in range(r - 1):
                cur = self.apply_phi(g, self.syllables(cur))
            w = self.power_word(g)
            res = self.collect(_inv(w) + self.syllables(cur) + w)
            return self._below(g, res, "derived inverse conjugate")
        # lattice: solve g x g^-1 = y; the error sinks one filtration step per round
        x = self.unit(j)
        for _ in range(self.N + 1):
            y = self.apply_phi(g, self.syllables(x))
            err = self.collect(_inv(self.syllables(y)) + [(j, 1)])
            if not any(err):
                return self._below(g, x, "derived inverse conjugate")
            x = self.collect(self.syllables(x) + self.syllables(err))
        raise CollectionError(
            f"inverse conjugate {self.gens[g]}^-1 {self.gens[j]} {self.gens[g]} did not converge"
        )

    def conj(self, g: int, j: int, d: int) -> Syllables:
        """g^-d y g^d."""
        return self.psi(g, j) if d > 0 else self.phi(g, j)

    # -- collection

    def collect(self, word: Iterable) -> NormalWord:
        e = [0] * self.N
        stack = self._syl(word)
        stack.reverse()
        orders = self.orders
        N = self.N
        steps = 0
        while stack:
            steps += 1
            if steps > self.budget:
                raise CollectionError(f"step budget of {self.budget} exceeded")
            g, s = stack.pop()
            tail = [(j, e[j]) for j in range(g + 1, N) if e[j]]
            if not tail:
                e[g] += s
                r = orders[g]
                if r and not 0 <= e[g] < r:
                    q, e[g] = divmod(e[g], r)
                    stack.extend(reversed(_pow(self.power_word(g), q)))
                continue
            d = 1 if s > 0 else -1
            for j, _ in tail:
                e[j] = 0
            if s != d:
                stack.append((g, s - d))
            moved: Syllables = []
            for j, x in tail:
                c = self.conj(g, j, d)
                moved.extend(_pow(c, x))
            stack.extend(reversed(moved))
            e[g] += d
            r = orders[g]
            if r and not 0 <= e[g] < r:
                q, e[g] = divmod(e[g], r)
                stack.extend(reversed(_pow(self.power_word(g), q)))
        return tuple(e)

    # -- group operations on normal words

    def mul(self, *xs: NormalWord) -> NormalWord:
        word: Syllables = []
        for x in xs:
            word.extend(self.syllables(x))
        return self.collect(word)

    def inv(self, x: NormalWord) -> NormalWord:
        return self.collect(_inv(self.syllables(x)))

    def pow(self, x: NormalWord, e: int) -> NormalWord:
        result = self.identity
        base = x if e >= 0 else self.inv(x)
        e = abs(e)
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def conjugate(self, x: NormalWord, y: NormalWord) -> NormalWord:
        """x y x^-1."""
        return self.mul(x, y, self.inv(x))

    def commutator(self, x: NormalWord, y: NormalWord) -> NormalWord:
        """[x, y] = x^-1 y^-1 x y."""
        return self.mul(self.inv(x), self.inv(y), x, y)


def collector_for(p: PcPresentation) -> Collector:
    c = p.__dict__.get("_collector")
    if c is None:
        c = Collector(p)
        object.__setattr__(p, "_collector", c)
    return c


def _as_word(p: PcPresentation, w) -> Word:
    if isinstance(w, str):
        return parse_word(w, p.generators, p.parameters)
    return tuple(w)


def normal_form(p: PcPresentation, w) -> NormalWord:
    """Collected exponent vector of a word (text or syllable sequence)."""
    return collector_for(p).collect(_as_word(p, w))


def group_op(p: PcPresentation, op: str, *args):
    c = collector_for(p)
    if op == "multiply":
        return c.mul(*args)
    if op == "invert":
        return c.inv(*args)
    if op == "power":
        return c.pow(*args)
    if op == "conjugate":
        return c.conjugate(*args)
    if op == "commutator":
        return c.commutator(*args)
    raise ValueError(f"unknown group operation {op!r}")


def derive_inverse_conjugation(p: PcPresentation, i: int, j: int) -> NormalWord:
    """g_i^-1 g_j g_i as a normal word."""
    if not i < j:
        raise ValueError("need i < j")
    c = collector_for(p)
    w = [0] * c.N
    for k, e in c.psi(i, j):
        w[k] = e
    return tuple(w)


@dataclass
class ConsistencyReport:
    passed: bool
    checked: int
    failure: str | None = None

    def __bool__(self):
        return self.passed


def consistency_check(p: PcPresentation) -> ConsistencyReport:
    """Overlap tests for the presentation; stops at the first violation.

    Covers the usual associativity overlaps for generator triples, the
    power overlaps for finite relative orders and the inverse overlaps
    for infinite generators.
    """
    c = Collector(p)
    N, orders = c.N, c.orders
    names = c.gens

    def g(i, e=1):
        return tuple(e if k == i else 0 for k in range(N))

    def gp(i, e):
        return c.collect([(i, e)])

    checks = []
    for k in range(N):
        for j in range(k):
            for i in range(j):
                signs_k = (1,) if orders[k] else (1, -1)
                signs_j = (1,) if orders[j] else (1, -1)
                signs_i = (1,) if orders[i] else (1, -1)
                for a in signs_k:
                    for b in signs_j:
                        for d in signs_i:
                            checks.append(
                                (
                                    f"({names[k]}^{a} {names[j]}^{b}) {names[i]}^{d}",
                                    lambda k=k, j=j, i=i, a=a, b=b, d=d: (
                                        c.mul(c.mul(g(k, a), g(j, b)), g(i, d)),
                                        c.mul(g(k, a), c.mul(g(j, b), g(i, d))),
                                    ),
                                )
                            )
    for j in range(N):
        for i in range(j):
            if orders[j]:
                r = orders[j]
                checks.append(
                    (
                        f"{names[j]}^{r} {names[i]}",
                        lambda j=j, i=i, r=r: (
                            c.mul(gp(j, r), g(i)),
                            c.mul(gp(j, r - 1), c.mul(g(j), g(i))),
                        ),
                    )
                )
            if orders[i]:
                r = orders[i]
                checks.append(
                    (
                        f"{names[j]} {names[i]}^{r}",
                        lambda j=j, i=i, r=r: (
                            c.mul(g(j), gp(i, r)),
                            c.mul(c.mul(g(j), g(i)), gp(i, r - 1)),
                        ),
                    )
                )
            else:
                for b in (1, -1):
                    checks.append(
                        (
                            f"({names[j]}^{b} {names[i]}^-1) {names[i]}",
                            lambda j=j, i=i, b=b: (c.mul(c.mul(g(j, b), g(i, -1)), g(i)), g(j, b)),
                        )
                    )
                    checks.append(
                        (
                            f"({names[j]}^{b} {names[i]}) {names[i]}^-1",
                            lambda j=j, i=i, b=b: (c.mul(c.mul(g(j, b), g(i)), g(i, -1)), g(j, b)),
                        )
                    )
            if not orders[j]:
                checks.append(
                    (
                        f"{names[j]}^-1 ({names[j]} {names[i]})",
                        lambda j=j, i=i: (c.mul(g(j, -1), c.mul(g(j), g(i))), g(i)),
                    )
                )
    for i in range(N):
        if orders[i]:
            r = orders[i]
            checks.append(
                (
                    f"{names[i]} {names[i]}^{r}",
                    lambda i=i, r=r: (c.mul(g(i), gp(i, r)), c.mul(gp(i, r), g(i))),
                )
            )

    for n, (label, fn) in enumerate(checks, 1):
        try:
            lhs, rhs = fn()
        except CollectionError as exc:
            return ConsistencyReport(False, n, f"{label}: {exc}")
        if lhs != rhs:
            return ConsistencyReport(
                False, n, f"{label}: {_fmt(c, lhs)} != {_fmt(c, rhs)}"
            )
    return ConsistencyReport(True, len(checks))


def _fmt(c: Collector, w: NormalWord) -> str:
    from .presentation import word_to_str

    return word_to_str(c.to_word(w))
