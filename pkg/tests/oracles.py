"""Independent reference implementations used only by the tests.

None of these share code with the package beyond reading the raw
relations of a presentation.
"""

from __future__ import annotations

import itertools
from math import gcd

# ---------------------------------------------------------------- rewriting normal form


class OracleBudget(Exception):
    pass


class RewritingOracle:
    """Normal forms by plain leftmost string rewriting.

    Letters are (index, +-1).  Head generators are kept only as inverse
    letters: h -> h^-(r-1) w, and r adjacent h^-1 collapse to w^-1.  An
    out-of-order pair x^e y^d (x later than y) becomes y^d (y^-d x^e y^d),
    using the stated relation when d = -1 and a searched inverse conjugate
    when d = +1.  The final head block h^-e is turned into h^(r-e) w^-1.
    """

    def __init__(self, p, budget: int = 200_000):
        self.p = p
        self.gens = p.generators
        self.idx = {g: i for i, g in enumerate(self.gens)}
        self.nh = p.n_heads
        self.orders = [r for _, r in p.head_gens] + [0] * p.dimension
        self.budget = budget
        self._psi = {}
        self.steps = 0

    def letters(self, word):
        out = []
        for g, e in word:
            i = self.idx[g] if isinstance(g, str) else g
            out.extend([(i, 1 if e > 0 else -1)] * abs(e))
        return out

    def phi(self, y, x):
        """letters of y x y^-1."""
        return self.letters(self.p.relation(self.gens[y], self.gens[x]))

    def psi(self, y, x):
        """letters of y^-1 x y for lattice y < x, found by coordinate search."""
        key = (y, x)
        if key not in self._psi:
            N = len(self.gens)
            exps = [0] * N
            exps[x] = 1

            def word_of(ex):
                return [(i, 1 if ex[i] > 0 else -1) for i in range(N) for _ in range(abs(ex[i]))]

            def image(ex):
                w = []
                for i, s in word_of(ex):
                    piece = self.phi(y, i)
                    w.extend(piece if s > 0 else [(j, -t) for j, t in reversed(piece)])
                return self._sorted_exponents(w)

            target = [int(i == x) for i in range(N)]
            for pos in range(x + 1, N):
                # the image moves coordinate `pos` with slope one, so the offset
                # seen at zero is the first guess; fall back to a scan around it
                exps[pos] = 0
                guess = -image(exps)[pos]
                for cand in sorted(range(guess - 50, guess + 51), key=lambda v: abs(v - guess)):
                    exps[pos] = cand
                    got = image(exps)
                    if got[: pos + 1] == target[: pos + 1]:
                        break
                else:
                    raise OracleBudget("inverse conjugate search exhausted")
            if image(exps) != target:
                raise OracleBudget("inverse conjugate search failed")
            self._psi[key] = word_of(exps)
        return self._psi[key]

    def _tick(self):
        self.steps += 1
        if self.steps > self.budget:
            raise OracleBudget("rewriting budget exceeded")

    def _sort(self, w):
        """Rewrite until no rule applies; returns the sorted letter list."""
        w = list(w)
        while True:
            self._tick()
            for i, (g, s) in enumerate(w):
                r = self.orders[g]
                if r and s > 0:
                    w[i : i + 1] = [(g, -1)] * (r - 1) + self.letters(self.p.power(self.gens[g]))
                    break
                if r and w[i : i + r] == [(g, -1)] * r:
                    pw = self.letters(self.p.power(self.gens[g]))
                    w[i : i + r] = [(j, -t) for j, t in reversed(pw)]
                    break
                if i + 1 < len(w):
                    h, t = w[i + 1]
                    if h == g and t == -s:
                        del w[i : i + 2]
                        break
                    if h < g and not (t > 0 and self.orders[h]):
                        conj = self.phi(h, g) if t < 0 else self.psi(h, g)
                        if s < 0:
                            conj = [(j, -u) for j, u in reversed(conj)]
                        w[i : i + 2] = [(h, t)] + conj
                        break
            else:
                return w

    def _sorted_exponents(self, w):
        ex = [0] * len(self.gens)
        for g, s in self._sort(w):
            ex[g] += s
        return ex

    def normal_form(self, word):
        """Normal exponent vector of a word, or None if the budget runs out."""
        self.steps = 0
        try:
            return tuple(self._nf(self.letters(word), 0))
        except OracleBudget:
            return None

    def _nf(self, w, first):
        N = len(self.gens)
        ex = self._sorted_exponents(w)
        for g in range(first, self.nh):
            if ex[g] < 0:
                r = self.orders[g]
                e = -ex[g]
                rest = []
                for i in range(g + 1, N):
                    rest.extend([(i, 1 if ex[i] > 0 else -1)] * abs(ex[i]))
                pw = self.letters(self.p.power(self.gens[g]))
                tail = self._nf([(j, -t) for j, t in reversed(pw)] + rest, g + 1)
                out = [0] * N
                out[g] = (r - e) % r
                for i in range(g + 1, N):
                    out[i] = tail[i]
                for i in range(first, g):
                    out[i] = ex[i]
                return out
        return ex


# ---------------------------------------------------------------- Smith form by determinantal divisors


def laplace_det(m):
    n = len(m)
    if n == 0:
        return 1
    if n == 1:
        return m[0][0]
    total = 0
    for j in range(n):
        if m[0][j]:
            minor = [row[:j] + row[j + 1 :] for row in m[1:]]
            total += (-1) ** j * m[0][j] * laplace_det(minor)
    return total


def determinantal_divisors(rows):
    """Invariant factors d_1 | d_2 | ... from gcds of k x k minors."""
    if not rows or not rows[0]:
        return []
    r, c = len(rows), len(rows[0])
    D = [1]
    for k in range(1, min(r, c) + 1):
        g = 0
        for ri in itertools.combinations(range(r), k):
            for ci in itertools.combinations(range(c), k):
                g = gcd(g, laplace_det([[rows[i][j] for j in ci] for i in ri]))
        if g == 0:
            break
        D.append(g)
    return [D[i] // D[i - 1] for i in range(1, len(D))]


def abelian_invariants(rows, ncols):
    """(free rank, torsion divisors > 1) of Z^ncols / rowspace."""
    inv = determinantal_divisors(rows) if rows else []
    return ncols - len(inv), sorted(d for d in inv if d > 1)


# ---------------------------------------------------------------- homomorphism enumeration


def lifts_exist(factors, m):
    """Brute force: is there a hom prod C_d -> C_{2^{m+1}} reducing to the
    given images mod 2^m?  Factor order 0 means Z."""
    big, mod = 1 << (m + 1), 1 << m
    choices = []
    for d, a in factors:
        opts = [x for x in range(big) if (d * x) % big == 0 and x % mod == a % mod]
        choices.append(opts)
    return all(choices)


def homs_cyclic(d: int, target: int):
    """All homs C_d -> C_target as images of the generator (d = 0 is Z, capped)."""
    return [x for x in range(target) if (d * x) % target == 0]
