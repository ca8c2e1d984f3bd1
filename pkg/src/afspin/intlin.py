"""Exact integer linear algebra.

Matrices hold Python ints, so nothing here can overflow.  The Smith
normal form uses the smallest-nonzero pivot rule and tracks both
unimodular transforms; everything else (saturation, membership,
unimodular inverses) is built on top of it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise DimensionError("negative dimension")
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise DimensionError("entries do not match the declared shape")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]], cols: int | None = None) -> IntMatrix:
        data = tuple(tuple(int(x) for x in r) for r in rows)
        if cols is None:
            cols = len(data[0]) if data else 0
        return cls(len(data), cols, data)

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def block_diagonal(cls, blocks: Sequence[IntMatrix]) -> IntMatrix:
        n = sum(b.rows for b in blocks)
        out = [[0] * n for _ in range(n)]
        off = 0
        for b in blocks:
            if b.rows != b.cols:
                raise DimensionError("blocks must be square")
            for i in range(b.rows):
                for j in range(b.cols):
                    out[off + i][off + j] = b.entries[i][j]
            off += b.rows
        return cls.from_rows(out, n)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.entries)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def transpose(self) -> IntMatrix:
        return IntMatrix.from_rows(zip(*self.entries), self.rows) if self.rows else IntMatrix.zeros(self.cols, 0)

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        cols = other.column_tuples()
        return IntMatrix.from_rows(
            (tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.entries),
            other.cols,
        )

    def column_tuples(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def __neg__(self) -> IntMatrix:
        return IntMatrix.from_rows(((-x for x in r) for r in self.entries), self.cols)

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        """Matrix times column vector."""
        if len(v) != self.cols:
            raise DimensionError("vector length does not match column count")
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self.entries)

    def trace(self) -> int:
        self._need_square("trace")
        return sum(self.entries[i][i] for i in range(self.rows))

    def det(self) -> int:
        self._need_square("det")
        return bareiss_det(self.tolist())

    def power(self, e: int) -> IntMatrix:
        """Non-negative power by repeated squaring."""
        self._need_square("power")
        if e < 0:
            raise ValueError("negative powers need an inverse; use unimodular_inverse")
        result = IntMatrix.identity(self.rows)
        base = self
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def is_identity(self) -> bool:
        return self.is_square and self == IntMatrix.identity(self.rows)

    def order(self, bound: int = 1 << 12) -> int | None:
        """Multiplicative order, or None if it exceeds `bound`."""
        self._need_square("order")
        ident = IntMatrix.identity(self.rows)
        x = self
        for k in range(1, bound + 1):
            if x == ident:
                return k
            x = x @ self
        return None

    def _need_square(self, what):
        if not self.is_square:
            raise DimensionError(f"{what} needs a square matrix, got {self.rows}x{self.cols}")


def matrix_basics(a: IntMatrix, what: str, arg=None):
    """Dispatch for det / trace / power(e) / multiply(B)."""
    if what == "det":
        return a.det()
    if what == "trace":
        return a.trace()
    if what == "power":
        return a.power(arg)
    if what == "multiply":
        return a @ arg
    raise ValueError(f"unknown operation {what!r}")


def bareiss_det(m: list[list[int]]) -> int:
    """Fraction-free determinant."""
    n = len(m)
    if n == 0:
        return 1
    a = [row[:] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class SmithDecomposition:
    """U @ A @ V == D with d_1 | d_2 | ... on the diagonal of D."""

    D: IntMatrix
    U: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.D[i, i] for i in range(min(self.D.rows, self.D.cols)))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


def smith_normal_form(a: IntMatrix) -> SmithDecomposition:
    m, n = a.rows, a.cols
    A = a.tolist()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        if q:
            A[dst] = [x - q * y for x, y in zip(A[dst], A[src])]
            U[dst] = [x - q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        if q:
            for row in A:
                row[dst] -= q * row[src]
            for row in V:
                row[dst] -= q * row[src]

    t = 0
    while t < min(m, n):
        nonzero = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not nonzero:
            break
        _, pi, pj = min(nonzero)
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            p = A[t][t]
            # rows then columns
            for i in range(t + 1, m):
                add_row(i, t, A[i][t] // p)
            for j in range(t + 1, n):
                add_col(j, t, A[t][j] // p)
            rem = [(abs(A[i][t]), i, "r") for i in range(t + 1, m) if A[i][t]]
            rem += [(abs(A[t][j]), j, "c") for j in range(t + 1, n) if A[t][j]]
            if rem:
                _, k, kind = min(rem)
                if kind == "r":
                    swap_rows(t, k)
                else:
                    swap_cols(t, k)
                continue
            # pivot must divide the remaining block
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], -1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return SmithDecomposition(
        IntMatrix.from_rows(A, n), IntMatrix.from_rows(U, m), IntMatrix.from_rows(V, n)
    )


def unimodular_inverse(a: IntMatrix) -> IntMatrix:
    """Exact inverse of a matrix with determinant +-1."""
    a._need_square("inverse")
    n = a.rows
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a.entries)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    out = [row[n:] for row in M]
    if any(x.denominator != 1 for row in out for x in row):
        raise ValueError("matrix is not unimodular")
    return IntMatrix.from_rows(((int(x) for x in row) for row in out), n)


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style HNF of the lattice spanned by `rows` (zero rows dropped).

    Pivots are positive and entries above each pivot are reduced into
    [0, pivot).
    """
    B = [list(r) for r in rows if any(r)]
    if not B:
        return []
    ncols = len(B[0])
    out: list[list[int]] = []
    for c in range(ncols):
        live = [r for r in B if r[c]]
        rest = [r for r in B if not r[c]]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[c]))
            piv = live[0]
            nxt = [piv]
            for r in live[1:]:
                q = r[c] // piv[c]
                r = [x - q * y for x, y in zip(r, piv)]
                (nxt if r[c] else rest).append(r)
            live = nxt
        if live:
            piv = live[0]
            if piv[c] < 0:
                piv = [-x for x in piv]
            out.append(piv)
        B = [r for r in rest if any(r)]
    # reduce above pivots
    for k, row in enumerate(out):
        c = next(j for j, x in enumerate(row) if x)
        for i in range(k):
            q = out[i][c] // row[c]
            if q:
                out[i] = [x - q * y for x, y in zip(out[i], row)]
    return out


def hermite_saturate(gens: Sequence[Sequence[int]], dim: int | None = None) -> list[list[int]]:
    """Basis (in HNF) of the pure closure of span_Z(gens) inside Z^dim."""
    gens = [list(g) for g in gens]
    if not gens:
        return []
    snf = smith_normal_form(IntMatrix.from_rows(gens, dim))
    vinv = unimodular_inverse(snf.V)
    basis = [list(vinv.row(i)) for i, d in enumerate(snf.diagonal) if d]
    return hermite_normal_form(basis)


def saturation_index(gens: Sequence[Sequence[int]], dim: int | None = None) -> int:
    """[saturation : span]; the product of the nonzero elementary divisors."""
    if not gens:
        return 1
    out = 1
    for d in smith_normal_form(IntMatrix.from_rows(gens, dim)).diagonal:
        if d:
            out *= d
    return out


def membership_solve(basis: Sequence[Sequence[int]], v: Sequence[int]) -> tuple[int, ...] | None:
    """Integer x with x @ basis == v, or None when v is outside the lattice."""
    if not basis:
        return () if not any(v) else None
    B = IntMatrix.from_rows(basis, len(v))
    snf = smith_normal_form(B)
    # x B = v  <=>  (x U^-1) D = v V
    w = IntMatrix.from_rows([v], len(v)) @ snf.V
    w = w.row(0)
    diag = snf.diagonal
    y = []
    for i in range(B.rows):
        d = diag[i] if i < len(diag) else 0
        wi = w[i] if i < len(w) else 0
        if d == 0:
            if wi != 0:
                return None
            y.append(0)
        else:
            if wi % d:
                return None
            y.append(wi // d)
    if any(w[i] for i in range(B.rows, len(w))):
        return None
    x = IntMatrix.from_rows([y], B.rows) @ snf.U
    return x.row(0)


def gcd_all(xs: Iterable[int]) -> int:
    g = 0
    for x in xs:
        g = gcd(g, x)
    return g
