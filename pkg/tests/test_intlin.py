import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from afspin.intlin import (
    DimensionError,
    IntMatrix,
    hermite_normal_form,
    hermite_saturate,
    matrix_basics,
    membership_solve,
    saturation_index,
    smith_normal_form,
)

from oracles import determinantal_divisors, laplace_det

THETA_F1_REF = [[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, 0, -1], [0, 0, -1, 0]]

small = st.integers(-9, 9)


def matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def check_snf(rows):
    A = IntMatrix.from_rows(rows)
    s = smith_normal_form(A)
    assert s.U @ A @ s.V == s.D
    assert abs(s.U.det()) == 1 and abs(s.V.det()) == 1
    d = s.diagonal
    assert all(x >= 0 for x in d)
    for a, b in zip(d, d[1:]):
        assert (b == 0) if a == 0 else b % a == 0
    for i in range(s.D.rows):
        for j in range(s.D.cols):
            if i != j:
                assert s.D[i, j] == 0
    return s


def test_basics_on_reference_theta():
    A = IntMatrix.from_rows(THETA_F1_REF)
    assert matrix_basics(A, "det") == 1
    assert matrix_basics(A, "trace") == 0
    assert matrix_basics(A, "power", 2).is_identity()
    assert A.order() == 2


def test_power_of_identity_and_zero_exponent():
    I = IntMatrix.identity(5)
    assert I.power(17) == I
    A = IntMatrix.from_rows([[1, 1], [0, 1]])
    assert A.power(0) == IntMatrix.identity(2)
    assert A.power(5) == IntMatrix.from_rows([[1, 5], [0, 1]])


def test_dimension_errors():
    A = IntMatrix.from_rows([[1, 2, 3]])
    with pytest.raises(DimensionError):
        A.det()
    with pytest.raises(DimensionError):
        A.trace()
    with pytest.raises(DimensionError):
        A @ A


def test_snf_examples():
    s = check_snf([[2, 4], [6, 8]])
    assert s.diagonal == (2, 4)
    s = smith_normal_form(IntMatrix.identity(3))
    assert s.D == IntMatrix.identity(3) and s.U == IntMatrix.identity(3) and s.V == IntMatrix.identity(3)
    s = smith_normal_form(IntMatrix.zeros(2, 3))
    assert s.D == IntMatrix.zeros(2, 3)


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_snf_matches_determinantal_divisors(rows):
    s = check_snf(rows)
    nonzero = [d for d in s.diagonal if d]
    assert nonzero == determinantal_divisors(rows)


def test_snf_random_4x4_product_of_divisors():
    rng = random.Random(7)
    for _ in range(200):
        rows = [[rng.randint(-9, 9) for _ in range(4)] for _ in range(4)]
        s = check_snf(rows)
        det = laplace_det(rows)
        if det:
            prod = 1
            for d in s.diagonal:
                prod *= d
            assert prod == abs(det)


@given(matrices(4, 4).filter(lambda r: len(r) == len(r[0])))
def test_bareiss_matches_laplace(rows):
    assert IntMatrix.from_rows(rows).det() == laplace_det(rows)


def test_saturation_examples():
    l, k = 1, 1
    assert hermite_saturate([(2 * l, (2 * l - 1) * k), (0, 2 * k)], 2) == [[1, 0], [0, 1]]
    assert hermite_saturate([(2, 0)], 2) == [[1, 0]]
    assert hermite_saturate([], 2) == []
    assert saturation_index([(2, 0)], 2) == 2


@given(st.lists(st.lists(small, min_size=3, max_size=3), max_size=4))
def test_saturation_idempotent_and_contains_span(gens):
    sat = hermite_saturate(gens, 3)
    assert hermite_saturate(sat, 3) == sat
    for g in gens:
        assert membership_solve(sat, g) is not None
    # pure: some multiple of each basis vector lies in the span
    idx = saturation_index([g for g in gens if any(g)], 3) if any(any(g) for g in gens) else 1
    span = hermite_normal_form([g for g in gens if any(g)])
    for b in sat:
        assert membership_solve(span, [idx * x for x in b]) is not None


def test_membership_examples():
    B = [(1, 0), (0, 2)]
    assert membership_solve(B, (3, 4)) == (3, 2)
    assert membership_solve(B, (0, 0)) == (0, 0)
    assert membership_solve(B, (0, 1)) is None


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=1, max_size=3), st.lists(small, min_size=3, max_size=3))
def test_membership_solution_is_exact(basis, coeffs):
    basis = hermite_normal_form(basis)
    if not basis:
        return
    coeffs = coeffs[: len(basis)]
    v = [sum(c * b[j] for c, b in zip(coeffs, basis)) for j in range(3)]
    x = membership_solve(basis, v)
    assert x is not None
    assert [sum(c * b[j] for c, b in zip(x, basis)) for j in range(3)] == v


def test_hnf_shape():
    H = hermite_normal_form([[2, 4, 4], [-6, 6, 12], [10, 4, 16]])
    for i, row in enumerate(H):
        piv = next(j for j, x in enumerate(row) if x)
        assert row[piv] > 0
        for above in H[:i]:
            assert 0 <= above[piv] < row[piv]
