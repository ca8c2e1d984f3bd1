import itertools

import pytest

from afspin.catalog import FAMILIES, instantiate_family
from afspin.collector import Collector
from afspin.intlin import IntMatrix
from afspin.presentation import parse_presentation
from afspin.series import (
    SeriesError,
    adapted_series,
    holonomy_representation,
    lower_central_generators,
    nilpotency_class,
    theta_of,
)

from conftest import fixture_instances

# Z^3 with two commuting involutions diag(1,-1,-1) and diag(-1,1,-1)
TWO_HEADS = """
group HW3 {
  lattice a, b, c;
  holonomy x: order 2, y: order 2;
  relations {
    x^2 = 1; y^2 = 1;
    x b x^-1 = b^-1; x c x^-1 = c^-1;
    y a y^-1 = a^-1; y c y^-1 = c^-1;
  }
}
"""


def blocks_of(s):
    return [l.rank for l in s.layers]


def test_lower_central_generators_examples():
    for k in (1, 2, 5):
        p = instantiate_family("F1", {"k": k})
        assert lower_central_generators(p, 2) == [(0, 0, 0, 0, k)]
    for k, l in [(1, 1), (2, 3)]:
        p = instantiate_family("F2", {"k": k, "l": l})
        assert lower_central_generators(p, 2) == [(0, 0, 0, 2 * l, (2 * l - 1) * k), (0, 0, 0, 0, 2 * k)]
    assert lower_central_generators(instantiate_family("FLAT_C2"), 2) == []


def test_lower_central_generators_beyond_class_is_empty(f1):
    assert lower_central_generators(f1, 3) == []
    assert lower_central_generators(f1, 9) == []


def test_nilpotency_classes():
    for fid, spec in FAMILIES.items():
        assert nilpotency_class(instantiate_family(fid)) == spec.nilpotency_class, fid


def test_declared_series_layers():
    s = adapted_series(instantiate_family("F1", {"k": 1}))
    assert s.source == "declared"
    assert [l.generators for l in s.layers] == [("a", "b", "c"), ("d",)]
    assert blocks_of(s) == [3, 1]
    s = adapted_series(instantiate_family("F2", {"k": 1, "l": 1}))
    assert blocks_of(s) == [2, 1, 1]


def test_free_abelian_single_layer():
    s = adapted_series(instantiate_family("FLAT_C2"))
    assert s.source == "auto" and blocks_of(s) == [4]


@pytest.mark.parametrize("fid, params", fixture_instances())
def test_auto_series_matches_declared(fid, params):
    p = instantiate_family(fid, params)
    auto = adapted_series(p, auto=True)
    decl = adapted_series(p)
    assert [l.generators for l in auto.layers] == [l.generators for l in decl.layers]
    assert sum(auto.ranks) == p.dimension


def test_power_certificates_use_saturation_index():
    k, l = 3, 2
    s = adapted_series(instantiate_family("F2", {"k": k, "l": l}))
    # the image of gamma_2 in <c, d>/<d> is generated by c^(2l)
    assert s.layers[1].index == 2 * l
    assert s.layers[1].power_certificates == (2 * l,)


def test_bad_declared_series_rejected():
    src = """group G { lattice a, b, c, d; relations { [c,a] = d; [c,b] = d; } series { 2: c; } }"""
    with pytest.raises(SeriesError, match="tail|layer"):
        adapted_series(parse_presentation(src))
    src = """group G { lattice a, b, c, d; relations { [c,a] = d; [c,b] = d; } series { 2: c, d; } }"""
    with pytest.raises(SeriesError, match="leaves"):
        adapted_series(parse_presentation(src))
    src = """group G { lattice a, b, c, d; relations { [c,a] = d; } series { 2: d; 3: d; } }"""
    with pytest.raises(SeriesError, match="layers 2..2"):
        adapted_series(parse_presentation(src))


def test_auto_series_requires_tail():
    # gamma_2 = <c> but c is not a tail of the generator order
    src = "group G { lattice a, b, c, d; relations { [b,a] = c; } }"
    with pytest.raises(SeriesError, match="tail"):
        adapted_series(parse_presentation(src))


def test_theta_f1_f2():
    p = instantiate_family("F1", {"k": 1})
    rep = holonomy_representation(p, adapted_series(p))
    A = rep.generator_matrices["alpha"]
    assert A.tolist() == [[0, -1, 0, 0], [-1, 0, 0, 0], [0, 0, -1, 0], [0, 0, 0, 1]]
    assert (A.trace(), A.det(), A.order()) == (0, 1, 2)
    p = instantiate_family("F2", {"k": 2, "l": 3})
    rep = holonomy_representation(p, adapted_series(p))
    assert rep.generator_matrices["alpha"].tolist() == [[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, -1, 0], [0, 0, 0, 1]]


def test_theta_agrees_with_reference_up_to_basis():
    reference = IntMatrix.from_rows([[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, 0, -1], [0, 0, -1, 0]])
    p = instantiate_family("F1", {"k": 4})
    A = holonomy_representation(p, adapted_series(p)).generator_matrices["alpha"]
    # reversed block order: the reference basis is (d, c, b, a)
    P = IntMatrix.from_rows([[int(i == 3 - j) for j in range(4)] for i in range(4)])
    assert P @ A @ P == reference


def test_trivial_holonomy_rep():
    p = instantiate_family("NIL")
    rep = holonomy_representation(p, adapted_series(p))
    assert rep.generator_matrices == {} and rep.n == 4


def test_theta_multiplicative_two_heads():
    p = parse_presentation(TWO_HEADS)
    s = adapted_series(p)
    rep = holonomy_representation(p, s)
    X, Y = rep.generator_matrices["x"], rep.generator_matrices["y"]
    c = Collector(p)
    for ex, ey in itertools.product(range(2), repeat=2):
        g = c.mul(c.pow(c.unit(0), ex), c.pow(c.unit(1), ey))
        assert theta_of(p, s, g) == X.power(ex) @ Y.power(ey)
    # an element carrying a lattice part has the same theta as its head
    g = c.mul(c.unit(0), c.unit(2), c.unit(4))
    assert theta_of(p, s, g) == X


@pytest.mark.parametrize("fid, params", fixture_instances())
def test_theta_invariants_both_series(fid, params):
    p = instantiate_family(fid, params)
    reps = [holonomy_representation(p, adapted_series(p, auto)) for auto in (False, True)]
    for h in p.head_names:
        A, B = (r.generator_matrices[h] for r in reps)
        assert (A.trace(), A.det(), A.order()) == (B.trace(), B.det(), B.order())
        assert abs(A.det()) == 1
        assert A.power(reps[0].image_orders[h]).is_identity()
