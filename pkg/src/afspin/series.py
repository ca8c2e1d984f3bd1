"""Lower central series of the lattice, its isolator series, and theta.

Isolator layers are represented as tail segments of the lattice
generator order: layer ``S_i`` is generated by the last few lattice
generators.  Under that representation every quotient ``S_i/S_j`` is
torsion-free automatically (its pc sequence has infinite cyclic factors),
so verifying a series comes down to three checks per layer:

* ``[Lambda, S_i]`` lies in ``S_{i+1}`` (normality and centrality),
* the generators of ``gamma_i`` lie in ``S_i``,
* their images span a full-rank sublattice of ``S_i / S_{i+1}``.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

from .collector import Collector, CollectionError, NormalWord, collector_for
from .intlin import IntMatrix, hermite_saturate, membership_solve, saturation_index
from .presentation import PcPresentation

log = logging.getLogger(__name__)

AUTO_CLASS_LIMIT = 3


class SeriesError(ValueError):
    pass


@dataclass(frozen=True)
class Layer:
    depth: int
    generators: tuple[str, ...]
    start: int  # global index of the first generator of S_depth
    stop: int  # global index where S_{depth+1} starts
    index: int  # [Z_i : image of gamma_i]
    power_certificates: tuple[int, ...]  # q with q * e_k in the image of gamma_i

    @property
    def rank(self) -> int:
        return len(self.generators)


@dataclass(frozen=True)
class AdaptedSeriesData:
    layers: tuple[Layer, ...]
    nilpotency_class: int
    source: str  # "declared" or "auto"
    experimental: bool = False

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(l.rank for l in self.layers)

    @property
    def dimension(self) -> int:
        return sum(self.ranks)

    def layer_coordinates(self, x: NormalWord, i: int) -> tuple[int, ...]:
        layer = self.layers[i]
        if any(x[: layer.start]):
            raise SeriesError(f"element lies outside layer {layer.depth}")
        return tuple(x[layer.start : layer.stop])

    def coordinates(self, x: NormalWord) -> tuple[int, ...]:
        """Layer coordinates of a lattice element, Z_1 first."""
        return tuple(x[self.layers[0].start :])


def _lattice_units(p: PcPresentation, c: Collector) -> list[NormalWord]:
    return [c.unit(i) for i in range(p.n_heads, c.N)]


def lower_central_generators(p: PcPresentation, i: int, c: Collector | None = None) -> list[NormalWord]:
    """Normal generators of gamma_i(Lambda), identity dropped.

    Depth 2 uses [g_j, g_i] for lattice generators j > i; deeper terms use
    [w, x] for w in the previous set and x a lattice generator.  Returns
    an empty list once the series has reached the identity.
    """
    c = c or collector_for(p)
    units = _lattice_units(p, c)
    if i <= 1:
        return units
    level = []
    for j, gj in enumerate(units):
        for gi in units[:j]:
            level.append(c.commutator(gj, gi))
    level = _dedupe(level, c)
    limit = len(units) + 1
    for depth in range(3, i + 1):
        if not level:
            return []
        if depth > limit:
            raise SeriesError("lattice is not nilpotent")
        level = _dedupe([c.commutator(w, x) for w in level for x in units], c)
    return level


def _dedupe(ws, c):
    out = []
    for w in ws:
        if any(w) and w not in out:
            out.append(w)
    return out


def nilpotency_class(p: PcPresentation, c: Collector | None = None) -> int:
    c = c or collector_for(p)
    n = p.dimension
    for i in range(2, n + 3):
        if not lower_central_generators(p, i, c):
            return i - 1
    raise SeriesError("lattice is not nilpotent within the Hirsch-length bound")


def adapted_series(p: PcPresentation, auto: bool = False) -> AdaptedSeriesData:
    """Verify the declared isolator series, or compute one when `auto` is set
    or nothing is declared."""
    c = collector_for(p)
    cls = nilpotency_class(p, c)
    if p.declared_series is not None and not auto:
        starts = _declared_starts(p, cls)
        return _verify(p, c, cls, starts, "declared")
    starts = _auto_starts(p, c, cls)
    data = _verify(p, c, cls, starts, "auto")
    if cls > AUTO_CLASS_LIMIT:
        log.warning("isolators computed automatically for class %d > %d (experimental)", cls, AUTO_CLASS_LIMIT)
        data = AdaptedSeriesData(data.layers, data.nilpotency_class, data.source, experimental=True)
    return data


def _declared_starts(p: PcPresentation, cls: int) -> list[int]:
    decl = dict(p.declared_series)
    if sorted(decl) != list(range(2, cls + 1)):
        raise SeriesError(
            f"declared series must give layers 2..{cls} for a lattice of class {cls}, "
            f"got {sorted(decl)}"
        )
    lat = p.lattice_gens
    starts = [p.n_heads]
    for depth in range(2, cls + 1):
        names = decl[depth]
        k = len(names)
        if set(names) != set(lat[len(lat) - k :]) or len(set(names)) != k:
            raise SeriesError(
                f"declared layer {depth} ({', '.join(names)}) is not a tail of the lattice generator order"
            )
        starts.append(p.n_heads + len(lat) - k)
    return starts


def _auto_starts(p: PcPresentation, c: Collector, cls: int) -> list[int]:
    nh = p.n_heads
    n = p.dimension
    units = _lattice_units(p, c)
    starts = [nh]
    for depth in range(2, cls + 1):
        vecs = []
        for d in range(depth, cls + 1):
            vecs.extend(w[nh:] for w in lower_central_generators(p, d, c))
        basis = hermite_saturate(vecs, n)
        # close under conjugation by the lattice until the saturation is stable
        for _ in range(n + 1):
            more = list(basis)
            for b in basis:
                x = (0,) * nh + tuple(b)
                for u in units:
                    for y in (u, c.inv(u)):
                        more.append(c.conjugate(y, x)[nh:])
            nxt = hermite_saturate(more, n)
            if nxt == basis:
                break
            basis = nxt
        else:
            raise SeriesError(f"isolator of gamma_{depth} did not stabilise")
        k = len(basis)
        tail = [[int(a == b) for b in range(n)] for a in range(n - k, n)]
        if basis != tail:
            raise SeriesError(
                f"isolator of gamma_{depth} is not spanned by a tail of the lattice generators; "
                "declare the series or reorder the lattice"
            )
        starts.append(nh + n - k)
    return starts


def _verify(p, c: Collector, cls: int, starts: list[int], source: str) -> AdaptedSeriesData:
    N = c.N
    bounds = starts + [N]
    if any(a >= b for a, b in zip(bounds, bounds[1:])):
        raise SeriesError("series layers must be strictly decreasing")
    units = _lattice_units(p, c)
    layers = []
    try:
        for li in range(cls):
            depth = li + 1
            start, stop = bounds[li], bounds[li + 1]
            for s in range(start, N):
                gs = c.unit(s)
                for u in units:
                    comm = c.commutator(gs, u)
                    if any(comm[:stop]):
                        raise SeriesError(
                            f"[{c.gens[s]}, {c.gens[u.index(1)]}] leaves the next layer below {depth}"
                        )
            gens = lower_central_generators(p, depth, c) if depth > 1 else units
            for w in gens:
                if any(w[:start]):
                    raise SeriesError(f"a generator of gamma_{depth} is not in layer {depth}")
            images = [w[start:stop] for w in gens]
            k = stop - start
            span = [list(v) for v in images if any(v)]
            if len(hermite_saturate(span, k)) != k:
                raise SeriesError(f"gamma_{depth} has rank below {k} in layer {depth}")
            index = saturation_index(span, k)
            basis = _lattice_basis(span, k)
            certs = []
            for e in range(k):
                unit = [int(e == t) for t in range(k)]
                q = next(
                    (q for q in range(1, index + 1) if membership_solve(basis, [q * x for x in unit]) is not None),
                    None,
                )
                if q is None:
                    raise SeriesError(f"no power of {c.gens[start + e]} lies in gamma_{depth}")
                certs.append(q)
            layers.append(
                Layer(depth, tuple(c.gens[start:stop]), start, stop, index, tuple(certs))
            )
    except CollectionError as exc:
        raise SeriesError(f"collection failed during series verification: {exc}") from exc
    return AdaptedSeriesData(tuple(layers), cls, source)


def _lattice_basis(span, k):
    from .intlin import hermite_normal_form

    return hermite_normal_form(span)


# ---------------------------------------------------------------- theta


@dataclass(frozen=True)
class HolonomyRep:
    generator_matrices: dict[str, IntMatrix]
    n: int
    image_orders: dict[str, int]


def image_order(p: PcPresentation, x: NormalWord, c: Collector | None = None) -> int:
    """Order of the image of x in F = Gamma / Lambda."""
    c = c or collector_for(p)
    nh = p.n_heads
    if not any(x[:nh]):
        return 1
    y = x
    bound = 1
    for _, r in p.head_gens:
        bound *= r
    for e in range(1, bound + 1):
        if not any(y[:nh]):
            return e
        y = c.mul(y, x)
    raise SeriesError("element order in the holonomy group exceeds |F|")


def theta_of(p: PcPresentation, s: AdaptedSeriesData, x: NormalWord, c: Collector | None = None) -> IntMatrix:
    """Block-diagonal matrix of conjugation by x on the layers, Z_1 first."""
    c = c or collector_for(p)
    xinv = c.inv(x)
    blocks = []
    for li, layer in enumerate(s.layers):
        cols = []
        for g in range(layer.start, layer.stop):
            y = c.mul(x, c.unit(g), xinv)
            if any(y[: layer.start]):
                raise SeriesError(
                    f"conjugate of {c.gens[g]} falls outside layer {layer.depth}"
                )
            cols.append(y[layer.start : layer.stop])
        blocks.append(IntMatrix.from_rows(zip(*cols), layer.rank) if cols else IntMatrix.zeros(0, 0))
    return IntMatrix.block_diagonal(blocks)


def holonomy_representation(p: PcPresentation, s: AdaptedSeriesData) -> HolonomyRep:
    c = collector_for(p)
    mats, orders = {}, {}
    for h in p.head_names:
        x = c.unit(p.index(h))
        m = theta_of(p, s, x, c)
        o = image_order(p, x, c)
        if m.det() not in (1, -1):
            raise SeriesError(f"theta({h}) is not invertible over Z")
        if not m.power(o).is_identity():
            raise SeriesError(f"theta({h})^{o} is not the identity")
        mats[h], orders[h] = m, o
    return HolonomyRep(mats, s.dimension, orders)
