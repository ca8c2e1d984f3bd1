"""The finite holonomy group F = Gamma / Lambda and the Sylow reduction."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import prod

from .collector import NormalWord, collector_for
from .presentation import PcPresentation, PresentationError

Head = tuple[int, ...]


class HolonomyError(ValueError):
    pass


def two_adic(n: int) -> tuple[int, int]:
    """Split n = 2^m * u with u odd; returns (m, u)."""
    m = 0
    while n % 2 == 0:
        n //= 2
        m += 1
    return m, n


@dataclass(frozen=True)
class Sylow2:
    m: int
    generator: Head | None  # None when the Sylow subgroup is not cyclic
    cyclic: bool


@dataclass
class HolonomyGroup:
    elements: list[Head]
    table: list[list[int]]
    element_orders: list[int]
    sylow2: Sylow2
    _pos: dict = field(default_factory=dict, repr=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    def position(self, x: Head) -> int:
        if not self._pos:
            self._pos.update({e: i for i, e in enumerate(self.elements)})
        return self._pos[x]

    def multiply(self, x: Head, y: Head) -> Head:
        return self.elements[self.table[self.position(x)][self.position(y)]]

    def order_of(self, x: Head) -> int:
        return self.element_orders[self.position(x)]

    def generated(self, x: Head) -> list[Head]:
        """Elements of the cyclic subgroup generated by x."""
        out = [self.elements[0]]
        y = x
        while y != out[0]:
            out.append(y)
            y = self.multiply(y, x)
        return out


def _lift(p: PcPresentation, x: Head) -> NormalWord:
    return tuple(x) + (0,) * p.dimension


def enumerate_holonomy(p: PcPresentation) -> HolonomyGroup:
    c = collector_for(p)
    nh = p.n_heads
    orders = [r for _, r in p.head_gens]
    elements = [tuple(t) for t in itertools.product(*(range(r) for r in orders))]
    pos = {e: i for i, e in enumerate(elements)}
    size = len(elements)
    if size != prod(orders):
        raise HolonomyError("holonomy enumeration size mismatch")
    table = []
    for x in elements:
        lx = _lift(p, x)
        row = []
        for y in elements:
            z = c.mul(lx, _lift(p, y))[:nh]
            row.append(pos[z])
        table.append(row)
    _check_group(table)
    element_orders = []
    for i in range(size):
        o, y = 1, i
        while y != 0:
            y = table[y][i]
            o += 1
        element_orders.append(o)
    m, _ = two_adic(size)
    if m == 0:
        syl = Sylow2(0, elements[0], True)
    else:
        full = [e for e, o in zip(elements, element_orders) if o == 1 << m]
        syl = Sylow2(m, min(full), True) if full else Sylow2(m, None, False)
    return HolonomyGroup(elements, table, element_orders, syl, dict(pos))


def _check_group(table):
    n = len(table)
    if any(table[0][i] != i or table[i][0] != i for i in range(n)):
        raise HolonomyError("the identity coset is not a two-sided identity")
    for row in table:
        if sorted(row) != list(range(n)):
            raise HolonomyError("holonomy multiplication table is not a Latin square")
    for a in range(n):
        ra = table[a]
        for b in range(n):
            rab = table[ra[b]]
            rb = table[b]
            for cc in range(n):
                if rab[cc] != ra[rb[cc]]:
                    raise HolonomyError("holonomy multiplication is not associative")


def _fresh(name: str, taken) -> str:
    while name in taken:
        name += "_"
    return name


def sylow2_reduce(p: PcPresentation, h: HolonomyGroup | None = None, lift: NormalWord | None = None) -> PcPresentation:
    """Presentation of the preimage of the cyclic 2-Sylow subgroup.

    The head of the result is a single generator lifting the Sylow
    generator.  `lift` overrides the default lift (head tuple with zero
    lattice part) by any normal word whose image generates the Sylow
    subgroup; the lattice part is allowed to be nonzero.
    """
    h = h or enumerate_holonomy(p)
    syl = h.sylow2
    if syl.m == 0:
        raise HolonomyError("2-Sylow subgroup is trivial; no reduction needed")
    if not syl.cyclic:
        raise HolonomyError("2-Sylow subgroup is not cyclic")
    c = collector_for(p)
    nh = p.n_heads
    order = 1 << syl.m
    if lift is None:
        lift = _lift(p, syl.generator)
    lift = tuple(lift)
    if len(lift) != c.N or h.order_of(lift[:nh]) != order:
        raise HolonomyError(f"lift does not map to an element of order {order} in F")
    nonzero = [(i, e) for i, e in enumerate(lift) if e]
    if len(nonzero) == 1 and nonzero[0][0] < nh and nonzero[0][1] == 1:
        name = p.generators[nonzero[0][0]]
    else:
        name = _fresh("t", set(p.generators))

    def lattice_word(x: NormalWord, what: str):
        if any(x[:nh]):
            raise HolonomyError(f"{what} does not lie in the lattice")
        return c.to_word(x)

    power = {name: lattice_word(c.pow(lift, order), f"{name}^{order}")}
    inv = c.inv(lift)
    conj = {}
    for g in p.lattice_gens:
        w = lattice_word(c.mul(lift, c.unit(p.index(g)), inv), f"{name} {g} {name}^-1")
        if w != ((g, 1),):
            conj[(name, g)] = w
    for (x, y), w in p.conjugation_relations.items():
        if x in p.lattice_gens:
            conj[(x, y)] = w
    try:
        return PcPresentation(
            name=f"{p.name}(2)",
            head_gens=((name, order),),
            lattice_gens=p.lattice_gens,
            power_relations=power,
            conjugation_relations=conj,
            declared_series=p.declared_series,
            parameters=dict(p.parameters),
        )
    except PresentationError as exc:  # pragma: no cover - construction is plain data
        raise HolonomyError(str(exc)) from exc
