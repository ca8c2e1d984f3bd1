"""Polycyclic presentations of almost-Bieberbach groups and the ``.pcp`` format.

A presentation lists holonomy ("head") generators first, each with a
relative order, followed by the generators of the lattice.  Conjugation
relations are stored in the form ``g_i g_j g_i^-1 = w`` for ``i < j``;
pairs without a relation commute.  Commutator input ``[x,y] = w`` uses the
convention ``[x,y] = x^-1 y^-1 x y`` and is converted on the way in.

Relation right-hand sides are kept as (not necessarily collected) words;
``canonicalize`` replaces them by their collected normal forms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

Word = tuple[tuple[str, int], ...]


class PresentationError(ValueError):
    pass


class ParseError(PresentationError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line, self.col = line, col
        where = f" (line {line}, column {col})" if line is not None else ""
        super().__init__(message + where)


# ---------------------------------------------------------------- words


def free_reduce(word: Iterable[tuple[str, int]]) -> Word:
    out: list[tuple[str, int]] = []
    for g, e in word:
        if e == 0:
            continue
        if out and out[-1][0] == g:
            e += out.pop()[1]
            if e == 0:
                continue
        out.append((g, e))
    return tuple(out)


def invert_word(word: Sequence[tuple[str, int]]) -> Word:
    return tuple((g, -e) for g, e in reversed(word))


def word_power(word: Sequence[tuple[str, int]], e: int) -> Word:
    base = tuple(word) if e >= 0 else invert_word(word)
    return free_reduce(base * abs(e))


def word_to_str(word: Sequence[tuple[str, int]]) -> str:
    if not word:
        return "1"
    return " ".join(g if e == 1 else f"{g}^{e}" for g, e in word)


# ---------------------------------------------------------------- model


@dataclass(frozen=True)
class PcPresentation:
    name: str
    head_gens: tuple[tuple[str, int], ...]
    lattice_gens: tuple[str, ...]
    power_relations: Mapping[str, Word]
    conjugation_relations: Mapping[tuple[str, str], Word]
    declared_series: tuple[tuple[int, tuple[str, ...]], ...] | None = None
    parameters: Mapping[str, int] = field(default_factory=dict)

    @property
    def generators(self) -> tuple[str, ...]:
        return tuple(h for h, _ in self.head_gens) + self.lattice_gens

    @property
    def head_names(self) -> tuple[str, ...]:
        return tuple(h for h, _ in self.head_gens)

    @property
    def n_heads(self) -> int:
        return len(self.head_gens)

    @property
    def dimension(self) -> int:
        return len(self.lattice_gens)

    @property
    def relative_orders(self) -> tuple[int, ...]:
        """Relative orders in global order; 0 marks an infinite (lattice) generator."""
        return tuple(r for _, r in self.head_gens) + (0,) * len(self.lattice_gens)

    def index(self, gen: str) -> int:
        try:
            return self.generators.index(gen)
        except ValueError:
            raise PresentationError(f"undeclared generator {gen!r}") from None

    def relation(self, x: str, y: str) -> Word:
        """Value of x y x^-1 (x before y); the default is y itself."""
        return self.conjugation_relations.get((x, y), ((y, 1),))

    def power(self, h: str) -> Word:
        return self.power_relations.get(h, ())

    def order_label(self) -> str:
        """Both generator orders, as printed in reports."""
        internal = ", ".join(self.generators)
        lattice_first = ", ".join(self.lattice_gens + self.head_names)
        return f"internal: {internal}; lattice-first: {lattice_first}"


# ---------------------------------------------------------------- tokenizer

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<int>\d+)
  | (?P<ident>[^\W\d]\w*'*)
  | (?P<sym>[{}\[\](),;:=^+*-])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(src: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m:
            raise ParseError(f"unexpected character {src[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        if kind != "ws":
            toks.append(_Tok(kind, text, line, pos - line_start + 1))
        nl = text.count("\n")
        if nl:
            line += nl
            line_start = pos + text.rfind("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


# ---------------------------------------------------------------- parser


@dataclass
class _RawRelation:
    kind: str  # power | conj | shifted | commutator
    lhs: tuple
    rhs: Word
    line: int
    col: int


class _Parser:
    def __init__(self, src: str, overrides: Mapping[str, int] | None):
        self.toks = _tokenize(src)
        self.i = 0
        self.overrides = dict(overrides or {})
        self.params: dict[str, int] = {}

    # token helpers
    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def take(self, kind=None, text=None) -> _Tok:
        t = self.tok
        if (kind and t.kind != kind) or (text and t.text != text):
            want = text or kind
            got = t.text or "end of input"
            raise self.error(f"expected {want!r}, found {got!r}")
        self.i += 1
        return t

    def peek(self, text) -> bool:
        return self.tok.text == text and self.tok.kind in ("sym", "ident")

    def accept(self, text) -> bool:
        if self.peek(text):
            self.i += 1
            return True
        return False

    # grammar
    def parse(self):
        self.take("ident", "group")
        name = self.take("ident").text
        self.take("sym", "{")
        lattice: list[tuple[str, _Tok]] = []
        heads: list[tuple[str, int, _Tok]] = []
        relations: list[_RawRelation] = []
        series: list[tuple[int, list[tuple[str, _Tok]]]] | None = None
        if self.accept("params"):
            self.take("sym", ":")
            self._params()
        self.params.update(self.overrides)
        self.take("ident", "lattice")
        lattice = self._name_list()
        if self.accept("holonomy"):
            while True:
                t = self.take("ident")
                self.take("sym", ":")
                self.take("ident", "order")
                heads.append((t.text, self._expr(), t))
                if not self.accept(","):
                    break
            self.take("sym", ";")
        self.take("ident", "relations")
        self.take("sym", "{")
        while not self.peek("}"):
            relations.append(self._relation())
        self.take("sym", "}")
        if self.accept("series"):
            series = []
            self.take("sym", "{")
            while not self.peek("}"):
                depth = int(self.take("int").text)
                self.take("sym", ":")
                series.append((depth, self._name_list()))
            self.take("sym", "}")
        self.take("sym", "}")
        self.take("eof")
        return name, lattice, heads, relations, series

    def _params(self):
        while True:
            t = self.take("ident")
            self.take("sym", "=")
            neg = self.accept("-")
            v = int(self.take("int").text)
            self.params[t.text] = -v if neg else v
            if not self.accept(","):
                break
        self.take("sym", ";")

    def _name_list(self):
        out = [(self.tok.text, self.take("ident"))]
        while self.accept(","):
            t = self.take("ident")
            out.append((t.text, t))
        self.take("sym", ";")
        return out

    # exponent arithmetic
    def _expr(self) -> int:
        v = self._term()
        while self.tok.text in ("+", "-") and self.tok.kind == "sym":
            op = self.take().text
            w = self._term()
            v = v + w if op == "+" else v - w
        return v

    def _term(self) -> int:
        v = self._factor()
        while self.accept("*"):
            v *= self._factor()
        return v

    def _factor(self) -> int:
        if self.accept("-"):
            return -self._factor()
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return int(t.text)
        if t.kind == "ident":
            self.i += 1
            if t.text not in self.params:
                raise self.error(f"parameter {t.text!r} is unbound", t)
            return self.params[t.text]
        if self.accept("("):
            v = self._expr()
            self.take("sym", ")")
            return v
        raise self.error(f"expected an exponent, found {t.text!r}")

    def _exponent(self) -> int:
        if self.accept("-"):
            return -self._atom()
        return self._atom()

    def _atom(self) -> int:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return int(t.text)
        if t.kind == "ident":
            return self._factor()
        if self.accept("("):
            v = self._expr()
            self.take("sym", ")")
            return v
        raise self.error(f"expected an exponent, found {t.text!r}")

    def _word(self) -> list[tuple[str, int, _Tok]]:
        out = []
        while True:
            t = self.tok
            if t.kind == "int" and t.text == "1":
                self.i += 1
            elif t.kind == "ident":
                self.i += 1
                e = self._exponent() if self.accept("^") else 1
                out.append((t.text, e, t))
            else:
                break
        return out

    def _relation(self) -> _RawRelation:
        start = self.tok
        if self.accept("["):
            a = self.take("ident")
            self.take("sym", ",")
            b = self.take("ident")
            self.take("sym", "]")
            lhs = ((a.text, a), (b.text, b))
            kind = "commutator"
        else:
            lhs = tuple(self._word())
            if not lhs:
                raise self.error("empty left-hand side")
            kind = "word"
        self.take("sym", "=")
        rhs = self._word()
        self.take("sym", ";")
        return _RawRelation(kind, lhs, tuple((g, e) for g, e, _ in rhs), start.line, start.col), rhs


def parse_presentation(source: str, params: Mapping[str, int] | None = None) -> PcPresentation:
    """Parse ``.pcp`` text; `params` override the ``params:`` line."""
    parser = _Parser(source, params)
    name, lattice, heads, relations, series = parser.parse()
    return _assemble(name, lattice, heads, relations, series, parser.params)


def parse_word(text: str, generators: Sequence[str], params: Mapping[str, int] | None = None) -> Word:
    """Parse a bare word such as ``"alpha a alpha^-1"``."""
    parser = _Parser(text, None)
    parser.params = dict(params or {})
    syl = parser._word()
    parser.take("eof")
    for g, _, tok in syl:
        if g not in generators:
            raise ParseError(f"undeclared generator {g!r}", tok.line, tok.col)
    return tuple((g, e) for g, e, _ in syl if e)


def _assemble(name, lattice, heads, relations, series, params) -> PcPresentation:
    gens: dict[str, int] = {}
    for g, tok in [(h, t) for h, _, t in heads] + lattice:
        if g in gens:
            raise ParseError(f"generator {g!r} declared twice", tok.line, tok.col)
        gens[g] = len(gens)
    orders = {h: r for h, r, _ in heads}
    for h, r, tok in heads:
        if r < 2:
            raise ParseError(f"relative order of {h!r} must be at least 2", tok.line, tok.col)

    def check(g, tok):
        if g not in gens:
            raise ParseError(f"undeclared generator {g!r}", tok.line, tok.col)

    power: dict[str, Word] = {}
    direct: dict[tuple[str, str], Word] = {}
    shifted: dict[tuple[str, str], tuple[Word, Word]] = {}
    inverse: dict[tuple[str, str], Word] = {}  # (x, y) -> tail v with x^-1 y x = y v
    seen: set = set()

    def claim(key, rel):
        if key in seen:
            raise ParseError(f"duplicate relation for {key}", rel.line, rel.col)
        seen.add(key)

    for rel, rhs_toks in relations:
        for g, _, tok in rhs_toks:
            check(g, tok)
        rhs = free_reduce(rel.rhs)
        if rel.kind == "commutator":
            (x, xt), (y, yt) = rel.lhs
            check(x, xt)
            check(y, yt)
            if x == y:
                raise ParseError("commutator of a generator with itself", rel.line, rel.col)
            if gens[x] > gens[y]:
                early, late, tail = y, x, rhs
            else:
                early, late, tail = x, y, invert_word(rhs)
            claim((early, late), rel)
            inverse[(early, late)] = tail
            continue
        lhs = rel.lhs
        for g, _, tok in lhs:
            check(g, tok)
        syl = [(g, e) for g, e, _ in lhs]
        if len(syl) == 1 and syl[0][0] in orders:
            h, e = syl[0]
            if e != orders[h]:
                raise ParseError(
                    f"power relation for {h!r} must use its relative order {orders[h]}", rel.line, rel.col
                )
            claim(("power", h), rel)
            power[h] = rhs
            continue
        if len(syl) == 3 and syl[0][0] == syl[2][0] and syl[0][1] == 1 and syl[2][1] == -1 and syl[1][1] == 1:
            x, y = syl[0][0], syl[1][0]
            _need_order(gens, x, y, rel)
            claim((x, y), rel)
            direct[(x, y)] = rhs
            continue
        if len(syl) == 2 and syl[0][1] == 1 and syl[1][1] == 1:
            x, y = syl[0][0], syl[1][0]
            _need_order(gens, x, y, rel)
            hits = [k for k, (g, _) in enumerate(rhs) if g == x]
            if len(hits) != 1 or rhs[hits[0]][1] != 1:
                raise ParseError(
                    f"right-hand side must contain {x!r} exactly once with exponent 1", rel.line, rel.col
                )
            k = hits[0]
            claim((x, y), rel)
            shifted[(x, y)] = (rhs[:k], rhs[k + 1 :])
            continue
        raise ParseError("unsupported relation form", rel.line, rel.col)

    order = list(gens)
    conj = _resolve(order, orders, power, direct, shifted, inverse)

    declared = None
    if series is not None:
        declared = []
        lat = {g for g, _ in lattice}
        for depth, names in series:
            for g, tok in names:
                check(g, tok)
                if g not in lat:
                    raise ParseError(f"series layer uses non-lattice generator {g!r}", tok.line, tok.col)
            declared.append((depth, tuple(g for g, _ in names)))
        declared = tuple(sorted(declared))

    return PcPresentation(
        name=name,
        head_gens=tuple((h, r) for h, r, _ in heads),
        lattice_gens=tuple(g for g, _ in lattice),
        power_relations={h: power.get(h, ()) for h, _, _ in heads},
        conjugation_relations=conj,
        declared_series=declared,
        parameters=dict(params),
    )


def _need_order(gens, x, y, rel):
    if gens[x] >= gens[y]:
        raise ParseError(
            f"relation references out-of-order pair ({x}, {y}) with no conversion; "
            "write it as a commutator",
            rel.line,
            rel.col,
        )


def _resolve(order, orders, power, direct, shifted, inverse) -> dict[tuple[str, str], Word]:
    """Turn every relation into the form x y x^-1 = w by word substitution.

    No collection happens here.  Letters whose image is not yet determined
    (which only happens for presentations violating the filtration) are
    left untouched; ``validate_structure`` reports those.
    """
    idx = {g: i for i, g in enumerate(order)}
    out: dict[tuple[str, str], Word] = {}
    for x in order:
        later = order[idx[x] + 1 :]
        phi = {y: direct[(x, y)] for y in later if (x, y) in direct}
        pend = {y: shifted[(x, y)] for y in later if (x, y) in shifted}
        inv = {y: inverse[(x, y)] for y in later if (x, y) in inverse}
        free = {y for y in later if y not in phi and y not in pend and y not in inv}

        def image(g, known):
            if g == x or idx[g] < idx[x]:
                return ((g, 1),)
            if g in known:
                return known[g]
            if g in free:
                return ((g, 1),)
            return None

        def subst(word, known, strict=True):
            res = []
            for g, e in word:
                w = image(g, known)
                if w is None:
                    if strict:
                        return None
                    w = ((g, 1),)
                res.extend(word_power(w, e))
            return free_reduce(res)

        if inv and x in orders and (phi or pend):
            raise PresentationError(
                f"holonomy generator {x!r} mixes commutator and conjugation relations"
            )
        if inv and x in orders:
            # x y x^-1 = w psi^(r-1)(y) w^-1 where psi(y) = x^-1 y x and w = x^r
            psi = {y: free_reduce(((y, 1),) + inv.get(y, ())) for y in later}
            w = power.get(x, ())
            for y in later:
                cur: Word = ((y, 1),)
                for _ in range(orders[x] - 1):
                    cur = subst(cur, psi, strict=False)
                phi[y] = free_reduce(w + cur + invert_word(w))
        else:
            for y in reversed(later):
                if y in inv:
                    tail = subst(inv[y], phi, strict=False)
                    phi[y] = free_reduce(((y, 1),) + invert_word(tail))
        while pend:
            progress = False
            for y, (u, v) in list(pend.items()):
                img = subst(v, phi)
                if img is not None:
                    phi[y] = free_reduce(u + img)
                    del pend[y]
                    free.discard(y)
                    progress = True
            if not progress:
                y = next(iter(pend))
                raise PresentationError(f"cannot resolve relation for ({x}, {y}): cyclic dependency")
        for y in later:
            if y in phi and phi[y] != ((y, 1),):
                out[(x, y)] = phi[y]
    return out


# ---------------------------------------------------------------- output


def serialize(p: PcPresentation) -> str:
    lines = [f"group {p.name} {{"]
    if p.parameters:
        lines.append("  params: " + ", ".join(f"{k}={v}" for k, v in p.parameters.items()) + ";")
    lines.append("  lattice " + ", ".join(p.lattice_gens) + ";")
    if p.head_gens:
        lines.append("  holonomy " + ", ".join(f"{h}: order {r}" for h, r in p.head_gens) + ";")
    lines.append("  relations {")
    for h, r in p.head_gens:
        lines.append(f"    {h}^{r} = {word_to_str(p.power(h))};")
    gens = p.generators
    for i, x in enumerate(gens):
        for y in gens[i + 1 :]:
            if (x, y) in p.conjugation_relations:
                w = p.conjugation_relations[(x, y)]
                lines.append(f"    {x} {y} {x}^-1 = {word_to_str(w)};")
    lines.append("  }")
    if p.declared_series is not None:
        body = " ".join(f"{d}: {', '.join(names)};" for d, names in p.declared_series)
        lines.append(f"  series {{ {body} }}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def canonicalize(p: PcPresentation) -> PcPresentation:
    """Same presentation with every right-hand side collected."""
    from .collector import Collector

    c = Collector(p)
    power = {h: c.to_word(c.collect(p.power(h))) for h in p.head_names}
    conj = {}
    for (x, y), w in p.conjugation_relations.items():
        nw = c.to_word(c.collect(w))
        if nw != ((y, 1),):
            conj[(x, y)] = nw
    return replace(p, power_relations=power, conjugation_relations=conj)


def with_lattice_order(source: str, order: Sequence[str]) -> str:
    """Rewrite the ``lattice`` line of `source` to list generators in `order`."""
    m = re.search(r"lattice\s+([^;]*);", source)
    if not m:
        raise PresentationError("source has no lattice declaration")
    current = [g.strip() for g in m.group(1).split(",")]
    if sorted(current) != sorted(order):
        raise PresentationError("new order must be a permutation of the lattice generators")
    return source[: m.start(1)] + ", ".join(order) + source[m.end(1) :]


# ---------------------------------------------------------------- validation


@dataclass
class ValidationReport:
    valid: bool
    errors: list[str]
    lattice_class: int | None = None
    series_nested: bool | None = None

    def __bool__(self):
        return self.valid


def validate_structure(p: PcPresentation) -> ValidationReport:
    from .collector import CollectionError, Collector
    from .series import nilpotency_class

    errors: list[str] = []
    idx = {g: i for i, g in enumerate(p.generators)}
    nh = p.n_heads
    for h, r in p.head_gens:
        if any(idx[g] <= idx[h] for g, _ in p.power(h)):
            errors.append(f"power relation of {h} uses a generator not after it")
    for (x, y), w in p.conjugation_relations.items():
        if any(idx[g] <= idx[x] for g, _ in w):
            errors.append(f"filtration violation: {x} {y} {x}^-1 uses a generator not after {x}")
    nested = None
    if p.declared_series is not None:
        layers = [set(names) for _, names in p.declared_series]
        depths = [d for d, _ in p.declared_series]
        nested = all(a >= b for a, b in zip(layers, layers[1:])) and depths == list(
            range(2, 2 + len(depths))
        )
        if not nested:
            errors.append("declared series layers are not nested subsets numbered from 2")

    lattice_class = None
    if not errors:
        c = Collector(p)
        try:
            for i in range(nh, len(p.generators)):
                for j in range(i + 1, len(p.generators)):
                    x, y = p.generators[i], p.generators[j]
                    comm = c.collect(p.relation(x, y) + ((y, -1),))
                    if any(comm[: j + 1]):
                        errors.append(
                            f"filtration violation: {x} {y} {x}^-1 {y}^-1 is not in the "
                            "subgroup generated by later generators"
                        )
            for h in p.head_names:
                for y in p.lattice_gens:
                    img = c.collect(p.relation(h, y)) if (h, y) in p.conjugation_relations else None
                    if img is not None and any(img[:nh]):
                        errors.append(f"conjugate of {y} by {h} leaves the lattice")
            if not errors:
                lattice_class = nilpotency_class(p, c)
        except CollectionError as exc:
            errors.append(f"collection failed: {exc}")
    return ValidationReport(not errors, errors, lattice_class, nested)
