"""Finite posets, bounded extensions, contractions and ideal lattices.

Elements are string identifiers and keep their input order. All derived
data (order closure, heights, ideals) is computed lazily and cached on the
frozen instances, so a Poset can be shared freely between threads.

Conventions
-----------
* ``covers`` holds pairs ``(u, v)`` meaning ``v`` covers ``u``.
* Edges of the bounded poset are stored as ``Edge(s, t)`` with ``t`` covered
  by ``s``: the upper end comes first.
* Sets of elements are handled as int bitmasks over element indices.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, NamedTuple

from .errors import InvalidPosetError, PosetParseError, SizeGuardError

ZERO = "^0"
ONE = "^1"

DEFAULT_IDEAL_CAP = 100_000
DEFAULT_EXTENSION_CAP = 10

_NAME = re.compile(r"[^\s;<#,^][^\s;<#,]*")


def _bits(mask):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


@dataclass(frozen=True)
class Poset:
    elements: tuple[str, ...]
    covers: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "covers", tuple(tuple(c) for c in self.covers))
        if len(set(self.elements)) != len(self.elements):
            dup = next(e for e in self.elements if self.elements.count(e) > 1)
            raise InvalidPosetError(f"duplicate element {dup!r}")
        idx = self.index
        for u, v in self.covers:
            for name in (u, v):
                if name not in idx:
                    raise InvalidPosetError(f"unknown element {name!r}")
            if u == v:
                raise InvalidPosetError(f"cycle detected at {u!r}")
        if len(set(self.covers)) != len(self.covers):
            raise InvalidPosetError("repeated cover relation")
        # canonical cover order so that equality ignores input order
        object.__setattr__(self, "covers", tuple(sorted(self.covers, key=lambda c: (idx[c[0]], idx[c[1]]))))
        _ = self.below  # raises on cycles
        for u, v in self.covers:
            i, j = idx[u], idx[v]
            # irredundant: no w with u < w < v
            if self.above[i] & self.below[j]:
                raise InvalidPosetError(f"relation {u}<{v} is implied by transitivity")

    @classmethod
    def from_relations(cls, elements: Iterable[str], relations: Iterable[tuple[str, str]] = ()):
        """Build a poset from arbitrary relations ``u < v``; reduces to covers."""
        elements = tuple(elements)
        idx = {e: i for i, e in enumerate(elements)}
        if len(idx) != len(elements):
            dup = next(e for e in elements if elements.count(e) > 1)
            raise InvalidPosetError(f"duplicate element {dup!r}")
        n = len(elements)
        up = [0] * n
        for u, v in relations:
            for name in (u, v):
                if name not in idx:
                    raise InvalidPosetError(f"unknown element {name!r}")
            up[idx[u]] |= 1 << idx[v]
        closure = _closure(up)
        for i in range(n):
            if closure[i] >> i & 1:
                raise InvalidPosetError(f"cycle detected through {elements[i]!r}")
        covers = []
        for i in range(n):
            for j in _bits(closure[i]):
                # j covers i iff nothing strictly between
                if not any(closure[k] >> j & 1 for k in _bits(closure[i])):
                    covers.append((elements[i], elements[j]))
        covers.sort(key=lambda c: (idx[c[0]], idx[c[1]]))
        return cls(elements, tuple(covers))

    # basic structure

    def __len__(self):
        return len(self.elements)

    @cached_property
    def index(self) -> dict[str, int]:
        return {e: i for i, e in enumerate(self.elements)}

    @cached_property
    def upper_covers(self) -> tuple[tuple[int, ...], ...]:
        up = [[] for _ in self.elements]
        for u, v in self.covers:
            up[self.index[u]].append(self.index[v])
        return tuple(tuple(sorted(x)) for x in up)

    @cached_property
    def lower_covers(self) -> tuple[tuple[int, ...], ...]:
        down = [[] for _ in self.elements]
        for u, v in self.covers:
            down[self.index[v]].append(self.index[u])
        return tuple(tuple(sorted(x)) for x in down)

    @cached_property
    def above(self) -> tuple[int, ...]:
        """``above[i]``: bitmask of elements strictly greater than i."""
        up = [0] * len(self)
        for i, ups in enumerate(self.upper_covers):
            for j in ups:
                up[i] |= 1 << j
        closure = _closure(up)
        for i in range(len(self)):
            if closure[i] >> i & 1:
                raise InvalidPosetError(f"cycle detected through {self.elements[i]!r}")
        return tuple(closure)

    @cached_property
    def below(self) -> tuple[int, ...]:
        down = [0] * len(self)
        for i, mask in enumerate(self.above):
            for j in _bits(mask):
                down[j] |= 1 << i
        return tuple(down)

    def less(self, u: str, v: str) -> bool:
        return bool(self.above[self.index[u]] >> self.index[v] & 1)

    def comparable(self, u: str, v: str) -> bool:
        return u == v or self.less(u, v) or self.less(v, u)

    @cached_property
    def linear_order(self) -> tuple[int, ...]:
        """A fixed linear extension: repeatedly take the lowest-index minimal element."""
        indeg = [len(d) for d in self.lower_covers]
        ready = [i for i, d in enumerate(indeg) if d == 0]
        out = []
        while ready:
            ready.sort()
            i = ready.pop(0)
            out.append(i)
            for j in self.upper_covers[i]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    ready.append(j)
        return tuple(out)

    @property
    def minimal(self) -> tuple[str, ...]:
        return tuple(e for e, d in zip(self.elements, self.lower_covers) if not d)

    @property
    def maximal(self) -> tuple[str, ...]:
        return tuple(e for e, u in zip(self.elements, self.upper_covers) if not u)

    @cached_property
    def full_mask(self) -> int:
        return (1 << len(self)) - 1

    def mask_of(self, names: Iterable[str]) -> int:
        m = 0
        for name in names:
            m |= 1 << self.index[name]
        return m

    def names_of(self, mask: int) -> tuple[str, ...]:
        return tuple(self.elements[i] for i in _bits(mask))

    def is_ideal(self, mask: int) -> bool:
        return all(self.below[i] & ~mask == 0 for i in _bits(mask))

    def is_antichain(self, mask: int) -> bool:
        return all(self.above[i] & mask == 0 for i in _bits(mask))

    def is_chain(self) -> bool:
        return all(self.comparable(u, v) for u, v in combinations(self.elements, 2))

    def is_connected(self) -> bool:
        if not self.elements:
            return True
        seen = {0}
        stack = [0]
        while stack:
            i = stack.pop()
            for j in self.upper_covers[i] + self.lower_covers[i]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == len(self)

    def subposet(self, names: Iterable[str]) -> "Poset":
        """Full (induced) subposet, elements in this poset's order."""
        keep = set(names)
        elems = [e for e in self.elements if e in keep]
        rel = [(u, v) for u in elems for v in elems if self.less(u, v)]
        return Poset.from_relations(elems, rel)

    def relabel(self, mapping: dict[str, str]) -> "Poset":
        return Poset(tuple(mapping.get(e, e) for e in self.elements),
                     tuple((mapping.get(u, u), mapping.get(v, v)) for u, v in self.covers))

    def __str__(self):
        return serialize(self)


def _closure(up):
    """Transitive closure of a successor-bitmask relation (Warshall)."""
    n = len(up)
    reach = list(up)
    for k in range(n):
        bit = 1 << k
        rk = reach[k]
        for i in range(n):
            if reach[i] & bit:
                reach[i] |= rk
    return reach


# DSL


def parse_poset(text: str) -> Poset:
    """Parse the poset DSL.

    The first statement lists element names and ends with ``;``. Every later
    token of the form ``a<b`` (chains ``a<b<c`` allowed) declares a relation.
    Lines starting with ``#`` are comments. Relations are reduced to covers.

    >>> parse_poset("u v w; w<u w<v").covers
    (('w', 'u'), ('w', 'v'))
    """
    tokens = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.lstrip().startswith("#"):
            continue
        for m in re.finditer(r"[^\s;,]+|;", line):
            tokens.append((m.group(), lineno, m.start() + 1))
    if not tokens:
        raise PosetParseError("empty poset description")
    try:
        semi = next(i for i, t in enumerate(tokens) if t[0] == ";")
    except StopIteration:
        raise PosetParseError("element list must be terminated by ';'",
                              tokens[-1][1], tokens[-1][2]) from None
    elements = []
    seen = set()
    for tok, line, col in tokens[:semi]:
        if not _NAME.fullmatch(tok):
            raise PosetParseError(f"invalid element name {tok!r}", line, col)
        if tok in seen:
            raise PosetParseError(f"duplicate element {tok!r}", line, col)
        seen.add(tok)
        elements.append(tok)
    relations = []
    for tok, line, col in tokens[semi + 1:]:
        if tok == ";":
            continue
        parts = tok.split("<")
        if len(parts) < 2 or not all(parts):
            raise PosetParseError(f"expected relation 'a<b', got {tok!r}", line, col)
        for p in parts:
            if p not in seen:
                raise PosetParseError(f"unknown element {p!r}", line, col)
        relations.extend(zip(parts, parts[1:]))
    try:
        return Poset.from_relations(elements, relations)
    except InvalidPosetError as exc:
        raise PosetParseError(str(exc)) from None


def serialize(p: Poset) -> str:
    head = " ".join(p.elements) + ";"
    rel = " ".join(f"{u}<{v}" for u, v in p.covers)
    return f"{head} {rel}".rstrip()


# constructions


def chain(n: int, prefix: str = "c") -> Poset:
    names = tuple(f"{prefix}{i}" for i in range(1, n + 1))
    return Poset(names, tuple(zip(names, names[1:])))


def antichain(n: int, prefix: str = "a") -> Poset:
    return Poset(tuple(f"{prefix}{i}" for i in range(1, n + 1)))


def _disjoint_names(p1: Poset, p2: Poset) -> Poset:
    taken = set(p1.elements)
    mapping = {}
    for e in p2.elements:
        if e in taken or e in mapping.values():
            k = 2
            while f"{e}_{k}" in taken or f"{e}_{k}" in p2.elements or f"{e}_{k}" in mapping.values():
                k += 1
            mapping[e] = f"{e}_{k}"
    return p2.relabel(mapping) if mapping else p2


def disjoint_union(p1: Poset, p2: Poset) -> Poset:
    p2 = _disjoint_names(p1, p2)
    return Poset(p1.elements + p2.elements, p1.covers + p2.covers)


def ordinal_sum(p1: Poset, p2: Poset) -> Poset:
    """``p1`` below ``p2``; every element of p1 is less than every element of p2."""
    p2 = _disjoint_names(p1, p2)
    glue = tuple((u, v) for u in p1.maximal for v in p2.minimal)
    return Poset(p1.elements + p2.elements, p1.covers + glue + p2.covers)


# bounded extension


class Edge(NamedTuple):
    """Covering pair of the bounded poset; ``t`` is covered by ``s``."""
    s: str
    t: str

    def __str__(self):
        return f"{self.t}<{self.s}"


@dataclass(frozen=True)
class BoundedPoset:
    base: Poset

    zero = ZERO
    one = ONE

    def __post_init__(self):
        if ZERO in self.base.index or ONE in self.base.index:
            raise InvalidPosetError("element names '^0' and '^1' are reserved")

    @cached_property
    def hat(self) -> Poset:
        p = self.base
        covers = tuple((ZERO, m) for m in p.minimal) + p.covers + tuple((m, ONE) for m in p.maximal)
        if not p.elements:
            covers = ((ZERO, ONE),)
        return Poset((ZERO,) + p.elements + (ONE,), covers)

    @cached_property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(Edge(s=v, t=u) for u, v in self.hat.covers)

    @cached_property
    def edge_index(self) -> dict[Edge, int]:
        return {e: i for i, e in enumerate(self.edges)}

    def edge(self, spec) -> Edge:
        """Accept an Edge, an ``(s, t)`` pair, an index, or ``'t<s'`` text."""
        if isinstance(spec, int):
            return self.edges[spec]
        if isinstance(spec, str):
            t, s = spec.split("<")
            spec = (s, t)
        e = Edge(*spec)
        if e not in self.edge_index:
            raise InvalidPosetError(f"{e} is not an edge of the bounded poset")
        return e

    @cached_property
    def heights(self) -> dict[str, int]:
        """Longest chain length from the bottom element, for every element of the hat."""
        hat = self.hat
        h = [0] * len(hat)
        for i in hat.linear_order:
            for j in hat.upper_covers[i]:
                h[j] = max(h[j], h[i] + 1)
        return dict(zip(hat.elements, h))

    @property
    def h(self) -> int:
        return self.heights[ONE]

    def __len__(self):
        return len(self.hat)


def bounded_extension(p: Poset) -> BoundedPoset:
    return BoundedPoset(p)


# contractions


@dataclass(frozen=True)
class Contraction:
    """Surjection of bounded posets given by a partition of the source hat.

    ``target`` is the bounded poset on the blocks; a block containing a
    bound keeps that bound's name, a singleton keeps its element's name,
    any other block is named by joining its members with ``+``.
    """
    source: BoundedPoset
    blocks: tuple[frozenset, ...]
    target: BoundedPoset = field(init=False)
    block_of: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        hat = self.source.hat
        blocks = tuple(frozenset(b) for b in self.blocks)
        seen = set()
        for b in blocks:
            if not b or seen & b or not b <= set(hat.elements):
                raise InvalidPosetError("blocks must partition the bounded poset")
            seen |= b
        if seen != set(hat.elements):
            raise InvalidPosetError("blocks must partition the bounded poset")
        block_of = {}
        names = []
        for b in blocks:
            if ZERO in b and ONE in b:
                raise InvalidPosetError("a contraction cannot identify ^0 and ^1")
            if ZERO in b:
                name = ZERO
            elif ONE in b:
                name = ONE
            elif len(b) == 1:
                (name,) = b
            else:
                name = "+".join(e for e in hat.elements if e in b)
            names.append(name)
            for e in b:
                block_of[e] = name
            if not _connected_in(hat, b):
                raise InvalidPosetError(f"fiber {sorted(b)} is not connected")
        # order the target like the source: by first member
        first = {n: min(hat.index[e] for e in b) for n, b in zip(names, blocks)}
        order = sorted(names, key=first.get)
        rel = {(block_of[u], block_of[v]) for u, v in hat.covers if block_of[u] != block_of[v]}
        try:
            target_hat = Poset.from_relations(order, rel)
        except InvalidPosetError:
            raise InvalidPosetError("contraction is not order-preserving") from None
        lifted = set(rel)
        for cover in target_hat.covers:
            if cover not in lifted:
                raise InvalidPosetError(f"cover {cover[0]}<{cover[1]} does not lift")
        inner = [n for n in order if n not in (ZERO, ONE)]
        base = target_hat.subposet(inner)
        target = BoundedPoset(base)
        if set(target.hat.covers) != set(target_hat.covers):
            raise InvalidPosetError("contraction target is not a bounded poset")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "block_of", block_of)

    @classmethod
    def merging(cls, source: BoundedPoset, block: Iterable[str]) -> "Contraction":
        """All fibers singletons except ``block``."""
        block = frozenset(block)
        rest = [frozenset([e]) for e in source.hat.elements if e not in block]
        return cls(source, (block, *rest))


def _connected_in(p: Poset, block) -> bool:
    block = set(block)
    start = next(iter(block))
    seen = {start}
    stack = [start]
    while stack:
        i = p.index[stack.pop()]
        for j in p.upper_covers[i] + p.lower_covers[i]:
            name = p.elements[j]
            if name in block and name not in seen:
                seen.add(name)
                stack.append(name)
    return seen == block


# structure


@dataclass(frozen=True)
class Structure:
    connected: bool
    pure: bool
    heights: dict
    h_P: int
    has_singleton_ordinal_summand: bool


def structure(p: Poset) -> Structure:
    bp = bounded_extension(p)
    hat = bp.hat
    hts = bp.heights
    pure = all(hts[v] == hts[u] + 1 for u, v in hat.covers)
    singleton = any(
        (p.above[i] | p.below[i] | (1 << i)) == p.full_mask for i in range(len(p))
    )
    return Structure(
        connected=p.is_connected(),
        pure=pure,
        heights={e: hts[e] for e in p.elements},
        h_P=bp.h,
        has_singleton_ordinal_summand=singleton,
    )


# ideal lattice


@dataclass(frozen=True)
class IdealLattice:
    """Distributive lattice J(P) of order ideals under inclusion.

    ``ideals`` are bitmasks over ``poset.elements``, ordered by size and
    then lexicographically by element index. ``covers`` are index pairs
    ``(a, b)`` with ideal b = ideal a plus one element.
    """
    poset: Poset
    ideals: tuple[int, ...]
    covers: tuple[tuple[int, int], ...]

    @cached_property
    def position(self) -> dict[int, int]:
        return {m: i for i, m in enumerate(self.ideals)}

    def __len__(self):
        return len(self.ideals)

    @property
    def size(self) -> int:
        return len(self.ideals)

    @cached_property
    def chain_count(self) -> int:
        """Number of maximal chains from the empty ideal to P."""
        paths = [0] * len(self.ideals)
        paths[0] = 1
        up = [[] for _ in self.ideals]
        for a, b in self.covers:
            up[a].append(b)
        for a in range(len(self.ideals)):  # size order is topological
            for b in up[a]:
                paths[b] += paths[a]
        return paths[-1]

    def join(self, a: int, b: int) -> int:
        return a | b

    def meet(self, a: int, b: int) -> int:
        return a & b

    def names(self, mask: int) -> tuple[str, ...]:
        return self.poset.names_of(mask)


def _ideal_key(mask):
    return (bin(mask).count("1"), list(_bits(mask)))


def ideal_lattice(p: Poset, cap: int = DEFAULT_IDEAL_CAP) -> IdealLattice:
    found = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for mask in frontier:
            for i in range(len(p)):
                if not mask >> i & 1 and p.below[i] & ~mask == 0:
                    m2 = mask | 1 << i
                    if m2 not in found:
                        found.add(m2)
                        nxt.append(m2)
                        if len(found) > cap:
                            raise SizeGuardError(f"|J(P)| exceeds cap {cap}")
        frontier = nxt
    ideals = tuple(sorted(found, key=_ideal_key))
    pos = {m: i for i, m in enumerate(ideals)}
    covers = []
    for a, mask in enumerate(ideals):
        for i in range(len(p)):
            if not mask >> i & 1:
                b = pos.get(mask | 1 << i)
                if b is not None:
                    covers.append((a, b))
    return IdealLattice(p, ideals, tuple(sorted(covers)))


def linear_extension_count(p: Poset, cap: int = DEFAULT_EXTENSION_CAP) -> int:
    """Count linear extensions by plain backtracking (no memoisation)."""
    if len(p) > cap:
        raise SizeGuardError(f"|P| = {len(p)} exceeds backtracking cap {cap}")
    below = p.below
    n = len(p)

    def extend(placed):
        if placed == p.full_mask:
            return 1
        total = 0
        for i in range(n):
            if not placed >> i & 1 and below[i] & ~placed == 0:
                total += extend(placed | 1 << i)
        return total

    return extend(0)


class Quadric(NamedTuple):
    alpha: int
    beta: int
    join: int
    meet: int


def hibi_quadrics(lat: IdealLattice) -> list[Quadric]:
    """One binomial p_a p_b - p_(a|b) p_(a&b) per incomparable pair of ideals."""
    out = []
    for a, b in combinations(lat.ideals, 2):
        if a & b != a and a & b != b:
            out.append(Quadric(a, b, a | b, a & b))
    return out
