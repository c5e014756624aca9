"""Order-polytope geometry: dilation counts, facets, rays and cone certificates.

A lattice point of ``m * Delta(P)`` is an order-preserving map
``P -> {0..m}``; it corresponds to a multichain of m ideals in J(P), which
is how :func:`count_points` counts. Interior points of a dilated face are
maps that are strict along every edge of the bounded poset.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from . import linalg
from .errors import InvalidPosetError, SizeGuardError
from .poset import (
    ONE,
    ZERO,
    BoundedPoset,
    Contraction,
    Edge,
    Poset,
    bounded_extension,
    ideal_lattice,
    structure,
)

DEFAULT_PAIR_CAP = 4_000_000
HULL_DIM_CAP = 8


@lru_cache(maxsize=256)
def _lattice(p: Poset):
    return ideal_lattice(p)


def count_points(p: Poset, m: int) -> int:
    """Number of lattice points of the m-th dilate of the order polytope."""
    if m < 0:
        return 0
    if m == 0:
        return 1
    lat = _lattice(p)
    ideals = lat.ideals
    pos = lat.position
    order = p.linear_order
    # f[beta] = number of multichains I_1 <= ... <= I_k = beta
    f = [1] * len(ideals)
    for _ in range(m - 1):
        # down-set sums over J(P), one element at a time
        g = list(f)
        for u in order:
            bit = 1 << u
            for k, beta in enumerate(ideals):
                if beta & bit and p.above[u] & beta == 0:
                    g[k] += g[pos[beta ^ bit]]
        f = g
    return sum(f)


@lru_cache(maxsize=256)
def _strict_steps(p: Poset, cap: int = DEFAULT_PAIR_CAP):
    lat = _lattice(p)
    if len(lat) ** 2 > cap:
        raise SizeGuardError(f"|J(P)|^2 = {len(lat) ** 2} exceeds cap {cap}")
    steps = []
    for beta in lat.ideals:
        src = [k for k, alpha in enumerate(lat.ideals)
               if alpha & beta == alpha and p.is_antichain(beta ^ alpha)]
        steps.append(tuple(src))
    return lat, tuple(steps)


def count_interior(p_hat: BoundedPoset, m: int) -> int:
    """Interior lattice points of ``m * Delta(P)``.

    Labelings x of the bounded poset with x(^0) = 0, x(^1) = m and
    x strictly increasing along every edge.
    """
    if m <= 0:
        return 0
    p = p_hat.base
    lat, steps = _strict_steps(p)
    # levels 1..m-1, each adds an antichain (possibly empty)
    f = [0] * len(lat)
    f[0] = 1
    for _ in range(m - 1):
        f = [sum(f[a] for a in src) for src in steps]
    return f[-1]


def facet_poset(p_hat: BoundedPoset, e) -> Poset:
    """Poset whose order polytope is the facet of the edge ``e``."""
    e = p_hat.edge(e)
    return Contraction.merging(p_hat, (e.s, e.t)).target.base


def facet_contraction(p_hat: BoundedPoset, e) -> Contraction:
    e = p_hat.edge(e)
    return Contraction.merging(p_hat, (e.s, e.t))


@dataclass(frozen=True)
class RayMap:
    """Ray generators delta(e) = t(e) - s(e), coordinates of the bounds dropped."""
    p_hat: BoundedPoset
    vectors: tuple[tuple[int, ...], ...]

    @property
    def matrix(self) -> list[list[int]]:
        """|P| x |E| matrix whose columns are the rays."""
        n = len(self.p_hat.base)
        return [[v[i] for v in self.vectors] for i in range(n)]

    def kernel(self) -> list[list[int]]:
        return linalg.nullspace(self.matrix, len(self.vectors))

    def __getitem__(self, e):
        return self.vectors[self.p_hat.edge_index[self.p_hat.edge(e)]]


def ray_map(p_hat: BoundedPoset) -> RayMap:
    idx = p_hat.base.index
    n = len(p_hat.base)
    vecs = []
    for e in p_hat.edges:
        v = [0] * n
        if e.t in idx:
            v[idx[e.t]] += 1
        if e.s in idx:
            v[idx[e.s]] -= 1
        vecs.append(tuple(v))
    return RayMap(p_hat, tuple(vecs))


@dataclass(frozen=True)
class EdgeCut:
    ideal: frozenset
    edges: tuple[Edge, ...]


def _ideal_mask(p_hat: BoundedPoset, tau) -> int:
    p = p_hat.base
    mask = tau if isinstance(tau, int) else p.mask_of(tau)
    if not p.is_ideal(mask):
        raise InvalidPosetError(f"{sorted(p.names_of(mask))} is not an order ideal")
    return mask


def edge_cut(p_hat: BoundedPoset, tau) -> EdgeCut:
    """Edges leaving ``^0 + tau`` upwards."""
    mask = _ideal_mask(p_hat, tau)
    lower = {ZERO} | set(p_hat.base.names_of(mask))
    cut = tuple(e for e in p_hat.edges if e.t in lower and e.s not in lower)
    return EdgeCut(frozenset(p_hat.base.names_of(mask)), cut)


@dataclass(frozen=True)
class AnticanonicalCheck:
    h_P: int
    level_cuts: tuple[EdgeCut, ...]
    partition_ok: bool


def anticanonical_check(p_hat: BoundedPoset) -> AnticanonicalCheck:
    p = p_hat.base
    st = structure(p)
    if not st.pure:
        raise InvalidPosetError("poset is not pure")
    cuts = []
    for k in range(1, st.h_P + 1):
        tau = [u for u in p.elements if st.heights[u] < k]
        cuts.append(edge_cut(p_hat, tau))
    flat = [e for c in cuts for e in c.edges]
    ok = len(flat) == len(set(flat)) and set(flat) == set(p_hat.edges)
    return AnticanonicalCheck(st.h_P, tuple(cuts), ok)


def _vertex(p: Poset, mask: int) -> list[int]:
    # vertex of an ideal: 0 on the ideal, 1 on its complement
    return [0 if mask >> i & 1 else 1 for i in range(len(p))]


@dataclass(frozen=True)
class TerminalCertificate:
    height_one: bool
    no_extra_points: bool
    functional: tuple | None


def gorenstein_terminal_certificate(p_hat: BoundedPoset, tau) -> TerminalCertificate:
    """Check the maximal cone of ``tau`` has its rays on an integral height-one
    hyperplane and no further lattice points in their convex hull."""
    p = p_hat.base
    if not structure(p).pure:
        raise InvalidPosetError("poset is not pure")
    n = len(p)
    if n > HULL_DIM_CAP:
        raise SizeGuardError(f"hull enumeration limited to |P| <= {HULL_DIM_CAP}")
    mask = _ideal_mask(p_hat, tau)
    rays = ray_map(p_hat)
    cut = set(edge_cut(p_hat, mask).edges)
    gens = [rays.vectors[i] for i, e in enumerate(p_hat.edges) if e not in cut]
    y = linalg.solve([list(g) for g in gens], [1] * len(gens)) if gens else None
    height_one = y is not None and all(c.denominator == 1 for c in y)
    if not height_one:
        return TerminalCertificate(False, False, None)
    y = [int(c) for c in y]
    # the cone of tau is the normal cone at its vertex: <v, w - vertex> <= 0
    vtx = _vertex(p, mask)
    diffs = [[a - b for a, b in zip(_vertex(p, w), vtx)] for w in _lattice(p).ideals]
    hull = set()
    for pt in product((-1, 0, 1), repeat=n):
        if sum(a * b for a, b in zip(y, pt)) != 1:
            continue
        if all(sum(a * b for a, b in zip(pt, d)) <= 0 for d in diffs):
            hull.add(pt)
    return TerminalCertificate(True, hull == set(gens), tuple(y))


def _forest_two_trees(p_hat: BoundedPoset, b) -> bool:
    hat = p_hat.hat
    parent = {e: e for e in hat.elements}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in b:
        rs, rt = find(e.s), find(e.t)
        if rs == rt:
            return False
        parent[rs] = rt
    roots = {find(x) for x in hat.elements}
    return len(roots) == 2 and find(ZERO) != find(ONE)


def forest_basis_check(p_hat: BoundedPoset, tau, b) -> bool:
    """Whether the rays of ``b`` form a lattice basis, decided two ways.

    ``b`` must be |P| edges outside the cut of ``tau``. The graph test
    (two trees, one through each bound) and the determinant test must agree.
    """
    mask = _ideal_mask(p_hat, tau)
    b = [p_hat.edge(e) for e in b]
    n = len(p_hat.base)
    if len(b) != n or len(set(b)) != n:
        raise InvalidPosetError(f"expected {n} distinct edges, got {len(b)}")
    cut = set(edge_cut(p_hat, mask).edges)
    if any(e in cut for e in b):
        raise InvalidPosetError("edge subset must avoid the cut of tau")
    graph = _forest_two_trees(p_hat, b)
    rays = ray_map(p_hat)
    unimodular = abs(linalg.det([list(rays[e]) for e in b])) == 1 if n else True
    if graph != unimodular:
        raise AssertionError("forest and determinant criteria disagree")
    return graph


def degree_from_chains(p: Poset) -> tuple[int, bool]:
    """Sum of |det| over the simplices of maximal chains of J(P).

    Returns ``(total, all_unimodular)``; the total is n! Vol(Delta(P)).
    """
    lat = _lattice(p)
    n = len(p)
    up = [[] for _ in lat.ideals]
    for a, b in lat.covers:
        up[a].append(b)
    total = 0
    unimodular = True
    stack = [(0, [0])]
    last = len(lat) - 1
    while stack:
        node, path = stack.pop()
        if node == last:
            base = _vertex(p, lat.ideals[path[0]])
            rows = [[a - c for a, c in zip(_vertex(p, lat.ideals[k]), base)] for k in path[1:]]
            d = abs(linalg.det(rows)) if n else 1
            unimodular &= d == 1
            total += d
            continue
        for b in up[node]:
            stack.append((b, path + [b]))
    return total, unimodular


def ehrhart_polynomial(p: Poset) -> list:
    """Coefficients (constant first) of m -> count_points(p, m), by interpolation."""
    from fractions import Fraction
    n = len(p)
    xs = list(range(n + 1))
    ys = [count_points(p, m) for m in xs]
    rows = [[x ** k for k in range(n + 1)] for x in xs]
    return linalg.solve(rows, ys) if n else [Fraction(1)]


def evaluate(coeffs, x):
    return sum(c * x ** k for k, c in enumerate(coeffs))


def relation_matrix(p_hat: BoundedPoset) -> list[list[int]]:
    """Rows are the |P| linear-equivalence relations among the edge divisors."""
    return ray_map(p_hat).matrix


__all__ = [
    "AnticanonicalCheck", "EdgeCut", "RayMap", "TerminalCertificate",
    "anticanonical_check", "bounded_extension", "count_interior", "count_points",
    "degree_from_chains", "edge_cut", "ehrhart_polynomial", "evaluate",
    "facet_contraction", "facet_poset", "forest_basis_check",
    "gorenstein_terminal_certificate", "ray_map", "relation_matrix",
]
