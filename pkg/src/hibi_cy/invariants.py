"""Hodge numbers and topological invariants of CICY threefolds in Hibi toric varieties.

For a pure connected poset P and degrees d_1..d_r with sum h_P and
|P| - r = 3, ``Y`` is the small resolution of the nodal complete
intersection and ``X`` its smoothing.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from itertools import combinations
from math import prod

from .cycles import check_degrees, exceptional_rank, is_smoothable, node_count
from .errors import InvalidPosetError, NotSmoothableError
from .geometry import count_interior, count_points, facet_poset
from .poset import Poset, bounded_extension, ideal_lattice, structure

TORSION_CAVEAT = "torsion in H_*(X, Z) is not determined; Wall's classification assumes it vanishes"


@dataclass(frozen=True)
class CicySpec:
    poset: Poset
    degrees: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "degrees", check_degrees(self.poset, self.degrees))

    @property
    def r(self) -> int:
        return len(self.degrees)

    @property
    def r1(self) -> int:
        return self.degrees.count(1)


def ci_degree_tuples(p: Poset) -> list[tuple[int, ...]]:
    """Descending degree tuples (d_1 >= ... >= d_r) satisfying the CY condition."""
    st = structure(p)
    if not st.pure or not st.connected:
        raise InvalidPosetError("poset must be pure and connected")
    r = len(p) - 3
    if r <= 0:
        return []

    def parts(total, k, top):
        if k == 0:
            if total == 0:
                yield ()
            return
        for d in range(min(top, total - (k - 1)), 0, -1):
            for rest in parts(total - d, k - 1, d):
                yield (d,) + rest

    return list(parts(st.h_P, r, st.h_P))


def _facet_posets(p: Poset):
    p_hat = bounded_extension(p)
    return [facet_poset(p_hat, e) for e in p_hat.edges]


def h12_general(spec: CicySpec) -> int:
    p, d, r = spec.poset, spec.degrees, spec.r
    subsets = [J for k in range(r + 1) for J in combinations(range(r), k)]
    first = sum(
        (-1) ** len(J) * count_points(p, d[i] - sum(d[j] for j in J))
        for i in range(r) for J in subsets
    )
    facets = [bounded_extension(f) for f in _facet_posets(p)]
    second = 0
    for J in subsets:
        dJ = sum(d[j] for j in J)
        second += (-1) ** (r - len(J)) * sum(count_interior(f, dJ) for f in facets)
    return first - second - len(p)


def h12_simplified(p: Poset) -> int:
    h = structure(p).h_P
    interior = sum(count_interior(bounded_extension(f), h) for f in _facet_posets(p))
    return h * (ideal_lattice(p).size - h) - interior - len(p)


def simplified_applies(spec: CicySpec) -> bool:
    return all(d == 1 for d in spec.degrees) and not structure(spec.poset).has_singleton_ordinal_summand


def hodge_small_resolution(spec: CicySpec) -> tuple[int, int]:
    p_hat = bounded_extension(spec.poset)
    h11 = len(p_hat.edges) - len(spec.poset)
    h12 = h12_general(spec)
    if simplified_applies(spec):
        alt = h12_simplified(spec.poset)
        if alt != h12:
            raise AssertionError(f"h12 formulas disagree: general {h12}, simplified {alt}")
    return h11, h12


def smoothed_hodge(spec: CicySpec) -> tuple[int, int]:
    verdict = is_smoothable(spec.poset, spec.degrees)
    if not verdict.smoothable:
        raise NotSmoothableError(verdict.witness)
    p_hat = bounded_extension(spec.poset)
    h11_y, h12_y = hodge_small_resolution(spec)
    dp = node_count(spec.poset, spec.degrees)
    rk = exceptional_rank(p_hat)
    h11_x = h11_y - rk
    # Picard rank one exactly when the 4-cycles span the whole cycle space
    if (h11_x == 1) != (rk == len(p_hat.edges) - len(spec.poset) - 1):
        raise AssertionError("rank criterion for Picard rank one is inconsistent")
    return h11_x, h12_y + dp - rk


@dataclass
class InvariantReport:
    poset: str
    degrees: list
    J: int
    c_J: int
    h11_Y: int
    h12_Y: int
    dp: int
    rk: int
    smoothable: bool
    smoothing_witness: str
    h11_X: int | None = None
    h12_X: int | None = None
    chi_X: int | None = None
    deg_X: int | None = None
    c2H: int | None = None
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def invariant_report(spec: CicySpec, name: str | None = None) -> InvariantReport:
    p = spec.poset
    lat = ideal_lattice(p)
    p_hat = bounded_extension(p)
    h11_y, h12_y = hodge_small_resolution(spec)
    dp = node_count(p, spec.degrees)
    rk = exceptional_rank(p_hat)
    verdict = is_smoothable(p, spec.degrees)
    rep = InvariantReport(
        poset=name or str(p),
        degrees=list(spec.degrees),
        J=lat.size,
        c_J=lat.chain_count,
        h11_Y=h11_y,
        h12_Y=h12_y,
        dp=dp,
        rk=rk,
        smoothable=verdict.smoothable,
        smoothing_witness=verdict.witness,
    )
    if not verdict.smoothable:
        rep.notes.append("not smoothable: invariants of X omitted")
        return rep
    h11_x, h12_x = smoothed_hodge(spec)
    rep.h11_X, rep.h12_X = h11_x, h12_x
    rep.chi_X = 2 * (h11_x - h12_x)
    if h11_x != 1:
        rep.notes.append(f"h11(X) = {h11_x} != 1: deg and c2.H formulas need Picard rank one")
        return rep
    rep.deg_X = lat.chain_count * prod(spec.degrees)
    rep.c2H = 12 * (lat.size - spec.r1) - 2 * rep.deg_X
    rep.notes.append(TORSION_CAVEAT)
    return rep
