"""Minimal convex cycles of the bounded poset and the node data they carry.

A minimal convex cycle is a convex subset of the bounded poset, not
containing both bounds, whose Hasse diagram is a single cycle. Because
convexity makes the induced Hasse diagram an induced subgraph of the full
one, the search runs over chordless cycles of the undirected Hasse graph.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

from . import linalg
from .errors import InvalidDegreesError, InvalidPosetError, SizeGuardError
from .poset import ONE, ZERO, BoundedPoset, Contraction, Edge, Poset, bounded_extension, ideal_lattice, structure
from .geometry import ray_map

DEFAULT_CYCLE_CAP = 100_000


@dataclass(frozen=True)
class ConvexCycle:
    """Cyclic vertex sequence plus, per step, the edge used and its direction.

    ``steps[i]`` is ``(edge, +1)`` when going from ``vertices[i]`` to
    ``vertices[i+1]`` climbs the edge, ``-1`` when it descends.
    """
    vertices: tuple[str, ...]
    steps: tuple[tuple[Edge, int], ...]

    def __len__(self):
        return len(self.vertices)

    @property
    def members(self) -> frozenset:
        return frozenset(self.vertices)

    @property
    def forward(self) -> tuple[Edge, ...]:
        return tuple(e for e, d in self.steps if d > 0)

    @property
    def backward(self) -> tuple[Edge, ...]:
        return tuple(e for e, d in self.steps if d < 0)

    def __str__(self):
        return "(" + " ".join(self.vertices) + ")"


def is_convex(hat: Poset, names) -> bool:
    mask = hat.mask_of(names)
    for i in range(len(hat)):
        if mask >> i & 1:
            continue
        if hat.below[i] & mask and hat.above[i] & mask:
            return False
    return True


def _adjacency(hat: Poset):
    return [set(hat.upper_covers[i]) | set(hat.lower_covers[i]) for i in range(len(hat))]


def _orient(p_hat: BoundedPoset, ring: list[int]) -> ConvexCycle:
    hat = p_hat.hat
    # start at lowest index, step first towards the smaller-index neighbour
    k = ring.index(min(ring))
    ring = ring[k:] + ring[:k]
    if ring[-1] < ring[1]:
        ring = [ring[0]] + ring[:0:-1]
    names = [hat.elements[i] for i in ring]
    steps = []
    for a, b in zip(names, names[1:] + names[:1]):
        if hat.less(a, b):
            steps.append((Edge(s=b, t=a), 1))
        else:
            steps.append((Edge(s=a, t=b), -1))
    return ConvexCycle(tuple(names), tuple(steps))


def minimal_convex_cycles(p_hat: BoundedPoset, size: int | None = None,
                          cap: int = DEFAULT_CYCLE_CAP) -> list[ConvexCycle]:
    """All minimal convex cycles, optionally only those with ``size`` elements.

    Sorted by size, then by the sorted index tuple of their members.
    """
    hat = p_hat.hat
    adj = _adjacency(hat)
    bounds = {hat.index[ZERO], hat.index[ONE]}
    limit = size if size is not None else len(hat)
    found = []

    def extend(path):
        start, last = path[0], path[-1]
        for nb in sorted(adj[last]):
            if nb <= start or nb in path:
                continue
            if bounds <= set(path) | {nb}:
                continue
            if any(nb in adj[v] for v in path[1:-1]):
                continue  # chord
            if len(path) > 1 and start in adj[nb]:
                # nb must close the cycle; each cycle is seen in both directions
                if len(path) >= 3 and path[1] < nb and (size is None or len(path) + 1 == size):
                    found.append(path + [nb])
                    if len(found) > cap:
                        raise SizeGuardError(f"more than {cap} cycles")
                continue
            if len(path) + 1 < limit:
                extend(path + [nb])

    for s in range(len(hat)):
        extend([s])

    out = []
    for ring in found:
        names = [hat.elements[i] for i in ring]
        if ZERO in names and ONE in names:
            continue
        if not is_convex(hat, names):
            continue
        out.append(_orient(p_hat, ring))
    out.sort(key=lambda c: (len(c), sorted(hat.index[v] for v in c.vertices)))
    return out


def contract_cycle(p_hat: BoundedPoset, c: ConvexCycle) -> Poset:
    """The poset of the locus: collapse ``c`` to one element, drop the bounds."""
    return cycle_contraction(p_hat, c).target.base


def cycle_contraction(p_hat: BoundedPoset, c: ConvexCycle) -> Contraction:
    if not is_convex(p_hat.hat, c.vertices):
        raise InvalidPosetError(f"cycle {c} is not convex")
    return Contraction.merging(p_hat, c.vertices)


def relation_vector(p_hat: BoundedPoset, c: ConvexCycle) -> tuple[int, ...]:
    """+1 on edges climbed, -1 on edges descended while walking the cycle."""
    vec = [0] * len(p_hat.edges)
    for e, d in c.steps:
        vec[p_hat.edge_index[e]] += d
    return tuple(vec)


def relation_vectors(p_hat: BoundedPoset) -> list[tuple[int, ...]]:
    """One relation per 4-element minimal convex cycle, checked against the ray map."""
    rays = ray_map(p_hat).matrix
    out = []
    for c in minimal_convex_cycles(p_hat, size=4):
        v = relation_vector(p_hat, c)
        if any(linalg.mat_vec(rays, v)):
            raise AssertionError(f"relation of {c} is not in the kernel of the ray map")
        out.append(v)
    return out


def exceptional_rank(p_hat: BoundedPoset) -> int:
    vecs = relation_vectors(p_hat)
    return linalg.rank([list(v) for v in vecs]) if vecs else 0


def check_degrees(p: Poset, degrees) -> tuple[int, ...]:
    """Validate a degree tuple against the Calabi-Yau condition; returns it sorted descending."""
    degrees = tuple(sorted((int(d) for d in degrees), reverse=True))
    if not degrees or any(d < 1 for d in degrees):
        raise InvalidDegreesError("degrees must be positive integers")
    st = structure(p)
    if not st.pure or not st.connected:
        raise InvalidPosetError("poset must be pure and connected")
    if sum(degrees) != st.h_P:
        raise InvalidDegreesError(f"degrees sum to {sum(degrees)}, need h_P = {st.h_P}")
    if len(p) - len(degrees) != 3:
        raise InvalidDegreesError(f"need |P| - r = 3, got {len(p)} - {len(degrees)}")
    return degrees


@dataclass(frozen=True)
class NodeLocus:
    cycle: ConvexCycle
    locus: Poset
    degree: int


def node_loci(p: Poset) -> list[NodeLocus]:
    p_hat = bounded_extension(p)
    out = []
    for c in minimal_convex_cycles(p_hat, size=4):
        pc = contract_cycle(p_hat, c)
        out.append(NodeLocus(c, pc, ideal_lattice(pc).chain_count))
    return out


def node_count(p: Poset, degrees) -> int:
    degrees = check_degrees(p, degrees)
    return prod(degrees) * sum(n.degree for n in node_loci(p))


@dataclass(frozen=True)
class SmoothingVerdict:
    smoothable: bool
    witness: str
    failing_cycle: ConvexCycle | None = None


def is_smoothable(p: Poset, degrees) -> SmoothingVerdict:
    degrees = check_degrees(p, degrees)
    if prod(degrees) > 1:
        return SmoothingVerdict(True, f"product of degrees {prod(degrees)} > 1")
    p_hat = bounded_extension(p)
    cycles = minimal_convex_cycles(p_hat, size=4)
    vecs = [list(relation_vector(p_hat, c)) for c in cycles]
    chain_like = 0
    for k, c in enumerate(cycles):
        if not contract_cycle(p_hat, c).is_chain():
            continue
        chain_like += 1
        others = vecs[:k] + vecs[k + 1:]
        if not linalg.in_span(vecs[k], others):
            return SmoothingVerdict(
                False,
                f"cycle {c} has a chain locus and its relation is independent of the others",
                c,
            )
    if chain_like == 0:
        return SmoothingVerdict(True, "no 4-cycle has a chain locus")
    return SmoothingVerdict(True, f"all {chain_like} chain-locus relations lie in the span of the others")
