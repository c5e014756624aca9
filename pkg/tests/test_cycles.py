import pytest

from hibi_cy import linalg
from hibi_cy.builtins import builtin
from hibi_cy.cycles import (
    check_degrees,
    contract_cycle,
    exceptional_rank,
    is_smoothable,
    minimal_convex_cycles,
    node_count,
    node_loci,
    relation_vector,
    relation_vectors,
)
from hibi_cy.errors import InvalidDegreesError, InvalidPosetError, SizeGuardError
from hibi_cy.geometry import ray_map
from hibi_cy.poset import ONE, ZERO, antichain, bounded_extension, chain, ideal_lattice, parse_poset

import oracles

SMALL_BUILTINS = ["V", "N", "P1", "P5", "UNSM"]


def _found(p):
    return {c.members for c in minimal_convex_cycles(bounded_extension(p))}


@pytest.mark.parametrize("n", range(7))
def test_cycles_match_subset_enumeration_all_small_posets(n):
    for p in oracles.all_posets(n):
        assert _found(p) == oracles.convex_cycles(p), str(p)


@pytest.mark.parametrize("name", SMALL_BUILTINS)
def test_cycles_match_subset_enumeration_builtins(name):
    p = builtin(name)
    assert _found(p) == oracles.convex_cycles(p)


@pytest.mark.parametrize("name, count", [
    ("P1", 6), ("V", 1), ("N", 2), ("chain:4", 0), ("P5", 3), ("UNSM", 7),
])
def test_four_cycle_counts(name, count):
    assert len(minimal_convex_cycles(bounded_extension(builtin(name)), size=4)) == count


def test_p1_extra_hexagon_is_a_singular_cone():
    """The six middle elements of the crown form a convex 6-cycle.

    Its six rays span only a 5-dimensional space with a single relation,
    and any five of them are independent; so the cone is not simplicial
    and no proper subset carries a relation, which is why the cycle is
    minimal even though only 4-cycles produce nodes.
    """
    p_hat = bounded_extension(builtin("P1"))
    (hexagon,) = [c for c in minimal_convex_cycles(p_hat) if len(c) == 6]
    assert ZERO not in hexagon.members and ONE not in hexagon.members
    rays = ray_map(p_hat)
    edges = [e for e, _ in hexagon.steps]
    vecs = [list(rays[e]) for e in edges]
    assert linalg.rank(vecs) == 5
    for k in range(6):
        assert linalg.rank(vecs[:k] + vecs[k + 1:]) == 5
    rel = relation_vector(p_hat, hexagon)
    assert not any(linalg.mat_vec(rays.matrix, rel))


def test_cycle_orientation_is_canonical():
    p_hat = bounded_extension(builtin("V"))
    (c,) = minimal_convex_cycles(p_hat)
    hat = p_hat.hat
    idx = [hat.index[v] for v in c.vertices]
    assert idx[0] == min(idx) and idx[1] < idx[-1]
    assert len(c.forward) == len(c.backward) == 2


@pytest.mark.parametrize("name", ["P1", "P2", "P3", "P4", "P5", "P6", "N", "V", "UNSM"])
def test_relations_lie_in_kernel(name):
    p_hat = bounded_extension(builtin(name))
    rays = ray_map(p_hat).matrix
    for c in minimal_convex_cycles(p_hat):
        assert not any(linalg.mat_vec(rays, relation_vector(p_hat, c)))
    assert len(relation_vectors(p_hat)) == len(minimal_convex_cycles(p_hat, size=4))


@pytest.mark.parametrize("name, rk", [("P1", 5), ("P2", 4), ("P3", 4), ("P4", 4), ("P5", 3), ("P6", 5), ("N", 2)])
def test_exceptional_rank(name, rk):
    assert exceptional_rank(bounded_extension(builtin(name))) == rk


def test_p1_loci_are_the_quadric_or_its_dual():
    v = builtin("V")
    for locus in node_loci(builtin("P1")):
        pc = locus.locus
        assert oracles.isomorphic(pc, v) or oracles.isomorphic(pc, oracles.dual(v))
        assert locus.degree == 2 and ideal_lattice(pc).size == 5


def test_locus_through_top_of_v_is_empty():
    (locus,) = node_loci(builtin("V"))
    assert len(locus.locus) == 0 and locus.degree == 1


def test_diamond_locus_is_a_point():
    d = parse_poset("a b c d; a<b<d a<c<d")
    (c,) = minimal_convex_cycles(bounded_extension(d))
    assert len(contract_cycle(bounded_extension(d), c)) == 1


@pytest.mark.parametrize("name, degrees, dp", [
    ("P1", (1, 1, 1), 12), ("P2", (1,) * 5, 20), ("P3", (1,) * 4, 16),
    ("P4", (1, 1, 1), 10), ("P5", (2, 1), 8), ("P6", (1,) * 5, 24), ("N", (3,), 6),
])
def test_node_counts(name, degrees, dp):
    assert node_count(builtin(name), degrees) == dp


def test_check_degrees():
    assert check_degrees(builtin("P5"), (1, 2)) == (2, 1)
    with pytest.raises(InvalidDegreesError):
        check_degrees(builtin("P1"), (1, 2))
    with pytest.raises(InvalidDegreesError):
        check_degrees(builtin("P1"), (0, 1, 2))
    with pytest.raises(InvalidPosetError):
        check_degrees(antichain(4), (1,))


def test_unsm_not_smoothable_with_chain_witness():
    p = builtin("UNSM")
    verdict = is_smoothable(p, (1, 1, 1, 1))
    assert not verdict.smoothable
    c = verdict.failing_cycle
    assert c.members == frozenset({"b", "y", "q", "z"})
    p_hat = bounded_extension(p)
    assert contract_cycle(p_hat, c).is_chain()
    vecs = [list(relation_vector(p_hat, d)) for d in minimal_convex_cycles(p_hat, size=4) if d != c]
    assert not linalg.in_span(list(relation_vector(p_hat, c)), vecs)


@pytest.mark.parametrize("name, degrees", [("P1", (1, 1, 1)), ("P5", (2, 1)), ("chain:4", (5,))])
def test_smoothable(name, degrees):
    assert is_smoothable(builtin(name), degrees).smoothable


def test_cycle_cap():
    with pytest.raises(SizeGuardError):
        minimal_convex_cycles(bounded_extension(builtin("P2")), cap=2)


def test_chain_has_no_cycles():
    assert minimal_convex_cycles(bounded_extension(chain(4))) == []
