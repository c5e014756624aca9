import random
from math import factorial

import pytest

from hibi_cy import linalg
from hibi_cy.builtins import builtin
from hibi_cy.errors import InvalidPosetError, SizeGuardError
from hibi_cy.geometry import (
    anticanonical_check,
    count_interior,
    count_points,
    degree_from_chains,
    edge_cut,
    ehrhart_polynomial,
    evaluate,
    facet_poset,
    forest_basis_check,
    gorenstein_terminal_certificate,
    ray_map,
)
from hibi_cy.poset import ONE, ZERO, antichain, bounded_extension, chain, ideal_lattice

import oracles

BUILTINS = ["P1", "P2", "P3", "P4", "P5", "P6", "N", "V", "UNSM"]


@pytest.mark.parametrize("name", ["V", "N", "P1", "P5"])
def test_point_counts_match_enumeration(name):
    p = builtin(name)
    for m in range(4):
        assert count_points(p, m) == oracles.lattice_points(p, m)


@pytest.mark.parametrize("name", ["V", "N", "P5"])
def test_interior_counts_match_enumeration(name):
    p = builtin(name)
    for m in range(6):
        assert count_interior(bounded_extension(p), m) == oracles.interior_points(p, m)


def test_count_conventions():
    p = builtin("V")
    assert count_points(p, -1) == 0 and count_points(p, 0) == 1
    assert count_interior(bounded_extension(p), 0) == 0


def test_chain_and_cube():
    # simplex and hypercube
    assert [count_points(chain(3), m) for m in range(4)] == [1, 4, 10, 20]
    assert count_points(antichain(3), 2) == 27
    assert count_interior(bounded_extension(antichain(3)), 3) == 8


@pytest.mark.parametrize("name", BUILTINS)
def test_volume_equals_linear_extensions(name):
    p = builtin(name)
    coeffs = ehrhart_polynomial(p)
    n = len(p)
    assert coeffs[n] * factorial(n) == ideal_lattice(p).chain_count
    total, unimodular = degree_from_chains(p)
    assert unimodular and total == ideal_lattice(p).chain_count


@pytest.mark.parametrize("name", ["V", "P1", "P5"])
def test_facet_count_and_facet_posets(name):
    p_hat = bounded_extension(builtin(name))
    for e in p_hat.edges:
        f = facet_poset(p_hat, e)
        assert len(f) == len(p_hat.base) - 1


def test_v_five_facets_five_vertices():
    p_hat = bounded_extension(builtin("V"))
    assert len(p_hat.edges) == 5 == ideal_lattice(p_hat.base).size


def test_ray_map_kernel_rank():
    for name in BUILTINS:
        p_hat = bounded_extension(builtin(name))
        rays = ray_map(p_hat)
        assert len(rays.kernel()) == len(p_hat.edges) - len(p_hat.base)
        assert linalg.rank(rays.matrix) == len(p_hat.base)


def test_ray_vectors():
    p_hat = bounded_extension(builtin("V"))
    rays = ray_map(p_hat)
    idx = p_hat.base.index
    v = rays[(ONE, "u")]
    assert v[idx["u"]] == 1 and sum(map(abs, v)) == 1
    v = rays[("u", "w")]
    assert v[idx["w"]] == 1 and v[idx["u"]] == -1


@pytest.mark.parametrize("name", ["P1", "P2", "P6", "V"])
def test_anticanonical_level_cuts_partition_edges(name):
    check = anticanonical_check(bounded_extension(builtin(name)))
    assert check.partition_ok
    assert len(check.level_cuts) == check.h_P


def test_anticanonical_rejects_non_pure():
    from hibi_cy.poset import parse_poset
    with pytest.raises(InvalidPosetError):
        anticanonical_check(bounded_extension(parse_poset("a b c; a<b")))


def test_edge_cut_of_empty_ideal():
    p_hat = bounded_extension(builtin("P1"))
    cut = edge_cut(p_hat, [])
    assert all(e.t == ZERO for e in cut.edges) and len(cut.edges) == 3
    with pytest.raises(InvalidPosetError):
        edge_cut(p_hat, ["t0"])


@pytest.mark.parametrize("name", ["V", "N", "P1", "P5"])
def test_terminal_certificates(name):
    p_hat = bounded_extension(builtin(name))
    for tau in ideal_lattice(p_hat.base).ideals:
        cert = gorenstein_terminal_certificate(p_hat, tau)
        assert cert.height_one and cert.no_extra_points


def test_terminal_certificate_size_guard():
    with pytest.raises(SizeGuardError):
        gorenstein_terminal_certificate(bounded_extension(antichain(9)), 0)


def _sample_forest_checks(name, samples, seed):
    rng = random.Random(seed)
    p_hat = bounded_extension(builtin(name))
    lat = ideal_lattice(p_hat.base)
    n = len(p_hat.base)
    outcomes = []
    for _ in range(samples):
        tau = rng.choice(lat.ideals)
        cut = set(edge_cut(p_hat, tau).edges)
        free = [e for e in p_hat.edges if e not in cut]
        b = rng.sample(free, n)
        outcomes.append(forest_basis_check(p_hat, tau, b))
    return outcomes


@pytest.mark.parametrize("name", BUILTINS)
def test_forest_basis_agreement(name):
    outcomes = _sample_forest_checks(name, 100, seed=7)
    assert len(outcomes) == 100
    assert any(outcomes)


def test_forest_basis_rejects_bad_input():
    p_hat = bounded_extension(builtin("V"))
    with pytest.raises(InvalidPosetError):
        forest_basis_check(p_hat, 0, p_hat.edges[:2])
    cut = edge_cut(p_hat, 0).edges
    rest = [e for e in p_hat.edges if e not in cut]
    with pytest.raises(InvalidPosetError):
        forest_basis_check(p_hat, 0, [cut[0]] + rest[:2])


def test_ehrhart_evaluation():
    coeffs = ehrhart_polynomial(builtin("P1"))
    assert all(evaluate(coeffs, m) == count_points(builtin("P1"), m) for m in range(8))
