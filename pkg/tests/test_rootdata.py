from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lie.rootdata import (RootSystemError, build_root_system, dual_partition_check, harish_chandra_equal,
                          is_dominant_integral, langlands_dual, pair)
from tests.conftest import ALL_TYPES, RANK_TWO_TYPES


@pytest.mark.parametrize("label, num_roots, exponents", [
    ("A1", 1, (1,)),
    ("A2", 3, (1, 2)),
    ("A3", 6, (1, 2, 3)),
    ("A4", 10, (1, 2, 3, 4)),
    ("B2", 4, (1, 3)),
    ("B3", 9, (1, 3, 5)),
    ("C3", 9, (1, 3, 5)),
    ("B4", 16, (1, 3, 5, 7)),
    ("D4", 12, (1, 3, 3, 5)),
    ("F4", 24, (1, 5, 7, 11)),
    ("G2", 6, (1, 5)),
])
def test_root_counts_and_exponents(label, num_roots, exponents):
    rs = build_root_system(label)
    assert rs.num_positive_roots == num_roots
    assert rs.exponents == exponents


@pytest.mark.parametrize("label", ALL_TYPES)
def test_structural_invariants(label):
    rs = build_root_system(label)
    A = rs.cartan
    assert all(A[i, i] == 2 for i in range(rs.rank))
    off = A - 2 * np.eye(rs.rank, dtype=int)
    assert (off <= 0).all()
    assert ((off == 0) == (off.T == 0)).all()
    assert len(rs.positive_coroots) == rs.num_positive_roots == sum(rs.exponents)
    assert dual_partition_check(rs)
    for i in range(rs.rank):
        assert pair(rs.root(rs.simple_root_index(i)), rs.rho_check) == 1


@pytest.mark.parametrize("label", ALL_TYPES)
def test_rho_pairs_to_coroot_height(label):
    rs = build_root_system(label)
    assert rs.coroot_weight_pairings(rs.rho) == tuple(sum(c) for c in rs.positive_coroots)


def test_pairing_with_shifted_weight_in_a1():
    rs = build_root_system("A1")
    for m in range(5):
        assert rs.coroot_weight_pairings(rs.weight((m,)) + rs.rho) == (m + 1,)


def test_g2_roots():
    rs = build_root_system("G2")
    assert set(rs.positive_roots) == {(1, 0), (0, 1), (1, 1), (2, 1), (3, 1), (3, 2)}
    assert rs.max_height == 5


def test_langlands_dual():
    b2, c2 = build_root_system("B2"), build_root_system("C2")
    dual = langlands_dual(b2)
    assert dual.label == "C2"
    assert dual == c2
    assert langlands_dual(build_root_system("A1")) == build_root_system("A1")
    g2 = build_root_system("G2")
    assert langlands_dual(langlands_dual(g2)) == g2


@pytest.mark.parametrize("label", ["B2", "B3", "C3", "G2", "F4"])
def test_dual_roots_are_coroots(label):
    rs = build_root_system(label)
    assert set(langlands_dual(rs).positive_roots) == set(rs.positive_coroots)


def test_pairing_rejects_mismatched_arguments():
    a2, b2 = build_root_system("A2"), build_root_system("B2")
    with pytest.raises(RootSystemError):
        pair(a2.root(0), a2.weight((1, 0)))
    with pytest.raises(RootSystemError):
        pair(a2.coroot(0), a2.coweight((1, 0)))
    with pytest.raises(RootSystemError):
        pair(a2.root(0), b2.coweight((1, 0)))


def test_is_dominant_integral():
    a1, a2 = build_root_system("A1"), build_root_system("A2")
    assert is_dominant_integral(a2.weight((0, 0)))
    assert not is_dominant_integral(a2.weight((1, -1)))
    assert is_dominant_integral(a1.weight((3,)))
    assert not is_dominant_integral(a1.coweight((Fraction(1, 2),)))


@pytest.mark.parametrize("label", ["E6", "A5", "B1", "D3", "G3", "X2", "A0", "a2"])
def test_unsupported_labels(label):
    with pytest.raises(RootSystemError):
        build_root_system(label)


@given(st.sampled_from(RANK_TWO_TYPES + ["A3"]), st.data())
def test_harish_chandra_equal_under_simple_reflections(label, data):
    rs = build_root_system(label)
    coords = data.draw(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=3),
                                min_size=rs.rank, max_size=rs.rank))
    mu = rs.weight(coords)
    i = data.draw(st.integers(0, rs.rank - 1))
    assert harish_chandra_equal(mu, rs.reflect(i, mu))
    assert harish_chandra_equal(mu, rs.dominant_representative(mu))


@given(st.sampled_from(RANK_TWO_TYPES), st.data())
def test_harish_chandra_equal_is_an_equivalence(label, data):
    rs = build_root_system(label)
    point = st.lists(st.integers(-2, 2), min_size=rs.rank, max_size=rs.rank).map(rs.weight)
    mu, nu, xi = data.draw(point), data.draw(point), data.draw(point)
    assert harish_chandra_equal(mu, mu)
    assert harish_chandra_equal(mu, nu) == harish_chandra_equal(nu, mu)
    if harish_chandra_equal(mu, nu) and harish_chandra_equal(nu, xi):
        assert harish_chandra_equal(mu, xi)


def test_harish_chandra_equal_is_transitive_along_orbits():
    rs = build_root_system("B2")
    orbit = rs.weyl_orbit(rs.weight((1, 1)))
    assert len(orbit) == 8
    for mu in orbit:
        for nu in orbit:
            assert harish_chandra_equal(mu, nu)
    assert not any(harish_chandra_equal(mu, rs.weight((2, 0))) for mu in orbit)


def test_harish_chandra_distinguishes_orbits():
    rs = build_root_system("A1")
    assert harish_chandra_equal(rs.weight((1,)), rs.weight((-1,)))
    assert not harish_chandra_equal(rs.weight((1,)), rs.weight((2,)))
    with pytest.raises(RootSystemError):
        harish_chandra_equal(rs.weight((1,)), rs.coweight((1,)))


def test_orbit_bound_is_enforced():
    rs = build_root_system("A2")
    assert len(rs.weyl_orbit(rs.weight((1, 1)))) == 6
    with pytest.raises(RootSystemError):
        rs.weyl_orbit(rs.weight((1, 1)), max_size=3)


def test_reflections_of_coweights_use_the_transpose():
    rs = build_root_system("B2")
    # s_i(x) = x - <alpha_i, x> alpha_i^vee, alpha_2^vee = -2 w_1 + 2 w_2 in B2
    assert rs.reflect(1, rs.coweight((0, 1))).coords == (2, -1)
    assert rs.reflect(1, rs.weight((0, 1))).coords == (1, -1)


@pytest.mark.parametrize("label", ["A1", "A2", "B2", "G2", "D4"])
def test_cartan_coordinates_round_trip(label):
    rs = build_root_system(label)
    coweight = rs.coweight(tuple(range(1, rs.rank + 1)))
    assert rs.cartan_coords_to_coweight(rs.coweight_to_cartan_coords(coweight)) == coweight


def test_rho_check_in_the_cartan_basis():
    assert build_root_system("A1").coweight_to_cartan_coords(build_root_system("A1").rho_check) == (Fraction(1, 2),)
    assert build_root_system("A2").coweight_to_cartan_coords(build_root_system("A2").rho_check) == (1, 1)
