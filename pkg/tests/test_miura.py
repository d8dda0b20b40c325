from fractions import Fraction

import numpy as np
import pytest
import sympy

from lie.rootdata import build_root_system
from opers.miura import (MAX_POLE_ORDER, CartanConnection, ConnectionResidueError, check_miura_image,
                         connection_residue, dilate_connection, miura_transform, residue_coweight, sample_connection)
from opers.oper import (LambdaNilpotentForm, NotMember, classify_monodromy_free, dilate_oper, dominant_coweights,
                        is_lambda_regular, to_lambda_nilpotent)
from series.formal import LaurentSeries

t = sympy.Symbol("t")

# enough for coweights with coordinates <= 3 at the default working precision
PRECISION = {"A1": 16, "A2": 22}


def to_sympy(s: LaurentSeries):
    return sum((sympy.Rational(c.numerator, c.denominator) * t ** n for n, c in s.terms().items()), sympy.Integer(0))


def brute_force_sl2_miura(u):
    """Gauge d/dt + [[u, 0], [1, -u]] by g = [[1, -u], [0, 1]] with 2x2 matrices; returns the e-entry."""
    A = sympy.Matrix([[u, 0], [1, -u]])
    g = sympy.Matrix([[1, -u], [0, 1]])
    gauged = g * A * g.inv() - sympy.diff(g, t) * g.inv()
    assert sympy.simplify(gauged[0, 0]) == 0
    assert sympy.simplify(gauged[1, 0]) == 1
    return sympy.expand(gauged[0, 1])


def random_coweight(rs, rng, cap=3):
    return rs.coweight([int(c) for c in rng.integers(0, cap + 1, size=rs.rank)])


@pytest.mark.parametrize("seed", range(20))
def test_sl2_miura_matches_brute_force_gauge(seed):
    rng = np.random.default_rng(seed)
    rs = build_root_system("A1")
    conn = sample_connection(rs, random_coweight(rs, rng), rng, precision=20, exact=True)
    u = conn.u[0]
    v = miura_transform(conn).coords[0]
    assert v == u * u + u.derivative()
    assert sympy.expand(to_sympy(v) - brute_force_sl2_miura(to_sympy(u))) == 0


@pytest.mark.parametrize("seed", range(5))
def test_sl2_miura_truncated(seed):
    rng = np.random.default_rng(seed)
    rs = build_root_system("A1")
    conn = sample_connection(rs, random_coweight(rs, rng), rng, precision=20)
    u = conn.u[0]
    v = miura_transform(conn).coords[0]
    assert v.agrees_with(u * u + u.derivative())
    assert v.precision == 19


@pytest.mark.parametrize("label", ["A1", "A2"])
@pytest.mark.parametrize("seed", range(50))
def test_miura_image_is_lambda_regular(label, seed):
    rng = np.random.default_rng(seed)
    rs = build_root_system(label)
    coweight = random_coweight(rs, rng)
    conn = sample_connection(rs, coweight, rng, precision=PRECISION[label])
    assert check_miura_image(conn, coweight)


def test_half_residue_is_never_monodromy_free(rng):
    rs = build_root_system("A1")
    # coweight -1 gives the Cartan residue +1/2
    conn = sample_connection(rs, rs.coweight((-1,)), rng, precision=16)
    assert connection_residue(conn) == (Fraction(1, 2),)
    oper = miura_transform(conn)
    for m in range(5):
        assert isinstance(to_lambda_nilpotent(oper, rs.coweight((m,))), NotMember)
    assert classify_monodromy_free(oper, bound=4) is None


@pytest.mark.parametrize("seed", range(30))
def test_classification_recovers_the_coweight(seed):
    rng = np.random.default_rng(1000 + seed)
    rs = build_root_system("A1")
    coweight = random_coweight(rs, rng)
    conn = sample_connection(rs, coweight, rng, precision=16)
    assert residue_coweight(conn) == coweight
    assert classify_monodromy_free(miura_transform(conn), bound=4) == coweight


def test_classification_in_a2(rng):
    rs = build_root_system("A2")
    for coords in [(0, 0), (1, 0), (0, 2), (1, 1)]:
        coweight = rs.coweight(coords)
        conn = sample_connection(rs, coweight, rng, precision=PRECISION["A2"])
        assert classify_monodromy_free(miura_transform(conn), bound=2) == coweight


@pytest.mark.parametrize("label", ["A1", "A2"])
@pytest.mark.parametrize("seed", range(5))
def test_exactly_one_coweight_is_regular(label, seed):
    rng = np.random.default_rng(3000 + seed)
    rs = build_root_system(label)
    coweight = random_coweight(rs, rng)
    oper = miura_transform(sample_connection(rs, coweight, rng, precision=PRECISION[label]))
    regular = []
    for candidate in dominant_coweights(rs, 4):
        outcome = to_lambda_nilpotent(oper, candidate)
        if isinstance(outcome, LambdaNilpotentForm) and is_lambda_regular(outcome):
            regular.append(candidate)
    assert regular == [coweight]


@pytest.mark.parametrize("label", ["A1", "A2", "B2"])
def test_connection_residue_is_additive(label, rng):
    rs = build_root_system(label)
    a = sample_connection(rs, random_coweight(rs, rng), rng, precision=6)
    b = sample_connection(rs, rs.coweight([-c for c in random_coweight(rs, rng).coords]), rng, precision=6)
    total = connection_residue(a + b)
    assert total == tuple(x + y for x, y in zip(connection_residue(a), connection_residue(b)))
    assert residue_coweight(a + b) == residue_coweight(a) + residue_coweight(b)


def test_sl2_miura_of_a_simple_pole():
    rs = build_root_system("A1")
    conn = CartanConnection(rs, (LaurentSeries.monomial(-1, -1),))
    assert miura_transform(conn).coords == (LaurentSeries.monomial(2, -2),)
    assert residue_coweight(conn) == rs.coweight((2,))


def test_check_miura_image_preconditions(rng):
    rs = build_root_system("A2")
    conn = sample_connection(rs, rs.coweight((1, 0)), rng, precision=12)
    with pytest.raises(ConnectionResidueError):
        check_miura_image(conn, rs.coweight((0, 1)))
    with pytest.raises(ConnectionResidueError):
        check_miura_image(sample_connection(rs, rs.coweight((-1, 0)), rng), rs.coweight((-1, 0)))


def test_pole_orders():
    rs = build_root_system("A1")
    double_pole = CartanConnection(rs, (LaurentSeries.monomial(1, -2),))
    with pytest.raises(ConnectionResidueError):
        connection_residue(double_pole)
    with pytest.raises(ConnectionResidueError):
        CartanConnection(rs, (LaurentSeries.monomial(1, -MAX_POLE_ORDER - 1),))
    with pytest.raises(ValueError):
        CartanConnection(rs, (LaurentSeries.zero(), LaurentSeries.zero()))


@pytest.mark.parametrize("label", ["A1", "A2", "B2"])
@pytest.mark.parametrize("a", [3, -1, Fraction(1, 2)])
def test_miura_dilation_equivariance(label, a, rng):
    rs = build_root_system(label)
    conn = sample_connection(rs, random_coweight(rs, rng), rng, precision=5, exact=True)
    assert miura_transform(dilate_connection(conn, a)) == dilate_oper(miura_transform(conn), a)


def test_connection_json_and_sum():
    rs = build_root_system("A2")
    conn = CartanConnection(rs, (LaurentSeries.monomial(1, -1), LaurentSeries(0, [1, 2], 3)))
    assert CartanConnection.from_json(conn.to_json()) == conn
    doubled = conn + conn
    assert doubled.u[0] == LaurentSeries.monomial(2, -1)
