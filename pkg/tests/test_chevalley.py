from fractions import Fraction

import numpy as np
import pytest

from lie.chevalley import (LieElement, LoopElement, UnipotentGauge, build_lie_basis, exp_ad, gauge_by_cocharacter,
                           gauge_by_exponent, gauge_transform, sample_gauge)
from lie.rootdata import build_root_system
from series.formal import LaurentSeries, PrecisionError
from tests.conftest import ALL_TYPES


@pytest.fixture
def sl2():
    return build_lie_basis(build_root_system("A1"))


@pytest.mark.parametrize("label", ALL_TYPES)
def test_basis_passes_structure_checks(label):
    rs = build_root_system(label)
    basis = build_lie_basis(rs)
    basis.verify()
    assert basis.dim == 2 * rs.num_positive_roots + rs.rank
    assert basis.ad.dtype == np.int64


def test_sl2_brackets(sl2):
    e, f, h = (LieElement.basis_vector(a) for a in (sl2.e(0), sl2.f(0), sl2.h(0)))
    assert sl2.bracket(e, f) == h
    assert sl2.bracket(h, e) == e * 2
    assert sl2.bracket(h, f) == f * -2


def test_labels():
    basis = build_lie_basis(build_root_system("A2"))
    assert basis.index("e[1,1]") == basis.e(2)
    assert basis.index("f[0, 1]") == basis.f(0)
    assert basis.index("h2") == basis.h(1)
    with pytest.raises(ValueError):
        basis.index("e[2,0]")


def test_exp_ad_on_constants(sl2):
    x = Fraction(3, 2)
    result = exp_ad(sl2, LieElement({sl2.e(0): x}), LieElement({sl2.f(0): 1}))
    # e^{ad xe} f = f + x h - x^2 e
    expected = LoopElement({sl2.f(0): LaurentSeries.constant(1),
                            sl2.h(0): LaurentSeries.constant(x),
                            sl2.e(0): LaurentSeries.constant(-x * x)})
    assert result == expected


def test_exp_ad_rejects_non_nilpotent_exponent(sl2):
    with pytest.raises(ValueError):
        exp_ad(sl2, LieElement({sl2.h(0): 1}), LieElement({sl2.f(0): 1}))


def test_gauge_by_exponent_sl2(sl2):
    # exp(x e) on d/dt + f + u h with x = -u removes h: e-part becomes u^2 + u'
    u = LaurentSeries(-1, [1, 2, 3])
    A = LoopElement({sl2.f(0): LaurentSeries.constant(1), sl2.h(0): u})
    result = gauge_by_exponent(sl2, A, LoopElement({sl2.e(0): -u}))
    assert result.component(sl2.h(0)).is_zero
    assert result.component(sl2.f(0)) == 1
    assert result.component(sl2.e(0)) == u * u + u.derivative()


@pytest.mark.parametrize("label", ["A1", "A2", "B2"])
def test_gauge_action_is_a_group_action(label, rng):
    basis = build_lie_basis(build_root_system(label))
    A = LoopElement({a: LaurentSeries(-1, [int(c) for c in rng.integers(-3, 4, size=4)])
                     for a in range(basis.dim) if basis.is_borel(a)})
    A = A + LoopElement({basis.simple_f(i): LaurentSeries.constant(1) for i in range(basis.rank)})
    g1, g2 = sample_gauge(basis, rng), sample_gauge(basis, rng)
    assert gauge_transform(basis, A, g1.compose(g2)) == gauge_transform(basis, gauge_transform(basis, A, g2), g1)
    assert gauge_transform(basis, gauge_transform(basis, A, g1), g1.inverse()) == A


def test_sampled_gauge_is_ordered(rng):
    basis = build_lie_basis(build_root_system("A2"))
    g = sample_gauge(basis, rng)
    assert g.is_ordered
    assert len(g) == basis.num_roots
    assert not g.compose(g).is_ordered
    assert len(g.to_json(basis)) == basis.num_roots


def test_gauge_transform_rejects_non_root_factor(sl2):
    with pytest.raises(ValueError):
        gauge_transform(sl2, LoopElement(), UnipotentGauge([(1, LaurentSeries.constant(1))]))


def test_gauge_transform_reports_exhausted_precision(sl2):
    A = LoopElement({sl2.f(0): LaurentSeries(0, [1], 1)})
    g = UnipotentGauge([(0, LaurentSeries.monomial(1, -3))])
    with pytest.raises(PrecisionError):
        gauge_transform(sl2, A, g)


def test_gauge_by_cocharacter_sl2(sl2):
    rs = sl2.rs
    A = LoopElement({sl2.f(0): LaurentSeries.monomial(1, 2)})
    result = gauge_by_cocharacter(sl2, A, rs.coweight((2,)))
    assert result == LoopElement({sl2.f(0): LaurentSeries.constant(1), sl2.h(0): LaurentSeries.monomial(-1, -1)})


def test_loop_element_drops_exact_zeros(sl2):
    element = LoopElement({sl2.e(0): LaurentSeries.zero(), sl2.h(0): LaurentSeries.zero(3)})
    assert list(element.terms) == [sl2.h(0)]
    assert element.precision == 3


def test_loop_element_json(sl2):
    element = LoopElement({sl2.e(0): LaurentSeries(-2, [1, 0, 5])})
    payload = element.to_json(sl2)
    assert list(payload) == ["e[1]"]
    assert LoopElement.from_json(payload, sl2) == element


@pytest.mark.parametrize("label", ["A1", "A2", "B2", "G2"])
def test_exp_ad_of_opposite_exponents_cancels(label, rng):
    basis = build_lie_basis(build_root_system(label))
    X = LieElement({basis.e(k): Fraction(int(c), int(d)) for k, (c, d)
                    in enumerate(zip(rng.integers(-3, 4, size=basis.num_roots),
                                     rng.integers(1, 4, size=basis.num_roots)))})
    Y = LoopElement({a: LaurentSeries(-2, [int(c) for c in rng.integers(-3, 4, size=3)]) for a in range(basis.dim)})
    assert exp_ad(basis, X, exp_ad(basis, -X, Y)) == Y
    assert exp_ad(basis, -X, exp_ad(basis, X, Y)) == Y
