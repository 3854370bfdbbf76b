import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kendall_walk import (Dirac1, FddQuery, ParetoMix, ScaledFddQuery, StableLimit, Uniform01,
                          cdf_n, fdd_cdf_dp, fdd_cdf_enum, fdd_cdf_stieltjes,
                          fdd_limit_finite_moment, fdd_limit_regvar, fdd_zn, limit_cdf,
                          weighted_chain)
from kendall_walk.asymptotics import FiniteMoment, RegVar, RegVarWalk
from kendall_walk.fdd import (EpsilonStructure, FddError, fdd_cdf_dp_result,
                              fdd_cdf_enum_result, _epoch)

from conftest import ALL_FAMILIES, families


@st.composite
def queries(draw, max_k=10):
    k = draw(st.integers(1, max_k))
    steps = draw(st.lists(st.integers(0, 4), min_size=k, max_size=k))
    first = draw(st.integers(1, 4))
    epochs = tuple(first + int(s) for s in np.cumsum(steps) - steps[0])
    xs = sorted(draw(st.lists(st.floats(0.1, 20.0), min_size=k, max_size=k)))
    return FddQuery(epochs, tuple(xs))


# ---- worked values ------------------------------------------------------------


def test_worked_joint_value():
    q = FddQuery((1, 2), (2.0, 3.0))
    res = fdd_cdf_enum_result(Dirac1(1.0), q)
    assert res.value == pytest.approx(8 / 9, abs=1e-15)
    assert (res.k, res.terms_evaluated) == (2, 4)
    # X_1 = 1 a.s., so the joint value is F_2(3)
    assert res.value == pytest.approx(cdf_n(Dirac1(1.0), 2, 3.0), abs=1e-15)
    dp = fdd_cdf_dp_result(Dirac1(1.0), q)
    assert dp.value == pytest.approx(8 / 9, abs=1e-15)
    assert dp.terms_evaluated == 3
    assert json.loads(res.to_json())["k"] == 2


def test_weighted_chain_worked_value():
    q = FddQuery((1,), (2.0,))
    assert weighted_chain(Dirac1(1.0), q, y0=0.0, x_next=4.0) == pytest.approx(0.75)
    assert weighted_chain(Dirac1(1.0), q, y0=0.0, x_next=4.0, method="enum") == pytest.approx(0.75)
    assert weighted_chain(Dirac1(1.0), q, y0=2.0) == 0.0
    with pytest.raises(FddError):
        weighted_chain(Dirac1(1.0), q, x_next=1.0)


def test_weighted_chain_against_stieltjes_integral():
    # int_(0,x1] Psi(y/x2) P_1(0, dy) by a fine Riemann-Stieltjes sum
    d, x1, x2 = Uniform01(1.0), 0.8, 1.5
    z = np.linspace(0.0, x1, 200_001)
    F = np.asarray(d.cdf(z))
    mid = 0.5 * (z[1:] + z[:-1])
    ref = float(np.sum((1 - mid / x2) * np.diff(F)))
    got = weighted_chain(d, FddQuery((1,), (x1,)), x_next=x2)
    assert got == pytest.approx(ref, abs=1e-9)


# ---- invariants ---------------------------------------------------------------


@given(d=families(), q=queries(max_k=12))
def test_enum_equals_dp(d, q):
    assert fdd_cdf_enum(d, q) == pytest.approx(fdd_cdf_dp(d, q), abs=1e-12)


@given(d=families(), n=st.integers(1, 10), x=st.floats(0.01, 100.0))
def test_k1_collapse(d, n, x):
    assert fdd_cdf_enum(d, FddQuery((n,), (x,))) == pytest.approx(cdf_n(d, n, x), abs=1e-15)


@given(d=families(), q=queries(max_k=6))
def test_marginalization(d, q):
    if q.k < 2:
        return
    less = fdd_cdf_dp(d, FddQuery(q.epochs[:-1], q.thresholds[:-1]))
    assert fdd_cdf_dp(d, FddQuery(q.epochs, q.thresholds[:-1] + (math.inf,))) == \
        pytest.approx(less, abs=1e-12)
    big = fdd_cdf_dp(d, FddQuery(q.epochs, q.thresholds[:-1] + (1e12,)))
    escape = 1.0 - cdf_n(d, q.epochs[-1], 1e12)
    assert -1e-12 <= less - big <= escape + 1e-8


@given(d=families(), q=queries(max_k=6))
def test_value_is_probability_and_below_each_marginal(d, q):
    v = fdd_cdf_dp(d, q)
    assert 0.0 <= v <= 1.0
    for n, x in zip(q.epochs, q.thresholds):
        assert v <= cdf_n(d, n, x) + 1e-12


@given(d=families(), n=st.integers(1, 6), x1=st.floats(0.1, 10), dx=st.floats(0, 10))
def test_repeated_epoch(d, n, x1, dx):
    v = fdd_cdf_dp(d, FddQuery((n, n), (x1, x1 + dx)))
    assert v == pytest.approx(cdf_n(d, n, x1), abs=1e-12)


@pytest.mark.parametrize("d", ALL_FAMILIES[1::2], ids=lambda d: f"{d.family}-{d.alpha}")
def test_stieltjes_oracle(d):
    for q in (FddQuery((1, 3), (0.8, 2.2)), FddQuery((1, 2, 3), (1.5, 2.5, 3.5))):
        assert fdd_cdf_stieltjes(d, q, cells=1000) == pytest.approx(fdd_cdf_enum(d, q), abs=1e-5)


def test_enumeration_guard():
    q = FddQuery(tuple(range(1, 26)), tuple(np.linspace(1, 5, 25)))
    with pytest.raises(FddError):
        fdd_cdf_enum(Uniform01(1.0), q)
    assert 0 < fdd_cdf_dp(Uniform01(1.0), q) < 1


@pytest.mark.parametrize("epochs, xs", [
    ((2, 1), (1.0, 2.0)), ((1, 2), (2.0, 1.0)), ((0, 1), (1.0, 2.0)),
    ((1,), (1.0, 2.0)), ((1.5,), (1.0,)), ((1,), (-1.0,)), ((), ()),
])
def test_query_validation(epochs, xs):
    with pytest.raises(FddError):
        FddQuery(epochs, xs)


def test_epsilon_structure():
    e = EpsilonStructure.from_mask(0b1011, 4)
    assert e.eps == (1, 1, 0, 1)
    assert e.ones == (1, 2, 4) and e.s == 3
    with pytest.raises(FddError):
        EpsilonStructure((0, 2))


# ---- scaled process and limits -------------------------------------------------


def test_epoch_floor_and_snapping():
    assert _epoch(30_000, 1 / 3) == 10_000
    assert _epoch(100, 1 / 3) == 33
    assert _epoch(10, 0.05) == 0
    assert _epoch(7, 1.0) == 7


def test_scaled_query_drops_empty_epochs():
    sq = ScaledFddQuery((0.01, 1.0), (0.5, 2.0), 10, 10.0)
    assert sq.to_query() == FddQuery((10,), (20.0,))
    assert fdd_zn(Dirac1(1.0), ScaledFddQuery((0.01,), (0.5,), 10, 10.0)) == 1.0


def test_zn_approaches_limit_for_dirac():
    z = 1.3
    gaps = [abs(fdd_zn(Dirac1(1.0), ScaledFddQuery((1.0,), (z,), n, n))
                - limit_cdf(FiniteMoment(1.0, 1.0), z)) for n in (100, 1000, 10_000)]
    assert gaps[0] > gaps[1] > gaps[2]


def test_zn_approaches_finite_moment_limit_for_stable():
    times, levels = (1 / 3, 1.0), (0.8, 1.6)
    d = StableLimit(1.0, m=1.0)
    lim = fdd_limit_finite_moment(times, levels, 1.0, 1.0)
    gaps = [abs(fdd_zn(d, ScaledFddQuery(times, levels, n, n)) - lim) for n in (100, 1000, 10_000)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < gaps[0] / 10


def test_limit_worked_values():
    assert fdd_limit_finite_moment((1.0,), (1.0,), 1.0, 1.0) == pytest.approx(2 / math.e)
    for z in (0.3, 1.0, 4.0):
        assert fdd_limit_finite_moment((1.0,), (z,), 2.0, 1.5) == \
            pytest.approx(limit_cdf(FiniteMoment(2.0, 1.5), z), abs=1e-14)
        assert fdd_limit_regvar((1.0,), (z,), 1.0, 0.4) == \
            pytest.approx(limit_cdf(RegVar(0.4, 1.0), z), abs=1e-14)
        assert fdd_limit_regvar((1.0,), (z,), 1.0, 0.4, include_tail=True) == \
            pytest.approx(limit_cdf(RegVarWalk(0.4, 1.0), z), abs=1e-14)
    t, z = (0.4, 1.0), (0.7, 1.9)
    assert fdd_limit_regvar(t, z, 1.5, 0.0) == pytest.approx(fdd_limit_finite_moment(t, z, 1.0, 1.5))


def test_zn_approaches_corrected_regvar_limit():
    from kendall_walk import norming_sequence
    d = ParetoMix(1.0, p=0.5)
    t, z = (0.4, 1.0), (0.7, 1.9)
    corrected = fdd_limit_regvar(t, z, 1.0, 0.5, include_tail=True)
    rate1 = fdd_limit_regvar(t, z, 1.0, 0.5)
    n = 10 ** 5
    v = fdd_zn(d, ScaledFddQuery(t, z, n, norming_sequence(d, n)))
    assert abs(v - corrected) < 1e-5
    assert abs(v - rate1) > 0.4


@given(z1=st.floats(0.05, 5.0), dz=st.floats(0.0, 5.0), a=st.sampled_from((0.5, 1.0, 2.0)),
       frac=st.floats(0.0, 0.95))
def test_corrected_regvar_limit_is_monotone(z1, dz, a, frac):
    th = frac * a
    f = lambda u, v: fdd_limit_regvar((0.5, 1.2), (u, v), a, th, include_tail=True)
    z2 = z1 + dz
    assert f(z1 * 0.9, z2) <= f(z1, z2) + 1e-13
    assert f(z1, z2) <= f(z1, z2 * 1.1) + 1e-13


def test_rate1_regvar_limit_fails_monotonicity():
    # raising the earlier level toward the later one lowers the rate-1 value
    v = [fdd_limit_regvar((0.5, 1.2), (z, 0.7), 1.0, 0.9) for z in np.linspace(0.3, 0.7, 50)]
    assert np.min(np.diff(v)) < -1e-4


def test_limit_validation():
    with pytest.raises(FddError):
        fdd_limit_finite_moment((1.0, 0.5), (1.0, 2.0), 1.0, 1.0)
    with pytest.raises(FddError):
        fdd_limit_regvar((1.0,), (1.0,), 1.0, 1.0)
    with pytest.raises(FddError):
        fdd_limit_finite_moment((1.0,), (1.0,), 0.0, 1.0)
