import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from lqg_lab.estimators import (compare_mean, compare_probability, dyadic_holder_constant,
                                exponential_rate, gaussian_tail, gaussian_tail_exponent,
                                holder_norm_tail, ks_two_sample, linear_fit, loglog_fit, mills_ratio,
                                poisson_chisquare, poisson_lower_deviation_bound, survival)


@given(st.floats(-5, 5), st.floats(-3, 3), st.integers(3, 20))
def test_linear_fit_exact_line(slope, icpt, n):
    x = np.linspace(0.0, 1.0, n)
    f = linear_fit(x, icpt + slope * x)
    assert f.slope == pytest.approx(slope, abs=1e-9)
    assert f.stderr == pytest.approx(0.0, abs=1e-7)


def test_loglog_fit_power_law():
    x = np.geomspace(1e-3, 1.0, 7)
    f = loglog_fit(x, 3.0 * x ** 0.75)
    assert f.slope == pytest.approx(0.75)
    with pytest.raises(ValueError):
        loglog_fit([1, 2, -3], [1, 2, 3])


def test_fit_needs_three_points():
    with pytest.raises(ValueError):
        linear_fit([0, 1], [0, 1])


def test_within_uses_stderr():
    f = linear_fit([0, 1, 2, 3], [0, 1.5, 1.5, 3])
    assert not f.within(f.slope, 1e-6)


def test_compare_mean_z():
    c = compare_mean(np.array([1.0, 2.0, 3.0]), 2.0)
    assert c.z == 0.0 and c.ok()


def test_compare_probability():
    c = compare_probability(np.array([True] * 50 + [False] * 50), 0.5)
    assert abs(c.z) < 1e-12


def test_poisson_chisquare_accepts_poisson():
    rng = np.random.default_rng(1)
    _, p = poisson_chisquare(rng.poisson(0.431, 10_000), 0.431)
    assert p > 1e-3
    _, p = poisson_chisquare(rng.poisson(0.6, 10_000), 0.431)
    assert p < 1e-6


def test_poisson_bound_value():
    # exp(10 * (0.5 - 0.5 log 0.5 - 1)) evaluated independently
    assert poisson_lower_deviation_bound(0.5, 10.0) == pytest.approx(math.exp(-5 + 5 * math.log(2)), rel=1e-12)
    assert poisson_lower_deviation_bound(0.5, 10.0) >= stats.poisson.cdf(5, 10.0)
    with pytest.raises(ValueError):
        poisson_lower_deviation_bound(1.0, 10.0)


@given(st.floats(0.05, 0.95), st.floats(1.0, 50.0))
def test_poisson_bound_dominates_cdf(a, lam):
    assert stats.poisson.cdf(math.floor(a * lam), lam) <= poisson_lower_deviation_bound(a, lam) + 1e-12


def test_gaussian_tail_and_mills():
    assert gaussian_tail(0.0) == pytest.approx(0.5)
    assert float(mills_ratio(30.0)) == pytest.approx(1.0, abs=2e-3)


def test_exponential_rate():
    rng = np.random.default_rng(2)
    r, se = exponential_rate(rng.exponential(0.5, 40_000))
    assert abs(r - 2.0) < 4 * se


def test_survival_monotone():
    s = survival([1, 2, 3, 4], [0, 2.5, 5])
    assert list(s) == [1.0, 0.5, 0.0]


def test_gaussian_tail_exponent_on_gaussians():
    rng = np.random.default_rng(3)
    x = rng.standard_normal(400_000)
    t = np.linspace(2.0, 4.0, 6)
    f = gaussian_tail_exponent(x, t)
    exact = loglog_fit(t, -np.log(stats.norm.sf(t))).slope
    assert f.slope == pytest.approx(exact, abs=0.1)
    g = gaussian_tail_exponent(-x, -np.linspace(2.0, 4.0, 6), lower=True)
    assert g.slope == pytest.approx(f.slope, rel=0.05)


def test_ks_two_sample_same_law():
    rng = np.random.default_rng(4)
    assert ks_two_sample(rng.random(2000), rng.random(2000)) > 1e-3


def test_dyadic_holder_constant_linear():
    v = np.linspace(0.0, 1.0, 2 ** 5 + 1)
    # adjacent differences are exactly 2^-level, so the constant is 1 at exponent 1
    assert dyadic_holder_constant(v, 1.0) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        dyadic_holder_constant(np.zeros(10), 0.5)


def test_holder_tail_degenerate_process():
    t = holder_norm_tail(lambda rng: np.zeros(17), 0.5, 20, np.random.default_rng(0))
    assert not t.power_law and math.isnan(t.exponent)
