import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import gamma as gamma_fn

from lqg_lab.core import ExcursionSample
from lqg_lab.stable_levy import (RejectionBudgetExceeded, Side, StableSpec, condition_nonnegative,
                                 default_jump_floor, empirical_supremum_tail, jump_histogram,
                                 levy_grid_paths, phi, reverse_excursion, reverse_exploration_boundary,
                                 sample_excursion, sample_stable_path, stable_increments,
                                 stable_standard, supremum_at_exponential_time, supremum_tail,
                                 unit_scale_coefficient)


def test_unit_scale_coefficient():
    assert unit_scale_coefficient(1.5) == pytest.approx(1.0 / gamma_fn(-1.5))
    assert StableSpec.unit_scale(1.5).laplace_scale == pytest.approx(1.0)


@pytest.mark.parametrize("alpha,coef", [(1.0, 1.0), (2.0, 1.0), (1.5, 0.0)])
def test_spec_rejects(alpha, coef):
    with pytest.raises(ValueError):
        StableSpec(alpha, Side.UP, coef)


def test_jump_rate_closed_form():
    spec = StableSpec(1.5, Side.UP, 1.0)
    # integral of x^{-5/2} over [1, 2]
    assert spec.jump_rate(1.0, 2.0) == pytest.approx((2.0 / 3.0) * (1 - 2 ** -1.5))


def test_standard_draws_laplace():
    rng = np.random.default_rng(0)
    s = stable_standard(rng, 1.5, 400_000)
    for lam in (0.3, 0.6):
        emp = np.mean(np.exp(-lam * s))
        se = np.std(np.exp(-lam * s)) / math.sqrt(s.size)
        assert abs(emp - math.exp(lam ** 1.5)) < 4 * se


@given(st.floats(1e-4, 10.0))
def test_increment_scaling_is_exact(dt):
    spec = StableSpec.unit_scale(1.5)
    a = stable_increments(spec, dt, 5, np.random.default_rng(1))
    b = stable_increments(spec, 1.0, 5, np.random.default_rng(1))
    np.testing.assert_allclose(a, b * dt ** (2 / 3), rtol=1e-12)


def test_down_side_is_mirror():
    up = StableSpec.unit_scale(1.5)
    a = stable_increments(up, 0.1, 4, np.random.default_rng(2))
    b = stable_increments(up.mirrored(), 0.1, 4, np.random.default_rng(2))
    np.testing.assert_array_equal(a, -b)


def test_path_ledger_and_grid():
    spec = StableSpec(1.5, Side.UP, 1.0)
    p = sample_stable_path(spec, 0.5, 1.0, 1e-2, stream=3)
    assert len(p) == 101 and p.values[0] == 0.5
    floor = default_jump_floor(spec, 1e-2)
    assert np.all(p.jumps[:, 1] >= floor)
    assert np.all(np.diff(p.jumps[:, 0]) > 0)


def test_path_endpoint_laplace():
    spec = StableSpec.unit_scale(1.5)
    ends = np.array([sample_stable_path(spec, 0.0, 1.0, 0.05, stream=i).values[-1] for i in range(2000)])
    w = np.exp(-0.5 * ends)
    assert abs(w.mean() - math.exp(0.5 ** 1.5)) < 4 * w.std() / math.sqrt(w.size) + 0.01


def test_jump_counts_poisson_mean():
    spec = StableSpec(1.5, Side.UP, 1.0)
    c = [sample_stable_path(spec, 0.0, 1.0, 1e-2, stream=i).jump_counts(1.0, 2.0) for i in range(4000)]
    mean = (2.0 / 3.0) * (1 - 2 ** -1.5)
    assert abs(np.mean(c) - mean) < 4 * math.sqrt(mean / 4000)


def test_jump_histogram_rows():
    spec = StableSpec(1.5, Side.UP, 1.0)
    ps = [sample_stable_path(spec, 0.0, 1.0, 1e-2, stream=i) for i in range(3)]
    rows = jump_histogram(ps, [0.1, 1.0, 10.0])
    assert [r[:2] for r in rows] == [(0.1, 1.0), (1.0, 10.0)]


def test_grid_paths_shape():
    out = levy_grid_paths(StableSpec.unit_scale(1.5), 1.0, 3, 10, 0.1, np.random.default_rng(0))
    assert out.shape == (3, 11) and np.all(out[:, 0] == 1.0)


class TestSupremum:
    spec = StableSpec.unit_scale(1.5, Side.DOWN)

    def test_needs_down_side(self):
        with pytest.raises(ValueError):
            supremum_tail(StableSpec.unit_scale(1.5), 1.0, 1.0)

    def test_phi_inverts_exponent(self):
        assert phi(8.0, self.spec) == pytest.approx(4.0)

    def test_exponential_time_rate(self):
        s = supremum_at_exponential_time(self.spec, 1.0, 4000, 2e-3, stream=4)
        assert abs(1.0 / s.mean() - 1.0) < 0.08

    def test_tail_bound_holds(self):
        u = np.array([0.5, 1.0, 2.0])
        emp = empirical_supremum_tail(self.spec, 1.0, u, 2000, 1e-2, stream=5)
        bound = np.array([supremum_tail(self.spec, 1.0, x) for x in u])
        assert np.all(emp <= bound)


def test_condition_nonnegative():
    spec = StableSpec.unit_scale(1.5, Side.DOWN)
    p = condition_nonnegative(spec, 1.0, 0.2, 1e-2, stream=6)
    assert p.values.min() >= 0
    with pytest.raises(ValueError):
        condition_nonnegative(StableSpec.unit_scale(1.5), 1.0, 0.2, 1e-2)
    with pytest.raises(RejectionBudgetExceeded):
        condition_nonnegative(spec, 1e-6, 50.0, 1e-2, stream=1, max_tries=2)


class TestExcursions:
    spec = StableSpec.unit_scale(1.5)

    def test_length_conditioning(self):
        e = sample_excursion(self.spec, "length", 0.1, tol=0.2, dt=1e-3, stream=7)
        assert isinstance(e, ExcursionSample)
        assert abs(e.lifetime - 0.1) <= 0.02 + 1e-12
        assert e.path.values[-1] == 0 and np.all(e.path.values[1:-1] > 0)

    def test_max_conditioning(self):
        e = sample_excursion(self.spec, "max", 0.05, dt=1e-3, stream=8)
        assert e.path.values.max() >= 0.05

    def test_reverse_round_trip(self):
        e = sample_excursion(self.spec, "length", 0.05, tol=0.3, dt=1e-3, stream=9)
        r = reverse_excursion(e)
        np.testing.assert_array_equal(r.path.values, e.path.values[::-1])
        assert reverse_exploration_boundary(e, 0.0) == 0.0 or e.path.values[-1] == 0.0
        assert reverse_exploration_boundary(e, e.lifetime + 1) == 0.0
        with pytest.raises(ValueError):
            reverse_exploration_boundary(e, -1.0)

    def test_rejects_down_side(self):
        with pytest.raises(ValueError):
            sample_excursion(self.spec.mirrored(), "length", 0.1)
