import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lqg_lab.core import Grid, Topology
from lqg_lab.gff import FieldGrid, sample_gff
from lqg_lab.lqg_measure import (BoundaryMeasure, MeasureGrid, approximate_metric_ball_radius,
                                 area_measure, ball_mass, ball_masses, boundary_cells,
                                 boundary_measure, exceedance_fraction, log_boundary_length,
                                 moment_exponent, regularity_exponent, typical_ball_slopes, xi,
                                 xi_maximizer)

GAMMA = math.sqrt(8.0 / 3.0)
TORUS = Grid(64, 1.0 / 64, Topology.TORUS)
FREE = Grid(64, 1.0 / 64, Topology.BOX_FREE)


def test_zero_field_masses():
    m = area_measure(FieldGrid(TORUS, np.zeros(TORUS.shape)), GAMMA)
    a = TORUS.spacing
    np.testing.assert_allclose(m.cell_mass, a ** (2 + GAMMA ** 2 / 2))
    assert m.total == pytest.approx(64 ** 2 * a ** (2 + GAMMA ** 2 / 2))
    b = boundary_measure(FieldGrid(FREE, np.zeros(FREE.shape)), boundary_cells(FREE), GAMMA)
    np.testing.assert_allclose(b.segment_mass, a ** (1 + GAMMA ** 2 / 4))


@given(st.floats(-3, 3), st.integers(0, 1000))
def test_shift_identities(C, seed):
    f = sample_gff(TORUS, stream=seed)
    r = area_measure(f.shifted(C), GAMMA).cell_mass / area_measure(f, GAMMA).cell_mass
    assert np.max(np.abs(r / math.exp(GAMMA * C) - 1)) < 1e-12
    g = sample_gff(FREE, stream=seed)
    cells = boundary_cells(FREE, "left")
    t = boundary_measure(g.shifted(C), cells, GAMMA).total / boundary_measure(g, cells, GAMMA).total
    assert t == pytest.approx(math.exp(GAMMA * C / 2), rel=1e-12)


def test_deterministic():
    f = sample_gff(TORUS, stream=3)
    np.testing.assert_array_equal(area_measure(f, GAMMA).cell_mass, area_measure(f, GAMMA).cell_mass)


def test_validation():
    f = sample_gff(TORUS, stream=0)
    with pytest.raises(ValueError):
        area_measure(f, 2.0)
    with pytest.raises(ValueError):
        boundary_measure(f, boundary_cells(TORUS), GAMMA)
    with pytest.raises(ValueError):
        boundary_measure(sample_gff(FREE), [[5, 5]], GAMMA)
    with pytest.raises(ValueError):
        MeasureGrid(TORUS, GAMMA, np.ones(TORUS.shape), 1.0)
    with pytest.raises(ValueError):
        BoundaryMeasure(GAMMA, np.array([-1.0]), -1.0)


class TestBalls:
    m = area_measure(sample_gff(TORUS, stream=4), GAMMA)
    z = TORUS.center

    def test_tiny_ball_is_one_cell(self):
        i, j = int(round(self.z[1] / TORUS.spacing)), int(round(self.z[0] / TORUS.spacing))
        assert ball_mass(self.m, self.z, TORUS.spacing / 4) == self.m.cell_mass[i, j]

    @given(st.floats(0.0, 0.2), st.floats(0.0, 0.2))
    def test_monotone(self, r1, r2):
        lo, hi = sorted((r1, r2))
        assert ball_mass(self.m, self.z, lo) <= ball_mass(self.m, self.z, hi)

    def test_brute_force(self):
        X, Y = TORUS.coords()
        d = np.hypot(X - self.z[0], Y - self.z[1])
        assert ball_mass(self.m, self.z, 0.15) == pytest.approx(self.m.cell_mass[d <= 0.15].sum())

    def test_ball_exits(self):
        with pytest.raises(ValueError):
            ball_mass(self.m, self.z, 0.6)
        box = area_measure(sample_gff(FREE, stream=1), GAMMA)
        with pytest.raises(ValueError):
            ball_mass(box, (0.05, 0.5), 0.2)

    def test_metric_ball_radius(self):
        assert approximate_metric_ball_radius(self.m, self.z, 0.0) == 0.0
        t = [0.1 * self.m.total, 0.3 * self.m.total]
        r = [approximate_metric_ball_radius(self.m, self.z, x) for x in t]
        assert r[0] <= r[1]
        assert ball_mass(self.m, self.z, r[0]) >= t[0]
        with pytest.raises(ValueError):
            approximate_metric_ball_radius(self.m, self.z, 2 * self.m.total)

    def test_masses_vector(self):
        radii = [0.05, 0.1, 0.2]
        np.testing.assert_allclose(ball_masses(self.m, self.z, radii),
                                   [ball_mass(self.m, self.z, r) for r in radii])


def test_spectrum_values():
    assert float(xi(1.0, GAMMA)) == pytest.approx(2.0)
    assert float(xi(2.0, GAMMA)) == pytest.approx(4 / 3)
    assert float(xi(1.25, GAMMA)) == pytest.approx(25 / 12)
    q = xi_maximizer(GAMMA)
    assert q == pytest.approx(1.25)
    assert (float(xi(q, GAMMA)) - 2) / q == pytest.approx(regularity_exponent(GAMMA))
    assert regularity_exponent(GAMMA) == pytest.approx(1 / 15)


def test_moment_range():
    with pytest.raises(ValueError):
        moment_exponent(GAMMA, 2.0, [0.1, 0.2], 1)


def test_first_moment_exponent_small():
    fit = moment_exponent(GAMMA, 1.0, 2.0 ** np.arange(-6, -2.5, 0.5), 20, stream=5, size=256)
    assert fit.slope == pytest.approx(2.0, abs=0.15)


def test_plain_field_median_slope():
    # Finite radius windows leave a small downward bias (about 0.1) at every grid
    # size tried, so the band adds the sampling error on top of a fixed margin.
    s = typical_ball_slopes(GAMMA, 2.0 ** np.arange(-5, -1.99, 0.5), 1000, stream=11,
                            size=512, log_singularity=0.0)
    se = 1.2533 * s.std(ddof=1) / np.sqrt(s.size)
    assert np.median(s) == pytest.approx(2 + GAMMA ** 2 / 2, abs=0.15 + 3 * se)


def test_regularity_exceedance_small():
    assert exceedance_fraction(GAMMA, 20, stream=7, size=128) < 0.25


def test_log_boundary_length_normalized():
    f = sample_gff(FREE, stream=8)
    # the edge is shifted to mean zero, so a constant offset cancels
    assert log_boundary_length(f, GAMMA) == pytest.approx(log_boundary_length(f.shifted(4.0), GAMMA))
