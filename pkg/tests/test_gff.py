import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import sparse, stats
from scipy.sparse.linalg import cg

from lqg_lab.core import Grid, Topology
from lqg_lab.gff import (CircleOutsideLattice, FieldGrid, Normalization, RadialProcess, circle_average,
                         circle_average_field, cone_Q, cone_radial_process, conditioned_drift_bm,
                         disk_mask, harmonic_extension, harmonic_residual, normalize, radial_process,
                         read_field, sample_gff, sample_normalized_radial, sup_circle_average,
                         torus_circle_covariance, torus_fields, write_field)


def _torus_green_difference(n, x, y):
    """2 pi (e_x - e_y)^T L^+ (e_x - e_y) for the periodic lattice Laplacian."""
    e = np.ones(n)
    d1 = sparse.diags([2 * e, -e[:-1], -e[:-1]], [0, 1, -1], format="lil")
    d1[0, n - 1] = d1[n - 1, 0] = -1
    eye = sparse.identity(n)
    L = (sparse.kron(d1, eye) + sparse.kron(eye, d1)).tocsc()
    b = np.zeros(n * n)
    b[x[0] * n + x[1]] += 1
    b[y[0] * n + y[1]] -= 1
    # b is orthogonal to constants, so CG converges to the mean-zero L^+ b
    g, info = cg(L, b, rtol=1e-12, maxiter=20000)
    assert info == 0
    g -= g.mean()
    return 2 * math.pi * float(b @ g)


def test_torus_green_difference():
    n = 64
    x, y = (10, 10), (10, 10 + n // 4)
    target = _torus_green_difference(n, x, y)
    d = np.array([f[x] - f[y] for f in torus_fields(Grid(n, 1.0 / n, Topology.TORUS), 10_000, stream=1)])
    se = target * math.sqrt(2.0 / d.size)
    assert abs(d.var() - target) < 3 * se


def test_torus_translation_invariance():
    g = Grid(64, 1.0 / 64, Topology.TORUS)
    a = np.array([[f[5, 5], f[40, 21]] for f in torus_fields(g, 4000, stream=2)])
    v = a.var(axis=0)
    se = v.mean() * math.sqrt(2.0 / a.shape[0])
    assert abs(v[0] - v[1]) < 3 * math.sqrt(2) * se


def test_linear_functional_is_gaussian():
    g = Grid(32, 1.0 / 32, Topology.TORUS)
    s = np.array([f[3, 7] + 0.5 * f[20, 1] for f in torus_fields(g, 10_000, stream=3)])
    assert stats.kstest(s / s.std(), "norm").pvalue > 0.01


def test_dirichlet_boundary_is_zero():
    f = sample_gff(Grid(64, 1.0 / 64, Topology.BOX_DIRICHLET), stream=4)
    v = f.values
    assert np.all(v[0] == 0) and np.all(v[-1] == 0) and np.all(v[:, 0] == 0) and np.all(v[:, -1] == 0)
    assert f.normalization is Normalization.ZERO_BOUNDARY


def test_unit_circle_normalization():
    g = Grid(256, 4.0 / 256, Topology.TORUS)
    f = sample_gff(g, stream=5, normalization=Normalization.UNIT_CIRCLE_AVERAGE)
    assert abs(circle_average(f, g.center, 1.0)) < 1e-12


def test_free_field_mean_zero_and_row_mean():
    f = sample_gff(Grid(64, 1.0 / 64, Topology.BOX_FREE), stream=6)
    assert abs(f.values.mean()) < 1e-12
    r = normalize(f, Normalization.ROW_MEAN_ZERO)
    np.testing.assert_allclose(r.values.mean(axis=1), 0, atol=1e-12)
    with pytest.raises(ValueError):
        normalize(f, Normalization.ZERO_BOUNDARY)


def test_non_power_of_two_rejected():
    with pytest.raises(ValueError):
        sample_gff(Grid(100, 0.01, Topology.TORUS))


class TestCircleAverage:
    grid = Grid(64, 1.0 / 64, Topology.TORUS)

    def test_constant(self):
        f = FieldGrid(self.grid, np.full(self.grid.shape, 2.5))
        assert circle_average(f, self.grid.center, 0.1) == pytest.approx(2.5)
        assert sup_circle_average(f.shifted(-5.0), 0.1) == pytest.approx(2.5)

    def test_affine_field_is_exact(self):
        X, Y = self.grid.coords()
        f = FieldGrid(self.grid, 3 * X - 2 * Y + 1)
        c = self.grid.center
        assert circle_average(f, c, 0.2) == pytest.approx(3 * c[0] - 2 * c[1] + 1, abs=1e-12)

    @settings(max_examples=20)
    @given(st.integers(0, 10_000), st.floats(0.05, 0.3))
    def test_linearity(self, seed, r):
        a = sample_gff(self.grid, stream=seed)
        b = sample_gff(self.grid, stream=seed + 1)
        z = self.grid.center
        assert circle_average(a + b, z, r) == pytest.approx(circle_average(a, z, r) + circle_average(b, z, r),
                                                            abs=1e-10)

    def test_singularity(self):
        f = FieldGrid(self.grid, np.zeros(self.grid.shape), log_singularity=2.0)
        assert circle_average(f, self.grid.center, 0.25) == pytest.approx(2.0 * math.log(4.0))

    def test_outside_lattice(self):
        g = Grid(64, 1.0 / 64, Topology.BOX_DIRICHLET)
        f = sample_gff(g, stream=0)
        with pytest.raises(CircleOutsideLattice):
            circle_average(f, (0.05, 0.05), 0.2)
        with pytest.raises(ValueError):
            circle_average(f, g.center, 0.0)

    def test_field_of_averages_matches_pointwise(self):
        f = sample_gff(self.grid, stream=7)
        full = circle_average_field(f, 0.1)
        z = (20 * self.grid.spacing, 30 * self.grid.spacing)
        assert full[30, 20] == pytest.approx(circle_average(f, z, 0.1), abs=1e-10)

    def test_sup_monotone_in_region(self):
        f = sample_gff(self.grid, stream=8)
        small = disk_mask(self.grid, self.grid.center, 0.1)
        big = disk_mask(self.grid, self.grid.center, 0.3)
        assert sup_circle_average(f, 0.05, small) <= sup_circle_average(f, 0.05, big)


def test_exact_radial_covariance_matches_fields():
    g = Grid(64, 1.0 / 64, Topology.TORUS)
    radii = [0.25, 0.0625]
    C = torus_circle_covariance(g, g.center, radii)
    s = np.array([[circle_average(FieldGrid(g, f), g.center, r) for r in radii]
                  for f in torus_fields(g, 3000, stream=9)])
    emp = np.cov(s.T)
    assert np.all(np.abs(emp - C) < 4 * np.sqrt((C ** 2 + np.outer(np.diag(C), np.diag(C))) / 3000))
    draws = sample_normalized_radial(g, [0.0625], 20_000, stream=10, norm_radius=0.25)
    var = C[0, 0] + C[1, 1] - 2 * C[0, 1]
    assert draws.var() == pytest.approx(var, rel=0.05)


def test_radial_process_variance_grows_like_log():
    g = Grid(1024, 1.0 / 1024, Topology.TORUS)
    radii = [2.0 ** -k for k in (2, 4, 6)]
    d = sample_normalized_radial(g, radii[1:], 20_000, stream=11, norm_radius=radii[0])
    v = d.var(axis=0)
    np.testing.assert_allclose(v, [2 * math.log(2), 4 * math.log(2)], rtol=0.08)


def test_radial_process_type():
    g = Grid(64, 1.0 / 64, Topology.TORUS)
    f = sample_gff(g, stream=12)
    rp = radial_process(f, g.center, [0.2, 0.1, 0.05])
    assert rp.averages.shape == (3,)
    with pytest.raises(ValueError):
        RadialProcess((0, 0), np.array([0.1, 0.2]), np.zeros(2))


class TestCone:
    def test_drift_forward(self):
        rng_runs = np.array([cone_radial_process(1.0, math.sqrt(8 / 3), 10.0, stream=i, du=0.05).at(10.0)
                             for i in range(3000)])
        assert abs(rng_runs.mean() / 10.0 - 1.0) < 3 * rng_runs.std() / 10.0 / math.sqrt(3000)

    def test_backward_branch_conditioned(self):
        c = cone_radial_process(1.0, math.sqrt(8 / 3), 5.0, stream=1)
        Q = cone_Q(math.sqrt(8 / 3))
        back = c.u <= 0
        s = -c.u[back]
        # B~_s + (Q - alpha) s >= 0 on the negative half
        assert np.all(c.values[back] + Q * s >= -1e-12)
        assert c.at(0.0) == 0.0

    def test_alpha_bound(self):
        with pytest.raises(ValueError):
            cone_radial_process(5.0, math.sqrt(8 / 3), 1.0)

    def test_conditioned_bm_positive(self):
        w = conditioned_drift_bm(0.5, 10.0, 0.01, np.random.default_rng(0))
        assert w[0] == 0 and np.all(w[1:] > 0)


class TestHarmonic:
    grid = Grid(64, 1.0 / 64, Topology.BOX_DIRICHLET)

    def test_affine_fixed_point(self):
        X, Y = self.grid.coords()
        f = FieldGrid(self.grid, 2 * X + 3 * Y, Normalization.MEAN_ZERO)
        mask = disk_mask(self.grid, self.grid.center, 0.2)
        h = harmonic_extension(f, mask)
        np.testing.assert_allclose(h.values, f.values, atol=1e-9)

    def test_projection_and_residual(self):
        f = sample_gff(self.grid, stream=13)
        mask = disk_mask(self.grid, self.grid.center, 0.2)
        h = harmonic_extension(f, mask)
        assert harmonic_residual(h.values, mask) < 1e-10
        np.testing.assert_array_equal(h.values[~mask], f.values[~mask])
        np.testing.assert_allclose(harmonic_extension(h, mask).values, h.values, atol=1e-9)

    def test_region_on_boundary(self):
        f = sample_gff(self.grid, stream=14)
        mask = np.zeros(self.grid.shape, bool)
        mask[0, 5] = True
        with pytest.raises(ValueError):
            harmonic_extension(f, mask)


def test_field_file_round_trip(tmp_path):
    f = sample_gff(Grid(32, 0.1, Topology.TORUS), stream=15)
    f = FieldGrid(f.grid, f.values, f.normalization, 0.5)
    p = tmp_path / "f.lqgf"
    write_field(f, p)
    g = read_field(p)
    assert g.grid == f.grid and g.log_singularity == 0.5
    np.testing.assert_array_equal(g.values, f.values)
    raw = p.read_bytes()
    (tmp_path / "bad").write_bytes(b"XXXX" + raw[4:])
    with pytest.raises(ValueError):
        read_field(tmp_path / "bad")
    (tmp_path / "short").write_bytes(raw[:10])
    with pytest.raises(ValueError):
        read_field(tmp_path / "short")
