"""Gamma-LQG area and boundary measures on lattices."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import fft as sfft

from .core import Grid, Topology, as_generator
from .estimators import ExponentFit, linear_fit, loglog_fit
from .gff import (FieldGrid, Normalization, circle_average, circle_average_field, normalize,
                  sample_gff, torus_fields)


@dataclass(frozen=True)
class MeasureGrid:
    grid: Grid
    gamma: float
    cell_mass: np.ndarray
    total: float

    def __post_init__(self):
        m = np.array(self.cell_mass, dtype=float)
        if m.shape != self.grid.shape:
            raise ValueError("cell masses do not match the grid")
        if not np.all(np.isfinite(m)) or np.any(m < 0):
            raise ValueError("cell masses must be finite and nonnegative")
        m.setflags(write=False)
        object.__setattr__(self, "cell_mass", m)
        tot = float(m.sum())
        if abs(tot - self.total) > 1e-9 * max(abs(tot), 1e-300):
            raise ValueError("total does not match the cell masses")


@dataclass(frozen=True)
class BoundaryMeasure:
    gamma: float
    segment_mass: np.ndarray
    total: float

    def __post_init__(self):
        m = np.array(self.segment_mass, dtype=float)
        if np.any(m < 0):
            raise ValueError("segment masses must be nonnegative")
        object.__setattr__(self, "segment_mass", m)


def _check_gamma(gamma: float):
    if not 0 < gamma < 2:
        raise ValueError("gamma must lie in (0, 2)")


def area_measure(field: FieldGrid, gamma: float) -> MeasureGrid:
    """``a^2 a^(gamma^2/2) exp(gamma h_a(z))`` on every cell.

    ``h_a`` is the circle average at radius one lattice spacing. The
    logarithmic singularity, if any, enters through its exact circle
    average.
    """
    _check_gamma(gamma)
    a = field.grid.spacing
    h = circle_average_field(field, a)
    m = a ** (2 + gamma ** 2 / 2) * np.exp(gamma * h)
    return MeasureGrid(field.grid, gamma, m, float(m.sum()))


def boundary_cells(grid: Grid, side: str = "bottom") -> np.ndarray:
    """``(i, j)`` index pairs along one edge of a box."""
    n = grid.size
    idx = np.arange(n)
    edge = {"bottom": (np.zeros(n, int), idx), "top": (np.full(n, n - 1), idx),
            "left": (idx, np.zeros(n, int)), "right": (idx, np.full(n, n - 1))}[side]
    return np.column_stack(edge)


def boundary_measure(field: FieldGrid, curve, gamma: float) -> BoundaryMeasure:
    """``a * a^(gamma^2/4) * exp(gamma/2 * h_a)`` along boundary cells.

    ``h_a`` at a boundary cell is the mean of the cell and its lattice
    neighbors, i.e. the cell average at radius one spacing restricted to
    the domain.
    """
    _check_gamma(gamma)
    grid = field.grid
    if grid.topology is not Topology.BOX_FREE:
        raise ValueError("boundary measures live on free-boundary boxes")
    c = np.asarray(curve, dtype=int).reshape(-1, 2)
    rows, cols = grid.shape
    on_edge = (c[:, 0] == 0) | (c[:, 0] == rows - 1) | (c[:, 1] == 0) | (c[:, 1] == cols - 1)
    if not np.all(on_edge):
        raise ValueError("curve leaves the free boundary")
    v = field.values
    acc = v[c[:, 0], c[:, 1]].copy()
    cnt = np.ones(len(c))
    for di, dj in ((-1, 0), (1, 0), (0, -1), (0, 1)):
        ii, jj = c[:, 0] + di, c[:, 1] + dj
        ok = (ii >= 0) & (ii < rows) & (jj >= 0) & (jj < cols)
        acc[ok] += v[ii[ok], jj[ok]]
        cnt[ok] += 1
    h = acc / cnt
    if field.log_singularity:
        X, Y = grid.coords()
        z0 = field.singularity
        d = np.hypot(X[c[:, 0], c[:, 1]] - z0[0], Y[c[:, 0], c[:, 1]] - z0[1])
        h = h + field.log_singularity * np.log(1.0 / np.maximum(grid.spacing, d))
    a = grid.spacing
    seg = a ** (1 + gamma ** 2 / 4) * np.exp(gamma / 2 * h)
    return BoundaryMeasure(gamma, seg, float(seg.sum()))


# ----------------------------------------------------------------------------
# balls

def _distances(grid: Grid, z, window: Optional[float] = None):
    """Cell indices and distances from ``z``; periodic on the torus."""
    a = grid.spacing
    rows, cols = grid.shape
    zx, zy = z[0] / a, z[1] / a
    if window is None:
        jj, ii = np.meshgrid(np.arange(cols), np.arange(rows))
    else:
        R = int(math.ceil(window / a)) + 1
        j = np.arange(int(math.floor(zx)) - R, int(math.floor(zx)) + R + 2)
        i = np.arange(int(math.floor(zy)) - R, int(math.floor(zy)) + R + 2)
        jj, ii = np.meshgrid(j, i)
    dx = jj - zx
    dy = ii - zy
    if grid.topology is Topology.TORUS and window is None:
        dx = (dx + cols / 2) % cols - cols / 2
        dy = (dy + rows / 2) % rows - rows / 2
    d = np.hypot(dx, dy) * a
    if grid.topology is Topology.TORUS:
        ii, jj = ii % rows, jj % cols
    return ii, jj, d


def _check_ball(grid: Grid, z, r: float):
    if grid.topology is Topology.TORUS:
        if 2 * r >= min(grid.extent):
            raise ValueError("ball wraps around the torus")
        return
    a = grid.spacing
    h, w = grid.extent
    if z[0] - r < -a / 2 or z[0] + r > w - a / 2 or z[1] - r < -a / 2 or z[1] + r > h - a / 2:
        raise ValueError("ball exits the lattice")


def ball_mass(measure: MeasureGrid, z, r: float) -> float:
    """Mass of cells whose centers lie within distance ``r`` of ``z`` (closed ball).

    A radius below half a spacing returns the mass of the cell nearest ``z``.
    """
    return float(ball_masses(measure, z, [r])[0])


def ball_masses(measure: MeasureGrid, z, radii: Sequence[float]) -> np.ndarray:
    radii = np.asarray(radii, dtype=float)
    rmax = float(radii.max()) if radii.size else 0.0
    _check_ball(measure.grid, z, rmax)
    ii, jj, d = _distances(measure.grid, z, window=rmax)
    if measure.grid.topology is not Topology.TORUS:
        rows, cols = measure.grid.shape
        ok = (ii >= 0) & (ii < rows) & (jj >= 0) & (jj < cols)
        ii, jj, d = ii[ok], jj[ok], d[ok]
    d = d.ravel()
    m = measure.cell_mass[ii.ravel(), jj.ravel()]
    order = np.argsort(d, kind="stable")
    d, cm = d[order], np.cumsum(m[order])
    k = np.searchsorted(d, radii, side="right")
    out = np.where(k > 0, cm[np.maximum(k - 1, 0)], 0.0)
    small = radii < measure.grid.spacing / 2
    if np.any(small):
        out[small] = m[order[0]]
    return out


def approximate_metric_ball_radius(measure: MeasureGrid, z, mass_target: float) -> float:
    """Smallest cell-center distance ``r`` with ``ball_mass(z, r) >= mass_target``."""
    if mass_target <= 0:
        return 0.0
    grid = measure.grid
    if grid.topology is Topology.TORUS:
        rmax = min(grid.extent) / 2 * (1 - 1e-9)
    else:
        a = grid.spacing
        h, w = grid.extent
        rmax = min(z[0] + a / 2, w - a / 2 - z[0], z[1] + a / 2, h - a / 2 - z[1])
    ii, jj, d = _distances(grid, z, window=rmax)
    d = d.ravel()
    if grid.topology is not Topology.TORUS:
        rows, cols = grid.shape
        ok = ((ii >= 0) & (ii < rows) & (jj >= 0) & (jj < cols)).ravel()
        ii, jj, d = ii.ravel()[ok], jj.ravel()[ok], d[ok]
    m = measure.cell_mass[np.ravel(ii), np.ravel(jj)]
    inside = d <= rmax
    d, m = d[inside], m[inside]
    order = np.argsort(d, kind="stable")
    d, cm = d[order], np.cumsum(m[order])
    k = int(np.searchsorted(cm, mass_target, side="left"))
    if k >= cm.size:
        raise ValueError("mass target is not reachable inside the lattice")
    return float(d[k])


# ----------------------------------------------------------------------------
# exponents

def xi(q, gamma: float):
    """Multifractal spectrum ``(2 + gamma^2/2) q - gamma^2 q^2 / 2``."""
    q = np.asarray(q, dtype=float)
    return (2 + gamma ** 2 / 2) * q - gamma ** 2 / 2 * q ** 2


def xi_maximizer(gamma: float) -> float:
    """``argmax_q (xi(q) - 2) / q`` is ``(4 + gamma^2) / (2 gamma^2)``."""
    return (4 + gamma ** 2) / (2 * gamma ** 2)


def regularity_exponent(gamma: float) -> float:
    """``(gamma^2 - 4)^2 / (4 (4 + gamma^2))``; equals 1/15 at ``gamma^2 = 8/3``."""
    g2 = gamma ** 2
    return (g2 - 4) ** 2 / (4 * (4 + g2))


def disk_kernel_fft(grid: Grid, r: float) -> np.ndarray:
    """rFFT of the indicator of cells within ``r`` of the origin (torus)."""
    rows, cols = grid.shape
    i = np.minimum(np.arange(rows), rows - np.arange(rows))
    j = np.minimum(np.arange(cols), cols - np.arange(cols))
    d = np.hypot(i[:, None], j[None, :]) * grid.spacing
    return sfft.rfft2((d <= r).astype(float))


def ball_moment_curve(gamma: float, qs: Sequence[float], radii: Sequence[float], trials: int,
                      stream=0, size: int = 1024, spacing: Optional[float] = None,
                      norm_radius: float = 0.25) -> dict:
    """Spatially averaged ``E[mu(B(z, s))^q]`` for torus fields.

    Each field is the torus GFF normalized so that ``h_rho(center) = 0``.
    The expectation pools every lattice center ``z`` of every field; the
    field law is translation invariant up to the common normalization
    constant.

    Returns
    -------
    dict
        ``{q: array of moments over radii}``.
    """
    spacing = spacing or 1.0 / size
    grid = Grid(size, spacing, Topology.TORUS)
    kern = [disk_kernel_fft(grid, r) for r in radii]
    sums = {q: np.zeros(len(radii)) for q in qs}
    count = 0
    for vals in torus_fields(grid, trials, stream):
        f = normalize(FieldGrid(grid, vals), Normalization.UNIT_CIRCLE_AVERAGE, norm_radius)
        M = sfft.rfft2(area_measure(f, gamma).cell_mass)
        for k, K in enumerate(kern):
            bm = sfft.irfft2(M * K, s=grid.shape)
            bm = np.maximum(bm, 0.0)
            for q in qs:
                sums[q][k] += np.mean(bm ** q)
        count += 1
    return {q: sums[q] / count for q in qs}


def moment_exponent(gamma: float, q: float, radii: Sequence[float], trials: int, stream=0,
                    size: int = 1024, **kw) -> ExponentFit:
    """Slope of ``log E[mu(B(z, s))^q]`` against ``log s``.

    Compare with ``xi(q, gamma)``; the fit is meaningful for
    ``0 < q < 4/gamma^2`` where the moment is finite.
    """
    _check_gamma(gamma)
    if not 0 < q < 4 / gamma ** 2:
        raise ValueError(f"q must lie in (0, {4 / gamma ** 2}) for gamma = {gamma}")
    moments = ball_moment_curve(gamma, [q], radii, trials, stream, size, **kw)[q]
    return loglog_fit(radii, moments)


def typical_ball_slopes(gamma: float, radii: Sequence[float], trials: int, stream=0,
                        size: int = 2048, spacing: Optional[float] = None,
                        log_singularity: Optional[float] = None, norm_radius: float = 0.25
                        ) -> np.ndarray:
    """Per-field OLS slope of ``log mu(B(0, r))`` on ``log r``.

    The field is a torus GFF plus ``log_singularity * log(1/|z|)`` at the
    grid center (default ``gamma``, the view from a quantum-typical
    point), normalized to have zero circle average at ``norm_radius``.
    """
    spacing = spacing or 1.0 / size
    alpha = gamma if log_singularity is None else log_singularity
    grid = Grid(size, spacing, Topology.TORUS)
    slopes = []
    lr = np.log(radii)
    for vals in torus_fields(grid, trials, stream):
        f = normalize(FieldGrid(grid, vals, log_singularity=alpha),
                      Normalization.UNIT_CIRCLE_AVERAGE, norm_radius)
        mu = area_measure(f, gamma)
        bm = ball_masses(mu, grid.center, radii)
        slopes.append(linear_fit(lr, np.log(bm)).slope)
    return np.array(slopes)


def exceedance_fraction(gamma: float, trials: int, stream=0, size: int = 256,
                        s_max: float = 0.05, radii: Optional[Sequence[float]] = None,
                        exponent: Optional[float] = None, zeta: float = 0.01) -> float:
    """Fraction of fields with some lattice ball ``B(z, s)``, ``s < s_max``,
    of mass above ``s^(exponent - zeta)``."""
    exponent = regularity_exponent(gamma) if exponent is None else exponent
    grid = Grid(size, 1.0 / size, Topology.TORUS)
    if radii is None:
        radii = np.geomspace(2.5 / size, s_max * 0.999, 8)
    kern = [disk_kernel_fft(grid, r) for r in radii]
    bad = 0
    for vals in torus_fields(grid, trials, stream):
        f = normalize(FieldGrid(grid, vals), Normalization.UNIT_CIRCLE_AVERAGE, 0.25)
        M = sfft.rfft2(area_measure(f, gamma).cell_mass)
        for r, K in zip(radii, kern):
            if sfft.irfft2(M * K, s=grid.shape).max() > r ** (exponent - zeta):
                bad += 1
                break
    return bad / trials


# ----------------------------------------------------------------------------
# boundary length of a free-boundary box

def log_boundary_length(field: FieldGrid, gamma: float, side: str = "bottom") -> float:
    """``(2/gamma) log`` of the boundary length of one edge, after shifting
    the field to average zero along that edge."""
    cells = boundary_cells(field.grid, side)
    edge = field.values[cells[:, 0], cells[:, 1]]
    f = field.shifted(-float(edge.mean()))
    return 2.0 / gamma * math.log(boundary_measure(f, cells, gamma).total)


def boundary_length_tail_samples(gamma: float, trials: int, stream=0, size: int = 256) -> np.ndarray:
    """Independent draws of :func:`log_boundary_length` on free-boundary
    unit boxes."""
    grid = Grid(size, 1.0 / size, Topology.BOX_FREE)
    rng = as_generator(stream)
    return np.array([log_boundary_length(sample_gff(grid, rng), gamma) for _ in range(trials)])
