"""Discrete Gaussian free fields, circle averages and radial processes.

The Dirichlet energy is ``(2 pi)^-1 sum_edges (f_x - f_y)^2``. Each
Laplacian eigenmode with eigenvalue ``lam`` therefore carries variance
``2 pi / lam``, and the lattice Green's function grows like ``log(1/|x-y|)``.
"""

from __future__ import annotations

import enum
import math
import struct
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy import fft as sfft
from scipy import ndimage, sparse
from scipy.sparse import linalg as splinalg

from .core import Grid, Topology, as_generator

FIELD_MAGIC = b"LQGF"
FIELD_VERSION = 1


class Normalization(str, enum.Enum):
    ZERO_BOUNDARY = "zero-boundary"
    UNIT_CIRCLE_AVERAGE = "unit-circle-average"
    ROW_MEAN_ZERO = "row-mean-zero"
    MEAN_ZERO = "mean-zero"

    @property
    def code(self) -> int:
        return list(Normalization).index(self)

    @classmethod
    def from_code(cls, code: int) -> "Normalization":
        return list(cls)[code]


class CircleOutsideLattice(ValueError):
    """A circle average would need values outside a non-periodic lattice."""


@dataclass(frozen=True)
class FieldGrid:
    """Scalar field on a lattice.

    The stored ``values`` are the regular part. When ``log_singularity`` is
    nonzero the field also contains ``log_singularity * log(1/|z - z0|)``,
    where ``z0`` is the grid center. That term is handled analytically.
    """

    grid: Grid
    values: np.ndarray
    normalization: Normalization = Normalization.MEAN_ZERO
    log_singularity: float = 0.0

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise ValueError(f"values have shape {v.shape}, grid expects {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "normalization", Normalization(self.normalization))

    @property
    def singularity(self) -> tuple[float, float]:
        return self.grid.center

    def shifted(self, c: float) -> "FieldGrid":
        return replace(self, values=self.values + c)

    def with_values(self, values: np.ndarray, normalization=None) -> "FieldGrid":
        return FieldGrid(self.grid, values, normalization or self.normalization, self.log_singularity)

    def __add__(self, other: "FieldGrid") -> "FieldGrid":
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")
        return FieldGrid(self.grid, self.values + other.values, self.normalization,
                         self.log_singularity + other.log_singularity)


@dataclass(frozen=True)
class RadialProcess:
    center: tuple[float, float]
    levels: np.ndarray
    averages: np.ndarray

    def __post_init__(self):
        lv = np.asarray(self.levels, dtype=float)
        av = np.asarray(self.averages, dtype=float)
        if lv.shape != av.shape:
            raise ValueError("one average per radius")
        if np.any(np.diff(lv) >= 0):
            raise ValueError("radii must be strictly decreasing")
        object.__setattr__(self, "levels", lv)
        object.__setattr__(self, "averages", av)


# ----------------------------------------------------------------------------
# spectra

def _periodic_eigs(n: int) -> np.ndarray:
    return 2.0 - 2.0 * np.cos(2 * np.pi * np.arange(n) / n)


def torus_spectrum(rows: int, cols: int) -> np.ndarray:
    """Mode variances ``2 pi / lam`` on the periodic lattice, zero mode 0."""
    lam = _periodic_eigs(rows)[:, None] + _periodic_eigs(cols)[None, :]
    s = np.zeros_like(lam)
    s[lam > 0] = 2 * np.pi / lam[lam > 0]
    return s


def _torus_pair(shape, spectrum, rng) -> tuple[np.ndarray, np.ndarray]:
    """Two independent mean-zero torus fields from one complex FFT."""
    rows, cols = shape
    z = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    y = sfft.ifft2(np.sqrt(spectrum) * z) * math.sqrt(rows * cols)
    return y.real.copy(), y.imag.copy()


def torus_fields(grid: Grid, n: int, stream=0):
    """Yield ``n`` independent mean-zero periodic fields as arrays."""
    rng = as_generator(stream)
    s = torus_spectrum(*grid.shape)
    done = 0
    while done < n:
        a, b = _torus_pair(grid.shape, s, rng)
        yield a
        done += 1
        if done < n:
            yield b
            done += 1


def _dirichlet_field(n: int, rng) -> np.ndarray:
    m = n - 2
    e = 2.0 - 2.0 * np.cos(np.pi * np.arange(1, m + 1) / (m + 1))
    lam = e[:, None] + e[None, :]
    coef = np.sqrt(2 * np.pi / lam) * rng.standard_normal((m, m))
    out = np.zeros((n, n))
    out[1:-1, 1:-1] = sfft.idstn(coef, type=1, norm="ortho")
    return out


def _free_field(n: int, rng) -> np.ndarray:
    # Neumann modes are the even part of the field on the doubled (2n)
    # periodic lattice; the cosine transform samples that part directly.
    e = 2.0 - 2.0 * np.cos(np.pi * np.arange(n) / n)
    lam = e[:, None] + e[None, :]
    s = np.zeros_like(lam)
    s[lam > 0] = 2 * np.pi / lam[lam > 0]
    coef = np.sqrt(s) * rng.standard_normal((n, n))
    return sfft.idctn(coef, type=2, norm="ortho")


def sample_gff(grid: Grid, stream=0, normalization: Optional[Normalization] = None,
               norm_radius: float = 1.0, log_singularity: float = 0.0) -> FieldGrid:
    """Sample a discrete GFF on ``grid``.

    The boundary condition follows ``grid.topology``. Torus fields are
    periodic with the zero mode removed. Box-dirichlet fields vanish on
    the outer ring of cells. Box-free fields have Neumann boundary. They
    are the even reflection of a field on the doubled lattice, and their
    zero mode is removed. Cylinder fields are periodic around the
    circumference.

    Parameters
    ----------
    normalization : Normalization, optional
        Defaults to zero-boundary for Dirichlet boxes and mean-zero
        otherwise. ``unit-circle-average`` subtracts the circle average at
        ``norm_radius`` about the grid center. ``row-mean-zero`` removes
        the mean of every row.
    log_singularity : float
        Coefficient of the added ``log(1/|z - center|)`` term.
    """
    rng = as_generator(stream)
    topo = grid.topology
    if topo is Topology.BOX_DIRICHLET:
        vals = _dirichlet_field(grid.size, rng)
        default = Normalization.ZERO_BOUNDARY
    elif topo is Topology.BOX_FREE:
        vals = _free_field(grid.size, rng)
        default = Normalization.MEAN_ZERO
    else:
        vals, _ = _torus_pair(grid.shape, torus_spectrum(*grid.shape), rng)
        default = Normalization.MEAN_ZERO
    f = FieldGrid(grid, vals, default, log_singularity)
    return normalize(f, normalization or default, norm_radius)


def normalize(field: FieldGrid, normalization: Normalization, norm_radius: float = 1.0) -> FieldGrid:
    """Return a copy of ``field`` with the requested normalization applied."""
    normalization = Normalization(normalization)
    v = field.values
    if normalization is Normalization.UNIT_CIRCLE_AVERAGE:
        c = circle_average(field, field.grid.center, norm_radius)
        v = v - c
    elif normalization is Normalization.ROW_MEAN_ZERO:
        v = v - v.mean(axis=1, keepdims=True)
    elif normalization is Normalization.MEAN_ZERO:
        v = v - v.mean()
    elif normalization is Normalization.ZERO_BOUNDARY:
        if field.grid.topology is not Topology.BOX_DIRICHLET:
            raise ValueError("zero-boundary normalization needs a Dirichlet box")
    return FieldGrid(field.grid, v, normalization, field.log_singularity)


# ----------------------------------------------------------------------------
# circle averages

def circle_points(r: float, spacing: float, n_points: Optional[int] = None) -> int:
    return int(n_points or max(4, math.ceil(2 * math.pi * r / spacing)))


def _bilinear_weights(grid: Grid, z, r: float, n_points: Optional[int] = None):
    """Lattice indices and weights of the bilinear circle quadrature."""
    a = grid.spacing
    m = circle_points(r, a, n_points)
    th = 2 * np.pi * np.arange(m) / m
    x = (z[0] + r * np.cos(th)) / a
    y = (z[1] + r * np.sin(th)) / a
    j0 = np.floor(x).astype(int)
    i0 = np.floor(y).astype(int)
    fx, fy = x - j0, y - i0
    ii = np.concatenate([i0, i0, i0 + 1, i0 + 1])
    jj = np.concatenate([j0, j0 + 1, j0, j0 + 1])
    ww = np.concatenate([(1 - fy) * (1 - fx), (1 - fy) * fx, fy * (1 - fx), fy * fx]) / m
    rows, cols = grid.shape
    periodic_x = grid.topology in (Topology.TORUS, Topology.CYLINDER)
    periodic_y = grid.topology is Topology.TORUS
    if periodic_x:
        jj = jj % cols
    elif jj.min() < 0 or jj.max() >= cols:
        raise CircleOutsideLattice(f"circle of radius {r} about {tuple(z)} leaves the lattice")
    if periodic_y:
        ii = ii % rows
    elif ii.min() < 0 or ii.max() >= rows:
        raise CircleOutsideLattice(f"circle of radius {r} about {tuple(z)} leaves the lattice")
    return ii, jj, ww


def singular_circle_average(field: FieldGrid, z, r: float) -> float:
    """Exact circle average of ``log_singularity * log(1/|w - z0|)``."""
    if field.log_singularity == 0:
        return 0.0
    z0 = field.singularity
    d = math.hypot(z[0] - z0[0], z[1] - z0[1])
    return field.log_singularity * math.log(1.0 / max(r, d))


def circle_average(field: FieldGrid, z, r: float, n_points: Optional[int] = None) -> float:
    """Average of the field over the circle of radius ``r`` about ``z``.

    ``z`` is in physical coordinates, with cell ``(i, j)`` at
    ``(j*a, i*a)``. The regular part is read off by bilinear interpolation
    at ``ceil(2 pi r / a)`` equally spaced points.
    """
    if not r > 0:
        raise ValueError("radius must be positive")
    ii, jj, ww = _bilinear_weights(field.grid, z, r, n_points)
    return float(np.dot(field.values[ii, jj], ww)) + singular_circle_average(field, z, r)


def circle_stencil(r: float, spacing: float) -> np.ndarray:
    """Convolution kernel whose correlation with a field gives ``h_r``."""
    m = circle_points(r, spacing)
    R = int(math.ceil(r / spacing)) + 1
    k = np.zeros((2 * R + 1, 2 * R + 1))
    th = 2 * np.pi * np.arange(m) / m
    x = r * np.cos(th) / spacing + R
    y = r * np.sin(th) / spacing + R
    j0, i0 = np.floor(x).astype(int), np.floor(y).astype(int)
    fx, fy = x - j0, y - i0
    for di, wy in ((0, 1 - fy), (1, fy)):
        for dj, wx in ((0, 1 - fx), (1, fx)):
            np.add.at(k, (i0 + di, j0 + dj), wy * wx / m)
    return k


def circle_average_field(field: FieldGrid, r: float) -> np.ndarray:
    """``h_r(z)`` at every lattice point ``z`` (regular plus singular part).

    Periodic directions wrap; elsewhere the nearest boundary value is
    repeated, which only affects points within ``r`` of the edge.
    """
    grid = field.grid
    k = circle_stencil(r, grid.spacing)
    mode = "wrap" if grid.topology in (Topology.TORUS, Topology.CYLINDER) else "nearest"
    out = ndimage.correlate(field.values, k, mode=mode)
    if field.log_singularity:
        X, Y = grid.coords()
        z0 = field.singularity
        d = np.hypot(X - z0[0], Y - z0[1])
        out = out + field.log_singularity * np.log(1.0 / np.maximum(r, d))
    return out


def radial_process(field: FieldGrid, z, radii: Sequence[float]) -> RadialProcess:
    radii = np.asarray(radii, dtype=float)
    return RadialProcess(tuple(z), radii, np.array([circle_average(field, z, r) for r in radii]))


def sup_circle_average(field: FieldGrid, r: float, region: Optional[np.ndarray] = None) -> float:
    """``max |h_r(z)|`` over lattice points in ``region`` (boolean mask).

    Points whose circle leaves a non-periodic lattice are rejected.
    """
    if r < 2 * field.grid.spacing:
        raise ValueError("radius must be at least two lattice spacings")
    mask = np.ones(field.grid.shape, bool) if region is None else np.asarray(region, bool)
    if not mask.any():
        raise ValueError("empty region")
    grid = field.grid
    if grid.topology not in (Topology.TORUS,):
        R = int(math.ceil(r / grid.spacing)) + 1
        rows, cols = grid.shape
        ii, jj = np.nonzero(mask)
        bad_rows = (ii < R) | (ii >= rows - R)
        bad_cols = (jj < R) | (jj >= cols - R)
        if grid.topology is Topology.CYLINDER:
            bad_cols = np.zeros_like(bad_cols)
        if np.any(bad_rows | bad_cols):
            raise CircleOutsideLattice("region contains points whose circle leaves the lattice")
    h = circle_average_field(field, r)
    return float(np.abs(h[mask]).max())


def disk_mask(grid: Grid, center, radius: float) -> np.ndarray:
    """Cells whose centers lie strictly within ``radius`` of ``center``."""
    X, Y = grid.coords()
    return (X - center[0]) ** 2 + (Y - center[1]) ** 2 < radius ** 2


# ----------------------------------------------------------------------------
# exact lattice covariances of circle averages (torus)

def _weight_image(grid: Grid, z, r: float) -> np.ndarray:
    W = np.zeros(grid.shape)
    ii, jj, ww = _bilinear_weights(grid, z, r)
    np.add.at(W, (ii, jj), ww)
    return W


def torus_circle_covariance(grid: Grid, z, radii: Sequence[float]) -> np.ndarray:
    """Exact covariance matrix of ``h_r(z)`` over ``radii`` for the torus field."""
    if grid.topology is not Topology.TORUS:
        raise ValueError("exact circle covariances are implemented for the torus")
    rows, cols = grid.shape
    s = torus_spectrum(rows, cols)[:, : cols // 2 + 1]
    F = [sfft.rfft2(_weight_image(grid, z, r)) for r in radii]
    wts = np.full(cols // 2 + 1, 2.0)
    wts[0] = 1.0
    if cols % 2 == 0:
        wts[-1] = 1.0
    k = len(F)
    C = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            C[i, j] = C[j, i] = float((s * np.conj(F[i]) * F[j] * wts).sum().real) / (rows * cols)
    return C


def sample_normalized_radial(grid: Grid, radii: Sequence[float], n: int, stream=0,
                             norm_radius: float = 1.0) -> np.ndarray:
    """Draw ``n`` radial processes of the normalized torus field.

    Row ``i`` holds ``h_r(0) - h_rho(0)`` for each ``r`` in ``radii``
    (``rho = norm_radius``). The vector is sampled from its exact lattice
    covariance, so the draws have the same law as circle averages of full
    :func:`sample_gff` fields without synthesizing those fields.
    """
    rng = as_generator(stream)
    allr = [float(norm_radius)] + [float(r) for r in radii]
    C = torus_circle_covariance(grid, grid.center, allr)
    k = len(radii)
    D = np.hstack([-np.ones((k, 1)), np.eye(k)])
    Cn = D @ C @ D.T
    w, V = np.linalg.eigh(Cn)
    A = V * np.sqrt(np.clip(w, 0, None))
    return rng.standard_normal((n, k)) @ A.T


# ----------------------------------------------------------------------------
# quantum-cone radial process

def cone_Q(gamma: float) -> float:
    return 2.0 / gamma + gamma / 2.0


@dataclass(frozen=True)
class ConeRadial:
    """Circle-average process ``A_u = h_{e^-u}(0)`` on ``u in [-depth, depth]``."""

    u: np.ndarray
    values: np.ndarray

    def at(self, u: float) -> float:
        return float(np.interp(u, self.u, self.values))

    def as_radial(self) -> RadialProcess:
        return RadialProcess((0.0, 0.0), np.exp(-self.u), self.values)


def conditioned_drift_bm(mu: float, horizon: float, du: float, rng) -> np.ndarray:
    """Brownian motion with drift ``mu > 0`` from 0 conditioned to stay positive.

    Sampled exactly on the grid as the norm of a three-dimensional
    Brownian motion with drift ``mu`` along one axis.
    """
    n = int(math.ceil(horizon / du))
    inc = math.sqrt(du) * rng.standard_normal((n, 3))
    inc[:, 0] += mu * du
    w = np.vstack([np.zeros(3), np.cumsum(inc, axis=0)])
    return np.linalg.norm(w, axis=1)


def cone_radial_process(alpha: float, gamma: float, depth: float, stream=0,
                        du: float = 1e-2) -> ConeRadial:
    """Circle averages of an ``alpha``-quantum cone in the circle-average embedding.

    For ``u >= 0`` the process is ``B_u + alpha*u``. For ``u < 0`` it is
    ``B~_{-u} + alpha*u``, where ``B~_s + (Q - alpha)*s`` is a Brownian
    motion with positive drift conditioned to stay positive.
    """
    Q = cone_Q(gamma)
    if alpha >= Q:
        raise ValueError(f"alpha must be < Q = {Q}")
    rng = as_generator(stream)
    n = int(math.ceil(depth / du))
    fwd = np.concatenate([[0.0], np.cumsum(math.sqrt(du) * rng.standard_normal(n))])
    s = du * np.arange(n + 1)
    fwd = fwd + alpha * s
    w = conditioned_drift_bm(Q - alpha, n * du, du, rng)
    back = w - (Q - alpha) * s - alpha * s
    u = np.concatenate([-s[::-1], s[1:]])
    vals = np.concatenate([back[::-1], fwd[1:]])
    return ConeRadial(u, vals)


# ----------------------------------------------------------------------------
# harmonic extension

def _laplacian_solve(values: np.ndarray, mask: np.ndarray) -> np.ndarray:
    rows, cols = values.shape
    idx = -np.ones(values.shape, dtype=int)
    cells = np.argwhere(mask)
    idx[mask] = np.arange(len(cells))
    n = len(cells)
    rhs = np.zeros(n)
    data, ri, ci = [], [], []
    for di, dj in ((-1, 0), (1, 0), (0, -1), (0, 1)):
        ni, nj = cells[:, 0] + di, cells[:, 1] + dj
        inside = idx[ni, nj]
        interior = inside >= 0
        rows_int = np.arange(n)[interior]
        ri.append(rows_int)
        ci.append(inside[interior])
        data.append(-np.ones(rows_int.size))
        rhs[~interior] += values[ni[~interior], nj[~interior]]
    ri.append(np.arange(n))
    ci.append(np.arange(n))
    data.append(np.full(n, 4.0))
    A = sparse.csr_matrix((np.concatenate(data), (np.concatenate(ri), np.concatenate(ci))), shape=(n, n))
    sol = splinalg.spsolve(A.tocsc(), rhs)
    out = values.copy()
    out[mask] = sol
    return out


def harmonic_extension(field: FieldGrid, region: np.ndarray, tol: float = 1e-10) -> FieldGrid:
    """Replace the field inside ``region`` by its discrete harmonic extension.

    Raises
    ------
    ValueError
        If the region touches the outer ring of the lattice or the solve
        misses the residual tolerance.
    """
    mask = np.asarray(region, bool)
    if mask.shape != field.grid.shape:
        raise ValueError("region mask does not match the grid")
    if mask[0].any() or mask[-1].any() or mask[:, 0].any() or mask[:, -1].any():
        raise ValueError("region touches the lattice boundary")
    if not mask.any():
        return field
    out = _laplacian_solve(field.values, mask)
    res = harmonic_residual(out, mask)
    scale = max(1.0, float(np.abs(out).max()))
    if res > tol * scale:
        raise ValueError(f"harmonic solve residual {res:.3g} exceeds tolerance")
    return field.with_values(out)


def harmonic_residual(values: np.ndarray, mask: np.ndarray) -> float:
    """Largest ``|v - mean of 4 neighbors|`` over cells in ``mask``."""
    v = values
    nb = np.zeros_like(v)
    nb[1:-1, 1:-1] = (v[:-2, 1:-1] + v[2:, 1:-1] + v[1:-1, :-2] + v[1:-1, 2:]) / 4
    return float(np.abs(v - nb)[mask].max()) if mask.any() else 0.0


# ----------------------------------------------------------------------------
# binary field files

_HEADER = struct.Struct("<4sHIdBBd")


def write_field(field: FieldGrid, destination) -> None:
    """Write the ``LQGF`` little-endian binary field format."""
    g = field.grid
    head = _HEADER.pack(FIELD_MAGIC, FIELD_VERSION, g.size, g.spacing, g.topology.code,
                        field.normalization.code, float(field.log_singularity))
    body = np.ascontiguousarray(field.values, dtype="<f8").tobytes()
    Path(destination).write_bytes(head + body)


def read_field(source) -> FieldGrid:
    raw = Path(source).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError("field file truncated in header")
    magic, ver, size, spacing, topo, norm, sing = _HEADER.unpack_from(raw)
    if magic != FIELD_MAGIC:
        raise ValueError("not an LQGF field file")
    if ver != FIELD_VERSION:
        raise ValueError(f"unsupported field file version {ver}")
    vals = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if vals.size % size:
        raise ValueError("field file truncated in body")
    rows = vals.size // size
    topology = Topology.from_code(topo)
    grid = Grid(size, spacing, topology, rows if topology is Topology.CYLINDER else None)
    return FieldGrid(grid, vals.reshape(rows, size).astype(float), Normalization.from_code(norm), sing)
