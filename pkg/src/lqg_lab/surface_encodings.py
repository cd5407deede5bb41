"""Radial encodings of quantum disks, spheres, cones and wedges.

A field on the cylinder ``R x [0, 2 pi)`` splits into a part that is
constant on each circle ``{x} x [0, 2 pi)`` and a part with mean zero on
every circle. The first part is a function of one real variable, the
radial encoding. Lattice rows are circles, so the encoding lives on rows.

Disks and spheres take the encoding from a Bessel excursion ``Z`` as
``(2/gamma) log Z`` after a time change that fixes its quadratic
variation. Cones and wedges use drifted Brownian motions.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import CadlagPath, Grid, Topology, as_generator, read_path_csv, write_path_csv
from .estimators import ExponentFit, loglog_fit
from .gff import (FieldGrid, Normalization, circle_stencil, conditioned_drift_bm, cone_Q,
                  torus_fields, torus_spectrum)
from .lqg_measure import area_measure

BESQ_FLOOR = 1e-12


class Role(str, enum.Enum):
    DISK = "disk"
    SPHERE = "sphere"
    CONE = "cone"
    WEDGE = "wedge"


def _role(role) -> Role:
    return Role(role.value if isinstance(role, Role) else role)


def quadratic_variation_rate(role) -> float:
    """Quadratic variation per unit horizontal coordinate.

    Disks and wedges live on a strip of width ``pi``, half the cylinder
    circumference, and so carry twice the variance per unit length.
    """
    return 2.0 if _role(role) in (Role.DISK, Role.WEDGE) else 1.0


def bessel_dimension(role, gamma: float, alpha: Optional[float] = None) -> float:
    """Dimension of the Bessel process behind each surface type."""
    role = _role(role)
    if role is Role.DISK:
        return 3.0 - 4.0 / gamma ** 2
    if role is Role.SPHERE:
        return 4.0 - 8.0 / gamma ** 2
    if alpha is None:
        raise ValueError(f"{role.value} needs alpha")
    Q = cone_Q(gamma)
    return 2.0 + (4.0 if role is Role.CONE else 2.0) / gamma * (Q - alpha)


# ----------------------------------------------------------------------------
# Bessel excursions

@dataclass(frozen=True)
class BesselExcursion:
    """Excursion of a Bessel process of dimension ``delta`` away from 0."""

    delta: float
    lifetime: float
    path: np.ndarray

    def __post_init__(self):
        p = np.array(self.path, dtype=float)
        if p.ndim != 1 or p.size < 3:
            raise ValueError("an excursion needs at least 3 samples")
        if p[0] != 0 or p[-1] != 0:
            raise ValueError("excursion endpoints must be 0")
        if np.any(p[1:-1] <= 0):
            raise ValueError("excursion must be strictly positive inside")
        if not self.lifetime > 0:
            raise ValueError("lifetime must be positive")
        p.setflags(write=False)
        object.__setattr__(self, "path", p)

    @property
    def dt(self) -> float:
        return self.lifetime / (self.path.size - 1)

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.path.size)


def sample_lifetimes(delta: float, window: Sequence[float], n: int, rng) -> np.ndarray:
    """Draw lifetimes from the density proportional to ``t^(delta/2 - 2)``
    restricted to ``window`` by inverting its distribution function."""
    t_min, t_max = (float(x) for x in window)
    if not 0 < t_min < t_max:
        raise ValueError("lifetime window must satisfy 0 < t_min < t_max")
    if delta >= 2:
        raise ValueError("Bessel excursions need delta < 2")
    p = delta / 2.0 - 1.0
    lo, hi = t_min ** p, t_max ** p
    return (lo + rng.random(n) * (hi - lo)) ** (1.0 / p)


def lifetime_cdf(delta: float, window: Sequence[float], t) -> np.ndarray:
    t_min, t_max = window
    p = delta / 2.0 - 1.0
    t = np.clip(np.asarray(t, dtype=float), t_min, t_max)
    return (t ** p - t_min ** p) / (t_max ** p - t_min ** p)


def bessel_bridges(dim: float, lifetimes: np.ndarray, steps: int, rng) -> np.ndarray:
    """Bessel bridges from 0 to 0, one row per lifetime, ``steps + 1`` samples.

    Integer dimensions use the norm of a ``dim``-dimensional Brownian
    bridge, which is exact on the grid. Other dimensions run
    Euler-Maruyama on the squared-Bessel bridge equation
    ``dX = (dim - 2X/(T - t)) dt + 2 sqrt(X) dW``, reflected at a small
    positive floor.
    """
    T = np.asarray(lifetimes, dtype=float)
    m = T.size
    h = T / steps
    if float(dim).is_integer() and dim >= 1:
        d = int(dim)
        sq = np.zeros((m, steps + 1))
        frac = np.arange(steps + 1) / steps
        for _ in range(d):
            w = np.zeros((m, steps + 1))
            w[:, 1:] = np.cumsum(np.sqrt(h)[:, None] * rng.standard_normal((m, steps)), axis=1)
            b = w - frac[None, :] * w[:, -1:]
            sq += b ** 2
        z = np.sqrt(sq)
        z[:, 0] = z[:, -1] = 0.0
        z[:, 1:-1] = np.maximum(z[:, 1:-1], math.sqrt(BESQ_FLOOR))
        return z
    x = np.zeros((m, steps + 1))
    cur = np.zeros(m)
    sh = np.sqrt(h)
    for k in range(steps - 1):
        remaining = (steps - k) * h
        dw = sh * rng.standard_normal(m)
        cur = cur + (dim - 2.0 * cur / remaining) * h + 2.0 * np.sqrt(cur) * dw
        cur = np.maximum(np.abs(cur), BESQ_FLOOR)
        x[:, k + 1] = cur
    return np.sqrt(x)


def sample_bessel_excursion(delta: float, lifetime_window: Sequence[float], dt: float,
                            stream=0) -> BesselExcursion:
    """One excursion from the Bessel excursion measure restricted to
    lifetimes in ``lifetime_window``.

    The lifetime follows the windowed density ``t^(delta/2 - 2)``; given
    the lifetime the path is a bridge of dimension ``4 - delta``.
    """
    rng = as_generator(stream)
    return sample_bessel_excursions(delta, lifetime_window, 1, rng, dt=dt)[0]


def sample_bessel_excursions(delta: float, lifetime_window: Sequence[float], n: int,
                             stream=0, dt: Optional[float] = None,
                             steps: Optional[int] = None) -> list[BesselExcursion]:
    """Batch version of :func:`sample_bessel_excursion`.

    Give either ``dt`` (grid step, rounded so the grid ends exactly at the
    lifetime; all paths then share the longest lifetime's step count) or
    ``steps`` (same number of steps for every path).
    """
    rng = as_generator(stream)
    T = sample_lifetimes(delta, lifetime_window, n, rng)
    if steps is None:
        if dt is None or not dt > 0:
            raise ValueError("give a positive dt or a step count")
        steps = max(2, int(math.ceil(T.max() / dt)))
    paths = bessel_bridges(4.0 - delta, T, int(steps), rng)
    return [BesselExcursion(delta, float(t), p) for t, p in zip(T, paths)]


# ----------------------------------------------------------------------------
# radial encodings

@dataclass(frozen=True)
class RadialEncoding:
    """Encoding sampled at ``x0 + k*dx``.

    ``process[k]`` is the common value of the field's circle-constant part
    on the circle at horizontal coordinate ``x0 + k*dx``.
    """

    role: Role
    gamma: float
    process: np.ndarray
    x0: float
    dx: float
    alpha: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "role", _role(self.role))
        p = np.array(self.process, dtype=float)
        if p.ndim != 1 or p.size < 2:
            raise ValueError("encoding needs at least 2 samples")
        if not np.all(np.isfinite(p)):
            raise ValueError("encoding values must be finite")
        if not self.dx > 0:
            raise ValueError("dx must be positive")
        if self.role in (Role.CONE, Role.WEDGE) and self.alpha is None:
            raise ValueError("cone and wedge encodings need alpha")
        p.setflags(write=False)
        object.__setattr__(self, "process", p)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.process.size)

    @property
    def delta(self) -> float:
        return bessel_dimension(self.role, self.gamma, self.alpha)

    def shifted(self, c: float) -> "RadialEncoding":
        return RadialEncoding(self.role, self.gamma, self.process + c, self.x0, self.dx, self.alpha)

    def realized_qv_rate(self) -> float:
        return float(np.sum(np.diff(self.process) ** 2) / (self.dx * (self.process.size - 1)))


def excursion_clock(exc: BesselExcursion, gamma: float, rate: float) -> np.ndarray:
    """Horizontal coordinate of every interior sample of ``exc``.

    ``(2/gamma) log Z`` accrues quadratic variation ``(4/gamma^2) dt / Z^2``;
    dividing by ``rate`` gives the coordinate in which that variation is
    ``rate`` per unit. Left-endpoint sums, centered at the lifetime
    midpoint.
    """
    z = exc.path[1:-1]
    inc = (4.0 / gamma ** 2) * exc.dt / (rate * z ** 2)
    x = np.concatenate([[0.0], np.cumsum(inc[:-1])])
    mid = (z.size - 1) // 2
    return x - x[mid]


def encode_excursion(exc: BesselExcursion, role, gamma: float, extent: float,
                     dx: float) -> RadialEncoding:
    """``(2/gamma) log Z`` on the uniform grid ``[-extent, extent]``.

    Each grid coordinate ``x`` takes the value at the first sample whose
    clock reaches ``x``.

    Raises
    ------
    ValueError
        If the excursion's clock does not cover ``[-extent, extent]``.
    """
    role = _role(role)
    if role not in (Role.DISK, Role.SPHERE):
        raise ValueError("only disks and spheres are encoded by excursions")
    x = excursion_clock(exc, gamma, quadratic_variation_rate(role))
    n = int(round(extent / dx))
    grid = dx * np.arange(-n, n + 1)
    if x[0] > grid[0] or x[-1] < grid[-1]:
        raise ValueError("excursion too short to cover the requested horizontal extent")
    idx = np.searchsorted(x, grid, side="left")
    y = (2.0 / gamma) * np.log(exc.path[1:-1][idx])
    return RadialEncoding(role, gamma, y, float(grid[0]), dx)


def drifted_encoding(role, gamma: float, alpha: float, extent: float, dx: float,
                     stream=0) -> RadialEncoding:
    """Cone or wedge encoding on ``[-extent, extent]``.

    For ``x < 0`` the process is ``sqrt(c) B_{-x} + (Q - alpha) x`` and for
    ``x >= 0`` it is an independent ``sqrt(c) B~_x + (Q - alpha) x``
    conditioned to stay nonnegative; ``c`` is the quadratic-variation
    rate. The horizontal translation puts the last zero at ``x = 0``.
    The conditioned branch is sampled exactly as ``sqrt(c)`` times the
    norm of a 3-d Brownian motion with drift ``(Q - alpha)/sqrt(c)``.
    """
    role = _role(role)
    if role not in (Role.CONE, Role.WEDGE):
        raise ValueError("drifted encodings are for cones and wedges")
    Q = cone_Q(gamma)
    if not alpha < Q:
        raise ValueError(f"alpha must be < Q = {Q}")
    rng = as_generator(stream)
    c = quadratic_variation_rate(role)
    sc = math.sqrt(c)
    n = int(round(extent / dx))
    s = dx * np.arange(n + 1)
    left = np.concatenate([[0.0], np.cumsum(sc * math.sqrt(dx) * rng.standard_normal(n))])
    left = left - (Q - alpha) * s
    right = sc * conditioned_drift_bm((Q - alpha) / sc, n * dx, dx, rng)[: n + 1]
    proc = np.concatenate([left[::-1], right[1:]])
    return RadialEncoding(role, gamma, proc, -n * dx, dx, alpha)


def radial_encoding(role, gamma: float, source=None, dx: float = 1e-2, extent: float = 1.0,
                    alpha: Optional[float] = None) -> RadialEncoding:
    """Radial encoding of a disk, sphere, cone or wedge.

    ``source`` is a :class:`BesselExcursion` for disks and spheres and a
    random stream for cones and wedges.
    """
    role = _role(role)
    if role in (Role.DISK, Role.SPHERE):
        if not isinstance(source, BesselExcursion):
            raise ValueError(f"{role.value} encodings need a Bessel excursion")
        want = bessel_dimension(role, gamma)
        if abs(source.delta - want) > 1e-12:
            raise ValueError(f"{role.value} needs delta = {want}, excursion has {source.delta}")
        return encode_excursion(source, role, gamma, extent, dx)
    if alpha is None:
        raise ValueError(f"{role.value} encodings need alpha")
    return drifted_encoding(role, gamma, alpha, extent, dx, 0 if source is None else source)


def excursion_qv_rate(exc: BesselExcursion, role, gamma: float, extent: float) -> float:
    """Quadratic variation per unit coordinate, measured on the native
    samples of ``(2/gamma) log Z`` whose clock lies in ``[-extent, extent]``."""
    x = excursion_clock(exc, gamma, quadratic_variation_rate(role))
    y = (2.0 / gamma) * np.log(exc.path[1:-1])
    inside = (x[:-1] >= -extent) & (x[1:] <= extent)
    if not np.any(inside):
        raise ValueError("no samples inside the requested extent")
    return float(np.sum(np.diff(y)[inside] ** 2) / np.sum(np.diff(x)[inside]))


# ----------------------------------------------------------------------------
# lattice assembly

def cylinder_grid(encoding: RadialEncoding, size: int = 256) -> Grid:
    """Cylinder lattice of circumference ``2 pi`` whose rows are the
    encoding's sample points (requires ``dx = 2 pi / size``)."""
    a = 2 * math.pi / size
    if abs(encoding.dx - a) > 1e-12 * a:
        raise ValueError(f"encoding step {encoding.dx} differs from the lattice spacing {a}")
    return Grid(size, a, Topology.CYLINDER, rows=encoding.process.size)


def lateral_field(grid: Grid, stream=0, even: bool = False) -> FieldGrid:
    """Mean-zero-on-circles part of a cylinder GFF.

    With ``even=True`` the field is symmetrized under ``y -> -y``, which
    gives the free-boundary field of the half-width strip doubled across
    its boundary (method of images).
    """
    if grid.topology is not Topology.CYLINDER:
        raise ValueError("lateral fields live on cylinders")
    vals = next(torus_fields(grid, 1, stream))
    vals = vals - vals.mean(axis=1, keepdims=True)
    if even:
        vals = (vals + np.roll(vals[:, ::-1], 1, axis=1)) / math.sqrt(2.0)
    return FieldGrid(grid, vals, Normalization.ROW_MEAN_ZERO)


def assemble_cylinder_field(encoding: RadialEncoding, lateral: FieldGrid,
                            gamma: Optional[float] = None) -> FieldGrid:
    """Encoding broadcast along rows plus a row-mean-zero lateral field."""
    if gamma is not None and abs(gamma - encoding.gamma) > 1e-12:
        raise ValueError("gamma does not match the encoding")
    rows, _ = lateral.grid.shape
    if lateral.grid.topology is not Topology.CYLINDER:
        raise ValueError("lateral field must live on a cylinder")
    if rows != encoding.process.size:
        raise ValueError(f"encoding has {encoding.process.size} samples, lattice has {rows} rows")
    lv = lateral.values
    scale = max(1.0, float(np.abs(lv).max()))
    if np.abs(lv.mean(axis=1)).max() > 1e-9 * scale:
        raise ValueError("lateral field must have zero row means")
    vals = encoding.process[:, None] + (lv - lv.mean(axis=1, keepdims=True))
    return FieldGrid(lateral.grid, vals, Normalization.MEAN_ZERO)


def row_means(field: FieldGrid) -> np.ndarray:
    return field.values.mean(axis=1)


def dirichlet_inner_product(f: np.ndarray, g: np.ndarray, periodic_cols: bool = True) -> float:
    """``(2 pi)^-1`` times the sum over lattice edges of the product of
    differences."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    s = np.sum(np.diff(f, axis=0) * np.diff(g, axis=0))
    if periodic_cols:
        s += np.sum((np.roll(f, -1, axis=1) - f) * (np.roll(g, -1, axis=1) - g))
    else:
        s += np.sum(np.diff(f, axis=1) * np.diff(g, axis=1))
    return float(s / (2 * math.pi))


def total_area(field: FieldGrid, gamma: float, role=None) -> float:
    """Area of the assembled surface; halved for disks and wedges, whose
    cylinder field is the strip doubled across its boundary."""
    m = area_measure(field, gamma).total
    if role is not None and _role(role) in (Role.DISK, Role.WEDGE):
        m /= 2.0
    return m


def boundary_length_scaling(encoding: RadialEncoding, lateral: FieldGrid, gamma: float,
                            ells: Sequence[float]) -> ExponentFit:
    """Fit ``log area`` against ``log ell`` after adding ``(2/gamma) log ell``.

    Adding that constant rescales boundary length by ``ell`` and area by
    ``ell^2``, so the slope is 2 up to rounding.
    """
    ells = np.asarray(ells, dtype=float)
    areas = [total_area(assemble_cylinder_field(encoding.shifted(2.0 / gamma * math.log(l)),
                                                lateral), gamma, encoding.role)
             for l in ells]
    return loglog_fit(ells, areas)


# ----------------------------------------------------------------------------
# quantum-typical balls through the cone's cylinder picture

def cone_cylinder_field(gamma: float, alpha: float, size: int, left: float, right: float,
                        stream=0) -> tuple[FieldGrid, RadialEncoding]:
    """Cylinder field of an ``alpha``-quantum cone on ``x in [-left, right]``.

    The origin of the cone sits at ``x = -inf``; under ``z = e^x`` the
    circle at coordinate ``x`` is the planar circle of radius ``e^x`` and
    the region ``{x' <= x}`` is the planar ball of that radius. Returns the
    field and its radial encoding.
    """
    rng = as_generator(stream)
    a = 2 * math.pi / size
    extent = max(left, right)
    enc = drifted_encoding(Role.CONE, gamma, alpha, extent, a, rng)
    n = int(round(extent / a))
    lo, hi = n - int(round(left / a)), n + int(round(right / a))
    enc = RadialEncoding(Role.CONE, gamma, enc.process[lo:hi + 1], enc.x0 + lo * a, a, alpha)
    grid = Grid(size, a, Topology.CYLINDER, rows=hi - lo + 1)
    return assemble_cylinder_field(enc, lateral_field(grid, rng)), enc


def tail_radii(field: FieldGrid, gamma: float, x_first: float,
               mass_targets: Sequence[float]) -> np.ndarray:
    """Planar radius ``e^x`` of the smallest origin-centered ball with
    quantum mass at least each target.

    ``x_first`` is the coordinate of the field's first row; the ball of
    radius ``e^x`` is the union of rows at or below ``x``.
    """
    mu = area_measure(field, gamma)
    cum = np.cumsum(mu.cell_mass.sum(axis=1))
    targets = np.asarray(mass_targets, dtype=float)
    if np.any(targets > cum[-1]):
        raise ValueError("mass target exceeds the mass inside the lattice")
    k = np.searchsorted(cum, targets, side="left")
    return np.exp(x_first + field.grid.spacing * k)


def lateral_circle_variance(size: int, rows: int, r: Optional[float] = None) -> float:
    """Exact variance of the lateral field's circle average at radius ``r``
    (default one spacing) on a cylinder of circumference ``2 pi``."""
    a = 2 * math.pi / size
    k = circle_stencil(a if r is None else r, a)
    R = k.shape[0] // 2
    img = np.zeros((rows, size))
    ii, jj = np.nonzero(k)
    img[(ii - R) % rows, (jj - R) % size] = k[ii, jj]
    spec = torus_spectrum(rows, size)
    spec[:, 0] = 0.0
    return float(np.sum(spec * np.abs(np.fft.fft2(img)) ** 2) / (rows * size))


def row_mass_offset(gamma: float, size: int, rows: int) -> float:
    """``log`` of the mean lattice mass per unit horizontal length when the
    encoding vanishes."""
    a = 2 * math.pi / size
    v = lateral_circle_variance(size, rows)
    return math.log(2 * math.pi) + gamma ** 2 / 2 * (math.log(a) + v)


def radial_passage_radii(encoding: RadialEncoding, levels: Sequence[float]) -> np.ndarray:
    """``e^x`` for the last ``x <= 0``, scanning downward from 0, at which
    the encoding is at or above each level.

    Below that point the encoding stays under the level for the rest of
    the lattice. For a Brownian motion with drift, the last passage is the
    first passage plus an independent last-exit time, so its mean is
    linear in the level with slope one over the drift.
    """
    x = encoding.x
    k0 = int(np.searchsorted(x, 0.0, side="right")) - 1
    back = encoding.process[k0::-1]
    tail_max = np.maximum.accumulate(back[::-1])[::-1]
    lv = np.asarray(levels, dtype=float)
    if np.any(back[-1] >= lv):
        raise ValueError("encoding does not stay below every level")
    # tail_max is nonincreasing; count how many entries are >= level
    k = np.searchsorted(-tail_max, -lv, side="right") - 1
    return np.exp(x[k0 - np.maximum(k, 0)])


@dataclass(frozen=True)
class DiameterSamples:
    """Per-field ball radii and their radial-process control values."""

    eps: np.ndarray
    radii: np.ndarray
    control: np.ndarray
    volume_power: float


def diameter_exponent_samples(gamma: float, eps: Sequence[float], trials: int, stream=0,
                              size: int = 256, left: float = 96.0, right: float = 4.0,
                              volume_power: float = 4.0) -> DiameterSamples:
    """Radii of balls of mass ``eps^volume_power`` around a quantum-typical
    point, one row per field.

    The neighbourhood of a quantum-typical point is a ``gamma``-quantum
    cone in its circle-average embedding, so each field is that cone's
    cylinder field. Alongside every radius the control records where the
    radial encoding alone last sits at the level at which one unit of
    horizontal length carries mass ``eps^volume_power`` on average. The
    level is a deterministic shift of ``(volume_power/gamma) log eps``, so
    the control's mean slope is known exactly.
    """
    eps = np.asarray(eps, dtype=float)
    rng = as_generator(stream)
    radii = np.empty((trials, eps.size))
    control = np.empty((trials, eps.size))
    levels = None
    for i in range(trials):
        f, enc = cone_cylinder_field(gamma, gamma, size, left, right, rng)
        if levels is None:
            off = row_mass_offset(gamma, size, f.grid.rows)
            levels = np.minimum(volume_power * np.log(eps) - off, 0.0) / gamma
        radii[i] = tail_radii(f, gamma, enc.x0, eps ** volume_power)
        control[i] = radial_passage_radii(enc, levels)
    return DiameterSamples(eps, radii, control, volume_power)


def control_slope(gamma: float, volume_power: float = 4.0) -> float:
    """Exact mean slope of the control: the last passage of a Brownian
    motion with drift ``-(Q - gamma)`` at ``-level`` has mean
    ``level / (Q - gamma)`` plus a constant."""
    return volume_power / (gamma * (cone_Q(gamma) - gamma))


def diameter_exponent(samples: DiameterSamples, gamma: float) -> dict:
    """Mean per-field slope of ``log radius`` on ``log eps``, plain and with
    the radial control variate (whose mean slope is known exactly)."""
    le = np.log(samples.eps)
    xc = le - le.mean()

    def slopes(a):
        la = np.log(a)
        return (la - la.mean(axis=1, keepdims=True)) @ xc / np.sum(xc ** 2)

    s = slopes(samples.radii)
    c = slopes(samples.control)
    n = s.size
    cov = np.cov(s, c)
    b = cov[0, 1] / cov[1, 1] if cov[1, 1] > 0 else 0.0
    adj = s - b * (c - control_slope(gamma, samples.volume_power))
    return {"plain": float(s.mean()), "plain_stderr": float(s.std(ddof=1) / math.sqrt(n)),
            "cv": float(adj.mean()), "cv_stderr": float(adj.std(ddof=1) / math.sqrt(n)),
            "cv_coefficient": float(b), "control_mean": float(c.mean()),
            "control_target": control_slope(gamma, samples.volume_power), "fields": n}


# ----------------------------------------------------------------------------
# serialization

def encoding_to_path(encoding: RadialEncoding) -> CadlagPath:
    return CadlagPath(encoding.x0, encoding.dx, encoding.process)


def write_encoding_csv(encoding: RadialEncoding, destination) -> None:
    meta = {"role": encoding.role.value, "gamma": repr(float(encoding.gamma))}
    if encoding.alpha is not None:
        meta["cone_alpha"] = repr(float(encoding.alpha))
    write_path_csv(encoding_to_path(encoding), destination, meta)


def read_encoding_csv(source) -> RadialEncoding:
    path, meta = read_path_csv(source, with_meta=True)
    alpha = float(meta["cone_alpha"]) if "cone_alpha" in meta else None
    return RadialEncoding(Role(meta["role"]), float(meta["gamma"]), path.values, path.t0,
                          path.dt, alpha)
