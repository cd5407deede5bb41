"""Spectrally one-sided alpha-stable Lévy processes.

Two samplers are provided. :func:`sample_stable_path` builds a single path
with an explicit ledger of jumps above a floor (Poisson point process of
big jumps, Gaussian closure of the small ones, exact compensation).
:func:`stable_increments` draws exact increments by the
Chambers-Mallows-Stuck method and is used wherever only grid values are
needed.

Conventions
-----------
A process with only upward jumps and Lévy density ``c x^(-1-alpha) dx``
satisfies ``E exp(-lam X_t) = exp(t a0 lam^alpha)`` with
``a0 = c Gamma(-alpha) > 0``. The process with only downward jumps is its
negative, so ``E exp(lam X_t) = exp(t a0 lam^alpha)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gamma as gamma_fn

from .core import CadlagPath, ExcursionSample, as_generator, DEFAULT_JUMP_FLOOR


class Side(str, enum.Enum):
    UP = "only-upward-jumps"
    DOWN = "only-downward-jumps"


class RejectionBudgetExceeded(RuntimeError):
    """A rejection sampler ran out of attempts."""


def unit_scale_coefficient(alpha: float) -> float:
    """Lévy density coefficient giving Laplace exponent exactly ``lam^alpha``."""
    return 1.0 / gamma_fn(-alpha)


@dataclass(frozen=True)
class StableSpec:
    """Spectrally one-sided stable law.

    The default coefficient 1 gives jump intensity ``x^(-5/2) dx`` at
    ``alpha = 3/2``; use :meth:`unit_scale` for the Laplace exponent
    ``lam^alpha`` instead.
    """

    alpha: float = 1.5
    side: Side = Side.UP
    levy_density_coefficient: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "side", Side(self.side))
        if not 1 < self.alpha < 2:
            raise ValueError(f"alpha must lie in (1, 2), got {self.alpha}")
        if not self.levy_density_coefficient > 0:
            raise ValueError("Lévy density coefficient must be positive")

    @classmethod
    def unit_scale(cls, alpha: float = 1.5, side: Side = Side.UP) -> "StableSpec":
        return cls(alpha, side, unit_scale_coefficient(alpha))

    @property
    def laplace_scale(self) -> float:
        """``a0`` in the Laplace exponent ``a0 lam^alpha``."""
        return self.levy_density_coefficient * gamma_fn(-self.alpha)

    @property
    def sign(self) -> float:
        return 1.0 if self.side is Side.UP else -1.0

    def mirrored(self) -> "StableSpec":
        other = Side.DOWN if self.side is Side.UP else Side.UP
        return StableSpec(self.alpha, other, self.levy_density_coefficient)

    def jump_rate(self, lo: float, hi: float = math.inf) -> float:
        """Intensity of jumps with size in ``[lo, hi]`` per unit time."""
        a = self.alpha
        return self.levy_density_coefficient * (lo ** -a - (0.0 if math.isinf(hi) else hi ** -a)) / a


def stable_standard(rng: np.random.Generator, alpha: float, size) -> np.ndarray:
    """Totally skewed stable draws with ``E exp(-lam S) = exp(lam^alpha)``.

    Chambers-Mallows-Stuck with the skewness fixed to +1, rescaled so the
    Laplace exponent has unit scale.
    """
    V = rng.uniform(-np.pi / 2, np.pi / 2, size)
    W = rng.standard_exponential(size)
    t = np.tan(np.pi * alpha / 2)
    B = np.arctan(t) / alpha
    S = (1 + t * t) ** (1 / (2 * alpha))
    X = (S * np.sin(alpha * (V + B)) / np.cos(V) ** (1 / alpha)
         * (np.cos(V - alpha * (V + B)) / W) ** ((1 - alpha) / alpha))
    return (-np.cos(np.pi * alpha / 2)) ** (1 / alpha) * X


def stable_increments(spec: StableSpec, dt, size, rng: np.random.Generator) -> np.ndarray:
    """Exact increments over durations ``dt`` (scalar or array broadcast to ``size``)."""
    scale = (spec.laplace_scale * np.asarray(dt, dtype=float)) ** (1 / spec.alpha)
    return spec.sign * scale * stable_standard(rng, spec.alpha, size)


def default_jump_floor(spec: StableSpec, dt: float) -> float:
    """Floor matched to the one-step fluctuation scale, never below 1e-6."""
    return max(DEFAULT_JUMP_FLOOR, (spec.laplace_scale * dt) ** (1 / spec.alpha))


def sample_stable_path(spec: StableSpec, x0: float, T: float, dt: float,
                       jump_floor: Optional[float] = None, stream=0) -> CadlagPath:
    """Compensated stable path on ``[0, T]`` with a ledger of big jumps.

    Jumps larger than ``jump_floor`` come from a Poisson point process with
    intensity ``c x^(-1-alpha) dx dt``; the activity below the floor is
    replaced by a Gaussian with the same variance, and the mean of the big
    jumps is subtracted as a drift so the path is a martingale. Ledger
    times are the exact jump times; each jump enters the grid values at
    the first grid time at or after it.
    """
    if not (T > 0 and dt > 0):
        raise ValueError("T and dt must be positive")
    rng = as_generator(stream)
    eps = default_jump_floor(spec, dt) if jump_floor is None else float(jump_floor)
    if not eps > 0:
        raise ValueError("jump_floor must be positive")
    a, c = spec.alpha, spec.levy_density_coefficient
    n = int(math.ceil(T / dt - 1e-9))
    small_var = c * eps ** (2 - a) / (2 - a) * dt
    drift = -c * eps ** (1 - a) / (a - 1) * dt
    incr = drift + math.sqrt(small_var) * rng.standard_normal(n)
    m = rng.poisson(spec.jump_rate(eps) * n * dt)
    times = np.sort(rng.uniform(0.0, n * dt, m))
    sizes = eps * rng.uniform(size=m) ** (-1 / a)
    cell = np.minimum(np.ceil(times / dt - 1e-12).astype(int), n)
    cell = np.maximum(cell, 1)
    np.add.at(incr, cell - 1, sizes)
    values = np.concatenate([[x0], x0 + spec.sign * np.cumsum(incr)])
    jumps = np.column_stack([times, spec.sign * sizes])
    return CadlagPath(0.0, dt, values, jumps, a)


def levy_grid_paths(spec: StableSpec, x0, n_paths: int, n_steps: int, dt: float,
                    rng: np.random.Generator) -> np.ndarray:
    """``(n_paths, n_steps + 1)`` array of grid values with exact increments."""
    inc = stable_increments(spec, dt, (n_paths, n_steps), rng)
    out = np.empty((n_paths, n_steps + 1))
    out[:, 0] = x0
    np.cumsum(inc, axis=1, out=out[:, 1:])
    out[:, 1:] += np.asarray(x0, dtype=float).reshape(-1, 1) if np.ndim(x0) else x0
    return out


def jump_histogram(paths, bins) -> list[tuple[float, float, int]]:
    """``(bin_lo, bin_hi, count)`` rows for absolute ledger jump sizes."""
    sizes = np.concatenate([np.abs(p.jumps[:, 1]) for p in paths]) if paths else np.zeros(0)
    counts, edges = np.histogram(sizes, bins=bins)
    return [(float(lo), float(hi), int(k)) for lo, hi, k in zip(edges[:-1], edges[1:], counts)]


# ----------------------------------------------------------------------------
# suprema of processes without positive jumps

def _require_down(spec: StableSpec):
    if spec.side is not Side.DOWN:
        raise ValueError("supremum laws need a process without positive jumps")


def phi(q: float, spec: StableSpec) -> float:
    """Right inverse of the Laplace exponent: ``(q / a0)^(1/alpha)``."""
    return (q / spec.laplace_scale) ** (1 / spec.alpha)


def supremum_tail(spec: StableSpec, t: float, u: float) -> float:
    """Upper bound ``e * exp(-Phi(1/t) u)`` for ``P[S_t >= u]``."""
    _require_down(spec)
    if u <= 0:
        return 1.0
    return min(1.0, math.e * math.exp(-phi(1.0 / t, spec) * u))


def _running_sup_until(spec, horizons, dt, rng, chunk=512):
    """Grid supremum of ``X`` on ``[0, horizon_i]`` for each path (X_0 = 0)."""
    n = horizons.size
    sup = np.zeros(n)
    x = np.zeros(n)
    t = 0.0
    active = np.arange(n)
    while active.size:
        inc = stable_increments(spec, dt, (active.size, chunk), rng)
        path = x[active, None] + np.cumsum(inc, axis=1)
        tgrid = t + dt * np.arange(1, chunk + 1)
        valid = tgrid[None, :] <= horizons[active, None]
        path_masked = np.where(valid, path, -np.inf)
        sup[active] = np.maximum(sup[active], path_masked.max(axis=1))
        x[active] = path[:, -1]
        t += chunk * dt
        active = active[horizons[active] > t]
    return sup


def empirical_supremum_tail(spec: StableSpec, t: float, u, trials: int, dt: float,
                            stream=0) -> np.ndarray:
    """Monte Carlo ``P[S_t >= u]`` for each threshold in ``u``."""
    _require_down(spec)
    rng = as_generator(stream)
    s = _running_sup_until(spec, np.full(trials, float(t)), dt, rng)
    u = np.atleast_1d(np.asarray(u, dtype=float))
    return np.mean(s[None, :] >= u[:, None], axis=1)


def supremum_at_exponential_time(spec: StableSpec, q: float, trials: int, dt: float,
                                 stream=0) -> np.ndarray:
    """Samples of ``S_tau`` with ``tau ~ Exp(q)`` independent of ``X``.

    Exactly ``Exp(Phi(q))`` in the continuum; grid monitoring biases the
    sample low by ``O(dt^(1/alpha))``.
    """
    _require_down(spec)
    rng = as_generator(stream)
    tau = rng.exponential(1.0 / q, trials)
    return _running_sup_until(spec, tau, dt, rng)


# ----------------------------------------------------------------------------
# conditioned processes and excursions

def condition_nonnegative(spec: StableSpec, x0: float, T: float, dt: float, stream=0,
                          eps_start: float = 1e-3, max_tries: int = 10000,
                          jump_floor: Optional[float] = None) -> CadlagPath:
    """Rejection sample of the path conditioned to stay ``>= 0`` on ``[0, T]``.

    A start at 0 is replaced by ``eps_start``; the conditioned law from 0
    is the ``eps_start -> 0`` limit, and the bias shrinks with it.
    """
    if spec.side is not Side.DOWN:
        raise ValueError("conditioning to stay nonnegative is defined for downward jumps")
    if x0 < 0:
        raise ValueError("x0 must be nonnegative")
    rng = as_generator(stream)
    start = x0 if x0 > 0 else eps_start
    for _ in range(max_tries):
        p = sample_stable_path(spec, start, T, dt, jump_floor, rng)
        if p.values.min() >= 0:
            return p
    raise RejectionBudgetExceeded(f"no nonnegative path in {max_tries} attempts")


class Conditioning(str, enum.Enum):
    LENGTH = "length"
    MAX = "max"


def sample_excursion(spec: StableSpec, conditioning: str, target: float, tol: float = 0.05,
                     dt: float = 1e-3, stream=0, eps_start: Optional[float] = None,
                     batch: int = 4096, max_batches: int = 10000) -> ExcursionSample:
    """Excursion of the upward-jump process away from 0, by rejection.

    Paths start at ``eps_start`` (default ``dt^(1/alpha)``) and are killed
    on the first grid value at or below 0. ``conditioning='length'``
    accepts lifetimes within ``tol * target`` of ``target``;
    ``conditioning='max'`` accepts excursions whose maximum reaches
    ``target``.
    """
    if spec.side is not Side.UP:
        raise ValueError("excursions are sampled for the process with upward jumps")
    cond = Conditioning(conditioning)
    if not target > 0 or not tol > 0:
        raise ValueError("target and tol must be positive")
    rng = as_generator(stream)
    eps = (spec.laplace_scale * dt) ** (1 / spec.alpha) if eps_start is None else eps_start
    n_max = int(math.ceil(target * (1 + tol) / dt)) + 1 if cond is Conditioning.LENGTH else None
    for _ in range(max_batches):
        res = _excursion_batch(spec, eps, dt, batch, rng, cond, target, tol, n_max)
        if res is not None:
            vals, = res
            path = CadlagPath(0.0, dt, vals, np.zeros((0, 2)), spec.alpha,
                              terminal=dt * (vals.size - 1))
            return ExcursionSample(path, dt * (vals.size - 1))
    raise RejectionBudgetExceeded("excursion conditioning never met")


def _excursion_batch(spec, eps, dt, batch, rng, cond, target, tol, n_max):
    x = np.full(batch, eps)
    hist = [np.zeros(batch), x.copy()]
    alive = np.ones(batch, bool)
    death = np.full(batch, -1)
    peak = x.copy()
    k = 1
    while alive.any():
        k += 1
        inc = stable_increments(spec, dt, batch, rng)
        x = np.where(alive, x + inc, 0.0)
        died = alive & (x <= 0)
        x[died] = 0.0
        death[died] = k
        alive &= ~died
        peak = np.maximum(peak, x)
        hist.append(x.copy())
        if cond is Conditioning.LENGTH and k > n_max:
            break
        if cond is Conditioning.MAX and not alive.any():
            break
    lifetimes = death * dt
    if cond is Conditioning.LENGTH:
        ok = (death > 0) & (np.abs(lifetimes - target) <= tol * target)
    else:
        ok = (death > 0) & (peak >= target)
    idx = np.flatnonzero(ok)
    if idx.size == 0:
        return None
    i = idx[0]
    vals = np.array([h[i] for h in hist[: death[i] + 1]])
    return (vals,)


def reverse_excursion(exc: ExcursionSample) -> ExcursionSample:
    """Time reversal ``e(T - .)``, an excursion of the mirrored process."""
    p = exc.path
    T = p.t_end
    jumps = p.jumps[::-1].copy()
    if jumps.size:
        jumps[:, 0] = T - jumps[:, 0] + p.t0
        jumps[:, 1] = -jumps[:, 1]
    rp = CadlagPath(p.t0, p.dt, p.values[::-1], jumps, p.alpha, terminal=p.t_end)
    return ExcursionSample(rp, exc.lifetime)


def reverse_exploration_boundary(exc: ExcursionSample, t: float) -> float:
    """Value of the excursion at ``(lifetime - t)_+``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t >= exc.lifetime:
        return 0.0
    return exc.path.value_at(exc.path.t0 + exc.lifetime - t)
