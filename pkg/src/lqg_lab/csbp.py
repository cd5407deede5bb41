"""Continuous-state branching processes with branching mechanism ``u^alpha``.

The simulator works in the CSBP clock. From a current value ``y`` it
advances the clock by ``s``, which consumes ``y*s`` units of Lévy time, and
adds an exact stable increment over that Lévy time. This is the Lamperti
transform evaluated step by step. The step ``s = min(h, kappa*y^(alpha-1))``
shrinks near extinction. The elapsed CSBP time is then corrected with the
log-mean of the two endpoint values, which is exact when the Lévy path is
linear across the step. The integral of ``Y`` equals the Lévy time used,
so it is tracked exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import CadlagPath, as_generator
from .estimators import Comparison, compare_mean, compare_probability, laplace_compare
from .stable_levy import StableSpec, stable_standard

ABSORPTION_FLOOR = 1e-9


@dataclass(frozen=True)
class CsbpSpec:
    alpha: float = 1.5
    y0: float = 1.0

    def __post_init__(self):
        if not 1 < self.alpha < 2:
            raise ValueError("alpha must lie in (1, 2)")
        if self.y0 < 0:
            raise ValueError("y0 must be nonnegative")


# ----------------------------------------------------------------------------
# closed forms

def u_t(lam, t, alpha: float = 1.5):
    """Solution of ``du/dt = -u^alpha`` with ``u_0 = lam``."""
    lam = np.asarray(lam, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(lam <= 0):
        raise ValueError("lambda must be positive")
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    out = (lam ** (1 - alpha) + (alpha - 1) * t) ** (1 / (1 - alpha))
    out = np.where(t == 0, lam, out)
    return float(out) if out.ndim == 0 else out


def u_infinity(t, alpha: float = 1.5):
    """``lim u_t(lam)`` as ``lam -> inf``; equals ``4/t^2`` at ``alpha = 3/2``."""
    return ((alpha - 1) * np.asarray(t, dtype=float)) ** (1 / (1 - alpha))


def laplace_transform(y0: float, t: float, lam: float, alpha: float = 1.5) -> float:
    return math.exp(-y0 * u_t(lam, t, alpha))


def extinction_probability(y0: float, v: float, alpha: float = 1.5) -> float:
    """``P[zeta <= v]`` started from ``y0``."""
    if not v > 0:
        raise ValueError("v must be positive")
    return math.exp(-y0 * float(u_infinity(v, alpha)))


def phi(q: float, alpha: float = 1.5) -> float:
    """``sup{theta : theta^alpha = q}``."""
    return q ** (1 / alpha)


def integral_laplace(y0: float, q: float, alpha: float = 1.5) -> float:
    """``E exp(-q int_0^zeta Y ds) = exp(-Phi(q) y0)``."""
    return math.exp(-phi(q, alpha) * y0)


# ----------------------------------------------------------------------------
# batch simulation

@dataclass
class CsbpBatch:
    """Output of :func:`simulate_csbp`.

    Attributes
    ----------
    records : dict
        Maps each requested time to the array of ``Y`` values there.
    extinction : ndarray
        Extinction times (``inf`` when alive at the end).
    integral : ndarray
        ``int Y ds`` up to extinction or the stopping time.
    levy_time : ndarray
        Same as ``integral``; named for the Lamperti reading.
    """

    records: dict
    extinction: np.ndarray
    integral: np.ndarray
    steps: int = 0

    @property
    def levy_time(self) -> np.ndarray:
        return self.integral


def _log_mean_clock(s, y, ny, dead):
    r = y / np.where(dead, 1.0, ny)
    near = np.abs(r - 1.0) < 1e-8
    safe_r = np.where(near | dead, 0.5, r)
    tau = s * safe_r * np.log(1.0 / safe_r) / (1.0 - safe_r)
    return np.where(dead | near, s, tau)


def simulate_csbp(y0, n_paths: int, record_times: Sequence[float] = (), stream=0,
                  alpha: float = 1.5, h: float = 1e-3, kappa: float = 0.3,
                  to_extinction: bool = False, horizon: float = math.inf,
                  floor: float = ABSORPTION_FLOOR, history_times: Optional[np.ndarray] = None
                  ) -> CsbpBatch:
    """Simulate ``n_paths`` CSBPs with ``psi(u) = u^alpha``.

    Parameters
    ----------
    y0 : float or array
        Initial values.
    record_times : sequence of float
        Times at which ``Y`` is recorded. A time falling inside a step
        receives the value at the left end of that step.
    to_extinction : bool
        Keep running until every path is absorbed (or ``horizon``).
    h, kappa : float
        Maximal CSBP step and the near-extinction step factor.
    """
    rng = as_generator(stream)
    times = sorted(float(t) for t in record_times)
    tarr = np.array(times + [math.inf])
    y = np.broadcast_to(np.asarray(y0, dtype=float), (n_paths,)).copy()
    clock = np.zeros(n_paths)
    ext = np.full(n_paths, math.inf)
    ext[y <= floor] = 0.0
    y[y <= floor] = 0.0
    integ = np.zeros(n_paths)
    rec = np.zeros((len(times), n_paths))
    nxt = np.zeros(n_paths, dtype=int)
    t_stop = horizon if (to_extinction or not times) else min(horizon, times[-1])
    active = np.flatnonzero(y > 0)
    # paths already dead record zero everywhere
    steps = 0
    while active.size:
        steps += 1
        yy = y[active]
        s = np.minimum(h, kappa * yy ** (alpha - 1))
        ell = yy * s
        ny = yy + ell ** (1 / alpha) * stable_standard(rng, alpha, active.size)
        dead = ny <= floor
        tau = _log_mean_clock(s, yy, ny, dead)
        ny[dead] = 0.0
        c0 = clock[active]
        c1 = c0 + tau
        over = c1 > t_stop
        if np.any(over):
            # truncate the last step so no path runs past the stopping time;
            # the record rule still sees the left value
            frac = np.where(over, (t_stop - c0) / tau, 1.0)
            ell = ell * frac
            c1 = np.where(over, t_stop, c1)
            ny = np.where(over, yy, ny)
            dead = dead & ~over
        integ[active] += ell
        while times:
            k = nxt[active]
            hit = c1 >= tarr[k]
            hit &= k < len(times)
            if not hit.any():
                break
            idx = active[hit]
            rec[k[hit], idx] = yy[hit]
            nxt[idx] += 1
        y[active] = ny
        clock[active] = c1
        ext[active[dead]] = c1[dead]
        keep = ~dead & (c1 < t_stop)
        if not to_extinction:
            keep &= nxt[active] < len(times)
        active = active[keep]
    return CsbpBatch({t: rec[i] for i, t in enumerate(times)}, ext, integ, steps)


def simulate_csbp_histories(y0: float, n_paths: int, dt_record: float, stream=0,
                            alpha: float = 1.5, h: float = 1e-3, kappa: float = 0.3,
                            max_time: float = math.inf):
    """Run paths to extinction and store ``Y`` on a uniform record grid.

    Returns
    -------
    hist : list of ndarray
        ``hist[i][k]`` is path ``i`` at time ``k*dt_record`` until extinction.
    extinction : ndarray
    """
    rng = as_generator(stream)
    y = np.full(n_paths, float(y0))
    clock = np.zeros(n_paths)
    ext = np.full(n_paths, math.inf)
    nxt = np.zeros(n_paths, dtype=int)
    buf = [[] for _ in range(n_paths)]
    active = np.arange(n_paths)
    while active.size:
        yy = y[active]
        s = np.minimum(h, kappa * yy ** (alpha - 1))
        ell = yy * s
        ny = yy + ell ** (1 / alpha) * stable_standard(rng, alpha, active.size)
        dead = ny <= ABSORPTION_FLOOR
        tau = _log_mean_clock(s, yy, ny, dead)
        ny[dead] = 0.0
        c1 = clock[active] + tau
        # number of record points crossed in this step
        k_end = np.floor(c1 / dt_record).astype(int) + 1
        cnt = k_end - nxt[active]
        for j in np.flatnonzero(cnt > 0):
            buf[active[j]].extend([yy[j]] * int(cnt[j]))
        nxt[active] = np.maximum(nxt[active], k_end)
        y[active] = ny
        clock[active] = c1
        ext[active[dead]] = c1[dead]
        keep = ~dead & (c1 < max_time)
        active = active[keep]
    return [np.array(b) for b in buf], ext


# ----------------------------------------------------------------------------
# Lamperti transforms on uniform grids

def _absorption_index(x: np.ndarray, floor: float) -> int:
    bad = np.flatnonzero(x <= floor)
    return int(bad[0]) if bad.size else x.size


def lamperti_clock(levy: CadlagPath, floor: float = ABSORPTION_FLOOR) -> np.ndarray:
    """Left-endpoint sums ``S_k = sum_{m<k} dt / X_m`` up to absorption.

    Returns ``S_0 .. S_{k*}`` where ``k*`` is the absorption index (or the
    last grid index when the path stays positive).
    """
    x = levy.values
    kstar = _absorption_index(x, floor)
    top = kstar if kstar < x.size else x.size - 1
    return levy.t0 + np.concatenate([[0.0], np.cumsum(levy.dt / x[:top])])


def csbp_from_levy(levy: CadlagPath, dt: Optional[float] = None,
                   floor: float = ABSORPTION_FLOOR) -> CadlagPath:
    """Lamperti transform ``Y_t = X_{s*(t)}`` with ``s(t) = int_0^t du / X_u``.

    The CSBP grid step defaults to ``levy.dt / (max X * refine)`` with
    ``refine`` large enough that the Riemann sum of the inverse transform
    stays within a quarter Lévy cell of the true clock.
    """
    x = levy.values
    kstar = _absorption_index(x, floor)
    absorbed = kstar < x.size
    live = x[:kstar]
    if live.size == 0:
        return CadlagPath(levy.t0, dt or levy.dt, [0.0, 0.0], alpha=levy.alpha, terminal=levy.t0)
    S = lamperti_clock(levy, floor)
    if dt is None:
        xmax = float(live.max())
        tv = float(np.abs(np.diff(live)).sum()) if live.size > 1 else 0.0
        refine = max(4, int(math.ceil(4 * tv / xmax)))
        dt = levy.dt / (xmax * refine)
    end = S[-1] - levy.t0
    if absorbed:
        n = int(math.floor(end / dt)) + 2
    else:
        n = int(math.ceil(end / dt - 1e-9)) + 1
    tgrid = np.arange(n) * dt
    k = np.searchsorted(S - levy.t0, tgrid, side="right") - 1
    vals = np.where(k < kstar, x[np.minimum(k, kstar - 1)], 0.0) if absorbed else x[np.minimum(k, x.size - 1)]
    terminal = levy.t0 + end if absorbed else None
    jumps = levy.jumps
    if jumps.size:
        tau = jumps[:, 0]
        keep = tau < levy.t0 + kstar * levy.dt if absorbed else np.ones(tau.size, bool)
        tau, size = tau[keep], jumps[keep, 1]
        cell = np.clip(np.ceil((tau - levy.t0) / levy.dt - 1e-9).astype(int), 1, S.size - 1)
        frac = (tau - levy.t0) - (cell - 1) * levy.dt
        jt = S[cell - 1] + frac / x[cell - 1]
        jumps = np.column_stack([jt, size])
    return CadlagPath(levy.t0, dt, vals, jumps, levy.alpha, terminal)


def levy_from_csbp(csbp: CadlagPath, dt: Optional[float] = None) -> CadlagPath:
    """Inverse Lamperti transform ``X_{theta(t)} = Y_t``, ``theta(t) = int_0^t Y``.

    Lévy grid values are read at cell midpoints, which makes the round trip
    through :func:`csbp_from_levy` exact on the grid.
    """
    y = csbp.values
    if dt is None:
        dt = csbp.dt * float(y.max()) if y.max() > 0 else csbp.dt
    kz = _absorption_index(y, 0.0)
    absorbed = csbp.terminal is not None or kz < y.size
    live = y[:kz]
    theta = np.concatenate([[0.0], np.cumsum(live * csbp.dt)])
    if not absorbed:
        theta = theta[:-1]
    end = theta[-1]
    n = int(round(end / dt)) + 1
    if not absorbed:
        theta = np.append(theta, np.inf)
    mids = (np.arange(n) + 0.5) * dt
    i = np.searchsorted(theta, mids, side="right") - 1
    vals = np.where(i < kz, live[np.minimum(i, kz - 1)] if kz else 0.0, 0.0)
    if not absorbed:
        vals[-1] = y[-1]
    terminal = csbp.t0 + (n - 1) * dt if absorbed else None
    if absorbed:
        vals[-1] = 0.0
    jumps = csbp.jumps
    if jumps.size:
        t = jumps[:, 0] - csbp.t0
        cell = np.clip(np.floor(t / csbp.dt + 1e-9).astype(int), 0, max(kz - 1, 0))
        jt = theta[cell] + (t - cell * csbp.dt) * live[cell]
        jumps = np.column_stack([csbp.t0 + jt, jumps[:, 1]])
    return CadlagPath(csbp.t0, dt, vals, jumps, csbp.alpha, terminal)


def sample_csbp_path(spec: CsbpSpec, T: float, dt_levy: float = 1e-3, stream=0,
                     dt: Optional[float] = None) -> CadlagPath:
    """CSBP path on ``[0, T]`` (or until extinction) via the Lamperti route."""
    from .stable_levy import sample_stable_path
    rng = as_generator(stream)
    unit = StableSpec.unit_scale(spec.alpha)
    levy_T = max(1.0, spec.y0 * T * 2)
    while True:
        levy = sample_stable_path(unit, spec.y0, levy_T, dt_levy, stream=rng)
        S = lamperti_clock(levy)
        if _absorption_index(levy.values, ABSORPTION_FLOOR) < len(levy) or S[-1] >= T:
            break
        levy_T *= 2
    path = csbp_from_levy(levy, dt)
    n = min(len(path), int(math.floor(T / path.dt)) + 1)
    jumps = path.jumps[path.jumps[:, 0] <= path.t0 + (n - 1) * path.dt] if path.jumps.size else path.jumps
    term = path.terminal if path.terminal is not None and path.terminal <= (n - 1) * path.dt else None
    return CadlagPath(path.t0, path.dt, path.values[:n], jumps, path.alpha, term)


def csbp_scaling(path: CadlagPath, beta: float) -> CadlagPath:
    """``Y~_t = beta^(1/(1-alpha)) Y_{beta t}`` as a new path."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    if beta == 1:
        return path
    c = beta ** (1 / (1 - path.alpha))
    jumps = path.jumps.copy()
    if jumps.size:
        jumps[:, 0] = jumps[:, 0] / beta
        jumps[:, 1] = jumps[:, 1] * c
    term = None if path.terminal is None else path.terminal / beta
    return CadlagPath(path.t0 / beta, path.dt / beta, path.values * c, jumps, path.alpha, term)


# ----------------------------------------------------------------------------
# checks against closed forms

def transition_laplace_check(y0: float, t: float, lambdas, n_paths: int, stream=0,
                             alpha: float = 1.5, **kw) -> list[Comparison]:
    batch = simulate_csbp(y0, n_paths, [t], stream, alpha=alpha, **kw)
    return laplace_compare(batch.records[t], lambdas, lambda lam: laplace_transform(y0, t, lam, alpha))


def extinction_check(y0: float, v: float, n_paths: int, stream=0, alpha: float = 1.5,
                     batch: Optional[CsbpBatch] = None, **kw) -> Comparison:
    if batch is None:
        batch = simulate_csbp(y0, n_paths, [v], stream, alpha=alpha, **kw)
    return compare_probability(batch.extinction <= v, extinction_probability(y0, v, alpha),
                               label=f"v={v!r}")


def exponential_integral_check(y0: float, q: float, alpha: float = 1.5, trials: int = 10 ** 5,
                               stream=0, batch: Optional[CsbpBatch] = None, **kw) -> Comparison:
    """Monte Carlo ``E exp(-q int Y)`` over full lifetimes against ``exp(-Phi(q) y0)``."""
    if not q > 0:
        raise ValueError("q must be positive")
    if batch is None:
        batch = simulate_csbp(y0, trials, (), stream, alpha=alpha, to_extinction=True, **kw)
    if not np.all(np.isfinite(batch.extinction)):
        raise ValueError("paths were not run to extinction")
    return compare_mean(np.exp(-q * batch.integral), integral_laplace(y0, q, alpha), label=f"q={q!r}")


def csbp_one_step_mean_change(y0: float, alpha: float = 1.5, trials: int = 10 ** 4,
                              stream=0, **kw) -> tuple[float, float]:
    """Monte Carlo ``E|Y_1 - y0|`` and its standard error."""
    if trials < 1000:
        raise ValueError("use at least 1000 trials")
    if y0 == 0:
        return 0.0, 0.0
    y1 = simulate_csbp(y0, trials, [1.0], stream, alpha=alpha, **kw).records[1.0]
    d = np.abs(y1 - y0)
    return float(d.mean()), float(d.std(ddof=1) / np.sqrt(trials))
