"""Boundary-length bookkeeping for the delta-approximation of QLE(8/3, 0).

Exploration proceeds in necklaces, each worth ``delta`` units of quantum
natural time. A necklace is driven by two independent spectrally positive
3/2-stable paths ``L`` and ``R`` (left and right boundary-length changes,
each with half the Lévy density of the unit-scale process, so that
``L + R`` has Laplace exponent ``lam^(3/2)``). Its top and bottom lengths
are

    T = -(inf L + inf R),    B = (L_delta + R_delta) + T,

so that ``B - T`` is the boundary-length increment. All lengths are
rounded to multiples of ``2^-32``; sums and differences of such numbers
are exact in binary64 as long as they stay below ``2^21``, which makes the
conservation identity hold bit for bit.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .core import CadlagPath, ExcursionSample, as_generator, fmt_float
from .csbp import ABSORPTION_FLOOR, _log_mean_clock, u_t
from .stable_levy import Side, StableSpec, stable_standard, unit_scale_coefficient

QUANTUM = 2.0 ** -32
LEDGER_HEADER = ("j", "X_before", "X_after", "T", "B", "glue_pos", "hit_mask")


def quantize(x):
    """Round to the nearest multiple of ``2^-32``."""
    return np.round(np.asarray(x, dtype=float) / QUANTUM) * QUANTUM


def _floor_q(x):
    return np.floor(np.asarray(x, dtype=float) / QUANTUM) * QUANTUM


def side_spec(alpha: float = 1.5) -> StableSpec:
    """Law of each of the two boundary sides: half the unit-scale density."""
    return StableSpec(alpha, Side.UP, unit_scale_coefficient(alpha) / 2.0)


# ----------------------------------------------------------------------------
# necklace increments

@dataclass(frozen=True)
class NecklaceDraws:
    """Per-necklace summaries of the side paths, shape ``(runs, n)``."""

    inc_left: np.ndarray
    inc_right: np.ndarray
    inf_left: np.ndarray
    inf_right: np.ndarray
    min_sum: np.ndarray
    left_paths: Optional[np.ndarray] = None
    right_paths: Optional[np.ndarray] = None

    @property
    def top(self) -> np.ndarray:
        return -(self.inf_left + self.inf_right)


def necklace_draws(runs: int, n: int, delta: float, substeps: int, rng,
                   keep_paths: bool = False, alpha: float = 1.5) -> NecklaceDraws:
    """Sample both side paths of ``n`` necklaces for each of ``runs`` runs.

    Each side is sampled on ``substeps`` equal sub-intervals with exact
    stable increments; infima are taken over the sub-grid, including the
    starting point 0.
    """
    spec = side_spec(alpha)
    scale = (spec.laplace_scale * delta / substeps) ** (1.0 / alpha)

    def side():
        inc = quantize(scale * stable_standard(rng, alpha, (runs, n, substeps)))
        path = np.cumsum(inc, axis=2)
        return path

    lp, rp = side(), side()
    zero = np.zeros((runs, n))
    out = NecklaceDraws(
        inc_left=lp[:, :, -1], inc_right=rp[:, :, -1],
        inf_left=np.minimum(zero, lp.min(axis=2)), inf_right=np.minimum(zero, rp.min(axis=2)),
        min_sum=np.minimum(zero, (lp + rp).min(axis=2)),
        left_paths=lp if keep_paths else None, right_paths=rp if keep_paths else None)
    return out


# ----------------------------------------------------------------------------
# ledgers

@dataclass(frozen=True)
class NecklaceRecord:
    j: int
    left_path: CadlagPath
    right_path: CadlagPath
    T: float
    B: float
    X_before: float
    X_after: float


@dataclass(frozen=True)
class NecklaceLedger:
    """Necklace records of one exploration run.

    ``left_paths[j]`` and ``right_paths[j]`` hold the side paths of
    necklace ``j`` on its sub-grid (without the leading 0). ``terminal``
    is True when the boundary length hit 0 during the necklace after the
    last record; that necklace is not recorded.
    """

    delta: float
    x0: float
    x_before: np.ndarray
    x_after: np.ndarray
    top: np.ndarray
    bottom: np.ndarray
    left_paths: np.ndarray
    right_paths: np.ndarray
    terminal: bool = False

    def __post_init__(self):
        arrs = {}
        for name in ("x_before", "x_after", "top", "bottom"):
            a = np.array(getattr(self, name), dtype=float).ravel()
            a.setflags(write=False)
            arrs[name] = a
            object.__setattr__(self, name, a)
        for name in ("left_paths", "right_paths"):
            a = np.array(getattr(self, name), dtype=float)
            width = a.shape[-1] if a.ndim == 2 else (a.size // max(arrs["top"].size, 1))
            a = a.reshape(arrs["top"].size, width)
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        n = arrs["top"].size
        if any(a.size != n for a in arrs.values()):
            raise ValueError("ledger columns differ in length")
        if np.any(arrs["top"] < 0) or np.any(arrs["bottom"] < 0):
            raise ValueError("top and bottom lengths must be nonnegative")
        if np.any(arrs["bottom"] - arrs["top"] != arrs["x_after"] - arrs["x_before"]):
            raise ValueError("ledger violates B - T = X_after - X_before")
        if n and (arrs["x_before"][0] != self.x0 or np.any(arrs["x_before"][1:] != arrs["x_after"][:-1])):
            raise ValueError("consecutive records do not chain")

    def __len__(self) -> int:
        return int(self.top.size)

    @property
    def substeps(self) -> int:
        return int(self.left_paths.shape[1])

    def record(self, j: int) -> NecklaceRecord:
        h = self.delta / self.substeps

        def path(p):
            return CadlagPath(0.0, h, np.concatenate([[0.0], p]))

        return NecklaceRecord(j, path(self.left_paths[j]), path(self.right_paths[j]),
                              float(self.top[j]), float(self.bottom[j]),
                              float(self.x_before[j]), float(self.x_after[j]))

    @property
    def records(self) -> list[NecklaceRecord]:
        return [self.record(j) for j in range(len(self))]

    def boundary_path(self) -> CadlagPath:
        """Boundary length on the necklace grid ``j * delta``; absorbed runs
        end with a 0 at the next grid time."""
        vals = np.concatenate([[self.x0], self.x_after])
        if self.terminal:
            vals = np.append(vals, 0.0)
            return CadlagPath(0.0, self.delta, vals, terminal=self.delta * (vals.size - 1))
        return CadlagPath(0.0, self.delta, vals)


def ledger_from_paths(delta: float, x0: float, left_paths: np.ndarray,
                      right_paths: Optional[np.ndarray] = None) -> NecklaceLedger:
    """Assemble a ledger from side paths given on each necklace's sub-grid.

    ``left_paths`` has one row per necklace; ``right_paths`` defaults to 0.
    Records stop before the first necklace during which the boundary
    length reaches 0.
    """
    lp = quantize(np.atleast_2d(left_paths))
    rp = np.zeros_like(lp) if right_paths is None else quantize(np.atleast_2d(right_paths))
    if lp.shape != rp.shape:
        raise ValueError("left and right paths differ in shape")
    x0 = float(quantize(x0))
    if not x0 > 0:
        raise ValueError("initial boundary length must be positive")
    zero = np.zeros(lp.shape[0])
    inc = lp[:, -1] + rp[:, -1]
    xb = x0 + np.concatenate([[0.0], np.cumsum(inc)[:-1]])
    min_sum = np.minimum(zero, (lp + rp).min(axis=1))
    dead = np.flatnonzero(xb + min_sum <= 0)
    stop = int(dead[0]) if dead.size else lp.shape[0]
    lp, rp, xb = lp[:stop], rp[:stop], xb[:stop]
    top = -(np.minimum(zero[:stop], lp.min(axis=1)) + np.minimum(zero[:stop], rp.min(axis=1)))
    xa = xb + lp[:, -1] + rp[:, -1]
    bottom = (xa - xb) + top
    return NecklaceLedger(delta, x0, xb, xa, top, bottom, lp, rp, terminal=bool(dead.size))


def build_necklace_ledger(delta: float, n: int, x0: float, dt: Optional[float] = None,
                          stream=0, substeps: Optional[int] = None) -> NecklaceLedger:
    """Run ``n`` necklaces from boundary length ``x0``.

    The side paths are resolved on steps of ``dt`` (rounded to divide
    ``delta``), or on ``substeps`` equal steps (default 8).
    """
    if not (delta > 0 and x0 > 0) or n < 1:
        raise ValueError("need delta > 0, x0 > 0 and n >= 1")
    if substeps is None:
        substeps = 8 if dt is None else max(1, int(round(delta / dt)))
    rng = as_generator(stream)
    d = necklace_draws(1, n, delta, substeps, rng, keep_paths=True)
    return ledger_from_paths(delta, x0, d.left_paths[0], d.right_paths[0])


def calibration_constant(tops: np.ndarray, delta: float) -> float:
    """``E[T] / delta^(2/3)``, the constant in the hit probability."""
    t = np.asarray(tops, dtype=float)
    return float(t.mean() / delta ** (2.0 / 3.0))


def write_ledger_csv(ledger: NecklaceLedger, destination, walk: Optional["MarkedWalk"] = None) -> None:
    lines = [",".join(LEDGER_HEADER)]
    for j in range(len(ledger)):
        glue = "" if walk is None else fmt_float(walk.glue[j])
        mask = 0 if walk is None else int(np.sum(walk.hits[j] * (1 << np.arange(walk.k))))
        lines.append(",".join([str(j), fmt_float(ledger.x_before[j]), fmt_float(ledger.x_after[j]),
                               fmt_float(ledger.top[j]), fmt_float(ledger.bottom[j]), glue, str(mask)]))
    Path(destination).write_text("\n".join(lines) + "\n")


# ----------------------------------------------------------------------------
# marked points

@dataclass(frozen=True)
class MarkedBoundary:
    """Boundary circle with ``k`` labelled marks.

    ``segment_lengths[i]`` is the counterclockwise length from mark ``i``
    to mark ``i + 1`` (cyclically).
    """

    circumference: float
    marks: np.ndarray
    segment_lengths: np.ndarray

    def __post_init__(self):
        m = np.array(self.marks, dtype=float)
        s = np.array(self.segment_lengths, dtype=float)
        if np.any(s < 0):
            raise ValueError("segment lengths must be nonnegative")
        if self.circumference > 0 and np.any((m < 0) | (m >= self.circumference)):
            raise ValueError("marks must lie in [0, circumference)")
        if abs(s.sum() - self.circumference) > 1e-9 * max(1.0, self.circumference):
            raise ValueError("segments do not sum to the circumference")
        object.__setattr__(self, "marks", m)
        object.__setattr__(self, "segment_lengths", s)

    @property
    def sorted_marks(self) -> np.ndarray:
        return np.sort(self.marks)


class _WalkState:
    """Vectorized marks of many runs; rows are runs, columns are labels."""

    def __init__(self, x: np.ndarray, k: int, rng, spacing: str = "uniform"):
        self.k = k
        self.x = np.array(x, dtype=float)
        if spacing == "uniform":
            # labels follow the counterclockwise order, which hits preserve
            u = np.sort(rng.random((self.x.size, k)), axis=1)
        elif spacing == "equal":
            # equally spaced labels under a uniform random rotation
            u = np.mod(rng.random((self.x.size, 1)) + np.arange(k) / k, 1.0)
        else:
            raise ValueError("spacing must be 'uniform' or 'equal'")
        self.pos = _floor_q(u * self.x[:, None])
        # label of the segment that holds the whole circle once every mark
        # has merged; -1 while at least two marks are apart
        self.full = np.full(self.x.size, 0 if k == 1 else -1)
        if k > 1:
            same = np.all(self.pos == self.pos[:, :1], axis=1)
            self.full[same] = k - 1

    def compact(self, keep: np.ndarray) -> None:
        self.x, self.pos, self.full = self.x[keep], self.pos[keep], self.full[keep]

    def segments(self) -> np.ndarray:
        x = self.x
        seg = np.zeros_like(self.pos)
        if self.k > 1:
            nxt = np.roll(self.pos, -1, axis=1)
            ok = x > 0
            seg[ok] = np.mod(nxt[ok] - self.pos[ok], x[ok, None])
        merged = self.full >= 0
        seg[merged] = 0.0
        rows = np.flatnonzero(merged)
        seg[rows, self.full[rows]] = x[rows]
        return seg

    def step(self, top, x_after, alive, rng):
        """Glue one necklace in every live run; returns (glue, hits)."""
        x = self.x
        k = self.k
        hits = np.zeros((x.size, k), dtype=bool)
        glue = np.full(x.size, np.nan)
        live = np.flatnonzero(alive & (x > 0))
        if live.size:
            X = x[live]
            g = np.minimum(_floor_q(rng.random(live.size) * X), X - QUANTUM)
            g = np.maximum(g, 0.0)
            tp = np.minimum(top[live], X)
            xa = x_after[live]
            bp = xa - X + tp
            o = np.mod(self.pos[live] - g[:, None], X[:, None])
            hit = o < tp[:, None]
            v = _floor_q(rng.random(live.size) * bp)
            newoff = np.where(hit, v[:, None], o - tp[:, None] + bp[:, None])
            pos = np.where(xa[:, None] > 0, np.mod(g[:, None] + newoff, np.where(xa > 0, xa, 1.0)[:, None]), 0.0)
            # segment surviving a total merge: the one containing the first
            # point after the glued arc
            if k > 1:
                allhit = hit.all(axis=1) & (self.full[live] < 0)
                for r in np.flatnonzero(allhit):
                    oo = o[r]
                    omax = oo.max()
                    cand = np.flatnonzero((oo == omax) & (np.roll(oo, -1) != omax))
                    self.full[live[r]] = int(cand[0]) if cand.size else k - 1
            self.pos[live] = pos
            hits[live] = hit
            glue[live] = g
        dead = ~alive
        self.x = np.where(alive, x_after, np.where(dead, 0.0, x))
        self.pos[dead] = 0.0
        return glue, hits


@dataclass(frozen=True)
class MarkedWalk:
    """States of the marks after each necklace (index 0 is the start)."""

    delta: float
    circumference: np.ndarray
    positions: np.ndarray
    segments: np.ndarray
    hits: np.ndarray
    glue: np.ndarray

    @property
    def k(self) -> int:
        return int(self.positions.shape[1])

    def __len__(self) -> int:
        return int(self.circumference.size)

    def __getitem__(self, j: int) -> MarkedBoundary:
        return MarkedBoundary(float(self.circumference[j]), self.positions[j], self.segments[j])

    def hit_counts(self) -> np.ndarray:
        return self.hits.sum(axis=0)


def marked_point_walk(ledger: NecklaceLedger, k: int, stream=0) -> MarkedWalk:
    """Carry ``k`` marks, initially uniform on the boundary, through the ledger.

    For each necklace a glue position is uniform on the current boundary.
    The top replaces the arc of length ``min(T, X)`` counterclockwise from
    it, and the bottom is inserted in its place. Marks inside the replaced
    arc move to one uniform point of the bottom; a mark exactly at the glue
    position counts as inside.
    """
    if k < 1:
        raise ValueError("need at least one mark")
    if not ledger.x0 > 0:
        raise ValueError("cannot place marks on a zero circumference")
    rng = as_generator(stream)
    st = _WalkState(np.array([ledger.x0]), k, rng)
    n = len(ledger)
    circ = np.empty(n + 1)
    pos = np.empty((n + 1, k))
    seg = np.empty((n + 1, k))
    hits = np.zeros((n, k), dtype=bool)
    glue = np.empty(n)
    circ[0], pos[0], seg[0] = ledger.x0, st.pos[0], st.segments()[0]
    alive = np.array([True])
    for j in range(n):
        g, h = st.step(ledger.top[j:j + 1], ledger.x_after[j:j + 1], alive, rng)
        circ[j + 1], pos[j + 1], seg[j + 1] = st.x[0], st.pos[0], st.segments()[0]
        hits[j], glue[j] = h[0], g[0]
    return MarkedWalk(ledger.delta, circ, pos, seg, hits, glue)


# ----------------------------------------------------------------------------
# quantum distance time

@dataclass(frozen=True)
class TimeMap:
    """Piecewise-linear map between quantum natural time and quantum
    distance time, given at the natural grid times."""

    natural: np.ndarray
    distance: np.ndarray

    def to_distance(self, t) -> np.ndarray:
        return np.interp(t, self.natural, self.distance)

    def to_natural(self, s) -> np.ndarray:
        return np.interp(s, self.distance, self.natural)


def distance_time_change(boundary: CadlagPath, floor: float = ABSORPTION_FLOOR) -> TimeMap:
    """``int_0^t ds / X_s`` by left-endpoint sums on the path grid, up to
    the first grid point where the boundary length vanishes.

    Raises
    ------
    ValueError
        If the boundary is nonpositive before its terminal time.
    """
    x = boundary.values
    bad = np.flatnonzero(x <= floor)
    stop = int(bad[0]) if bad.size else x.size - 1
    if bad.size and boundary.terminal is not None and boundary.t0 + stop * boundary.dt < boundary.terminal - 1e-9 * boundary.dt:
        raise ValueError("boundary length vanishes before the terminal time")
    if bad.size and boundary.terminal is None:
        raise ValueError("boundary length vanishes on an unterminated path")
    d = np.concatenate([[0.0], np.cumsum(boundary.dt / x[:stop])])
    nat = boundary.t0 + boundary.dt * np.arange(d.size)
    return TimeMap(nat, boundary.t0 + d)


def rescale_boundary(path: CadlagPath, ell: float) -> CadlagPath:
    """Multiply boundary lengths by ``ell``; quantum natural time then
    stretches by ``ell^(3/2)``."""
    return CadlagPath(path.t0 * ell ** 1.5, path.dt * ell ** 1.5, path.values * ell,
                      np.column_stack([path.jumps[:, 0] * ell ** 1.5, path.jumps[:, 1] * ell]),
                      path.alpha, None if path.terminal is None else path.terminal * ell ** 1.5)


def step_count_distance(walk: MarkedWalk, ledger: NecklaceLedger, c: float,
                        mark: int = 0) -> CadlagPath:
    """``c^-1 delta^(1/3)`` times the running number of times ``mark`` moved,
    on the necklace grid of quantum natural time."""
    if not c > 0:
        raise ValueError("calibration constant must be positive")
    counts = np.concatenate([[0], np.cumsum(walk.hits[:, mark])])
    return CadlagPath(0.0, ledger.delta, counts * ledger.delta ** (1.0 / 3.0) / c)


def l2_deviation(step_path: CadlagPath, tmap: TimeMap) -> float:
    """Time-averaged squared gap between a step-count path and the
    distance clock on their common natural-time grid."""
    n = min(len(step_path), tmap.distance.size)
    d = step_path.values[:n] - (tmap.distance[:n] - tmap.distance[0])
    return float(np.mean(d ** 2))


def segment_length_processes(walk: MarkedWalk, tmap: TimeMap,
                             dt: Optional[float] = None) -> list[CadlagPath]:
    """Segment lengths as functions of quantum distance time.

    Sampled on a uniform distance grid of step ``dt`` (default: the
    smallest necklace duration in distance time); each grid time takes
    the value after the last necklace started at or before it.
    """
    if walk.k < 2:
        raise ValueError("segment processes need at least two marks")
    D = tmap.distance - tmap.distance[0]
    m = min(D.size, len(walk))
    D = D[:m]
    if dt is None:
        steps = np.diff(D)
        dt = float(steps[steps > 0].min()) if np.any(steps > 0) else 1.0
    n = int(math.floor(D[-1] / dt + 1e-9)) + 1
    grid = dt * np.arange(n)
    idx = np.searchsorted(D, grid, side="right") - 1
    absorbed = walk.circumference[m - 1] == 0
    out = []
    for i in range(walk.k):
        vals = walk.segments[idx, i]
        term = None
        z = np.flatnonzero(vals == 0)
        if absorbed and z.size and np.all(vals[z[0]:] == 0):
            term = float(grid[z[0]])
        out.append(CadlagPath(0.0, dt, vals, terminal=term))
    return out


# ----------------------------------------------------------------------------
# reverse exploration along an excursion

def block_paths(values: np.ndarray, dt: float, delta: float, first: Optional[int] = None
                ) -> tuple[np.ndarray, float]:
    """Cut a grid path into consecutive blocks of ``delta``.

    The first block has ``first`` grid steps (default: a full block) and
    every later block is full, except possibly the last. Each row holds
    the path minus its value at the block start, on the block's sub-grid;
    short blocks are padded with their final value.

    Returns
    -------
    blocks, residual
        ``residual`` is the duration of the one block that is not full
        (0 when every block is full).
    """
    per = int(round(delta / dt))
    if per < 1 or abs(per * dt - delta) > 1e-9 * delta:
        raise ValueError("delta must be a whole number of grid steps")
    n = values.size - 1
    if n < 1:
        raise ValueError("path too short")
    first = per if first is None else int(first)
    if not 1 <= first <= per:
        raise ValueError("first block must have between 1 and delta/dt steps")
    cuts = [0]
    pos = min(first, n)
    while True:
        cuts.append(pos)
        if pos >= n:
            break
        pos = min(pos + per, n)
    rows = []
    short = 0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        seg = values[lo + 1:hi + 1] - values[lo]
        if seg.size < per:
            short = seg.size
            seg = np.concatenate([seg, np.full(per - seg.size, seg[-1])])
        rows.append(seg)
    return np.array(rows), short * dt


def reverse_delta_exploration(excursion: ExcursionSample, delta: float,
                              anchor: str = "end") -> tuple[NecklaceLedger, float]:
    """Ledger of the time-reversed excursion in blocks of ``delta``.

    With ``anchor="end"`` the blocks start at the excursion's terminal end,
    so the block that is not full (length ``lifetime mod delta``) comes
    last in reversed time. With ``anchor="start"`` the blocks are laid
    from the excursion's start, so the short block comes first in reversed
    time. A single boundary path carries no left/right split; each block's
    increment is put on the left side.

    Returns
    -------
    ledger, residual
    """
    p = excursion.path
    if excursion.lifetime < delta - 1e-12:
        raise ValueError("excursion shorter than delta")
    rev = quantize(p.values[::-1])
    per = int(round(delta / p.dt))
    n = rev.size - 1
    if anchor == "end":
        first = None
    elif anchor == "start":
        first = n % per or per
    else:
        raise ValueError("anchor must be 'end' or 'start'")
    blocks, resid = block_paths(rev, p.dt, delta, first)
    x0 = max(float(rev[0]), QUANTUM)
    return _unstopped_ledger(delta, x0, blocks), float(resid)


def _unstopped_ledger(delta: float, x0: float, blocks: np.ndarray) -> NecklaceLedger:
    lp = quantize(blocks)
    rp = np.zeros_like(lp)
    inc = lp[:, -1]
    xb = x0 + np.concatenate([[0.0], np.cumsum(inc)[:-1]])
    top = -np.minimum(0.0, lp.min(axis=1))
    xa = xb + inc
    return NecklaceLedger(delta, x0, xb, xa, top, (xa - xb) + top, lp, rp, terminal=False)


def block_boundary_values(excursion: ExcursionSample, delta: float, anchor: str) -> np.ndarray:
    """Boundary length at the block boundaries of the reversed excursion."""
    led, _ = reverse_delta_exploration(excursion, delta, anchor)
    return np.concatenate([[led.x0], led.x_after])


# ----------------------------------------------------------------------------
# batched explorations

@dataclass
class ExplorationBatch:
    """Summaries of many independent explorations."""

    delta: float
    x0: float
    k: int
    hits: np.ndarray
    natural_time: np.ndarray
    distance_time: np.ndarray
    absorbed: np.ndarray
    top_sum: float
    top_count: int
    initial_segments: np.ndarray
    distance_times: tuple = ()
    segments_at: Optional[np.ndarray] = None
    boundary_at: Optional[np.ndarray] = None
    covered: Optional[np.ndarray] = None
    count_path: Optional[np.ndarray] = None
    clock_path: Optional[np.ndarray] = None
    levy_time_at: Optional[np.ndarray] = None

    @property
    def calibration(self) -> float:
        return self.top_sum / self.top_count / self.delta ** (2.0 / 3.0)


def explore_batch(runs: int, x0: float, delta: float, k: int = 1, stream=0,
                  necklaces: Optional[int] = None, distance_times: Sequence[float] = (),
                  substeps: int = 8, keep_paths: bool = False,
                  max_necklaces: Optional[int] = None,
                  budget: int = 4_000_000, spacing: str = "uniform") -> ExplorationBatch:
    """Run ``runs`` independent explorations with ``k`` marks each.

    Either a fixed number of ``necklaces`` is run, or exploration continues
    until each run is absorbed or its distance clock passes every entry of
    ``distance_times``. With ``keep_paths`` the running hit count of mark 0
    and the distance clock are kept for every necklace (fixed-length runs
    only).

    At each distance time the segment lengths are recorded together with
    each segment's Levy time, the integral of its length against the
    distance clock. ``spacing="equal"`` starts the marks equally spaced
    instead of independently uniform.
    """
    if necklaces is None and not len(distance_times):
        raise ValueError("give a necklace count or distance times")
    rng = as_generator(stream)
    times = np.array(sorted(float(t) for t in distance_times))
    horizon = times.max() if times.size else np.inf
    x0q = float(quantize(x0))
    st = _WalkState(np.full(runs, x0q), k, rng, spacing)
    init_seg = st.segments().copy()
    ids = np.arange(runs)
    D = np.zeros(runs)
    nat = np.zeros(runs)
    hits = np.zeros((runs, k), dtype=np.int64)
    absorbed = np.zeros(runs, dtype=bool)
    seg_at = np.full((runs, times.size, k), np.nan)
    x_at = np.full((runs, times.size), np.nan)
    theta = np.zeros((runs, k))
    theta_at = np.full((runs, times.size, k), np.nan)
    top_sum, top_count = 0.0, 0
    limit = necklaces if necklaces is not None else (max_necklaces or sys.maxsize)
    keep = keep_paths and necklaces is not None
    cpath = np.zeros((runs, limit + 1), dtype=np.int32) if keep else None
    dpath = np.zeros((runs, limit + 1)) if keep else None
    done = 0
    while done < limit and ids.size:
        m = min(max(1, budget // (ids.size * substeps)), limit - done)
        d = necklace_draws(ids.size, m, delta, substeps, rng)
        rows = np.arange(ids.size)
        for jj in range(m):
            x = st.x
            Dl = D[ids]
            alive = (x > 0) & ~absorbed[ids] & (Dl <= horizon)
            if not alive.any():
                ids = ids[:0]
                break
            dD = np.where(alive, delta / np.where(x > 0, x, 1.0), 0.0)
            if times.size:
                seg = st.segments()
                for ti, t in enumerate(times):
                    sel = np.flatnonzero(alive & (Dl <= t) & (t < Dl + dD))
                    seg_at[ids[sel], ti] = seg[sel]
                    x_at[ids[sel], ti] = x[sel]
                    theta_at[ids[sel], ti] = theta[ids[sel]]
                theta[ids] += seg * dD[:, None]
            r = rows
            die = alive & (x + d.min_sum[r, jj] <= 0)
            survive = alive & ~die
            top = d.top[r, jj]
            top_sum += float(top[alive].sum())
            top_count += int(alive.sum())
            x_after = np.where(survive, x + d.inc_left[r, jj] + d.inc_right[r, jj], 0.0)
            _, h = st.step(top, x_after, survive, rng)
            hits[ids] += h
            absorbed[ids[die]] = True
            D[ids] = Dl + dD
            nat[ids] += np.where(alive, delta, 0.0)
            if keep:
                cpath[ids, done + jj + 1] = hits[ids, 0]
                dpath[ids, done + jj + 1] = D[ids]
            still = survive & (D[ids] <= horizon)
            if not keep and still.sum() < 0.6 * still.size:
                st.compact(still)
                ids, rows = ids[still], rows[still]
        done += m
    covered = None
    if times.size:
        for ti, t in enumerate(times):
            gone = np.isnan(x_at[:, ti]) & absorbed & (D <= t)
            seg_at[gone, ti] = 0.0
            x_at[gone, ti] = 0.0
            theta_at[gone, ti] = theta[gone]
        covered = ~np.isnan(x_at)
    return ExplorationBatch(delta, x0q, k, hits, nat, D, absorbed, top_sum, top_count, init_seg,
                            tuple(times), seg_at, x_at, covered, cpath, dpath,
                            theta_at if times.size else None)


def hit_probability_check(runs: int, x0: float, delta: float, n: int, stream=0,
                          substeps: int = 8) -> tuple[float, float, float]:
    """Empirical per-necklace hit frequency of one mark against
    ``E[min(T, X)/X]`` over the same necklaces.

    Returns ``(empirical, predicted, stderr)``.
    """
    rng = as_generator(stream)
    st = _WalkState(np.full(runs, float(quantize(x0))), 1, rng)
    emp, pred = [], []
    d = necklace_draws(runs, n, delta, substeps, rng)
    for j in range(n):
        x = st.x
        alive = x > 0
        die = alive & (x + d.min_sum[:, j] <= 0)
        survive = alive & ~die
        top = d.top[:, j]
        p = np.minimum(top, np.where(alive, x, 1.0)) / np.where(alive, x, 1.0)
        _, h = st.step(top, np.where(survive, x + d.inc_left[:, j] + d.inc_right[:, j], 0.0),
                       survive, rng)
        emp.append(h[survive, 0].astype(float))
        pred.append(p[survive])
    e = np.concatenate(emp)
    q = np.concatenate(pred)
    return float(e.mean()), float(q.mean()), float(np.sqrt(q.mean() * (1 - q.mean()) / e.size))


# ----------------------------------------------------------------------------
# scale-free CSBP runs and the boundary length seen backward from extinction

def final_window_sups(y0: float, n_paths: int, windows: Sequence[float], stream=0,
                      alpha: float = 1.5, kappa: float = 0.02, ring: int = 8192,
                      floor: float = ABSORPTION_FLOOR) -> np.ndarray:
    """``sup`` of a 3/2-CSBP over ``[zeta - r, zeta]`` for each window ``r``,
    where ``zeta`` is the extinction time.

    Read backward from ``zeta``, the CSBP is the boundary length of a
    reverse metric exploration in quantum distance time. Steps are
    ``kappa * Y^(alpha - 1)`` with no absolute cap, so the scheme is exactly
    covariant under ``Y -> c Y``, ``t -> c^(alpha-1) t``. The last ``ring``
    steps of every path are kept; a window reaching further back raises.

    Returns
    -------
    ndarray of shape ``(n_paths, len(windows))``
    """
    rng = as_generator(stream)
    w = np.asarray(windows, dtype=float)
    y = np.full(n_paths, float(y0))
    clock = np.zeros(n_paths)
    t_buf = np.full((n_paths, ring), -np.inf)
    v_buf = np.zeros((n_paths, ring))
    slot = np.zeros(n_paths, dtype=np.int64)
    out = np.full((n_paths, w.size), np.nan)
    active = np.arange(n_paths)
    while active.size:
        yy = y[active]
        s = kappa * yy ** (alpha - 1)
        ny = yy + (yy * s) ** (1 / alpha) * stable_standard(rng, alpha, active.size)
        dead = ny <= floor
        tau = _log_mean_clock(s, yy, ny, dead)
        ny[dead] = 0.0
        c1 = clock[active] + tau
        sl = slot[active] % ring
        # each step is summarized by its end time and the larger endpoint
        t_buf[active, sl] = c1
        v_buf[active, sl] = np.maximum(yy, ny)
        slot[active] += 1
        y[active] = ny
        clock[active] = c1
        for r in np.flatnonzero(dead):
            p = active[r]
            zeta = c1[r]
            tb, vb = t_buf[p], v_buf[p]
            if slot[p] > ring and zeta - np.min(tb) < w.max():
                raise RuntimeError("ring buffer too short for the requested window")
            for wi, rr in enumerate(w):
                out[p, wi] = vb[tb > zeta - rr].max()
        active = active[~dead]
    return out


def sup_collapse_samples(r: float, n_paths: int, y0: float = 25.0, stream=0,
                         kappa: float = 0.02) -> np.ndarray:
    """``sup_{s <= r} B_s / r^2`` for ``B`` the CSBP read backward from
    extinction."""
    return final_window_sups(y0, n_paths, [r], stream, kappa=kappa)[:, 0] / r ** 2


# ----------------------------------------------------------------------------
# segment checks

def laplace_residuals(segments_at: np.ndarray, initial: np.ndarray, t: float, lam: float,
                      alpha: float = 1.5) -> np.ndarray:
    """``exp(-lam Y_t) - exp(-Y_0 u_t(lam))`` per run and segment.

    Given the initial lengths these residuals have mean 0 when each
    segment is a CSBP.
    """
    return np.exp(-lam * segments_at) - np.exp(-initial * u_t(lam, t, alpha))
