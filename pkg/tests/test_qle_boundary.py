import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lqg_lab.core import CadlagPath, ExcursionSample
from lqg_lab.qle_boundary import (LEDGER_HEADER, QUANTUM, MarkedBoundary, NecklaceLedger,
                                  block_boundary_values, block_paths, build_necklace_ledger,
                                  calibration_constant, distance_time_change, explore_batch,
                                  final_window_sups, hit_probability_check, laplace_residuals,
                                  ledger_from_paths, marked_point_walk, necklace_draws, quantize,
                                  rescale_boundary, reverse_delta_exploration,
                                  segment_length_processes, step_count_distance, write_ledger_csv)


@settings(max_examples=30)
@given(st.integers(0, 2 ** 31), st.sampled_from([1e-1, 1e-2, 1e-3]), st.floats(0.05, 5.0))
def test_ledger_conservation_exact(seed, delta, x0):
    led = build_necklace_ledger(delta, 60, x0, stream=seed)
    assert np.all(led.bottom - led.top == led.x_after - led.x_before)
    assert np.all(led.top >= 0) and np.all(led.bottom >= 0)
    assert np.all(led.x_after >= 0)
    assert np.all(led.x_before[1:] == led.x_after[:-1])
    if len(led) < 60:
        assert led.terminal
        assert led.boundary_path().values[-1] == 0


def test_ledger_rejects_broken_records():
    led = build_necklace_ledger(1e-2, 10, 1.0, stream=1)
    with pytest.raises(ValueError):
        NecklaceLedger(led.delta, led.x0, led.x_before, led.x_after, led.top, led.bottom + QUANTUM,
                       led.left_paths, led.right_paths)
    with pytest.raises(ValueError):
        NecklaceLedger(led.delta, led.x0 + 1, led.x_before, led.x_after, led.top, led.bottom,
                       led.left_paths, led.right_paths)
    with pytest.raises(ValueError):
        build_necklace_ledger(1e-2, 0, 1.0)


def test_records_and_paths():
    led = build_necklace_ledger(1e-2, 5, 1.0, stream=2, substeps=4)
    r = led.record(3)
    assert len(r.left_path) == 5 and r.left_path.values[0] == 0
    assert r.T == pytest.approx(-(min(0, r.left_path.values.min()) + min(0, r.right_path.values.min())))
    assert len(led.records) == len(led)


def test_absorbed_ledger_stops():
    left = np.array([[-0.2, -0.1], [-0.5, -0.9], [0.1, 0.2]])
    led = ledger_from_paths(0.1, 1.0, left)
    assert len(led) == 1 and led.terminal
    np.testing.assert_array_equal(led.boundary_path().values, [1.0, float(quantize(0.9)), 0.0])


def test_calibration_is_delta_independent():
    rng = np.random.default_rng(3)
    c = [calibration_constant(necklace_draws(1, 100_000, d, 8, rng).top, d) for d in (1e-2, 1e-3)]
    assert abs(c[0] / c[1] - 1) < 0.05


def _monotone_ledger(n=50, x0=1.0):
    # nondecreasing side paths: every top length is 0
    inc = np.full((n, 4), 0.001)
    return ledger_from_paths(0.01, x0, np.cumsum(inc, axis=1))


def test_degenerate_necklaces_keep_mark_fixed():
    led = _monotone_ledger()
    assert np.all(led.top == 0)
    w = marked_point_walk(led, 1, stream=4)
    # coordinates shift when length is inserted before the mark, but the
    # mark itself is never carried off
    assert w.hit_counts()[0] == 0 and not w.hits.any()
    np.testing.assert_array_equal(w.segments[:, 0], w.circumference)


def test_partition_identity():
    led = build_necklace_ledger(1e-3, 500, 1.0, stream=5)
    w = marked_point_walk(led, 3, stream=6)
    for j in range(len(w)):
        assert abs(w.segments[j].sum() - w.circumference[j]) <= 1e-12 * max(1.0, w.circumference[j])
    b = w[len(w) // 2]
    assert isinstance(b, MarkedBoundary) and b.sorted_marks.size == 3


def test_marked_boundary_validation():
    with pytest.raises(ValueError):
        MarkedBoundary(1.0, [0.1, 0.5], [0.4, 0.4])
    with pytest.raises(ValueError):
        MarkedBoundary(1.0, [1.5], [1.0])


def test_constant_boundary_time_map():
    p = CadlagPath(0.0, 0.01, np.full(101, 2.5))
    tm = distance_time_change(p)
    np.testing.assert_allclose(tm.distance, tm.natural / 2.5)
    assert tm.to_natural(tm.to_distance(0.37)) == pytest.approx(0.37)


def test_constant_boundary_step_count_mean():
    # each necklace dips by h and recovers: X stays constant and T = h
    n, delta, h, X = 200, 0.01, 0.02, 1.0
    left = np.tile(np.array([-h, -h, 0.0, 0.0]), (n, 1))
    led = ledger_from_paths(delta, X, left)
    c = calibration_constant(led.top, delta)
    finals = np.array([step_count_distance(marked_point_walk(led, 1, stream=s), led, c).values[-1]
                       for s in range(300)])
    t = n * delta
    assert abs(finals.mean() - t / X) < 3 * finals.std(ddof=1) / math.sqrt(finals.size)


def test_time_map_errors():
    with pytest.raises(ValueError):
        distance_time_change(CadlagPath(0.0, 0.1, [1.0, 0.0, 1.0]))
    with pytest.raises(ValueError):
        step_count_distance(marked_point_walk(_monotone_ledger(), 1), _monotone_ledger(), 0.0)


@given(st.floats(0.1, 10.0))
def test_rescale_identities(ell):
    p = build_necklace_ledger(1e-2, 40, 1.0, stream=7).boundary_path()
    q = rescale_boundary(p, ell)
    np.testing.assert_allclose(q.values, p.values * ell)
    assert q.dt == pytest.approx(p.dt * ell ** 1.5)
    if p.terminal is None:
        d0 = distance_time_change(p).distance
        d1 = distance_time_change(q).distance
        np.testing.assert_allclose(d1, d0 * math.sqrt(ell), rtol=1e-12)


def test_segment_processes_partition():
    led = build_necklace_ledger(1e-3, 400, 1.0, stream=8)
    w = marked_point_walk(led, 2, stream=9)
    tm = distance_time_change(led.boundary_path())
    segs = segment_length_processes(w, tm)
    assert len(segs) == 2 and len(segs[0]) == len(segs[1])
    total = segs[0].values + segs[1].values
    idx = np.searchsorted(tm.distance - tm.distance[0], segs[0].times, side="right") - 1
    np.testing.assert_allclose(total, w.circumference[idx], rtol=1e-12)
    with pytest.raises(ValueError):
        segment_length_processes(marked_point_walk(led, 1), tm)


@given(st.integers(2, 300), st.integers(1, 20))
def test_block_count_and_residual(n, per):
    vals = np.arange(n + 1, dtype=float)
    blocks, resid = block_paths(vals, 0.5, per * 0.5)
    assert blocks.shape == (math.ceil(n / per), per)
    assert resid == pytest.approx((n % per) * 0.5)
    np.testing.assert_array_equal(blocks[0, : min(per, n)], np.arange(1, min(per, n) + 1))


def test_block_path_errors():
    with pytest.raises(ValueError):
        block_paths(np.zeros(10), 0.3, 0.5)
    with pytest.raises(ValueError):
        block_paths(np.zeros(10), 0.1, 0.5, first=9)


def _excursion():
    t = np.linspace(0, 1, 1001)
    v = np.sin(np.pi * t) * 2.0
    v[0] = v[-1] = 0.0
    return ExcursionSample(CadlagPath(0.0, 0.001, v), 1.0)


@pytest.mark.parametrize("anchor", ["end", "start"])
def test_reverse_exploration(anchor):
    e = _excursion()
    led, resid = reverse_delta_exploration(e, 0.03, anchor)
    assert resid == pytest.approx(0.01)
    vals = block_boundary_values(e, 0.03, anchor)
    assert vals[-1] == pytest.approx(0.0, abs=1e-9)
    first = 30 if anchor == "end" else 10
    assert vals[1] == pytest.approx(float(quantize(e.path.values[::-1][first])), abs=QUANTUM)
    with pytest.raises(ValueError):
        reverse_delta_exploration(e, 0.03, "middle")


def test_hit_probability_law():
    emp, pred, se = hit_probability_check(4000, 1.0, 1e-3, 50, stream=10)
    assert abs(emp - pred) < 3 * se


def test_ledger_csv(tmp_path):
    led = build_necklace_ledger(1e-2, 20, 1.0, stream=11)
    w = marked_point_walk(led, 2, stream=12)
    p = tmp_path / "ledger.csv"
    write_ledger_csv(led, p, w)
    rows = list(csv.reader(p.open()))
    assert tuple(rows[0]) == LEDGER_HEADER and len(rows) == len(led) + 1
    for r in rows[1:]:
        xb, xa, T, B = (float(v) for v in r[1:5])
        assert B - T == xa - xb
        assert 0 <= int(r[6]) < 4


class TestBatch:
    def test_equal_spacing_and_levy_time(self):
        b = explore_batch(200, 1.0, 1e-2, k=2, stream=13, distance_times=(0.1,), spacing="equal")
        np.testing.assert_allclose(b.initial_segments, 0.5, atol=2 * QUANTUM)
        assert b.levy_time_at.shape == (200, 1, 2)
        assert np.all(b.covered)
        # the two Levy times add up to the integral of the total length
        assert np.all(b.levy_time_at[:, 0, :].sum(axis=1) > 0)
        with pytest.raises(ValueError):
            explore_batch(10, 1.0, 1e-2, k=2, necklaces=5, spacing="random")
        with pytest.raises(ValueError):
            explore_batch(10, 1.0, 1e-2)

    def test_fixed_length_paths(self):
        b = explore_batch(50, 2.0, 1e-2, necklaces=30, stream=14, keep_paths=True)
        assert b.count_path.shape == (50, 31)
        assert np.all(np.diff(b.count_path, axis=1) >= 0)
        assert np.all(np.diff(b.clock_path, axis=1) >= 0)

    def test_laplace_residual_at_time_zero(self):
        y0 = np.array([[0.3, 0.7]])
        np.testing.assert_allclose(laplace_residuals(y0, y0, 0.0, 1.0), 0.0)


def test_final_window_sups():
    s = final_window_sups(1.0, 200, [0.25, 0.5, 1.0], stream=15)
    assert np.all(np.isfinite(s)) and np.all(s >= 0)
    assert np.all(np.diff(s, axis=1) >= 0)
