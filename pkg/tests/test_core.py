import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lqg_lab.core import (CadlagPath, ExcursionSample, Grid, ParseError, RngStream, Topology,
                          as_generator, derive_stream, dumps_json, fmt_float, parallel_map,
                          read_path_csv, resolve_threads, write_path_csv)

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


class TestGrid:
    def test_spectral_needs_power_of_two(self):
        with pytest.raises(ValueError, match="power-of-two"):
            Grid(100, 0.01, Topology.TORUS)

    def test_only_cylinder_rectangular(self):
        with pytest.raises(ValueError):
            Grid(64, 0.1, Topology.TORUS, rows=32)
        g = Grid(64, 0.1, Topology.CYLINDER, rows=40)
        assert g.shape == (40, 64)

    @pytest.mark.parametrize("size,spacing", [(4, 0.1), (64, 0.0), (64, np.inf)])
    def test_rejects_bad(self, size, spacing):
        with pytest.raises(ValueError):
            Grid(size, spacing)


class TestCadlagPath:
    def test_terminal_requires_zero_tail(self):
        with pytest.raises(ValueError):
            CadlagPath(0.0, 0.1, [1.0, 0.5, 0.2], terminal=0.1)
        p = CadlagPath(0.0, 0.1, [1.0, 0.0, 0.0], terminal=0.1)
        assert p.t_end == pytest.approx(0.2)

    def test_jump_times_increasing(self):
        with pytest.raises(ValueError):
            CadlagPath(0.0, 0.1, [0, 1, 2], jumps=[[0.2, 1.0], [0.1, 1.0]])

    def test_values_readonly(self):
        p = CadlagPath(0.0, 1.0, [1.0, 2.0])
        with pytest.raises(ValueError):
            p.values[0] = 3.0

    def test_value_at_right_continuous(self):
        p = CadlagPath(0.0, 0.5, [0.0, 1.0, 2.0])
        assert p.value_at(0.5) == 1.0
        assert p.value_at(0.99) == 1.0


@given(st.lists(finite, min_size=1, max_size=30),
       st.lists(st.tuples(st.floats(0.0, 1.0), finite), max_size=5))
def test_path_csv_round_trip(vals, jumps):
    times = sorted({t for t, _ in jumps})
    sizes = [s for _, s in jumps][:len(times)]
    ledger = np.column_stack([times, sizes]) if times else np.zeros((0, 2))
    p = CadlagPath(0.0, 1.0 / len(vals), vals, ledger)
    buf = io.StringIO()
    write_path_csv(p, buf, {"k": "v"})
    buf.seek(0)
    q, meta = read_path_csv(buf, with_meta=True)
    assert q == p
    assert meta == {"k": "v"}


def test_parse_error_reports_row(tmp_path):
    p = CadlagPath(0.0, 0.1, [1.0, 2.0])
    f = tmp_path / "p.csv"
    write_path_csv(p, f)
    lines = f.read_text().splitlines()
    lines[5] = "1,notanumber"
    f.write_text("\n".join(lines))
    with pytest.raises(ParseError, match="row 6"):
        read_path_csv(f)


@given(finite)
def test_fmt_float_round_trips(x):
    assert float(fmt_float(x)) == x


class TestStreams:
    def test_same_labels_same_draws(self):
        a = derive_stream(7, (1, 2)).generator().random(5)
        b = derive_stream(7, (1, 2)).generator().random(5)
        assert np.array_equal(a, b)

    def test_distinct_labels_differ(self):
        a = derive_stream(7, (1, 2)).generator().random(5)
        b = derive_stream(7, (2, 1)).generator().random(5)
        assert not np.array_equal(a, b)

    def test_root_stream(self):
        assert derive_stream(3) == RngStream(3, 0)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            RngStream(-1)
        with pytest.raises(ValueError):
            derive_stream(1, (-2,))

    def test_as_generator(self):
        g = np.random.default_rng(0)
        assert as_generator(g) is g
        with pytest.raises(TypeError):
            as_generator("seed")


def test_excursion_sample_checks():
    ok = CadlagPath(0.0, 0.5, [0.0, 1.0, 0.0])
    ExcursionSample(ok, 1.0)
    with pytest.raises(ValueError):
        ExcursionSample(CadlagPath(0.0, 0.5, [0.0, 1.0, 0.3]), 1.0)
    with pytest.raises(ValueError):
        ExcursionSample(CadlagPath(0.0, 0.5, [0.0, -1.0, 0.0]), 1.0)


def test_parallel_map_order(monkeypatch):
    assert parallel_map(lambda x: x * x, range(10), threads=3) == [x * x for x in range(10)]
    monkeypatch.setenv("LQG_LAB_THREADS", "2")
    assert resolve_threads(None) == 2


def test_json_handles_numpy():
    s = dumps_json({"a": np.float64(1.5), "b": np.arange(2), "c": np.bool_(True), "d": float("inf")})
    assert '"a": 1.5' in s and '"d": "inf"' in s
