import json

import pytest

from lqg_lab.cli import (EXIT_FAIL, EXIT_OK, EXIT_USAGE, ExperimentConfig, UsageError, emit_svg,
                         load_configs, main, parse_gamma_sq, run)


def test_unknown_flag_is_usage_error(capsys):
    assert main(["gff", "--bogus"]) == EXIT_USAGE
    assert "usage" in capsys.readouterr().err


def test_unknown_subcommand():
    assert run("nope") == EXIT_USAGE
    assert main(["nope"]) == EXIT_USAGE


def test_bad_values_are_usage_errors(tmp_path):
    assert main(["surface", "--gamma-sq", "5", "--out", str(tmp_path)]) == EXIT_USAGE
    assert main(["acceptance", "--suite", "99"]) == EXIT_USAGE
    assert main(["gff", "--grid", "100", "--out", str(tmp_path)]) == EXIT_USAGE
    assert main(["csbp", "--config", str(tmp_path / "missing.json")]) == EXIT_USAGE


def test_gamma_sq_parsing():
    assert parse_gamma_sq("8/3") == pytest.approx((8 / 3) ** 0.5)
    for bad in ("0", "4", "x", "1/0"):
        with pytest.raises(UsageError):
            parse_gamma_sq(bad)


def test_csbp_laplace_outputs_json(tmp_path, capsys):
    rep = tmp_path / "r.json"
    code = main(["csbp", "--paths", "20000", "--t", "0.5", "--check-laplace", "0.5,1,2",
                 "--seed", "3", "--report", str(rep)])
    data = json.loads(rep.read_text())
    assert code == (EXIT_OK if data["pass"] else EXIT_FAIL)
    assert {"closed_form", "empirical", "stderr", "z"} <= set(data["laplace"][0])
    assert capsys.readouterr().out == rep.read_text()


def test_reproducible_outputs(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["qle", "--necklaces", "50", "--marks", "2", "--seed", "11", "--out", str(d),
                     "--report", str(d / "r.json")]) == EXIT_OK
    for name in ("ledger.csv", "boundary.csv", "r.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    header = (a / "ledger.csv").read_text().splitlines()[0]
    assert header == "j,X_before,X_after,T,B,glue_pos,hit_mask"


@pytest.mark.parametrize("argv", [
    ["gff", "--grid", "32", "--trials", "2"],
    ["measure", "--grid", "64", "--trials", "2"],
    ["levy", "--paths", "3", "--dt", "0.01"],
    ["surface", "--role", "cone", "--cone-alpha", "1.0", "--extent", "1"],
    ["surface", "--role", "sphere", "--extent", "0.2"],
])
def test_subcommands_run(tmp_path, argv):
    assert main(argv + ["--out", str(tmp_path)]) == EXIT_OK
    assert any(tmp_path.iterdir())


def test_exponent_writes_csv_and_svg(tmp_path):
    code = main(["exponent", "boundary-tail", "--grid", "32", "--trials", "300", "--out", str(tmp_path)])
    assert code in (EXIT_OK, EXIT_FAIL)
    assert (tmp_path / "boundary-tail.csv").read_text().splitlines()[0] == "x,y"
    assert (tmp_path / "boundary-tail.svg").read_text().startswith("<svg")


def test_config_precedence(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"name": "q", "module": "qle", "seed": 5,
                               "parameters": {"necklaces": 7, "delta": 0.1}, "output_dir": str(tmp_path / "o")}))
    rep = tmp_path / "r.json"
    assert main(["qle", "--config", str(cfg), "--necklaces", "9", "--report", str(rep)]) == EXIT_OK
    data = json.loads(rep.read_text())
    assert data["necklaces"] <= 9
    lines = (tmp_path / "o" / "ledger.csv").read_text().splitlines()
    assert len(lines) - 1 == data["necklaces"]


def test_config_validation(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps([{"name": "a", "module": "qle"}, {"name": "a", "module": "gff"}]))
    with pytest.raises(UsageError):
        load_configs(str(p))
    with pytest.raises(UsageError):
        ExperimentConfig("a", "qle", trials=0)
    with pytest.raises(UsageError):
        ExperimentConfig.from_json('{"name": "a", "module": "qle", "colour": 1}')


class TestSvg:
    def test_single_point_has_no_fit_line(self):
        svg = emit_svg([{"name": "p", "x": [1.0], "y": [2.0]}], {"fit": True})
        assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
        assert "stroke-dasharray" not in svg and "slope" not in svg

    def test_log_fit_annotates_slope(self):
        x = [1, 2, 4, 8]
        svg = emit_svg([{"name": "sq", "x": x, "y": [v ** 2 for v in x]}], {"log": True, "fit": True})
        assert "slope 2.0000" in svg and "stroke-dasharray" in svg

    def test_deterministic(self, tmp_path):
        s = [{"name": "a", "x": [1, 2, 3], "y": [3, 1, 2]}]
        emit_svg(s, {"title": "t"}, tmp_path / "1.svg")
        emit_svg(s, {"title": "t"}, tmp_path / "2.svg")
        assert (tmp_path / "1.svg").read_bytes() == (tmp_path / "2.svg").read_bytes()

    def test_empty_and_bad_input(self):
        with pytest.raises(ValueError):
            emit_svg([])
        with pytest.raises(ValueError):
            emit_svg([{"name": "a", "x": [], "y": []}])
        with pytest.raises(ValueError):
            emit_svg([{"name": "a", "x": [1, 2], "y": [1]}])
        with pytest.raises(ValueError):
            emit_svg([{"name": "a", "x": [0, 1], "y": [1, 2]}], {"log": True})


def test_acceptance_report_schema(tmp_path, capsys):
    reps = [tmp_path / "a.json", tmp_path / "b.json"]
    for rep in reps:
        code = main(["acceptance", "--suite", "6,11,12,18", "--seed", "7", "--report", str(rep),
                     "--no-runtime"])
    data = json.loads(reps[0].read_text())
    assert [r["id"] for r in data] == [6, 11, 12, 18]
    for r in data:
        assert {"id", "target", "measured", "tolerance", "pass", "runtime_seconds", "seed"} <= set(r)
        assert r["seed"] == 7 and r["runtime_seconds"] == 0.0
    assert code == (EXIT_OK if all(r["pass"] for r in data) else EXIT_FAIL)
    assert reps[0].read_bytes() == reps[1].read_bytes()
    lines = [l for l in capsys.readouterr().out.splitlines() if l.startswith("[")]
    assert len(lines) == 8
