import json
import subprocess
import sys

import numpy as np
import pytest

from reamp import cli
from reamp.bench import hausdorff
from reamp.ingest import MatrixSequence
from reamp.pipeline import NO_CHANGE_NOTE, PipelineConfig, StageError, detect_sequence
from reamp.resonance import ResonanceConfig
from reamp.sharpen import localize, DensityCurve, SharpenConfig

SMALL = ["--iterations", "2000", "--nb2", "36", "--bins", "40"]


@pytest.fixture(scope="module")
def two_segment_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("data") / "seq.csv"
    rc = cli.main(["simulate", "--n", "40", "--d", "60", "--taus", "20", "--seed", "5",
                   "-o", str(path)])
    assert rc == 0
    return path


def run(args):
    return cli.main([str(a) for a in args])


def test_simulate_shape_and_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["simulate", "--scenario", "scenario1", "--seed", 9, "-o", a]) == 0
    assert run(["simulate", "--scenario", "scenario1", "--seed", 9, "-o", b]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = a.read_text().splitlines()
    assert len(rows) == 100 and len(rows[0].split(",")) == 200


@pytest.mark.parametrize("taus", ["40,20", "0,10", "x"])
def test_simulate_invalid_taus(taus, tmp_path):
    assert run(["simulate", "--taus", taus, "-o", tmp_path / "x.csv"]) == cli.EXIT_USAGE


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("REAMP_SEED", "9")
    assert run(["simulate", "--scenario", "scenario1", "-o", tmp_path / "env.csv"]) == 0
    monkeypatch.delenv("REAMP_SEED")
    assert run(["simulate", "--scenario", "scenario1", "--seed", 9,
                "-o", tmp_path / "flag.csv"]) == 0
    assert (tmp_path / "env.csv").read_bytes() == (tmp_path / "flag.csv").read_bytes()


def test_detect_report_and_exports(two_segment_csv, tmp_path):
    out, curve, cloud = tmp_path / "r.json", tmp_path / "c.csv", tmp_path / "k.csv"
    assert run(["detect", two_segment_csv, *SMALL, "-o", out, "--export-curve", curve,
                "--export-cloud", cloud]) == 0
    rep = json.loads(out.read_text())
    assert rep["schemaVersion"] == 1 and rep["n"] == 40
    assert hausdorff(rep["estimates"], [20]) <= 2
    assert len(rep["cloud"]["frequencies"]) == 39
    assert sum(rep["cloud"]["frequencies"]) == 2000
    assert set(rep["timings_ms"]) >= {"reduce", "cost_matrix", "resonate", "localize"}
    c = rep["sharpenedCurve"]
    again = localize(DensityCurve(np.array(c["x"]), np.array(c["y"])), 0.05, 40)
    assert list(again.estimates) == rep["estimates"]
    assert len(curve.read_text().splitlines()) == 37
    assert cloud.read_text().splitlines()[0] == "cut,count"


def test_detect_csv_output(two_segment_csv, tmp_path):
    out = tmp_path / "r.csv"
    assert run(["detect", two_segment_csv, *SMALL, "--output-format", "csv", "-o", out]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "estimate" and all(v.isdigit() for v in lines[1:])


def strip_timings(text):
    rep = json.loads(text)
    rep.pop("timings_ms")
    return json.dumps(rep, sort_keys=True)


def test_replay_reproduces_report(two_segment_csv, tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["detect", two_segment_csv, *SMALL, "--seed", 3, "--graph", "mst",
                "--ground", "manhattan", "-o", first]) == 0
    assert run(["detect", "--replay", first, "-o", second]) == 0
    assert strip_timings(first.read_text()) == strip_timings(second.read_text())
    cfg = json.loads(second.read_text())["config"]
    assert cfg["graph"] == "mst" and cfg["resonance"]["seed"] == 3


def test_emit_curve_echoes_report(two_segment_csv, tmp_path):
    rep, out = tmp_path / "r.json", tmp_path / "curve.csv"
    assert run(["detect", two_segment_csv, *SMALL, "-o", rep]) == 0
    assert run(["emit", "curve", "--report", rep, "-o", out]) == 0
    rows = out.read_text().splitlines()[1:]
    ys = [float(r.split(",")[2]) for r in rows]
    assert ys == json.loads(rep.read_text())["sharpenedCurve"]["y"]


def test_emit_fig1(tmp_path):
    out = tmp_path / "fig1.csv"
    assert run(["emit", "fig1", "-o", out]) == 0
    rows = [r.split(",") for r in out.read_text().splitlines()[1:]]
    half = [(float(x), float(y)) for s, x, y in rows if s == "zeta=0.5"]
    assert max(half, key=lambda t: t[1])[0] == pytest.approx(0.71, abs=0.01)


def test_emit_fig2_and_fig3(tmp_path):
    f2, f3 = tmp_path / "fig2.csv", tmp_path / "fig3.csv"
    assert run(["emit", "fig2", "--reps", 2, "-o", f2]) == 0
    assert len(f2.read_text().splitlines()) == 5
    assert run(["emit", "fig3", "--d", 20, "--iterations", 200, "-o", f3]) == 0
    series = {r.split(",")[0] for r in f3.read_text().splitlines()[1:]}
    assert series == {"ED+MST", "ED+SHP", "EMD+MST", "EMD+SHP"}


def test_constant_sequence_has_no_change(tmp_path):
    path = tmp_path / "flat.csv"
    path.write_text("1,2,3\n" * 6)
    out = tmp_path / "r.json"
    assert run(["detect", path, "-o", out]) == 0
    rep = json.loads(out.read_text())
    assert rep["estimates"] == [] and rep["note"] == NO_CHANGE_NOTE


def test_exit_codes(tmp_path, two_segment_csv):
    assert run([]) == cli.EXIT_USAGE
    assert run(["detect"]) == cli.EXIT_USAGE
    assert run(["detect", two_segment_csv, "--bins", 1]) == cli.EXIT_USAGE
    assert run(["detect", two_segment_csv, "--resonance-a", 5, "--resonance-b", 1]) == 2
    assert run(["detect", tmp_path / "missing.csv"]) == cli.EXIT_INPUT
    ragged = tmp_path / "ragged.csv"
    ragged.write_text("1,2\n1,2,3\n")
    assert run(["detect", ragged]) == cli.EXIT_INPUT
    short = tmp_path / "short.csv"
    short.write_text("1,2\n3,4\n5,6\n")
    assert run(["detect", short]) == cli.EXIT_INPUT
    assert run(["emit", "curve", "-o", tmp_path / "x.csv"]) == cli.EXIT_USAGE


def test_numerical_failure_exit_code(two_segment_csv, monkeypatch, tmp_path):
    def boom(seq, cfg):
        raise StageError("double_sharpen", FloatingPointError("overflow"))

    monkeypatch.setattr(cli, "detect_sequence", boom)
    out = tmp_path / "r.json"
    assert run(["detect", two_segment_csv, "-o", out]) == cli.EXIT_NUMERIC
    assert not out.exists()


def test_pgm_directory_input(tmp_path):
    rng = np.random.default_rng(0)
    for k in range(12):
        scale = 20 if k < 6 else 80
        pix = np.clip(rng.normal(128, scale, (8, 8)), 0, 255).astype(np.uint8)
        (tmp_path / f"f{k:02d}.pgm").write_bytes(b"P5 8 8 255\n" + pix.tobytes())
    out = tmp_path / "r.json"
    assert run(["detect", tmp_path, "--format", "pgm", "--nb2", 11, "--bins", 20,
                "-o", out]) == 0
    assert 6 in json.loads(out.read_text())["estimates"]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "reamp", "--version"], capture_output=True,
                         text=True)
    assert res.returncode == 0 and res.stdout.startswith("reamp ")


def test_pipeline_config_round_trip():
    cfg = PipelineConfig(resonance=ResonanceConfig(a=1.5, b=9, seed=4),
                         sharpen=SharpenConfig(nb2=50, bandwidth=2.5), threads=3)
    again = PipelineConfig.from_dict(json.loads(json.dumps(cfg.to_dict())), threads=3)
    assert again == cfg


def test_pipeline_requires_four_frames():
    with pytest.raises(StageError) as info:
        detect_sequence(MatrixSequence(np.zeros((3, 1, 2))))
    assert info.value.stage == "input"
