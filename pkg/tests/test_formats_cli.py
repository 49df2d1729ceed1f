import json
import math
import shutil
from pathlib import Path

import numpy as np
import pytest

from ringsense import formats
from ringsense.aimsim import similarity
from ringsense.cli import ARTIFACTS, main
from ringsense.config import RunConfig, load_config
from ringsense.dynarray import RingConfig, ring_points
from ringsense.errors import ConfigError, MissingInputError, SchemaError
from ringsense.evaluate import ClassifierSpec, monte_carlo
from ringsense.features import extract

ROOT = Path(__file__).resolve().parents[1]
DEMO = ROOT / "configs" / "demo.json"


def write_config(tmp_path, d, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(d))
    return str(path)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    err = capsys.readouterr().err.strip().splitlines()
    info = json.loads(err[-1]) if err and err[-1].startswith("{") else None
    return code, info


# -- formats -----------------------------------------------------------------

@pytest.mark.parametrize("dtype", [float, complex])
def test_grid_round_trip(tmp_path, dtype):
    rng = np.random.default_rng(0)
    v = rng.normal(size=(6, 10)).astype(dtype)
    if dtype is complex:
        v += 1j * rng.normal(size=v.shape)
    ax0 = (np.arange(6) - 3) * 0.1
    ax1 = (np.arange(10) - 5) * 0.25
    formats.write_grid(tmp_path / "g", v, ax0, ax1)
    back, a0, a1 = formats.read_grid(tmp_path / "g")
    assert back.tobytes() == v.tobytes() and back.dtype == v.dtype
    assert np.allclose(a0, ax0, atol=1e-15) and np.allclose(a1, ax1, atol=1e-15)


def test_grid_header_layout(tmp_path):
    formats.write_grid(tmp_path / "g", np.zeros((2, 3)), [0, 1], [0, 1, 2])
    head = (tmp_path / "g").read_bytes().split(b"\n\n")[0].decode().splitlines()
    assert head == ["MWGRID1", "dtype=f64", "rows=2", "cols=3", "axis0=0 1", "axis1=0 2"]
    assert len((tmp_path / "g").read_bytes()) == len("\n".join(head)) + 2 + 48


def test_grid_errors(tmp_path):
    with pytest.raises(MissingInputError):
        formats.read_grid(tmp_path / "none")
    formats.write_grid(tmp_path / "g", np.zeros((2, 2)), [0, 1], [0, 1])
    raw = (tmp_path / "g").read_bytes()
    (tmp_path / "bad").write_bytes(raw.replace(b"MWGRID1", b"MWGRID9"))
    with pytest.raises(SchemaError) as err:
        formats.read_grid(tmp_path / "bad")
    assert err.value.column == "format"
    (tmp_path / "short").write_bytes(raw[:-3])
    with pytest.raises(SchemaError) as err:
        formats.read_grid(tmp_path / "short")
    assert err.value.column == "payload"


def test_ring_round_trip(tmp_path):
    pts = ring_points(RingConfig(baselines_lambda=(77.0, 40.0), step=math.pi / 20))
    vals = np.exp(1j * np.arange(len(pts))) * np.linspace(0.5, 2, len(pts))
    formats.write_ring(tmp_path / "r.csv", pts.with_values(vals))
    back = formats.read_ring(tmp_path / "r.csv")
    assert np.array_equal(back.value, vals)
    assert np.array_equal(back.u, pts.u) and np.array_equal(back.v, pts.v)
    assert np.array_equal(back.ring, pts.ring) and np.array_equal(back.k, pts.k)
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "#RINGCSV1" and lines[1] == "k,gamma_deg,u,v,re,im,baseline_lambda"


def test_ring_schema_errors(tmp_path):
    pts = ring_points(RingConfig(step=math.pi / 4)).with_values(np.ones(4))
    formats.write_ring(tmp_path / "r.csv", pts)
    text = (tmp_path / "r.csv").read_text()
    (tmp_path / "a.csv").write_text(text.replace(",re,", ",real,"))
    with pytest.raises(SchemaError) as err:
        formats.read_ring(tmp_path / "a.csv")
    assert err.value.column == "re"
    (tmp_path / "b.csv").write_text(text.replace("#RINGCSV1", "#RINGCSV2"))
    with pytest.raises(SchemaError):
        formats.read_ring(tmp_path / "b.csv")
    lines = text.splitlines()
    lines[3] = lines[3].replace(lines[3].split(",")[2], "abc", 1)
    (tmp_path / "c.csv").write_text("\n".join(lines))
    with pytest.raises(SchemaError) as err:
        formats.read_ring(tmp_path / "c.csv")
    assert err.value.column == "u"


def test_features_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    x = rng.normal(size=(5, 11))
    formats.write_features(tmp_path / "f", x, [0, 1, 0, 1, 1], list("abcde"), magnitudes=np.arange(5))
    d = formats.read_features(tmp_path / "f")
    assert np.array_equal(d.features, x) and d.labels.tolist() == [0, 1, 0, 1, 1]
    assert d.source_id == tuple("abcde")
    header = (tmp_path / "f").read_text().splitlines()[1].split(",")
    assert header[:3] == ["mean", "median", "max"] and header[-3:] == ["magnitude", "label", "source_id"]


def test_reports_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    from ringsense.classify import LabeledDataset
    data = LabeledDataset(np.vstack([rng.normal(0, 1, (20, 11)), rng.normal(1, 1, (20, 11))]),
                          np.repeat([0, 1], 20))
    rep = monte_carlo(data, [ClassifierSpec("knn", k=7)], iters=3, seed=1)
    formats.write_mc_report(tmp_path / "mc", rep)
    rows = formats.read_mc_report(tmp_path / "mc")
    assert [r["metric"] for r in rows] == ["tpr", "fpr", "acc", "f1"]
    assert float(rows[2]["mean"]) == rep.mean("knn7")["acc"]
    formats.write_roc_points(tmp_path / "roc", rep)
    pts = formats.read_roc_points(tmp_path / "roc")
    assert len(pts) == 3 and float(pts[0]["fpr"]) == rep.points("knn7")[0, 0]


def test_json_encoding(tmp_path):
    formats.dump_json(tmp_path / "j", {"format": "X1", "a": 0.1, "b": [float("nan"), 1, True],
                                       "c": np.float64(1 / 3)})
    d = formats.load_json(tmp_path / "j", "X1")
    assert d["a"] == 0.1 and d["b"] == [None, 1, True] and d["c"] == 1 / 3
    with pytest.raises(SchemaError):
        formats.load_json(tmp_path / "j", "Y1")


# -- config ------------------------------------------------------------------

def test_config_loading(tmp_path):
    cfg = load_config(write_config(tmp_path, {"ring": {"step_deg": 1.8}, "noise": {"emitters": {
        "count": 8, "radius": 0.4}}, "seed": 3}))
    assert cfg.ring.n_angles == 100
    assert len(cfg.noise.tx_positions) == 8 and cfg.noise.seed == 3
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"sede": 1})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"ring": {"step_deg": -1}})
    with pytest.raises(MissingInputError):
        load_config(tmp_path / "nope.json")
    assert load_config(DEMO).seed == 7


# -- CLI ---------------------------------------------------------------------

def test_empty_scene_payload_is_zero(tmp_path, capsys):
    cfg = write_config(tmp_path, {"scene": {"preset": None}})
    assert run(capsys, "scene", "--config", cfg, "--out", tmp_path)[0] == 0
    values, _, _ = formats.read_grid(tmp_path / ARTIFACTS["scene"])
    assert not values.any()


def test_gun_scene_round_trips(tmp_path, capsys):
    assert run(capsys, "scene", "--out", tmp_path)[0] == 0
    values, _, _ = formats.read_grid(tmp_path / ARTIFACTS["scene"])
    scene = RunConfig().scene.build(RunConfig().geometry)
    assert values.tobytes() == scene.values.tobytes()


def test_malformed_json_is_config_error(tmp_path, capsys):
    (tmp_path / "bad.json").write_text("{not json")
    code, info = run(capsys, "scene", "--config", tmp_path / "bad.json")
    assert code == 2 and info["error"] == "config"


def test_missing_inputs_exit_3(tmp_path, capsys):
    code, info = run(capsys, "scene", "--config", tmp_path / "missing.json")
    assert code == 3 and info["error"] == "missing_input"
    code, info = run(capsys, "reconstruct", "--out", tmp_path)
    assert code == 3


def test_schema_mismatch_exit_4(tmp_path, capsys):
    assert run(capsys, "measure", "--out", tmp_path)[0] == 0
    path = tmp_path / ARTIFACTS["ring"]
    path.write_text(path.read_text().replace(",im,", ",imag,"))
    code, info = run(capsys, "reconstruct", "--out", tmp_path)
    assert code == 4 and info["error"] == "schema" and info["column"] == "im"


def test_infeasible_rotation(tmp_path, capsys):
    cfg = write_config(tmp_path, {"ring": {"rotation_rate": 3.0}})
    code, info = run(capsys, "measure", "--config", cfg, "--out", tmp_path)
    assert code == 2 and "certain angles will be skipped" in info["message"]


def test_bad_flags(tmp_path, capsys):
    assert run(capsys, "scene", "--seed", -1, "--out", tmp_path)[0] == 2
    assert run(capsys, "eval", "--iters", 0, "--out", tmp_path)[0] == 2


def test_measure_default_ring(tmp_path, capsys):
    assert run(capsys, "measure", "--out", tmp_path)[0] == 0
    ring = formats.read_ring(tmp_path / ARTIFACTS["ring"])
    assert len(ring) == 200
    r2 = ring.u ** 2 + ring.v ** 2
    assert np.all(np.abs(r2 - 77.0 ** 2) <= 1e-6 * 77.0 ** 2)
    assert np.degrees(ring.gamma[-1] - ring.gamma[0]) == pytest.approx(179.1)


def test_analytic_and_oracle_paths_agree(tmp_path, capsys):
    base = {"scene": {"preset": "two_point", "l0": 0.05}}
    noisy = dict(base, noise={"emitters": {"count": 32, "radius": 0.3}, "n_samples": 10_000})
    a = write_config(tmp_path, dict(base, out=str(tmp_path / "a")), "a.json")
    b = write_config(tmp_path, dict(noisy, out=str(tmp_path / "b")), "b.json")
    assert run(capsys, "measure", "--config", a)[0] == 0
    assert run(capsys, "measure", "--config", b, "--path", "oracle")[0] == 0
    ra = formats.read_ring(tmp_path / "a" / ARTIFACTS["ring"])
    rb = formats.read_ring(tmp_path / "b" / ARTIFACTS["ring"])
    head = lambda p: p.read_text().splitlines()[:2]
    assert head(tmp_path / "a" / ARTIFACTS["ring"]) == head(tmp_path / "b" / ARTIFACTS["ring"])
    assert np.corrcoef(ra.value.real, rb.value.real)[0, 1] >= 0.95
    assert similarity(rb.value, ra.value) >= 0.95


def test_dataset_from_imported_rings(tmp_path, capsys):
    rng = np.random.default_rng(0)
    entries = []
    for i in range(4):
        pts = ring_points(RingConfig()).with_values(rng.normal(size=200) + 1j * rng.normal(size=200))
        path = tmp_path / f"m{i}.csv"
        formats.write_ring(path, pts)
        entries.append({"path": str(path), "label": i % 2})
    cfg = write_config(tmp_path, {"dataset": {"rings": entries}, "out": str(tmp_path)})
    assert run(capsys, "dataset", "--config", cfg)[0] == 0
    d = formats.read_features(tmp_path / ARTIFACTS["dataset"])
    assert d.labels.tolist() == [0, 1, 0, 1] and d.source_id == ("m0", "m1", "m2", "m3")
    expected = extract(formats.read_ring(tmp_path / "m2.csv")).as_array()
    assert np.array_equal(d.features[2], expected)


def test_eval_is_repeatable(tmp_path, capsys):
    cfg = write_config(tmp_path, {"dataset": {"bundled": "jittered"}})
    outs = []
    for name in ("a", "b"):
        assert run(capsys, "eval", "--config", cfg, "--seed", 7, "--iters", 5,
                   "--out", tmp_path / name)[0] == 0
        outs.append((tmp_path / name / ARTIFACTS["mc"]).read_bytes())
    assert outs[0] == outs[1]
    assert run(capsys, "eval", "--config", cfg, "--seed", 8, "--iters", 5, "--out", tmp_path / "c")[0] == 0
    assert (tmp_path / "c" / ARTIFACTS["mc"]).read_bytes() != outs[0]


@pytest.mark.parametrize("kind", ["thr", "knn", "svm"])
def test_train_each_family(tmp_path, capsys, kind):
    cfg = write_config(tmp_path, {"dataset": {"bundled": "static"}})
    assert run(capsys, "train", "--config", cfg, "--classifier", kind, "--out", tmp_path)[0] == 0
    assert formats.load_json(tmp_path / ARTIFACTS["model"], "RSMODEL1")["kind"] == kind


def test_ssim_of_identical_grids(tmp_path, capsys):
    assert run(capsys, "scene", "--out", tmp_path)[0] == 0
    shutil.copy(tmp_path / ARTIFACTS["scene"], tmp_path / "copy.mwgrid")
    cfg = write_config(tmp_path, {"out": str(tmp_path), "inputs": {
        "reference": str(tmp_path / ARTIFACTS["scene"]), "test": str(tmp_path / "copy.mwgrid")}})
    assert run(capsys, "ssim", "--config", cfg)[0] == 0
    assert formats.load_json(tmp_path / ARTIFACTS["ssim"], "SSIM1")["ssim"] == 1.0


def run_pipeline(capsys, out):
    return run(capsys, "pipeline", "--config", DEMO, "--out", out)[0]


def test_pipeline_demo_is_complete_and_repeatable(tmp_path, capsys):
    assert run_pipeline(capsys, tmp_path / "a") == 0
    assert run_pipeline(capsys, tmp_path / "b") == 0
    for name in ARTIFACTS.values():
        a, b = tmp_path / "a" / name, tmp_path / "b" / name
        assert a.is_file()
        if name != ARTIFACTS["timing"]:  # wall-clock measurements
            assert a.read_bytes() == b.read_bytes(), name
    timing = formats.load_json(tmp_path / "a" / ARTIFACTS["timing"], "TIMING1")
    assert timing["stages_ms"]["acquisition"] == 200
    contours = formats.load_json(tmp_path / "a" / ARTIFACTS["contours"], "CONTOURS1")
    assert set(contours["classifiers"]) == {"thr", "knn7", "knn9", "knn11", "knn13", "knn15", "svm"}
