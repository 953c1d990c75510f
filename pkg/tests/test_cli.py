import json

import numpy as np
import pytest

from frri.cli import EXIT_OK, EXIT_PARTIAL, EXIT_USAGE, discover_folds, main
from frri.config import ConfigError, ExperimentConfig, parse_text
from frri.data import RawDataset, serialize_keel

from conftest import KEEL

TOY = """@relation toy
@attribute x real [0.0, 1.0]
@attribute y real [0.0, 1.0]
@attribute class {only}
@inputs x, y
@outputs class
@data
0.1, 0.9, only
0.5, 0.2, only
0.9, 0.4, only
"""


@pytest.fixture
def toy(tmp_path):
    path = tmp_path / "toy.dat"
    path.write_text(TOY)
    return path


def test_fit_single_class_and_predict(tmp_path, toy, capsys):
    out = tmp_path / "rs.json"
    assert main(["fit", str(toy), "-o", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert len(doc["rules"]) == 1
    assert doc["meta"]["resolved_config"]["theta"] == "0.5"
    pred = tmp_path / "pred.csv"
    assert main(["predict", str(out), str(toy), "-o", str(pred)]) == EXIT_OK
    assert "balanced_accuracy = 1.000000" in capsys.readouterr().out
    assert pred.read_text().splitlines()[1:] == ["0,only,only", "1,only,only", "2,only,only"]


def test_predict_clamps_out_of_range(tmp_path, toy):
    out = tmp_path / "rs.json"
    main(["fit", str(toy), "-o", str(out)])
    far = tmp_path / "far.dat"
    far.write_text(TOY.replace("0.1, 0.9, only", "-40, 99, only"))
    assert main(["predict", str(out), str(far), "-o", str(tmp_path / "p.csv")]) == EXIT_OK


def test_predict_errors(tmp_path, toy):
    out = tmp_path / "rs.json"
    main(["fit", str(toy), "-o", str(out)])
    empty = tmp_path / "empty.dat"
    empty.write_text(TOY.split("0.1, 0.9")[0])
    assert main(["predict", str(out), str(empty)]) == EXIT_USAGE
    other = tmp_path / "other.dat"
    other.write_text(TOY.replace("@inputs x, y", "@inputs y, x"))
    assert main(["predict", str(out), str(other)]) == EXIT_USAGE


def test_fit_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["fit", str(KEEL / "wine.dat"), "--scale", "0.3", "--theta", "1e-6", "-o", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert 7 <= len(json.loads(a.read_text())["rules"]) <= 11


def test_rank_outputs(tmp_path, capsys):
    assert main(["rank", str(KEEL / "heart.dat"), "--method", "pcc", "--retain", "0.9"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["ranked_attributes"]) == 11  # floor(0.9 * 13)
    assert sorted(doc["full_order"]) == list(range(13))
    assert main(["rank", str(KEEL / "wine.dat"), "--method", "ofrfs"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert "gamma_trace" in doc and "superreduct_size" in doc


def test_usage_errors(tmp_path, toy):
    with pytest.raises(SystemExit) as err:
        main(["rank", str(toy), "--method", "nope"])
    assert err.value.code == EXIT_USAGE
    assert main(["rank", str(toy), "--method", "mi", "--theta", "2"]) == EXIT_USAGE
    assert main(["fit", str(tmp_path / "missing.dat")]) == EXIT_USAGE
    bad = tmp_path / "bad.cfg"
    bad.write_text("datasets = x.dat\nfrobnicate = 1\n")
    assert main(["experiment", str(bad)]) == EXIT_USAGE


def _two_class_keel(tmp_path, name, seed):
    rng = np.random.default_rng(seed)
    labels = tuple("ab"[k % 2] for k in range(24))
    shift = np.array([0.6 if c == "b" else 0.0 for c in labels])
    values = np.round(np.column_stack([rng.random(24) + shift, rng.random(24)]), 4)
    path = tmp_path / f"{name}.dat"
    path.write_text(serialize_keel(RawDataset(values, labels, ("x", "y"), name)))
    return path


def test_experiment_partial_failure_and_report(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    paths = [_two_class_keel(tmp_path, n, s) for n, s in (("d1", 1), ("d2", 2), ("d3", 3))]
    cfg = tmp_path / "exp.cfg"
    cfg.write_text(f"datasets = {', '.join(p.name for p in paths)}, nothere.dat\n"
                   "variants = control, ofrfs-1, ofrfs-0\nfolds = 3\nscale = 0.4\noutput = out\n")
    assert main(["experiment", str(cfg)]) == EXIT_PARTIAL
    out = tmp_path / "out"
    doc = json.loads((out / "report.json").read_text())
    assert len(doc["summary"]) == 9
    assert "nothere" in doc["failures"]
    assert set(doc["tests"]) == {"balanced_accuracy", "rule_count", "mean_rule_length"}
    assert "scale = 0.4" in doc["config"] and "epsilon = 0.0" in doc["config"]
    for name in ("folds.csv", "summary.csv", "fig1.csv"):
        assert (out / name).read_text().startswith("# datasets = ")
    first = {p.name: p.read_bytes() for p in out.iterdir()}
    assert main(["experiment", str(cfg)]) == EXIT_PARTIAL
    assert {p.name: p.read_bytes() for p in out.iterdir()} == first


def test_experiment_uses_keel_fold_files(tmp_path):
    base = _two_class_keel(tmp_path, "full", 4)
    text = base.read_text().splitlines()
    header, rows = text[:text.index("@data") + 1], text[text.index("@data") + 1:]
    for i in range(1, 3):
        test_rows = rows[i - 1::2]
        train_rows = [r for r in rows if r not in test_rows]
        (tmp_path / f"kf-2-{i}tra.dat").write_text("\n".join(header + train_rows) + "\n")
        (tmp_path / f"kf-2-{i}tst.dat").write_text("\n".join(header + test_rows) + "\n")
    name, pairs, source = discover_folds(tmp_path / "kf", 2, True, "class")
    assert (name, source, len(pairs)) == ("kf", "keel-folds", 2)
    raw, split = pairs[0]
    assert len(split.train_indices) == 12 and len(split.test_indices) == 12


def test_config_parsing_and_env_override(tmp_path):
    assert parse_text("# c\ntheta = 0.3  # inline\n\nSCALE=0.5\n") == {"theta": "0.3", "scale": "0.5"}
    assert parse_text("datasets = a.dat,\n    b.dat\n")["datasets"] == "a.dat, b.dat"
    with pytest.raises(ConfigError):
        parse_text("just words\n")
    path = tmp_path / "c.cfg"
    path.write_text("datasets = a.dat\ntheta = 0.3\n")
    cfg = ExperimentConfig.load(path, environ={"FRRI_THETA": "0.2", "FRRI_JOBS": "2"})
    assert cfg.theta == 0.2 and cfg.jobs == 2
    assert ExperimentConfig.load(path, {"theta": "0.7"}, environ={"FRRI_THETA": "0.2"}).theta == 0.7
    assert cfg.dataset_paths() == [tmp_path / "a.dat"]
    for bad in ({"theta": "0"}, {"variants": "mi-0"}, {"folds": "1"}, {"tnorm": "max"}, {"jobs": "0"}):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_mapping(bad)
