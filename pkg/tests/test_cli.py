from __future__ import annotations

import json

import numpy as np
import pytest

from distbrush.cli import main
from distbrush.data import load_projection, save_dataset_csv, save_projection_csv
from distbrush.fixtures import FixtureSpec, generate


@pytest.fixture()
def fixture_files(tmp_path):
    dataset, projection, _ = generate(
        FixtureSpec(kind="twoBlobs", n_per_cluster=40, dim=8, separation=10.0, seed=13)
    )
    d = tmp_path / "dataset.csv"
    p = tmp_path / "projection.csv"
    save_dataset_csv(dataset, d)
    save_projection_csv(projection, p)
    return d, p, dataset, projection


def test_precompute_idempotent(fixture_files, tmp_path, capsys):
    d, p, _, _ = fixture_files
    out = tmp_path / "out"
    args = ["precompute", "--dataset", str(d), "--k", "8", "--output-dir", str(out)]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert "cache written" in first
    assert main(args) == 0
    assert "cache hit" in capsys.readouterr().out


def test_precompute_missing_dataset(tmp_path, capsys):
    code = main(["precompute", "--dataset", str(tmp_path / "nope.csv")])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_precompute_k_too_large(fixture_files, tmp_path, capsys):
    d, _, _, _ = fixture_files
    code = main(["precompute", "--dataset", str(d), "--k", "100",
                 "--output-dir", str(tmp_path / "o")])
    assert code == 2


def test_replay_empty_events(fixture_files, tmp_path):
    d, p, _, _ = fixture_files
    traj = tmp_path / "t.json"
    traj.write_text(json.dumps({"params": {}, "events": []}))
    out = tmp_path / "run"
    code = main([
        "replay", "--dataset", str(d), "--projection", str(p),
        "--trajectory", str(traj), "--output-dir", str(out), "--k", "8",
    ])
    assert code == 0
    labels = json.loads((out / "labels.json").read_text())["labels"]
    assert labels == [-1] * 80
    snap = json.loads((out / "snapshot.json").read_text())
    assert snap["phase"] == "idle"
    assert (out / "scores.json").exists()  # fixture carries truth labels


def test_replay_byte_identical(fixture_files, tmp_path):
    d, p, _, _ = fixture_files
    blob_center = json.loads(json.dumps({}))
    proj = load_projection(p)
    c = proj.positions[:40].mean(axis=0)
    events = [
        {"type": "Wheel", "delta": 2.0},
        {"type": "MoveTo", "x": float(c[0]), "y": float(c[1])},
        {"type": "PauseElapsed"},
        {"type": "Press"},
        {"type": "MoveTo", "x": float(c[0]) + 0.2, "y": float(c[1])},
        {"type": "Release"},
    ]
    traj = tmp_path / "t.json"
    traj.write_text(json.dumps({"params": {"thetaIn": 0.3}, "events": events}))

    outputs = []
    for name in ("run1", "run2"):
        out = tmp_path / name
        code = main([
            "replay", "--dataset", str(d), "--projection", str(p),
            "--trajectory", str(traj), "--output-dir", str(out), "--k", "8",
        ])
        assert code == 0
        outputs.append({
            f.name: f.read_bytes() for f in sorted(out.glob("*.json"))
        })
    assert outputs[0] == outputs[1]
    assert set(outputs[0]) == {"labels.json", "snapshot.json", "scores.json", "manifest.json"}


def test_replay_reports_bad_event_index(fixture_files, tmp_path, capsys):
    d, p, _, _ = fixture_files
    traj = tmp_path / "t.json"
    traj.write_text(json.dumps({"events": [
        {"type": "MoveTo", "x": 0.0, "y": 0.0},
        {"type": "SwitchBrush", "brush_id": 42},
    ]}))
    code = main([
        "replay", "--dataset", str(d), "--projection", str(p),
        "--trajectory", str(traj), "--output-dir", str(tmp_path / "x"), "--k", "8",
    ])
    assert code == 2
    err = capsys.readouterr().err
    assert "event 1" in err


def test_distort_zero_is_normalized_copy(fixture_files, tmp_path):
    d, p, _, projection = fixture_files
    out = tmp_path / "d0.csv"
    code = main(["distort", "--projection", str(p), "--proportion", "0",
                 "--seed", "3", "--output", str(out)])
    assert code == 0
    got = load_projection(out).positions
    pos = projection.positions
    expected = (pos - pos.min(axis=0)) / (pos.max(axis=0) - pos.min(axis=0))
    np.testing.assert_allclose(got, expected, atol=1e-15)


def test_distort_row_change_count(fixture_files, tmp_path):
    d, p, _, projection = fixture_files
    base = tmp_path / "d0.csv"
    half = tmp_path / "d5.csv"
    main(["distort", "--projection", str(p), "--proportion", "0", "--seed", "7",
          "--output", str(base)])
    main(["distort", "--projection", str(p), "--proportion", "0.5", "--seed", "7",
          "--output", str(half)])
    a = load_projection(base).positions
    b = load_projection(half).positions
    assert np.any(a != b, axis=1).sum() == int(np.ceil(0.5 * len(a)))


def test_distort_bad_proportion(fixture_files, tmp_path):
    _, p, _, _ = fixture_files
    code = main(["distort", "--projection", str(p), "--proportion", "1.2",
                 "--output", str(tmp_path / "x.csv")])
    assert code == 2


def test_metrics_command(fixture_files, tmp_path):
    d, p, dataset, _ = fixture_files
    labels_path = tmp_path / "labels.json"
    labels_path.write_text(json.dumps({"labels": dataset.labels.tolist()}))
    out = tmp_path / "scores.json"
    code = main([
        "metrics", "--dataset", str(d), "--projection", str(p),
        "--labels", str(labels_path), "--k-eval", "10", "--output", str(out),
    ])
    assert code == 0
    scores = json.loads(out.read_text())
    assert scores["ami"] == 1.0
    assert scores["arand"] == 1.0
    assert scores["vmeasure"] == 1.0
    assert 0.0 <= scores["trustworthiness"] <= 1.0
    assert scores["silhouetteMd"] > 0.5
    assert scores["kEval"] == 10


def test_fixture_command(tmp_path):
    out = tmp_path / "fx"
    code = main(["fixture", "--kind", "twoBlobs", "--n-per-cluster", "10",
                 "--dim", "6", "--seed", "2", "--output-dir", str(out)])
    assert code == 0
    assert (out / "dataset.csv").exists()
    assert (out / "projection.csv").exists()


def test_config_file_and_override(fixture_files, tmp_path, capsys):
    d, p, _, _ = fixture_files
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "dataset": str(d), "k": 8, "thetaIn": 0.4, "outputDir": str(tmp_path / "o1"),
    }))
    assert main(["precompute", "--config", str(cfg)]) == 0
    # flag overrides config: bad k must fail validation
    assert main(["precompute", "--config", str(cfg), "--k", "0"]) == 2


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"mystery": 1}))
    assert main(["precompute", "--config", str(cfg)]) == 2
