import json

import pytest

from daod import cli

SMALL_SYNTH = {"source_per_class": 12, "target_per_class": 12,
               "unknown_sizes": [12], "dim": 6}


def small_config(tmp_path, **overrides):
    payload = {"mode": "daod", "seed": 0, "synthetic": SMALL_SYNTH,
               "hyperparams": {"lam": 10.0, "n_iter": 3, "n_neighbors": 4},
               "out": str(tmp_path / "out")}
    payload.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


def test_run_daod_on_synthetic(tmp_path):
    config = small_config(tmp_path)
    assert cli.main(["run", "--config", str(config)]) == 0
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert report["mode"] == "daod"
    assert "acc_os" in report["metrics"]
    assert len(report["mu_trace"]) == 3
    assert len(report["objective_trace"]) == 3
    assert report["risk_trace"][0]["prior_complement"] == 1.0
    predictions = (tmp_path / "out" / "predictions.csv").read_text().strip().splitlines()
    assert predictions[0].startswith("#")
    assert len(predictions) == 1 + 48
    assert (tmp_path / "out" / "metadata.json").exists()


def test_run_osnn_baseline_has_no_iteration_trace(tmp_path):
    config = small_config(tmp_path, mode="osnn-baseline")
    assert cli.main(["run", "--config", str(config)]) == 0
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert report["mode"] == "osnn-baseline"
    assert "mu_trace" not in report
    assert "objective_trace" not in report
    assert "acc_os" in report["metrics"]


def test_run_missing_file_exits_3(tmp_path, capsys):
    code = cli.main(["run", "--source", str(tmp_path / "nope.csv"),
                     "--target", str(tmp_path / "nope2.csv"),
                     "--out", str(tmp_path / "out")])
    assert code == 3
    assert "i/o error" in capsys.readouterr().err


def test_run_bad_hyperparameter_exits_1(tmp_path, capsys):
    config = small_config(tmp_path, hyperparams={"bogus": 1.0})
    assert cli.main(["run", "--config", str(config)]) == 1
    assert "config error" in capsys.readouterr().err


def test_run_requires_exactly_one_input(tmp_path, capsys):
    config = small_config(tmp_path)
    payload = json.loads(config.read_text())
    payload["source"] = "x.csv"
    payload["target"] = "y.csv"
    config.write_text(json.dumps(payload))
    assert cli.main(["run", "--config", str(config)]) == 1


def test_run_on_files(tmp_path):
    synth_dir = tmp_path / "synth"
    assert cli.main(["synth", "--seed", "1", "--out", str(synth_dir),
                     "--config", str(write_synth_config(tmp_path))]) == 0
    out = tmp_path / "filerun"
    code = cli.main(["run", "--source", str(synth_dir / "source.csv"),
                     "--target", str(synth_dir / "target.csv"),
                     "--truth", str(synth_dir / "target_truth.csv"),
                     "--mode", "osnn-baseline", "--out", str(out)])
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["n_source"] == 36
    assert report["n_target"] == 48
    assert report["metrics"]["acc_os"] >= 0.0


def write_synth_config(tmp_path):
    path = tmp_path / "synth_config.json"
    path.write_text(json.dumps(SMALL_SYNTH), encoding="utf-8")
    return path


def test_synth_writes_dataset(tmp_path):
    out = tmp_path / "synthout"
    assert cli.main(["synth", "--seed", "2", "--out", str(out),
                     "--config", str(write_synth_config(tmp_path))]) == 0
    source_lines = (out / "source.csv").read_text().strip().splitlines()
    assert len(source_lines) == 36
    config_echo = json.loads((out / "synthetic_config.json").read_text())
    assert config_echo["seed"] == 2


def test_sweep_product_grid(tmp_path):
    config = small_config(tmp_path)
    out = tmp_path / "sweepout"
    code = cli.main(["sweep", "--config", str(config), "--out", str(out),
                     "--grid", json.dumps({"lam": [0.0, 10.0, 100.0]})])
    assert code == 0
    lines = (out / "summary.csv").read_text().strip().splitlines()
    assert lines[0] == "lam,acc_os,acc_os_star,seconds,status"
    assert len(lines) == 4
    assert all(line.endswith("ok") for line in lines[1:])
    for i in range(3):
        assert (out / f"point_{i:03d}" / "report.json").exists()


def test_sweep_alpha_delta_points(tmp_path):
    config = small_config(tmp_path)
    out = tmp_path / "sweepdelta"
    grid = [{"alpha": 0.4, "delta": 0.15}, {"alpha": 0.4, "delta": 0.2}]
    assert cli.main(["sweep", "--config", str(config), "--out", str(out),
                     "--grid", json.dumps(grid)]) == 0
    lines = (out / "summary.csv").read_text().strip().splitlines()
    assert lines[0].startswith("alpha,delta")
    point = json.loads((out / "point_000" / "report.json").read_text())
    assert point["hyperparams"]["gamma"] == pytest.approx(0.25)


def test_sweep_empty_grid_exits_1(tmp_path, capsys):
    config = small_config(tmp_path)
    assert cli.main(["sweep", "--config", str(config), "--grid", "{}"]) == 1
    assert "config error" in capsys.readouterr().err


def test_sweep_records_failing_point_and_continues(tmp_path):
    config = small_config(tmp_path)
    out = tmp_path / "sweepfail"
    grid = [{"gamma": 0.9}, {"alpha": 0.4, "delta": 1.8}]  # second gives gamma < 0
    assert cli.main(["sweep", "--config", str(config), "--out", str(out),
                     "--grid", json.dumps(grid)]) == 0
    lines = (out / "summary.csv").read_text().strip().splitlines()
    assert len(lines) == 3
    assert lines[1].endswith("ok")
    assert "error" in lines[2]


def test_report_is_byte_identical_across_runs(tmp_path):
    config = small_config(tmp_path, out=str(tmp_path / "a"))
    assert cli.main(["run", "--config", str(config)]) == 0
    config2 = small_config(tmp_path, out=str(tmp_path / "b"))
    assert cli.main(["run", "--config", str(config2)]) == 0
    first = (tmp_path / "a" / "report.json").read_bytes()
    second = (tmp_path / "b" / "report.json").read_bytes()
    assert first == second
