"""CLI behavior: simulate outputs in documented formats, evaluate report
shapes, serve/locate round-trip, exit codes."""

import json
import os
import signal
import subprocess
import sys
import time
import urllib.request
from pathlib import Path

import pytest

SRC = str(Path(__file__).resolve().parent.parent / "src")


def run_cli(*args, timeout=240):
    env = dict(os.environ, PYTHONPATH=SRC)
    return subprocess.run(
        [sys.executable, "-m", "homevitals.cli", *args],
        capture_output=True,
        text=True,
        timeout=timeout,
        env=env,
    )


class TestSimulateCommands:
    def test_simulate_stress_writes_csv_set(self, tmp_path):
        out = tmp_path / "cohort"
        result = run_cli("simulate", "stress", "--subjects", "2", "--seed", "1", "--out", str(out))
        assert result.returncode == 0, result.stderr
        for sid in ("S00", "S01"):
            for stem in ("eda", "bvp", "st", "ibi", "cortisol"):
                assert (out / f"{sid}_{stem}.csv").exists()
        header = (out / "S00_eda.csv").read_text().splitlines()[0]
        assert header == "t_ms,value"
        assert (out / "S00_ibi.csv").read_text().splitlines()[0] == "t_ms,ibi_s"
        assert (out / "S00_cortisol.csv").read_text().splitlines()[0] == (
            "subject_id,timepoint,t_ms,concentration_ugdl"
        )

    def test_simulate_stress_deterministic(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run_cli("simulate", "stress", "--subjects", "1", "--seed", "3", "--out", str(a))
        run_cli("simulate", "stress", "--subjects", "1", "--seed", "3", "--out", str(b))
        assert (a / "S00_eda.csv").read_bytes() == (b / "S00_eda.csv").read_bytes()
        assert (a / "S00_cortisol.csv").read_bytes() == (b / "S00_cortisol.csv").read_bytes()

    def test_simulate_bp_writes_units(self, tmp_path):
        out = tmp_path / "bp"
        result = run_cli(
            "simulate", "bp", "--records", "1", "--mode", "long", "--seed", "0", "--out", str(out)
        )
        assert result.returncode == 0, result.stderr
        for u in range(3):
            assert (out / f"R00_u{u}_ppg.csv").exists()
            assert (out / f"R00_u{u}_sbp.csv").exists()
            assert (out / f"R00_u{u}_dbp.csv").exists()

    def test_simulate_locate_script(self, tmp_path):
        script = {
            "users": {"1": "alice"},
            "locations": {"10": "kitchen", "11": "bedroom"},
            "steps": [
                {"t_s": 0, "user": "alice", "room": "kitchen"},
                {"t_s": 100, "user": "alice", "room": None},
            ],
        }
        path = tmp_path / "script.json"
        path.write_text(json.dumps(script))
        result = run_cli("simulate", "locate", "--script", str(path))
        assert result.returncode == 0, result.stderr
        lines = result.stdout.strip().splitlines()
        assert '"status":"ok"' in lines[0] and '"room":"kitchen"' in lines[0]
        assert '"status":"not_found"' in lines[1]


class TestIngestAndTrain:
    def test_csv_to_store_to_model(self, tmp_path):
        data = tmp_path / "data"
        store = tmp_path / "store.jsonl"
        run_cli("simulate", "stress", "--subjects", "4", "--seed", "0", "--out", str(data))
        run_cli("simulate", "bp", "--records", "1", "--mode", "short", "--seed", "0", "--out", str(data))
        result = run_cli("ingest", "--store", str(store), "--data", str(data))
        assert result.returncode == 0, result.stderr
        ack = json.loads(result.stdout)
        assert ack["stored"] > 0 and ack["duplicates"] == 0
        # Re-ingesting the same data is a no-op.
        again = json.loads(run_cli("ingest", "--store", str(store), "--data", str(data)).stdout)
        assert again["stored"] == 0 and again["duplicates"] == ack["stored"]

        config = tmp_path / "train.cfg"
        config.write_text("forest.n_trees = 5\nforest.max_depth = 6\nbp.boost_estimators = 3\n")
        trained = run_cli(
            "train", "stress", "--store", str(store), "--config", str(config), "--seed", "1"
        )
        assert trained.returncode == 0, trained.stderr
        assert json.loads(trained.stdout)["model_key"] == "stress"
        trained_bp = run_cli(
            "train", "bp", "--store", str(store), "--config", str(config), "--seed", "1"
        )
        assert trained_bp.returncode == 0, trained_bp.stderr
        assert "bp_sbp" in json.loads(trained_bp.stdout)


class TestEvaluateCommands:
    def test_evaluate_stress_report_shape(self, tmp_path):
        out = tmp_path / "report.json"
        result = run_cli(
            "evaluate", "stress",
            "--subjects", "6", "--seeds", "2", "--trees", "5", "--out", str(out),
        )
        assert result.returncode == 0, result.stderr
        report = json.loads(out.read_text())
        rows = report["rows"]
        assert [row["signals"] for row in rows] == [
            "EDA",
            "EDA+BVP",
            "EDA+BVP+IBI",
            "EDA+BVP+IBI+ST",
        ]
        assert [row["total_features"] for row in rows] == [18, 35, 41, 47]
        for row in rows:
            assert 0 <= row["accuracy_pct"] <= 100
            assert 0 <= row["auc"] <= 1

    def test_evaluate_bp_report_shape(self, tmp_path):
        # Both modes: four regressor columns per target per mode.
        out = tmp_path / "bp.json"
        result = run_cli(
            "evaluate", "bp",
            "--records", "2", "--mode", "both", "--seeds", "1", "--out", str(out),
        )
        assert result.returncode == 0, result.stderr
        report = json.loads(out.read_text())
        assert set(report["modes"].keys()) == {"short_term", "long_term"}
        for table in report["modes"].values():
            assert set(table.keys()) == {"sbp", "dbp"}
            for target in table.values():
                assert set(target.keys()) == {"mlp", "dt", "adaboost_dt", "adaboost_mlp"}
                for metrics in target.values():
                    assert metrics["mae"] >= 0
                    assert 0 <= metrics["pct_within_5mmhg"] <= 100

    def test_report_roc(self, tmp_path):
        out = tmp_path / "roc.json"
        result = run_cli(
            "report", "roc", "--subjects", "6", "--trees", "5", "--out", str(out)
        )
        assert result.returncode == 0, result.stderr
        curves = json.loads(out.read_text())["curves"]
        assert set(curves.keys()) == {"EDA", "EDA+BVP", "EDA+BVP+IBI", "EDA+BVP+IBI+ST"}
        for points in curves.values():
            assert points[0] == [0.0, 0.0]
            assert points[-1] == [1.0, 1.0]


@pytest.fixture
def served(tmp_path):
    config_path = tmp_path / "service.cfg"
    config_path.write_text(
        "listen_port = 0\n"
        f"storage_path = {tmp_path / 'store.jsonl'}\n"
        "tags.user.1 = alice\n"
        "tags.location.10 = kitchen\n"
    )
    env = dict(os.environ, PYTHONPATH=SRC)
    proc = subprocess.Popen(
        [sys.executable, "-m", "homevitals.cli", "serve", "--config", str(config_path)],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
        text=True,
        env=env,
    )
    line = proc.stdout.readline()
    port = int(line.strip().rsplit(":", 1)[1])
    yield proc, port
    proc.send_signal(signal.SIGTERM)
    proc.wait(timeout=10)


class TestServeAndLocate:
    def test_locate_round_trip(self, served):
        proc, port = served
        base = f"http://127.0.0.1:{port}"
        for kind, index in (("user", 1), ("location", 10)):
            request = urllib.request.Request(
                f"{base}/tags/event",
                data=json.dumps({"kind": kind, "index": index}).encode(),
                headers={"Content-Type": "application/json"},
            )
            urllib.request.urlopen(request)
        result = run_cli("locate", "alice", "--server", base)
        assert result.returncode == 0, result.stderr
        assert '"room":"kitchen"' in result.stdout

    def test_locate_unknown_identity_nonzero_exit(self, served):
        proc, port = served
        result = run_cli("locate", "carol", "--server", f"http://127.0.0.1:{port}")
        assert result.returncode == 1
        assert "carol" in result.stderr or "not" in result.stderr.lower()


def test_unknown_command_exits_nonzero():
    result = run_cli("frobnicate")
    assert result.returncode == 2
