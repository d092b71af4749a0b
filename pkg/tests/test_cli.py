import json
import re

import numpy as np

import pulseforge as pf
from pulseforge.cli import main, read_sweep_csv, read_trace_csv, read_verify_csv

DEVICE_TOML = (
    "qubit_freq_ghz = 4.972\n"
    "drive_strength_ghz = 0.4\n"
    "dt_ns = 0.222\n"
    'frame = "rotating_rwa"\n'
)


def write_spec(tmp_path, gate="X", epochs=60, seed=42, extra=""):
    (tmp_path / "device.toml").write_text(DEVICE_TOML)
    spec = tmp_path / "spec.toml"
    spec.write_text(
        f'device = "device.toml"\n'
        f'outputs = "out"\n'
        f"[target]\n"
        f'gate = "{gate}"\n'
        f"{extra}"
        f"[trainer]\n"
        f"epochs = {epochs}\n"
        f"seed = {seed}\n"
    )
    return spec


class TestTrainCommand:
    def test_trains_x_and_writes_artifacts(self, tmp_path, capsys):
        spec = write_spec(tmp_path)
        assert main(["train", str(spec)]) == 0
        run_file = tmp_path / "out" / "run.json"
        trace_file = tmp_path / "out" / "trace.csv"
        assert run_file.is_file() and trace_file.is_file()
        record = json.loads(run_file.read_text())
        assert record["gate"] == "X"
        assert record["infidelity"] <= 1e-2
        lines = trace_file.read_text().strip().splitlines()
        assert lines[0] == "epoch,infidelity"
        assert len(lines) == 61
        # artifacts round-trip through the package readers
        restored = pf.TrainingRun.from_dict(record)
        assert restored.final_infidelity == record["infidelity"]
        assert read_trace_csv(trace_file) == restored.trace
        sched, dt = pf.schedule_from_dict(
            json.loads((tmp_path / "out" / "schedule.json").read_text())
        )
        assert dt == 2.22e-10
        rebuilt = pf.sample_schedule(restored.final_params, rescale_overflow=True)
        np.testing.assert_array_equal(sched.samples, rebuilt.samples)

    def test_rerun_is_byte_identical_modulo_timestamp(self, tmp_path):
        spec = write_spec(tmp_path, epochs=25)
        assert main(["train", str(spec)]) == 0
        first = (tmp_path / "out" / "run.json").read_text()
        assert main(["train", str(spec)]) == 0
        second = (tmp_path / "out" / "run.json").read_text()
        strip = lambda s: re.sub(r'"created_at": "[^"]*"', '"created_at": ""', s)
        assert strip(first) == strip(second)

    def test_unknown_gate_exits_1(self, tmp_path, capsys):
        spec = write_spec(tmp_path, gate="CNOT")
        assert main(["train", str(spec)]) == 1
        err = capsys.readouterr().err
        assert "CNOT" in err
        assert "3ROT" in err and "SX" in err  # message cites the registered set

    def test_missing_angle_exits_1(self, tmp_path, capsys):
        spec = write_spec(tmp_path, gate="RZ")
        assert main(["train", str(spec)]) == 1
        assert "target.angle" in capsys.readouterr().err

    def test_angle_accepted_for_parameterized_gate(self, tmp_path):
        spec = write_spec(tmp_path, gate="RZ", epochs=2, extra="angle = 1.5707963267948966\n")
        rc = main(["train", str(spec)])
        assert rc == 2  # 2 epochs cannot reach threshold, but the run completes
        record = json.loads((tmp_path / "out" / "run.json").read_text())
        assert record["metadata"]["angles"] == [1.5707963267948966]

    def test_missing_device_file_exits_1(self, tmp_path, capsys):
        spec = tmp_path / "spec.toml"
        spec.write_text('device = "nope.toml"\noutputs = "out"\n[target]\ngate = "X"\n')
        assert main(["train", str(spec)]) == 1

    def test_malformed_spec_names_field(self, tmp_path, capsys):
        (tmp_path / "device.toml").write_text(DEVICE_TOML)
        spec = tmp_path / "spec.toml"
        spec.write_text('device = "device.toml"\n[target]\ngate = "X"\n')
        assert main(["train", str(spec)]) == 1
        assert "outputs" in capsys.readouterr().err

    def test_seed_override_changes_run(self, tmp_path):
        spec = write_spec(tmp_path, epochs=10)
        assert main(["train", str(spec)]) in (0, 2)
        base = json.loads((tmp_path / "out" / "run.json").read_text())
        assert main(["--seed", "9", "train", str(spec)]) in (0, 2)
        other = json.loads((tmp_path / "out" / "run.json").read_text())
        assert base["metadata"]["config"]["seed"] == 42
        assert other["metadata"]["config"]["seed"] == 9
        assert base["duration"] != other["duration"]

    def test_json_spec_accepted(self, tmp_path):
        (tmp_path / "device.toml").write_text(DEVICE_TOML)
        spec = tmp_path / "spec.json"
        spec.write_text(json.dumps({
            "device": "device.toml",
            "outputs": "out",
            "target": {"gate": "X"},
            "trainer": {"epochs": 5},
        }))
        assert main(["train", str(spec)]) in (0, 2)
        assert (tmp_path / "out" / "run.json").is_file()


class TestSuiteCommand:
    def test_writes_table_and_reports_threshold(self, tmp_path, capsys):
        (tmp_path / "device.toml").write_text(DEVICE_TOML)
        rc = main(["suite", str(tmp_path / "device.toml"), str(tmp_path / "suite"),
                   "--epochs", "2"])
        assert rc == 2  # two epochs cannot train anything to 1e-2
        records = json.loads((tmp_path / "suite" / "table1.json").read_text())
        assert len(records) == 10
        assert [r["gate"] for r in records] == [
            "X", "SX", "H", "RZ", "RY", "RX", "U_RX", "U_RY", "U_RZ", "3ROT",
        ]
        table = (tmp_path / "suite" / "table1.txt").read_text()
        assert "Effective Signed Modulus" in table
        assert "3ROT" in table

    def test_threads_env_cap(self, tmp_path, monkeypatch):
        (tmp_path / "device.toml").write_text(DEVICE_TOML)
        monkeypatch.setenv("PULSEFORGE_THREADS", "3")
        rc = main(["suite", str(tmp_path / "device.toml"), str(tmp_path / "suite"),
                   "--epochs", "2", "--threshold", "1.0"])
        assert rc == 0
        records = json.loads((tmp_path / "suite" / "table1.json").read_text())
        assert len(records) == 10


class TestVerifyCommand:
    def test_sx_run(self, tmp_path, acceptance_runs, capsys):
        run, _ = acceptance_runs["SX"]
        run_file = tmp_path / "run.json"
        run_file.write_text(json.dumps(run.to_dict()))
        assert main(["verify", str(run_file)]) == 0
        lines = (tmp_path / "verify.csv").read_text().strip().splitlines()
        assert lines[0] == "index,theta,phi,p0_ideal,p1_ideal,p0_trained,p1_trained"
        assert len(lines) == 11
        rows = read_verify_csv(tmp_path / "verify.csv")
        assert [r["index"] for r in rows] == list(range(10))
        assert all(abs(r["p0_ideal"] + r["p1_ideal"] - 1.0) < 1e-9 for r in rows)

    def test_generic_gate_run(self, tmp_path, acceptance_runs):
        run, _ = acceptance_runs["3ROT"]
        run_file = tmp_path / "run.json"
        run_file.write_text(json.dumps(run.to_dict()))
        assert main(["verify", str(run_file)]) == 0
        assert (tmp_path / "verify.csv").is_file()

    def test_missing_run_exits_1(self, tmp_path):
        assert main(["verify", str(tmp_path / "absent.json")]) == 1

    def test_invalid_run_exits_1(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{\"gate\": \"X\"}")
        assert main(["verify", str(bad)]) == 1


class TestSweepCommand:
    def test_sweep_writes_csv_and_estimate(self, tmp_path, capsys):
        (tmp_path / "device.toml").write_text(DEVICE_TOML)
        out = tmp_path / "sweep.csv"
        rc = main(["sweep", str(tmp_path / "device.toml"),
                   "4.952e9", "4.992e9", "41", "--out", str(out)])
        assert rc == 0
        printed = capsys.readouterr().out
        assert "estimated resonance" in printed
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "f_hz,excited_pop"
        assert len(lines) == 42
        results = read_sweep_csv(out)
        freqs = [f for f, _ in results]
        pops = [p for _, p in results]
        best = freqs[int(np.argmax(pops))]
        assert abs(best - 4.972e9) <= (freqs[1] - freqs[0]) + 1e-6

    def test_invalid_range_exits_1(self, tmp_path, capsys):
        (tmp_path / "device.toml").write_text(DEVICE_TOML)
        assert main(["sweep", str(tmp_path / "device.toml"), "5e9", "4e9", "11"]) == 1
        assert main(["sweep", str(tmp_path / "device.toml"), "4e9", "5e9", "2"]) == 1
