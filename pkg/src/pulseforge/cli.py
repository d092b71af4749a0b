"""Command-line workbench: reproducible train / suite / verify / sweep runs.

Exit codes are a stable scripting contract: 0 success, 1 usage or validation
error, 2 numerical failure (missed threshold, divergence, integration
accuracy). All artifacts round-trip through the readers in this package;
floats are serialized with full precision so reruns are byte-identical
modulo the created_at timestamp.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

import numpy as np

from .errors import (
    DivergenceError,
    ExperimentSpecError,
    IntegrationAccuracyError,
    InvariantViolation,
    PulseforgeError,
)
from .pulses import PulseParams, drag_envelope, sample_schedule, schedule_to_dict, unsquash
from .simulator import DeviceModel, frequency_sweep
from .training import (
    GATE_REGISTRY,
    TrainerConfig,
    TrainingRun,
    process_fidelity_check,
    resolve_target,
    train,
    train_suite,
    verify_s_sx_s,
)

__all__ = ["ExperimentSpec", "load_experiment_spec", "main"]

_TABLE_COLUMNS = [
    ("gate", "Gate"),
    ("duration", "Duration"),
    ("signed_modulus", "Signed Modulus"),
    ("effective_signed_modulus", "Effective Signed Modulus"),
    ("argument", "Argument"),
    ("variance", "Variance"),
    ("correction_amplitude", "Correction Amplitude"),
    ("phase", "Phase"),
    ("infidelity", "Infidelity"),
]


@dataclasses.dataclass(frozen=True)
class ExperimentSpec:
    """One training experiment: target gate, device file, trainer, outputs."""

    gate: str
    angles: list[float]
    device_path: Path
    trainer: TrainerConfig
    outputs: Path
    threshold: float = 1e-2


def _read_config_file(path: Path) -> dict:
    text = path.read_text()
    if path.suffix.lower() == ".json":
        return json.loads(text)
    try:
        import tomllib
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib
    return tomllib.loads(text)


def load_experiment_spec(path) -> ExperimentSpec:
    """Parse and validate a TOML (canonical) or JSON experiment spec."""
    spec_path = Path(path)
    if not spec_path.is_file():
        raise ExperimentSpecError(f"spec file not found: {spec_path}")
    try:
        raw = _read_config_file(spec_path)
    except Exception as exc:
        raise ExperimentSpecError(f"spec file could not be parsed: {exc}") from exc

    target = raw.get("target")
    if not isinstance(target, dict) or "gate" not in target:
        raise ExperimentSpecError("target.gate: missing (a [target] table with a gate name is required)")
    gate = str(target["gate"]).upper()
    if gate not in GATE_REGISTRY:
        raise ExperimentSpecError(
            f"target.gate: unknown gate {gate!r}; must be one of {sorted(GATE_REGISTRY)}"
        )
    arity = GATE_REGISTRY[gate][1]
    if "angles" in target:
        angles = [float(a) for a in target["angles"]]
    elif "angle" in target:
        angles = [float(target["angle"])]
    else:
        angles = []
    if len(angles) != arity:
        raise ExperimentSpecError(
            f"target.angle: gate {gate} requires {arity} angle(s), got {len(angles)}"
        )

    if "device" not in raw:
        raise ExperimentSpecError("device: missing (path to a device config file)")
    device_path = Path(raw["device"])
    if not device_path.is_absolute():
        device_path = spec_path.parent / device_path

    if "outputs" not in raw:
        raise ExperimentSpecError("outputs: missing (directory for run artifacts)")
    outputs = Path(raw["outputs"])
    if not outputs.is_absolute():
        outputs = spec_path.parent / outputs

    try:
        trainer = TrainerConfig.from_dict(raw.get("trainer", {}))
    except (InvariantViolation, KeyError, TypeError, ValueError) as exc:
        raise ExperimentSpecError(f"trainer: {exc}") from exc

    threshold = float(raw.get("threshold", 1e-2))
    return ExperimentSpec(
        gate=gate,
        angles=angles,
        device_path=device_path,
        trainer=trainer,
        outputs=outputs,
        threshold=threshold,
    )


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_trace_csv(path: Path, trace) -> None:
    lines = ["epoch,infidelity"]
    lines += [f"{int(epoch)},{float(value)!r}" for epoch, value in trace]
    path.write_text("\n".join(lines) + "\n")


def read_trace_csv(path) -> list[tuple[int, float]]:
    """Read a trace.csv written by the train command."""
    lines = Path(path).read_text().strip().splitlines()
    if not lines or lines[0] != "epoch,infidelity":
        raise ValueError(f"{path} is not a trace csv (bad header)")
    return [(int(e), float(v)) for e, v in (line.split(",") for line in lines[1:])]


def read_sweep_csv(path) -> list[tuple[float, float]]:
    """Read a sweep.csv written by the sweep command."""
    lines = Path(path).read_text().strip().splitlines()
    if not lines or lines[0] != "f_hz,excited_pop":
        raise ValueError(f"{path} is not a sweep csv (bad header)")
    return [(float(f), float(p)) for f, p in (line.split(",") for line in lines[1:])]


_VERIFY_HEADER = "index,theta,phi,p0_ideal,p1_ideal,p0_trained,p1_trained"


def read_verify_csv(path) -> list[dict]:
    """Read a verify.csv written by the verify command."""
    lines = Path(path).read_text().strip().splitlines()
    if not lines or lines[0] != _VERIFY_HEADER:
        raise ValueError(f"{path} is not a verify csv (bad header)")
    keys = _VERIFY_HEADER.split(",")
    rows = []
    for line in lines[1:]:
        values = line.split(",")
        row = {"index": int(values[0])}
        row.update({k: float(v) for k, v in zip(keys[1:], values[1:])})
        rows.append(row)
    return rows


def _write_verify_csv(path: Path, rows) -> None:
    lines = [_VERIFY_HEADER]
    for r in rows:
        lines.append(
            f"{r['index']},{r['theta']!r},{r['phi']!r},{r['p0_ideal']!r},"
            f"{r['p1_ideal']!r},{r['p0_trained']!r},{r['p1_trained']!r}"
        )
    path.write_text("\n".join(lines) + "\n")


def _render_table(records: list[dict]) -> str:
    def fmt(key, value):
        if key == "gate":
            return str(value)
        return f"{value:.4g}"

    rows = [[fmt(k, rec[k]) for k, _ in _TABLE_COLUMNS] for rec in records]
    headers = [h for _, h in _TABLE_COLUMNS]
    widths = [
        max(len(headers[i]), *(len(row[i]) for row in rows)) if rows else len(headers[i])
        for i in range(len(headers))
    ]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)),
        "  ".join("-" * w for w in widths),
    ]
    lines += ["  ".join(row[i].ljust(widths[i]) for i in range(len(widths))) for row in rows]
    return "\n".join(lines) + "\n"


def cmd_train(spec_path, seed_override: int | None = None, threshold: float | None = None) -> int:
    """Train per an experiment spec.

    Writes <out>/run.json, <out>/trace.csv and <out>/schedule.json (the
    trained pulse in the schedule interchange format).
    """
    try:
        spec = load_experiment_spec(spec_path)
        device = DeviceModel.from_file(spec.device_path)
        target, angles = resolve_target(spec.gate, spec.angles)
    except (ExperimentSpecError, InvariantViolation, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    cfg = spec.trainer
    if seed_override is not None:
        cfg = dataclasses.replace(cfg, seed=seed_override)
    gate_threshold = spec.threshold if threshold is None else threshold
    try:
        run = train(target, cfg, device, gate_name=spec.gate, angles=angles)
    except (DivergenceError, IntegrationAccuracyError) as exc:
        print(f"training failed: {exc}", file=sys.stderr)
        return 2
    spec.outputs.mkdir(parents=True, exist_ok=True)
    _write_json(spec.outputs / "run.json", run.to_dict())
    _write_trace_csv(spec.outputs / "trace.csv", run.trace)
    trained = sample_schedule(run.final_params, rescale_overflow=True)
    _write_json(spec.outputs / "schedule.json", schedule_to_dict(trained, device.dt))
    print(
        f"{run.gate_name}: final infidelity {run.final_infidelity:.6e} "
        f"({len(run.trace)} epochs) -> {spec.outputs / 'run.json'}"
    )
    return 0 if run.final_infidelity <= gate_threshold else 2


def cmd_suite(
    device_path,
    out_dir,
    seed_override: int | None = None,
    epochs: int | None = None,
    threshold: float = 1e-2,
    max_workers: int | None = None,
) -> int:
    """Train the ten-gate suite; writes table1.json and a rendered table."""
    try:
        device = DeviceModel.from_file(device_path)
    except (InvariantViolation, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    cfg = TrainerConfig()
    if seed_override is not None:
        cfg = dataclasses.replace(cfg, seed=seed_override)
    if epochs is not None:
        cfg = dataclasses.replace(cfg, epochs=epochs)
    if max_workers is None:
        max_workers = int(os.environ.get("PULSEFORGE_THREADS", "1"))
    runs = train_suite(device, cfg, max_workers=max_workers)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = [r.to_dict() for r in runs]
    _write_json(out / "table1.json", records)
    (out / "table1.txt").write_text(_render_table(records))
    print(_render_table(records), end="")
    failed = [r.gate_name for r in runs if r.final_infidelity > threshold]
    missing = 10 - len(runs)
    if missing:
        print(f"{missing} gate(s) failed to train", file=sys.stderr)
    if failed:
        print(f"gates above threshold {threshold}: {', '.join(failed)}", file=sys.stderr)
    return 2 if failed or missing else 0


def cmd_verify(
    run_path,
    out_path=None,
    max_deviation: float = 0.02,
    min_fidelity: float = 0.99,
) -> int:
    """Check a trained pulse against its gate; writes verify.csv.

    SX runs go through the S-SX-S Hadamard decomposition; other gates get a
    fresh-state process fidelity check.
    """
    run_file = Path(run_path)
    try:
        run = TrainingRun.from_dict(json.loads(run_file.read_text()))
    except (OSError, ValueError, KeyError, InvariantViolation) as exc:
        print(f"error: could not load run file {run_file}: {exc}", file=sys.stderr)
        return 1
    out = Path(out_path) if out_path else run_file.parent / "verify.csv"
    try:
        if run.gate_name == "SX":
            report = verify_s_sx_s(run)
            _write_verify_csv(out, report.rows)
            print(f"S-SX-S max probability deviation: {report.max_deviation:.6e} -> {out}")
            return 0 if report.max_deviation <= max_deviation else 2
        report = process_fidelity_check(run)
        _write_verify_csv(out, report.rows)
        mean_fid = 1.0 - report.max_deviation
        print(f"{run.gate_name}: mean process fidelity {mean_fid:.6f} -> {out}")
        return 0 if mean_fid >= min_fidelity else 2
    except (IntegrationAccuracyError, PulseforgeError) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 2


def _default_probe(device: DeviceModel):
    """Weak probe pulse whose on-resonance rotation is about pi."""
    shape = PulseParams(
        duration=64.0, raw_modulus=2.0, argument=0.0, variance=16.0,
        correction_amplitude=0.0, phase=0.0,
    )
    t = np.linspace(0.0, shape.duration, 1025)
    area = np.trapezoid(np.abs(drag_envelope(shape, t)), t) / shape.effective_modulus
    area_ns = area * device.dt * 1e9
    om_ghz = device.drive_strength * 1e-9
    amp = min(1.0 / (2.0 * om_ghz * area_ns), 0.93)
    return sample_schedule(
        dataclasses.replace(shape, raw_modulus=unsquash(amp))
    )


def cmd_sweep(device_path, f_min: float, f_max: float, n_points: int, out_path=None) -> int:
    """Sweep the drive carrier and record excited-state population."""
    try:
        device = DeviceModel.from_file(device_path)
        probe = _default_probe(device)
        results = frequency_sweep(device, f_min, f_max, n_points, probe)
    except (InvariantViolation, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except IntegrationAccuracyError as exc:
        print(f"sweep failed: {exc}", file=sys.stderr)
        return 2
    out = Path(out_path) if out_path else Path("sweep.csv")
    lines = ["f_hz,excited_pop"] + [f"{f!r},{p!r}" for f, p in results]
    out.write_text("\n".join(lines) + "\n")
    best_f, best_p = max(results, key=lambda fp: fp[1])
    print(f"estimated resonance: {best_f:.9e} Hz (excited population {best_p:.4f}) -> {out}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pulseforge",
        description="Train and inspect single-pulse realizations of single-qubit gates.",
    )
    parser.add_argument("--seed", type=int, default=None, help="override the trainer seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train one pulse from an experiment spec")
    p_train.add_argument("spec", help="TOML or JSON experiment spec file")
    p_train.add_argument(
        "--threshold", type=float, default=None,
        help="final-infidelity bar for exit code 0 (default from spec, else 1e-2)",
    )

    p_suite = sub.add_parser("suite", help="train the standard ten-gate suite")
    p_suite.add_argument("device", help="device config file")
    p_suite.add_argument("out", help="output directory")
    p_suite.add_argument("--epochs", type=int, default=None)
    p_suite.add_argument("--threshold", type=float, default=1e-2)

    p_verify = sub.add_parser("verify", help="verify a trained run record")
    p_verify.add_argument("run", help="path to run.json")
    p_verify.add_argument("--out", default=None, help="verify.csv destination")
    p_verify.add_argument("--max-deviation", type=float, default=0.02)
    p_verify.add_argument("--min-fidelity", type=float, default=0.99)

    p_sweep = sub.add_parser("sweep", help="frequency sweep around the qubit resonance")
    p_sweep.add_argument("device", help="device config file")
    p_sweep.add_argument("f_min", type=float, help="sweep start, Hz")
    p_sweep.add_argument("f_max", type=float, help="sweep end, Hz")
    p_sweep.add_argument("n", type=int, help="number of grid points")
    p_sweep.add_argument("--out", default=None, help="sweep.csv destination")

    args = parser.parse_args(argv)
    if args.command == "train":
        return cmd_train(args.spec, seed_override=args.seed, threshold=args.threshold)
    if args.command == "suite":
        return cmd_suite(
            args.device, args.out, seed_override=args.seed,
            epochs=args.epochs, threshold=args.threshold,
        )
    if args.command == "verify":
        return cmd_verify(
            args.run, out_path=args.out,
            max_deviation=args.max_deviation, min_fidelity=args.min_fidelity,
        )
    if args.command == "sweep":
        return cmd_sweep(args.device, args.f_min, args.f_max, args.n, out_path=args.out)
    parser.error(f"unknown command {args.command!r}")
    return 1


if __name__ == "__main__":
    sys.exit(main())
