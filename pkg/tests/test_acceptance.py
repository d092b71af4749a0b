"""Acceptance suite: every release criterion at its stated tolerance.

Each test prints one PASS/FAIL line (run pytest with -s to watch them);
tolerances are pinned here, not configurable.
"""

import contextlib
import dataclasses
import json
import re
import time

import numpy as np

import pulseforge as pf
from pulseforge.cli import main
from pulseforge.pulses import PulseParams
from pulseforge.training import FD_STEPS


@contextlib.contextmanager
def criterion(number, name):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number} ({name}): FAIL")
        raise
    print(f"ACCEPTANCE {number} ({name}): PASS")


def test_criterion_1_squash_reference_pairs(modulus_pairs):
    with criterion(1, "squash reference pairs"):
        start = time.perf_counter()
        effective = [pf.squash(raw) for raw, _ in modulus_pairs]
        elapsed = time.perf_counter() - start
        for (raw, expected), got in zip(modulus_pairs, effective):
            assert abs(got - expected) <= 5e-4, (raw, expected, got)
        assert elapsed < 1e-3, f"took {elapsed * 1e3:.3f} ms"


def test_criterion_2_basis_gate_training(acceptance_runs):
    with criterion(2, "X/SX/H training"):
        finals = {}
        for name in ("X", "SX", "H"):
            run, wall = acceptance_runs[name]
            assert len(run.trace) <= 200
            assert run.final_infidelity <= 1e-2, (name, run.final_infidelity)
            assert wall <= 60.0, (name, wall)
            finals[name] = run.final_infidelity
        assert min(finals.values()) <= 5e-3, finals


def test_criterion_3_composite_condensation(acceptance_runs):
    with criterion(3, "composite three-rotation condensation"):
        run, wall = acceptance_runs["3ROT"]
        assert run.angles == [np.pi / 4]
        assert run.final_infidelity <= 1e-2, run.final_infidelity
        assert wall <= 60.0, wall


def test_criterion_4_s_sx_s_identity(acceptance_runs):
    with criterion(4, "S-SX-S Hadamard identity"):
        # exact-matrix oracle: diag(1, i) SX diag(1, i) = e^{i pi/4} H
        s = np.diag([1.0, 1.0j])
        comp = s @ pf.gate_sx() @ s
        assert np.max(np.abs(comp - np.exp(1j * np.pi / 4) * pf.gate_h())) <= 1e-10
        rng = np.random.default_rng(404)
        for _ in range(10):
            psi = pf.bloch_state(rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi))
            pc = pf.measure_probs(comp @ psi)
            ph = pf.measure_probs(pf.gate_h() @ psi)
            assert max(abs(pc[0] - ph[0]), abs(pc[1] - ph[1])) <= 1e-10
        # trained pulse in place of the exact matrix
        run, _ = acceptance_runs["SX"]
        report = pf.verify_s_sx_s(run, n_inputs=10)
        assert report.max_deviation <= 0.02, report.max_deviation


def test_criterion_5_resonance_sweep(device):
    with criterion(5, "resonance sweep"):
        probe = pf.sample_schedule(PulseParams(64.0, 0.33, 0.0, 16.0, 0.0, 0.0))
        nu = device.qubit_freq
        start = time.perf_counter()
        results = pf.frequency_sweep(device, nu - 50e6, nu + 50e6, 101, probe)
        elapsed = time.perf_counter() - start
        freqs = np.array([f for f, _ in results])
        pops = np.array([p for _, p in results])
        step = freqs[1] - freqs[0]
        assert abs(freqs[int(np.argmax(pops))] - nu) <= step + 1e-6
        assert elapsed <= 5.0, elapsed


def test_criterion_6_simulator_physics(device):
    with criterion(6, "simulator physics"):
        # norm drift at default substeps, worst-case schedule
        sched = pf.PulseSchedule(samples=np.ones(512, dtype=complex))
        assert pf.evolve(pf.KET_0, sched, device).norm_drift <= 1e-9

        # fourth-order convergence in the substep size
        pulse = pf.sample_schedule(PulseParams(64.0, 1.2, 0.4, 16.0, 0.5, 0.2))
        base = dataclasses.replace(device, drive_freq=device.qubit_freq - 0.05e9)
        psi0 = pf.bloch_state(0.8, 1.9)

        def final(substeps):
            dev = dataclasses.replace(base, substeps=substeps)
            return pf.evolve(psi0, pulse, dev, strict=False).final_state

        ref = final(20)
        e1 = np.linalg.norm(final(1) - ref)
        e2 = np.linalg.norm(final(2) - ref)
        assert 3.6 <= np.log2(e1 / e2) <= 4.4, np.log2(e1 / e2)

        # closed-form Rabi agreement
        om = device.drive_strength * 1e-9
        n, d = 200, 0.5
        res = pf.evolve(pf.KET_0, pf.PulseSchedule(samples=np.full(n, d, dtype=complex)), device)
        t_ns = n * device.dt * 1e9
        assert abs(pf.measure_probs(res.final_state)[0] - np.cos(np.pi * om * d * t_ns) ** 2) <= 1e-6

        # lab vs rotating frame at Omega/nu = 1e-3
        nu = 0.25e9
        weak = pf.PulseSchedule(samples=np.full(3000, 0.8, dtype=complex), pre_phase=0.3)
        lab = pf.DeviceModel(qubit_freq=nu, drive_strength=nu * 1e-3, dt=0.1e-9,
                             frame="lab", substeps=16)
        rwa = pf.DeviceModel(qubit_freq=nu, drive_strength=nu * 1e-3, dt=0.1e-9,
                             frame="rotating_rwa", substeps=4)
        a = pf.evolve(psi0, weak, lab).final_state
        b = pf.evolve(psi0, weak, rwa).final_state
        assert pf.fidelity(pf.density_of(a), pf.density_of(b)) >= 1 - 1e-3


def test_criterion_7_fidelity_suite():
    with criterion(7, "fidelity and matrix-sqrt suite"):
        rng = np.random.default_rng(707)
        for _ in range(120):
            a = pf.bloch_state(rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi))
            b = pf.bloch_state(rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi))
            ra, rb = pf.density_of(a), pf.density_of(b)
            f = pf.fidelity(ra, rb)
            assert 0.0 <= f <= 1.0
            assert abs(f - pf.fidelity(rb, ra)) <= 1e-10
            assert abs(pf.fidelity(ra, ra) - 1.0) <= 1e-10
            assert abs(f - abs(np.vdot(a, b)) ** 2) <= 1e-9
        for _ in range(50):
            m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            psd = m @ m.conj().T
            s = pf.matrix_sqrt_psd(psd)
            assert np.max(np.abs(s @ s - psd)) <= 1e-9


def test_criterion_8_gradient_suite(device):
    with criterion(8, "finite-difference gradient suite"):
        dataset = pf.generate_dataset(pf.gate_x(), 10, seed=42)
        rng = np.random.default_rng(808)
        for _ in range(20):
            vec = np.array([
                np.floor(rng.uniform(40, 90)) + rng.uniform(-0.2, 0.2),
                rng.uniform(-1.5, 1.5),
                rng.uniform(-np.pi, np.pi),
                rng.uniform(8.0, 40.0),
                rng.uniform(-1.0, 1.0),
                rng.uniform(-np.pi, np.pi),
            ])
            params = PulseParams.from_vector(vec)
            grad = pf.gradient(params, dataset, device)
            base = params.as_vector()
            for i, h in enumerate(FD_STEPS):
                def loss_at(delta, i=i):
                    v = base.copy()
                    v[i] += delta
                    return pf.loss(PulseParams.from_vector(v), dataset, device)

                d_h = (loss_at(h) - loss_at(-h)) / (2 * h)
                d_h2 = (loss_at(h / 2) - loss_at(-h / 2)) / h
                oracle = (4 * d_h2 - d_h) / 3
                assert abs(grad[i] - oracle) <= max(1e-4 * abs(oracle), 1e-7), (i, grad[i], oracle)


def test_criterion_9_determinism(tmp_path):
    with criterion(9, "seeded determinism across invocations"):
        (tmp_path / "device.toml").write_text(
            'qubit_freq_ghz = 4.972\ndrive_strength_ghz = 0.4\ndt_ns = 0.222\n'
            'frame = "rotating_rwa"\n'
        )
        spec = tmp_path / "spec.toml"
        spec.write_text(
            'device = "device.toml"\noutputs = "out"\n'
            '[target]\ngate = "X"\n[trainer]\nepochs = 40\nseed = 42\n'
        )
        assert main(["train", str(spec)]) == 0
        first = (tmp_path / "out" / "run.json").read_text()
        assert main(["train", str(spec)]) == 0
        second = (tmp_path / "out" / "run.json").read_text()
        strip = lambda s: re.sub(r'"created_at": "[^"]*"', '"created_at": ""', s)
        assert strip(first) == strip(second)
        assert json.loads(first)["infidelity"] == json.loads(second)["infidelity"]
