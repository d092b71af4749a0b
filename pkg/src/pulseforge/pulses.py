"""DRAG pulse model: trainable parameters, envelope, sampling and drive signal.

A pulse is described by six real trainable parameters. The raw modulus is
squashed through tanh(x/2) into (-1, 1) to keep the complex amplitude inside
the hardware's unit magnitude cap without introducing discontinuities; the
envelope is an endpoint-lifted Gaussian plus a scaled imaginary derivative
term, sampled once per hardware timestep.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import AmplitudeCapError, InvariantViolation

__all__ = [
    "squash",
    "unsquash",
    "PulseParams",
    "PulseBounds",
    "PulseSchedule",
    "drag_envelope",
    "sample_schedule",
    "drive_signal",
    "shift_phase",
    "schedule_to_dict",
    "schedule_from_dict",
]

#: Peak magnitude a rescaled over-cap schedule is squeezed to.
_RESCALE_PEAK = 0.999

#: Loss penalty per unit of peak overflow beyond magnitude 1.
OVERFLOW_PENALTY_WEIGHT = 10.0


def squash(x, printed_sign: bool = False):
    """Map a raw signed modulus into (-1, 1).

    The forward map is tanh(x/2) = (e^x - 1)/(e^x + 1), which is what the
    reference calibration pairs in the test suite reproduce. The opposite
    sign convention (1 - e^x)/(1 + e^x) is available behind ``printed_sign``
    for compatibility with sources that state the map that way.
    """
    value = np.tanh(np.asarray(x, dtype=float) / 2.0)
    # tanh rounds to exactly +-1.0 beyond |x| ~ 37; clamp the saturated tail
    # so the contract value stays inside the open interval (-1, 1).
    limit = np.nextafter(1.0, 0.0)
    value = np.clip(value, -limit, limit)
    if printed_sign:
        value = -value
    if np.ndim(x) == 0:
        return float(value)
    return value


def unsquash(y, printed_sign: bool = False):
    """Inverse of :func:`squash`; defined for |y| < 1.

    Saturation note: because squash is exponentially flat for large |x|,
    the round trip unsquash(squash(x)) loses absolute accuracy like
    eps * cosh^2(x/2); it is good to ~1e-10 only for |x| <~ 15.
    """
    arr = np.asarray(y, dtype=float)
    if np.any(np.abs(arr) >= 1.0):
        raise InvariantViolation("unsquash requires |y| < 1")
    value = 2.0 * np.arctanh(arr)
    if printed_sign:
        value = -value
    if np.ndim(y) == 0:
        return float(value)
    return value


@dataclass(frozen=True)
class PulseParams:
    """The six trainable parameters of one DRAG pulse.

    duration and variance are in units of the hardware timestep dt;
    argument and phase are radians; raw_modulus and correction_amplitude
    are dimensionless. phase is a ShiftPhase applied to the drive channel
    before the pulse plays.
    """

    duration: float
    raw_modulus: float
    argument: float
    variance: float
    correction_amplitude: float
    phase: float

    def __post_init__(self):
        vec = self.as_vector()
        if not np.all(np.isfinite(vec)):
            raise InvariantViolation("pulse parameters must be finite")
        if self.duration <= 0:
            raise InvariantViolation(f"duration must be > 0, got {self.duration!r}")
        if self.variance <= 0:
            raise InvariantViolation(f"variance must be > 0, got {self.variance!r}")

    @property
    def effective_modulus(self) -> float:
        """Squashed modulus in (-1, 1)."""
        return squash(self.raw_modulus)

    @property
    def amplitude(self) -> complex:
        """Complex amplitude effective_modulus * e^{i argument}."""
        return self.effective_modulus * np.exp(1j * self.argument)

    def as_vector(self) -> np.ndarray:
        """Parameters as a 6-vector in the canonical training order."""
        return np.array(
            [
                self.duration,
                self.raw_modulus,
                self.argument,
                self.variance,
                self.correction_amplitude,
                self.phase,
            ],
            dtype=float,
        )

    @classmethod
    def from_vector(cls, vec) -> "PulseParams":
        v = np.asarray(vec, dtype=float)
        if v.shape != (6,):
            raise InvariantViolation(f"parameter vector must have shape (6,), got {v.shape}")
        return cls(*(float(x) for x in v))

    def to_dict(self) -> dict:
        return {
            "duration": self.duration,
            "raw_modulus": self.raw_modulus,
            "argument": self.argument,
            "variance": self.variance,
            "correction_amplitude": self.correction_amplitude,
            "phase": self.phase,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PulseParams":
        return cls(
            duration=float(d["duration"]),
            raw_modulus=float(d["raw_modulus"]),
            argument=float(d["argument"]),
            variance=float(d["variance"]),
            correction_amplitude=float(d["correction_amplitude"]),
            phase=float(d["phase"]),
        )


@dataclass(frozen=True)
class PulseBounds:
    """Box constraints applied to parameters after each optimizer update."""

    duration_min: float = 8.0
    duration_max: float = 512.0
    variance_min: float = 1.0

    def clamp_vector(self, vec: np.ndarray) -> np.ndarray:
        out = np.asarray(vec, dtype=float).copy()
        out[0] = min(max(out[0], self.duration_min), self.duration_max)
        out[3] = max(out[3], self.variance_min)
        return out

    def clamp(self, params: PulseParams) -> PulseParams:
        return PulseParams.from_vector(self.clamp_vector(params.as_vector()))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "PulseBounds":
        return cls(**{k: float(v) for k, v in d.items()})


def _lift(params: PulseParams) -> float:
    """Gaussian value at t = -1, subtracted so the envelope lifts off zero."""
    c = params.duration / 2.0
    return float(np.exp(-((1.0 + c) ** 2) / (2.0 * params.variance**2)))


def drag_envelope(params: PulseParams, t):
    """Complex DRAG envelope at time t (in dt units, t in [0, duration]).

    Returns A * (g(t) + i * beta * g'(t)) with A the complex amplitude,
    g(t) = [G(t) - G(-1)] / [1 - G(-1)] the lifted Gaussian of width
    ``variance`` centered at duration/2, and g' its analytic derivative.
    The lifted g vanishes at t = -1 and t = duration + 1.
    """
    tt = np.asarray(t, dtype=float)
    c = params.duration / 2.0
    var = params.variance**2
    lift = _lift(params)
    denom = -np.expm1(-((1.0 + c) ** 2) / (2.0 * var))  # 1 - lift, accurately
    u = tt - c
    gauss = np.exp(-(u**2) / (2.0 * var))
    g = (gauss - lift) / denom
    gprime = -(u / var) * gauss / denom
    env = params.amplitude * (g + 1j * params.correction_amplitude * gprime)
    if np.ndim(t) == 0:
        return complex(env)
    return env


def _envelope_peak(params: PulseParams, samples: np.ndarray) -> float:
    """Peak |envelope| over [0, duration], estimated on a dense grid."""
    n_dense = max(4 * len(samples) + 1, 257)
    dense = np.linspace(0.0, params.duration, n_dense)
    dense_mag = np.abs(drag_envelope(params, dense))
    return float(max(dense_mag.max(), np.abs(samples).max(initial=0.0)))


@dataclass(frozen=True)
class PulseSchedule:
    """Discrete drive-channel program: complex samples plus a pre-phase.

    ``samples[j]`` is the complex value played during timestep j; the
    simulator refuses samples with magnitude above 1. ``pre_phase`` is the
    ShiftPhase issued before the pulse. ``overflow_excess`` records how far
    the raw envelope peak exceeded 1 when the schedule was rescaled.
    """

    samples: np.ndarray
    pre_phase: float = 0.0
    params: PulseParams | None = None
    overflow_excess: float = 0.0

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=complex).copy()
        if arr.ndim != 1 or arr.size < 1:
            raise InvariantViolation("schedule needs at least one sample")
        if not np.all(np.isfinite(arr.view(float))):
            raise InvariantViolation("schedule samples must be finite")
        if np.abs(arr).max() > 1.0 + 1e-12:
            raise AmplitudeCapError("schedule sample magnitude exceeds 1")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def n(self) -> int:
        return int(self.samples.size)

    def time_reversed(self) -> "PulseSchedule":
        """Conjugated, order-reversed schedule with negated pre-phase.

        Evolving conj(psi_final) under this schedule and conjugating the
        result undoes the original evolution.
        """
        return PulseSchedule(
            samples=np.conj(self.samples[::-1]),
            pre_phase=-self.pre_phase,
        )


def sample_schedule(params: PulseParams, *, rescale_overflow: bool = False) -> PulseSchedule:
    """Sample the DRAG envelope into a schedule of round(duration) values.

    Samples are taken at midpoints t = j + 0.5 so the near-zero lifted
    endpoints are not wasted on actual samples. If the envelope peak exceeds
    magnitude 1, raises AmplitudeCapError unless ``rescale_overflow`` is set,
    in which case the samples are rescaled to a 0.999 peak and the excess is
    recorded on the schedule (the trainer turns it into a loss penalty).
    """
    n = int(round(params.duration))
    if n < 1:
        raise InvariantViolation(f"duration {params.duration!r} rounds to zero samples")
    t = np.arange(n, dtype=float) + 0.5
    samples = drag_envelope(params, t)
    peak = _envelope_peak(params, samples)
    excess = 0.0
    if peak > 1.0:
        if not rescale_overflow:
            raise AmplitudeCapError(
                f"envelope peak {peak:.6f} exceeds the unit amplitude cap"
            )
        samples = samples * (_RESCALE_PEAK / peak)
        excess = peak - 1.0
    return PulseSchedule(
        samples=samples,
        pre_phase=params.phase,
        params=params,
        overflow_excess=excess,
    )


def drive_signal(
    sched: PulseSchedule, f: float, j: int, dt: float, channel_phase: float = 0.0
) -> float:
    """Real drive-line value at timestep j: Re[e^{i(2 pi f j dt + phi)} d_j].

    ``phi`` is the accumulated channel phase plus the schedule's pre-phase.
    ``f`` is the carrier frequency in Hz and ``dt`` the timestep in seconds.
    """
    if not 0 <= j < sched.n:
        raise IndexError(f"timestep {j} out of range for schedule of {sched.n} samples")
    total_phase = channel_phase + sched.pre_phase
    carrier = np.exp(1j * (2.0 * np.pi * f * j * dt + total_phase))
    return float((carrier * sched.samples[j]).real)


def shift_phase(channel_phase: float, delta: float) -> float:
    """Advance the drive channel phase; affects every subsequent pulse."""
    return channel_phase + delta


def schedule_to_dict(sched: PulseSchedule, dt: float) -> dict:
    """JSON-ready form: {n, dt, pre_phase, samples: [[re, im], ...], params}."""
    return {
        "n": sched.n,
        "dt": dt,
        "pre_phase": sched.pre_phase,
        "samples": [[float(z.real), float(z.imag)] for z in sched.samples],
        "params": sched.params.to_dict() if sched.params is not None else None,
    }


def schedule_from_dict(d: dict) -> tuple[PulseSchedule, float]:
    """Inverse of :func:`schedule_to_dict`; returns (schedule, dt)."""
    samples = np.array([complex(re, im) for re, im in d["samples"]])
    if len(samples) != int(d["n"]):
        raise InvariantViolation("sample count does not match declared n")
    params = PulseParams.from_dict(d["params"]) if d.get("params") else None
    sched = PulseSchedule(samples=samples, pre_phase=float(d["pre_phase"]), params=params)
    return sched, float(d["dt"])
