"""pulseforge: train single DRAG microwave pulses that realize single-qubit gates.

Simulates a driven two-level qubit, and uses finite-difference gradients with
Adam to train one six-parameter pulse per target gate, including composite
multi-gate transformations condensed into a single pulse.
"""

from .errors import (
    AmplitudeCapError,
    DivergenceError,
    ExperimentSpecError,
    GradientEvaluationError,
    IntegrationAccuracyError,
    InvariantViolation,
    PulseforgeError,
)
from .estimator import DragPulseTrainer
from .gates import (
    gate_h,
    gate_i,
    gate_rx,
    gate_ry,
    gate_rz,
    gate_sx,
    gate_u,
    gate_x,
    three_rot,
)
from .metrics import fidelity, infidelity, matrix_sqrt_psd
from .pulses import (
    PulseBounds,
    PulseParams,
    PulseSchedule,
    drag_envelope,
    drive_signal,
    sample_schedule,
    schedule_from_dict,
    schedule_to_dict,
    shift_phase,
    squash,
    unsquash,
)
from .simulator import (
    DeviceModel,
    EvolutionResult,
    evolve,
    frequency_sweep,
    unitary_of_schedule,
)
from .states import KET_0, KET_1, apply, bloch_state, density_of, measure_probs
from .training import (
    FD_STEPS,
    GATE_REGISTRY,
    SUITE_GATES,
    TrainerConfig,
    TrainingExample,
    TrainingRun,
    generate_dataset,
    gradient,
    loss,
    process_fidelity_check,
    resolve_target,
    train,
    train_suite,
    verify_s_sx_s,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudeCapError",
    "DivergenceError",
    "ExperimentSpecError",
    "GradientEvaluationError",
    "IntegrationAccuracyError",
    "InvariantViolation",
    "PulseforgeError",
    "DragPulseTrainer",
    "gate_h",
    "gate_i",
    "gate_rx",
    "gate_ry",
    "gate_rz",
    "gate_sx",
    "gate_u",
    "gate_x",
    "three_rot",
    "fidelity",
    "infidelity",
    "matrix_sqrt_psd",
    "PulseBounds",
    "PulseParams",
    "PulseSchedule",
    "drag_envelope",
    "drive_signal",
    "sample_schedule",
    "schedule_from_dict",
    "schedule_to_dict",
    "shift_phase",
    "squash",
    "unsquash",
    "DeviceModel",
    "EvolutionResult",
    "evolve",
    "frequency_sweep",
    "unitary_of_schedule",
    "KET_0",
    "KET_1",
    "apply",
    "bloch_state",
    "density_of",
    "measure_probs",
    "FD_STEPS",
    "GATE_REGISTRY",
    "SUITE_GATES",
    "TrainerConfig",
    "TrainingExample",
    "TrainingRun",
    "generate_dataset",
    "gradient",
    "loss",
    "process_fidelity_check",
    "resolve_target",
    "train",
    "train_suite",
    "verify_s_sx_s",
    "__version__",
]
