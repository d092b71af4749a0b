"""Scikit-learn style estimator wrapping the pulse trainer.

``DragPulseTrainer`` treats pulse training as supervised learning on quantum
states: ``fit(X, y)`` takes input pure states and the states (or density
matrices) a target transformation should map them to, and learns one DRAG
pulse realizing that map on the configured device. It follows the sklearn
estimator contract (constructor stores hyperparameters verbatim,
``get_params``/``set_params`` work, ``fit`` returns self), so it composes
with ``clone``, pipelines and model-selection utilities.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .metrics import _fidelity_core
from .pulses import PulseBounds, PulseSchedule, sample_schedule
from .simulator import DeviceModel, unitary_of_schedule
from .training import TrainerConfig, TrainingExample, _fit_examples
from .validation import check_state_array, check_target_states

__all__ = ["DragPulseTrainer"]


class DragPulseTrainer(BaseEstimator):
    """Learn one DRAG pulse that maps input states to target states.

    Parameters
    ----------
    epochs : int
        Gradient steps; one full-dataset step per epoch.
    learning_rate : float
        Optimizer step size.
    optimizer : {"adam", "gd"}
        Adam (default) or plain gradient descent.
    seed : int
        Seeds the initialization noise; runs are bit-reproducible.
    init : "default", "random" or PulseParams
        Starting point for the six pulse parameters.
    bounds : PulseBounds or None
        Box constraints applied after each update (None uses defaults).
    device : DeviceModel or None
        Simulated device (None uses the default device).

    Attributes
    ----------
    params_ : PulseParams
        Trained pulse parameters.
    trace_ : ndarray of shape (epochs,)
        Per-epoch mean infidelity.
    final_infidelity_ : float
        Last trace entry.
    device_ : DeviceModel
        The device the pulse was trained against.
    """

    def __init__(
        self,
        epochs: int = 100,
        learning_rate: float = 0.05,
        optimizer: str = "adam",
        seed: int = 42,
        init="default",
        bounds=None,
        device=None,
    ):
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.optimizer = optimizer
        self.seed = seed
        self.init = init
        self.bounds = bounds
        self.device = device

    def _config(self, n_examples: int) -> TrainerConfig:
        return TrainerConfig(
            epochs=self.epochs,
            dataset_size=n_examples,
            seed=self.seed,
            learning_rate=self.learning_rate,
            optimizer=self.optimizer,
            init=self.init,
            bounds=self.bounds if self.bounds is not None else PulseBounds(),
        )

    def fit(self, X, y) -> "DragPulseTrainer":
        """Train the pulse on (input state, target state) pairs.

        X is (n, 2) complex unit-norm states; y is (n, 2) states or
        (n, 2, 2) density matrices.
        """
        inputs = check_state_array(X)
        targets = check_target_states(y, len(inputs))
        dataset = [
            TrainingExample(input=inputs[k], target=targets[k]) for k in range(len(inputs))
        ]
        device = self.device if self.device is not None else DeviceModel()
        params, trace = _fit_examples(dataset, self._config(len(dataset)), device)
        self.params_ = params
        self.trace_ = np.array([v for _, v in trace])
        self.final_infidelity_ = trace[-1][1]
        self.device_ = device
        self.n_iter_ = len(trace)
        return self

    def _check_fitted(self):
        if not hasattr(self, "params_"):
            raise NotFittedError("this DragPulseTrainer instance is not fitted yet")

    def to_schedule(self) -> PulseSchedule:
        """Sampled schedule of the trained pulse."""
        self._check_fitted()
        return sample_schedule(self.params_, rescale_overflow=True)

    def predict(self, X) -> np.ndarray:
        """Evolve each input state under the trained pulse; returns (n, 2)."""
        self._check_fitted()
        inputs = check_state_array(X)
        u = unitary_of_schedule(self.to_schedule(), self.device_)
        out = (u @ inputs.T).T
        return out / np.linalg.norm(out, axis=1, keepdims=True)

    def score(self, X, y) -> float:
        """Mean state fidelity between predictions and targets."""
        self._check_fitted()
        inputs = check_state_array(X)
        targets = check_target_states(y, len(inputs))
        predicted = self.predict(inputs)
        fids = [
            _fidelity_core(np.outer(p, p.conj()), targets[k])
            for k, p in enumerate(predicted)
        ]
        return float(np.mean(fids))
