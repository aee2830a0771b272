"""The state-preparation problem and the per-run result record shared by all
optimizers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from qstatebench.control import ControlSequence, values_fidelity
from qstatebench.qubit import KET0, KET1, PhysicsConfig, QubitState


@dataclass(frozen=True)
class ProblemSpec:
    """Prepare ``target`` from ``initial`` within ``physics.total_time``.

    Optimizers only touch a problem through :meth:`step_duration` and
    :meth:`evaluate`, so a subclass may substitute any objective.
    """

    initial: QubitState = KET0
    target: QubitState = KET1
    physics: PhysicsConfig = PhysicsConfig()

    def step_duration(self, n_pieces: int) -> float:
        return self.physics.total_time / n_pieces

    def evaluate(self, values: Sequence[float], dt: float) -> float:
        return values_fidelity(values, dt, self.initial, self.target, self.physics.h)


@dataclass
class RunResult:
    """Outcome of one optimizer run.

    ``fidelity_trace[k - 1]`` is the fidelity after iteration (or episode) k.
    Gradient methods also record the fidelity of their starting point in
    ``initial_fidelity``; RL agents have none. ``final_sequence`` is the last
    iterate for gradient methods and the greedy rollout for RL agents.
    """

    algorithm: str
    fidelity_trace: list[float]
    best_fidelity: float
    best_sequence: ControlSequence
    iterations_used: int
    seed: int | list[int] | None = None
    initial_fidelity: float | None = None
    final_sequence: ControlSequence | None = None
    final_fidelity: float | None = None
    extras: dict = field(default_factory=dict)

    @property
    def i_f(self) -> int:
        return self.best_sequence.i_f

    def best_so_far(self) -> np.ndarray:
        """Nondecreasing running maximum, aligned with ``fidelity_trace``."""
        trace = np.asarray(self.fidelity_trace, dtype=float)
        if self.initial_fidelity is not None:
            trace = np.concatenate([[self.initial_fidelity], trace])
            return np.maximum.accumulate(trace)[1:]
        return np.maximum.accumulate(trace)

    def best_after(self, n_iter: int) -> float:
        """Best fidelity seen within the first ``n_iter`` iterations."""
        vals = list(self.fidelity_trace[:n_iter])
        if self.initial_fidelity is not None:
            vals.append(self.initial_fidelity)
        if not vals:
            raise ValueError("no fidelity recorded within the requested budget")
        return max(vals)

    def to_record(self, include_trace: bool = True) -> dict:
        rec = {
            "algorithm": self.algorithm,
            "seed": self.seed,
            "best_fidelity": self.best_fidelity,
            "i_f": self.i_f,
            "iterations_used": self.iterations_used,
            "best_sequence": self.best_sequence.to_record(),
        }
        if self.initial_fidelity is not None:
            rec["initial_fidelity"] = self.initial_fidelity
        if self.final_sequence is not None:
            rec["final_sequence"] = self.final_sequence.to_record()
            rec["final_fidelity"] = self.final_fidelity
        if include_trace:
            rec["fidelity_trace"] = list(self.fidelity_trace)
        if self.extras:
            rec["extras"] = self.extras
        return rec
