"""Benchmark of SGD, Krotov, Q-learning and deep Q-learning on single-qubit
state preparation with constrained piecewise-constant controls."""

from qstatebench.errors import ConfigError, ConstraintError, InvalidInputError
from qstatebench.qubit import (
    KET0,
    KET1,
    PhysicsConfig,
    QubitState,
    Unitary2,
    bloch_angles,
    bloch_vector,
    equator_target,
    evolve,
    fidelity,
    propagator,
    state_from_angles,
)
from qstatebench.control import (
    ConstraintSpec,
    ControlSequence,
    Trajectory,
    action_set,
    clamp,
    evolve_sequence,
    sequence_fidelity,
    snap_to_grid,
)
from qstatebench.problem import ProblemSpec, RunResult

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConstraintError",
    "InvalidInputError",
    "KET0",
    "KET1",
    "PhysicsConfig",
    "QubitState",
    "Unitary2",
    "bloch_angles",
    "bloch_vector",
    "equator_target",
    "evolve",
    "fidelity",
    "propagator",
    "state_from_angles",
    "ConstraintSpec",
    "ControlSequence",
    "Trajectory",
    "action_set",
    "clamp",
    "evolve_sequence",
    "sequence_fidelity",
    "snap_to_grid",
    "ProblemSpec",
    "RunResult",
]
