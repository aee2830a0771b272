"""Derivative-free stochastic gradient ascent on fidelity.

Each iteration probes one random unit direction v with a central difference
and moves along v by the estimated directional slope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qstatebench.control import ConstraintSpec, ControlSequence, clamp_array
from qstatebench.errors import ConfigError
from qstatebench.problem import ProblemSpec, RunResult


@dataclass(frozen=True)
class SgdConfig:
    probe_step: float = 0.01
    learn_rate: float = 0.003
    n_iter: int = 500
    init_low: float = 0.0
    init_high: float = 1.0

    def __post_init__(self):
        if not self.probe_step > 0:
            raise ConfigError("probe_step must be > 0")
        if not self.learn_rate > 0:
            raise ConfigError("learn_rate must be > 0")
        if self.n_iter < 0:
            raise ConfigError("n_iter must be >= 0")
        if self.init_low > self.init_high:
            raise ConfigError("init_low must not exceed init_high")


def random_direction(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(n)
    return v / np.linalg.norm(v)


def sgd_step(
    J: np.ndarray,
    problem: ProblemSpec,
    cfg: SgdConfig,
    rng: np.random.Generator,
    constraint: ConstraintSpec = ConstraintSpec(),
    dt: float | None = None,
) -> np.ndarray:
    J = np.asarray(J, dtype=float)
    if dt is None:
        dt = problem.step_duration(len(J))
    v = random_direction(len(J), rng)
    a = cfg.probe_step
    f_plus = problem.evaluate(clamp_array(J + a * v, constraint), dt)
    f_minus = problem.evaluate(clamp_array(J - a * v, constraint), dt)
    g = (f_plus - f_minus) / (2 * a)
    return clamp_array(J + cfg.learn_rate * g * v, constraint)


def sgd_run(
    problem: ProblemSpec,
    constraint: ConstraintSpec,
    cfg: SgdConfig,
    rng: np.random.Generator,
) -> RunResult:
    n = constraint.max_pieces
    dt = problem.step_duration(n)
    J = clamp_array(rng.uniform(cfg.init_low, cfg.init_high, size=n), constraint)
    f0 = problem.evaluate(J, dt)
    best_f, best_J = f0, J.copy()
    trace = []
    for _ in range(cfg.n_iter):
        J = sgd_step(J, problem, cfg, rng, constraint, dt)
        f = problem.evaluate(J, dt)
        trace.append(f)
        if f > best_f:
            best_f, best_J = f, J.copy()
    return RunResult(
        algorithm="sgd",
        fidelity_trace=trace,
        best_fidelity=best_f,
        best_sequence=ControlSequence(tuple(best_J), dt),
        iterations_used=cfg.n_iter,
        initial_fidelity=f0,
        final_sequence=ControlSequence(tuple(J), dt),
        final_fidelity=trace[-1] if trace else f0,
    )
