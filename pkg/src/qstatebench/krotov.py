"""Krotov-type sweep: forward states, back-propagated co-states, and a
sequential per-piece field update.

For H(J) = 4 J sigma_z + h sigma_x the control derivative is 4 sigma_z, so
the update term for piece i is ``Im <chi_i| 4 sigma_z |psi_i>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from qstatebench.control import ConstraintSpec, ControlSequence, clamp
from qstatebench.errors import ConfigError
from qstatebench.problem import ProblemSpec, RunResult
from qstatebench.qubit import PhysicsConfig, QubitState, _propagator_entries, fidelity


@dataclass(frozen=True)
class KrotovConfig:
    update_scale: float = 0.1
    n_iter: int = 500
    init_low: float = 0.0
    init_high: float = 1.0

    def __post_init__(self):
        if not self.update_scale > 0:
            raise ConfigError("update_scale must be > 0")
        if self.n_iter < 0:
            raise ConfigError("n_iter must be >= 0")
        if self.init_low > self.init_high:
            raise ConfigError("init_low must not exceed init_high")


@dataclass(frozen=True)
class CoState:
    """Unnormalized two-component vector chi."""

    c0: complex
    c1: complex

    @property
    def norm(self) -> float:
        return math.sqrt(abs(self.c0) ** 2 + abs(self.c1) ** 2)


def forward_pass(
    J: Sequence[float], psi0: QubitState, dt: float, physics: PhysicsConfig = PhysicsConfig()
) -> list[QubitState]:
    states = [psi0]
    psi = psi0
    for j in J:
        u00, u01, u10, u11 = _propagator_entries(j, dt, physics.h)
        psi = QubitState(u00 * psi.amp0 + u01 * psi.amp1, u10 * psi.amp0 + u11 * psi.amp1)
        states.append(psi)
    return states


def costate_init(psiN: QubitState, target: QubitState) -> CoState:
    """chi_N = |target><target|psi_N>."""
    overlap = target.amp0.conjugate() * psiN.amp0 + target.amp1.conjugate() * psiN.amp1
    return CoState(target.amp0 * overlap, target.amp1 * overlap)


def backward_pass(
    J: Sequence[float], chiN: CoState, dt: float, physics: PhysicsConfig = PhysicsConfig()
) -> list[CoState]:
    """chi_{i-1} = U_i^dagger chi_i; returns [chi_0, ..., chi_N]."""
    chis = [chiN]
    c0, c1 = chiN.c0, chiN.c1
    for j in reversed(J):
        u00, u01, u10, u11 = _propagator_entries(j, dt, physics.h)
        c0, c1 = (
            u00.conjugate() * c0 + u10.conjugate() * c1,
            u01.conjugate() * c0 + u11.conjugate() * c1,
        )
        chis.append(CoState(c0, c1))
    chis.reverse()
    return chis


def update_term(chi: CoState, psi: QubitState) -> float:
    """Im <chi| 4 sigma_z |psi>."""
    return (4.0 * (chi.c0.conjugate() * psi.amp0 - chi.c1.conjugate() * psi.amp1)).imag


def krotov_update_sweep(
    J: Sequence[float],
    chis: Sequence[CoState],
    psi0: QubitState,
    constraint: ConstraintSpec,
    cfg: KrotovConfig,
    dt: float,
    physics: PhysicsConfig = PhysicsConfig(),
) -> tuple[list[float], list[QubitState]]:
    """One sequential sweep over the pieces.

    Piece i is propagated from the already-updated psi_{i-1} with its old
    value, its field is updated from (chi_i, psi_i), and psi_i is then
    recomputed with the new value so that the returned states belong to the
    returned controls.
    """
    new_J = list(J)
    states = [psi0]
    psi = psi0
    for i in range(len(new_J)):
        u00, u01, u10, u11 = _propagator_entries(new_J[i], dt, physics.h)
        trial = QubitState(u00 * psi.amp0 + u01 * psi.amp1, u10 * psi.amp0 + u11 * psi.amp1)
        j_new = clamp(new_J[i] + cfg.update_scale * update_term(chis[i + 1], trial), constraint)
        if j_new != new_J[i]:
            new_J[i] = j_new
            u00, u01, u10, u11 = _propagator_entries(j_new, dt, physics.h)
            psi = QubitState(u00 * psi.amp0 + u01 * psi.amp1, u10 * psi.amp0 + u11 * psi.amp1)
        else:
            psi = trial
        states.append(psi)
    return new_J, states


def krotov_run(
    problem: ProblemSpec,
    constraint: ConstraintSpec,
    cfg: KrotovConfig,
    rng: np.random.Generator,
) -> RunResult:
    n = constraint.max_pieces
    dt = problem.step_duration(n)
    physics = problem.physics
    J = [clamp(float(x), constraint) for x in rng.uniform(cfg.init_low, cfg.init_high, size=n)]
    states = forward_pass(J, problem.initial, dt, physics)
    f0 = fidelity(problem.target, states[-1])
    chis = backward_pass(J, costate_init(states[-1], problem.target), dt, physics)
    best_f, best_J = f0, list(J)
    trace = []
    for _ in range(cfg.n_iter):
        J, states = krotov_update_sweep(J, chis, problem.initial, constraint, cfg, dt, physics)
        f = fidelity(problem.target, states[-1])
        trace.append(f)
        if f > best_f:
            best_f, best_J = f, list(J)
        chis = backward_pass(J, costate_init(states[-1], problem.target), dt, physics)
    return RunResult(
        algorithm="krotov",
        fidelity_trace=trace,
        best_fidelity=best_f,
        best_sequence=ControlSequence(tuple(best_J), dt),
        iterations_used=cfg.n_iter,
        initial_fidelity=f0,
        final_sequence=ControlSequence(tuple(J), dt),
        final_fidelity=trace[-1] if trace else f0,
    )
