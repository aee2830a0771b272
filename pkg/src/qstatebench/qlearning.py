"""Tabular Q-learning on a 30 x 60 grid of Bloch-sphere states."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qstatebench.control import ConstraintSpec, ControlSequence, action_set
from qstatebench.errors import ConfigError
from qstatebench.problem import ProblemSpec, RunResult
from qstatebench.qubit import QubitState, _propagator_entries

# Tolerance under which two node fidelities count as tied.
_TIE_TOL = 1e-12


class StateGrid:
    """Nodes theta = k pi/30 (k < 30) by phi = k pi/30 (k < 60).

    Node (k_theta, k_phi) has flat index ``k_theta * phi_count + k_phi``.
    """

    def __init__(self, theta_count: int = 30, phi_count: int = 60):
        self.theta_count = theta_count
        self.phi_count = phi_count
        theta = np.arange(theta_count) * math.pi / theta_count
        phi = np.arange(phi_count) * math.pi / (phi_count // 2)
        th, ph = np.meshgrid(theta, phi, indexing="ij")
        self.theta = th.ravel()
        self.phi = ph.ravel()
        # conjugated node amplitudes, ready for <node|psi>
        self._c0 = np.cos(self.theta / 2).astype(complex)
        self._c1 = np.exp(-1j * self.phi) * np.sin(self.theta / 2)

    def __len__(self) -> int:
        return self.theta_count * self.phi_count

    def flat_index(self, k_theta: int, k_phi: int) -> int:
        return k_theta * self.phi_count + k_phi

    def node_index(self, flat: int) -> tuple[int, int]:
        return divmod(flat, self.phi_count)

    def node_state(self, flat: int) -> QubitState:
        return QubitState(self._c0[flat].conjugate(), self._c1[flat].conjugate())

    def fidelities(self, state: QubitState) -> np.ndarray:
        return np.abs(self._c0 * state.amp0 + self._c1 * state.amp1) ** 2


_DEFAULT_GRID: StateGrid | None = None


def default_grid() -> StateGrid:
    global _DEFAULT_GRID
    if _DEFAULT_GRID is None:
        _DEFAULT_GRID = StateGrid()
    return _DEFAULT_GRID


def discretize(state: QubitState, grid: StateGrid | None = None) -> int:
    """Flat index of the node with maximal fidelity to ``state``.

    Exhaustive scan; near-ties (within 1e-12) go to the lowest index.
    """
    grid = grid or default_grid()
    f = grid.fidelities(state)
    return int(np.flatnonzero(f >= f.max() - _TIE_TOL)[0])


@dataclass(frozen=True)
class RewardSchedule:
    """Tiered reward: F >= 0.999 -> 5000, F > 0.9 -> 100, F > 0.5 -> 10, else 0."""

    tiers: tuple[tuple[float, float], ...] = ((0.999, 5000.0), (0.9, 100.0), (0.5, 10.0))

    def __call__(self, F: float) -> float:
        top_lo, top_val = self.tiers[0]
        if F >= top_lo:
            return top_val
        for lo, val in self.tiers[1:]:
            if F > lo:
                return val
        return 0.0


def reward(F: float, schedule: RewardSchedule = RewardSchedule()) -> float:
    return schedule(F)


def epsilon_greedy(qrow: np.ndarray, eps: float, rng: np.random.Generator) -> int:
    """Uniform random index with probability eps, else first argmax."""
    if eps > 0 and rng.random() < eps:
        return int(rng.integers(len(qrow)))
    return int(np.argmax(qrow))


@dataclass(frozen=True)
class QlConfig:
    learn_rate: float = 0.1
    discount: float = 0.95
    explore: float = 0.1
    n_iter: int = 500
    success_threshold: float = 1e-3
    # Replace the physical state by its grid node after every step.
    snap_state: bool = False

    def __post_init__(self):
        if not 0 < self.learn_rate <= 1:
            raise ConfigError("learn_rate must lie in (0, 1]")
        if not 0 <= self.discount < 1:
            raise ConfigError("discount must lie in [0, 1)")
        if not 0 <= self.explore <= 1:
            raise ConfigError("explore must lie in [0, 1]")
        if self.n_iter < 0:
            raise ConfigError("n_iter must be >= 0")


class QTable:
    def __init__(self, n_states: int, n_actions: int):
        self.values = np.zeros((n_states, n_actions))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def row(self, s: int) -> np.ndarray:
        return self.values[s]

    def dump_rows(self):
        """(flat_index, action_index, value) for every entry."""
        for s, a in np.ndindex(*self.values.shape):
            yield s, a, float(self.values[s, a])


def q_update(table: QTable, s_prev: int, a: int, r: float, s_next: int, cfg: QlConfig) -> None:
    q = table.values
    q[s_prev, a] += cfg.learn_rate * (r + cfg.discount * q[s_next].max() - q[s_prev, a])


def _step(psi: QubitState, J: float, dt: float, h: float) -> QubitState:
    u00, u01, u10, u11 = _propagator_entries(J, dt, h)
    return QubitState(u00 * psi.amp0 + u01 * psi.amp1, u10 * psi.amp0 + u11 * psi.amp1)


def _fid(target: QubitState, psi: QubitState) -> float:
    return abs(target.amp0.conjugate() * psi.amp0 + target.amp1.conjugate() * psi.amp1) ** 2


def _episode(problem, actions, dt, n_steps, table, cfg, rng, grid, eps, learn):
    psi = problem.initial
    s = discretize(psi, grid)
    chosen: list[int] = []
    F = _fid(problem.target, psi)
    for _ in range(n_steps):
        a = epsilon_greedy(table.values[s], eps, rng)
        psi = _step(psi, actions[a], dt, problem.physics.h)
        s_next = discretize(psi, grid)
        F = _fid(problem.target, psi)
        if cfg.snap_state:
            psi = grid.node_state(s_next)
        if learn:
            q_update(table, s, a, reward(F), s_next, cfg)
        chosen.append(a)
        s = s_next
        if 1.0 - F < cfg.success_threshold:
            break
    return chosen, F


def ql_run(
    problem: ProblemSpec,
    constraint: ConstraintSpec,
    cfg: QlConfig,
    rng: np.random.Generator,
    grid: StateGrid | None = None,
    table: QTable | None = None,
) -> RunResult:
    grid = grid or default_grid()
    actions = action_set(constraint)
    n = constraint.max_pieces
    dt = problem.step_duration(n)
    if table is None:
        table = QTable(len(grid), len(actions))

    trace = []
    best_f, best_actions = -1.0, []
    for _ in range(cfg.n_iter):
        chosen, F = _episode(problem, actions, dt, n, table, cfg, rng, grid, cfg.explore, True)
        trace.append(F)
        if F > best_f:
            best_f, best_actions = F, chosen

    greedy, greedy_f = _episode(problem, actions, dt, n, table, cfg, rng, grid, 0.0, False)
    greedy_seq = ControlSequence(tuple(actions[a] for a in greedy), dt)
    if cfg.snap_state:
        greedy_f = problem.evaluate(greedy_seq.values, dt)
        best_f = problem.evaluate([actions[a] for a in best_actions], dt)
    if greedy_f >= best_f:
        best_f, best_seq = greedy_f, greedy_seq
    else:
        best_seq = ControlSequence(tuple(actions[a] for a in best_actions), dt)
    return RunResult(
        algorithm="ql",
        fidelity_trace=trace,
        best_fidelity=best_f,
        best_sequence=best_seq,
        iterations_used=cfg.n_iter,
        final_sequence=greedy_seq,
        final_fidelity=greedy_f,
    )
