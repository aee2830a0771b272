"""Deep Q-learning with experience replay and a periodically synced target
network."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qstatebench.control import ConstraintSpec, ControlSequence, action_set
from qstatebench.densenet import (
    DenseNet,
    net_clone,
    net_forward,
    net_forward_batch,
    net_init,
    net_train_step,
)
from qstatebench.errors import ConfigError
from qstatebench.problem import ProblemSpec, RunResult
from qstatebench.qlearning import RewardSchedule, epsilon_greedy
from qstatebench.qubit import QubitState, _propagator_entries


def encode(state: QubitState) -> np.ndarray:
    """[Re <0|psi>, Im <0|psi>, Re <1|psi>, Im <1|psi>]."""
    return np.array([state.amp0.real, state.amp0.imag, state.amp1.real, state.amp1.imag])


@dataclass(frozen=True)
class Experience:
    prev_state: np.ndarray
    action_index: int
    reward: float
    next_state: np.ndarray
    terminal: bool = False


class ReplayMemory:
    """Fixed-capacity ring buffer; the oldest experience is overwritten first."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ConfigError("memory capacity must be >= 1")
        self.capacity = capacity
        self._items: list[Experience | None] = [None] * capacity
        self.cursor = 0
        self.fill = 0

    def __len__(self) -> int:
        return self.fill

    def remember(self, e: Experience) -> None:
        self._items[self.cursor] = e
        self.cursor = (self.cursor + 1) % self.capacity
        self.fill = min(self.fill + 1, self.capacity)

    def contents(self) -> list[Experience]:
        """Stored experiences, oldest first."""
        if self.fill < self.capacity:
            return list(self._items[: self.fill])
        return self._items[self.cursor :] + self._items[: self.cursor]

    def sample(self, batch_size: int, rng: np.random.Generator) -> list[Experience]:
        """Uniform sampling with replacement."""
        idx = rng.integers(0, self.fill, size=batch_size)
        return [self._items[i] for i in idx]


def remember(mem: ReplayMemory, e: Experience) -> None:
    mem.remember(e)


def td_target(e: Experience, target_net: DenseNet, discount: float) -> float:
    if e.terminal:
        return e.reward
    return e.reward + discount * float(net_forward(target_net, e.next_state).max())


@dataclass(frozen=True)
class DqlConfig:
    discount: float = 0.9
    explore: float = 0.5
    learn_rate: float = 1e-3
    batch_size: int = 32
    memory_capacity: int = 2000
    learn_every: int = 5
    sync_every: int = 50
    n_iter: int = 500
    success_threshold: float = 1e-3
    hidden_layout: tuple[int, ...] = (32, 32)
    # Multiplies the tiered reward before it enters the TD target.
    reward_scale: float = 0.01
    # Linear decay from ``explore`` to ``explore_final`` across episodes; None keeps it fixed.
    explore_final: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "hidden_layout", tuple(int(n) for n in self.hidden_layout))
        if not 0 <= self.discount < 1:
            raise ConfigError("discount must lie in [0, 1)")
        if not 0 <= self.explore <= 1:
            raise ConfigError("explore must lie in [0, 1]")
        if self.learn_rate < 0:
            raise ConfigError("learn_rate must be >= 0")
        for name in ("batch_size", "memory_capacity", "learn_every", "sync_every"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.n_iter < 0:
            raise ConfigError("n_iter must be >= 0")
        if any(n < 1 for n in self.hidden_layout):
            raise ConfigError("hidden layer widths must be positive")
        if not self.reward_scale > 0:
            raise ConfigError("reward_scale must be > 0")
        if self.explore_final is not None and not 0 <= self.explore_final <= 1:
            raise ConfigError("explore_final must lie in [0, 1]")

    def explore_at(self, episode: int) -> float:
        """Exploration rate for a 0-based episode index."""
        if self.explore_final is None or self.n_iter <= 1:
            return self.explore
        frac = min(1.0, episode / (self.n_iter - 1))
        return self.explore + frac * (self.explore_final - self.explore)


class DqlAgent:
    """Evaluation net, target net, replay memory and the step/learn counters."""

    def __init__(self, n_actions: int, cfg: DqlConfig, rng: np.random.Generator):
        self.cfg = cfg
        self.rng = rng
        self.net = net_init([4, *cfg.hidden_layout, n_actions], rng)
        self.target_net = net_clone(self.net)
        self.memory = ReplayMemory(cfg.memory_capacity)
        self.env_steps = 0
        self.learn_calls = 0
        self.syncs = 0

    def act(self, s: np.ndarray, eps: float) -> int:
        return epsilon_greedy(net_forward(self.net, s), eps, self.rng)

    def observe(self, e: Experience) -> None:
        self.memory.remember(e)
        self.env_steps += 1
        if self.env_steps % self.cfg.learn_every == 0 and len(self.memory) >= self.cfg.batch_size:
            self.learn()

    def learn(self) -> None:
        cfg = self.cfg
        batch = self.memory.sample(cfg.batch_size, self.rng)
        # the target net is frozen for the whole call, so targets can be batched
        q_next = net_forward_batch(self.target_net, np.array([e.next_state for e in batch]))
        for e, q in zip(batch, q_next.max(axis=1)):
            y = e.reward if e.terminal else e.reward + cfg.discount * float(q)
            net_train_step(self.net, e.prev_state, e.action_index, y, cfg.learn_rate)
        self.learn_calls += 1
        if self.learn_calls % cfg.sync_every == 0:
            self.target_net = net_clone(self.net)
            self.syncs += 1


def _fid(target: QubitState, psi: QubitState) -> float:
    return abs(target.amp0.conjugate() * psi.amp0 + target.amp1.conjugate() * psi.amp1) ** 2


def _episode(agent, problem, actions, dt, n_steps, schedule, eps, learn):
    cfg = agent.cfg
    h = problem.physics.h
    psi = problem.initial
    s = encode(psi)
    chosen: list[int] = []
    F = _fid(problem.target, psi)
    for _ in range(n_steps):
        a = agent.act(s, eps)
        u00, u01, u10, u11 = _propagator_entries(actions[a], dt, h)
        psi = QubitState(u00 * psi.amp0 + u01 * psi.amp1, u10 * psi.amp0 + u11 * psi.amp1)
        s_next = encode(psi)
        F = _fid(problem.target, psi)
        done = 1.0 - F < cfg.success_threshold
        chosen.append(a)
        if learn:
            r = schedule(F) * cfg.reward_scale
            agent.observe(Experience(s, a, r, s_next, done))
        s = s_next
        if done:
            break
    return chosen, F


def dql_run(
    problem: ProblemSpec,
    constraint: ConstraintSpec,
    cfg: DqlConfig,
    rng: np.random.Generator,
    schedule: RewardSchedule = RewardSchedule(),
) -> RunResult:
    actions = action_set(constraint)
    n = constraint.max_pieces
    dt = problem.step_duration(n)
    agent = DqlAgent(len(actions), cfg, rng)

    trace = []
    best_f, best_actions = -1.0, []
    for episode in range(cfg.n_iter):
        eps = cfg.explore_at(episode)
        chosen, F = _episode(agent, problem, actions, dt, n, schedule, eps, True)
        trace.append(F)
        if F > best_f:
            best_f, best_actions = F, chosen

    greedy, greedy_f = _episode(agent, problem, actions, dt, n, schedule, 0.0, False)
    greedy_seq = ControlSequence(tuple(actions[a] for a in greedy), dt)
    if greedy_f >= best_f:
        best_f, best_seq = greedy_f, greedy_seq
    else:
        best_seq = ControlSequence(tuple(actions[a] for a in best_actions), dt)
    return RunResult(
        algorithm="dql",
        fidelity_trace=trace,
        best_fidelity=best_f,
        best_sequence=best_seq,
        iterations_used=cfg.n_iter,
        final_sequence=greedy_seq,
        final_fidelity=greedy_f,
        extras={
            "env_steps": agent.env_steps,
            "learn_calls": agent.learn_calls,
            "syncs": agent.syncs,
        },
    )
