"""Sweeps behind each figure: which constraints, budgets and problems are run
and how the per-run outcomes are folded into (sweep_value, algorithm) rows."""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from qstatebench.control import (
    ConstraintSpec,
    ControlSequence,
    action_set,
    evolve_sequence,
    posthoc_grid,
    snap_to_grid,
)
from qstatebench.errors import ConfigError
from qstatebench.problem import ProblemSpec, RunResult
from qstatebench.qubit import bloch_vector, equator_target
from qstatebench.harness.runner import (
    ALGORITHMS,
    RL_ALGORITHMS,
    derive_rng,
    resolve_config,
    run_point,
    summarize,
)

log = logging.getLogger(__name__)

# Keeps noise streams apart from the run streams (master_seed, k).
NOISE_STREAM = 2**31


@dataclass(frozen=True)
class ExperimentSpec:
    algorithms: tuple[str, ...] = ALGORITHMS
    runs: int = 20
    n_iter: int = 500
    master_seed: int = 0
    workers: int = 1
    problem: ProblemSpec = ProblemSpec()
    configs: dict = field(default_factory=dict)
    n_values: tuple[int, ...] = (2, 6, 10, 20, 30, 40, 50)
    n_pieces: int = 20
    panel_n: tuple[int, ...] = (6, 20)
    levels: tuple[int, ...] = (*range(2, 21), 50)
    restricted_levels: tuple[int, ...] = (2, 3, 5, 10, 20)
    jmax_values: tuple[float, ...] = (1, 2, 5, 10, 20)
    s1_n: tuple[int, ...] = (20, 50)
    s1_checkpoints: tuple[int, ...] = (10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000)
    phi_values: tuple[float, ...] = tuple(k * math.pi / 4 for k in range(8))
    noise_levels: tuple[float, ...] = (0.0, 0.05, 0.1, 0.2, 0.3)
    noise_realizations: int = 100

    def __post_init__(self):
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.n_iter < 1:
            raise ConfigError("n_iter must be >= 1")
        if not self.algorithms:
            raise ConfigError("at least one algorithm is required")
        for a in self.algorithms:
            resolve_config(a, self.configs.get(a))
        for name in ("n_values", "panel_n", "levels", "restricted_levels", "jmax_values",
                     "s1_n", "s1_checkpoints", "phi_values", "noise_levels"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must be nonempty")
        if min(self.n_values + self.panel_n + self.s1_n + (self.n_pieces,)) < 1:
            raise ConfigError("piece counts must be >= 1")
        if min(self.levels + self.restricted_levels) < 2:
            raise ConfigError("level counts (M+1) must be >= 2")
        if min(self.jmax_values) < 0.5:
            raise ConfigError("J_max must be >= 0.5 so that [1 - J_max, J_max] is nonempty")
        if min(self.s1_checkpoints) < 1:
            raise ConfigError("checkpoints must be >= 1")
        if any(not 0 <= p < 2 * math.pi for p in self.phi_values):
            raise ConfigError("phi values must lie in [0, 2pi)")
        if min(self.noise_levels) < 0:
            raise ConfigError("noise levels must be >= 0")
        if self.noise_realizations < 1:
            raise ConfigError("noise_realizations must be >= 1")

    def config_for(self, algorithm: str):
        return resolve_config(algorithm, self.configs.get(algorithm), self.n_iter)


@dataclass(frozen=True)
class Row:
    sweep_value: float
    algorithm: str
    mean_F: float
    std_F: float
    n_runs: int


@dataclass
class ExperimentResult:
    """Tables of summary rows, the per-run fidelities behind each row, and
    extra files (profiles, trajectories) keyed by file stem."""

    name: str
    tables: dict[str, list[Row]] = field(default_factory=dict)
    records: dict[str, list[dict]] = field(default_factory=dict)
    files: dict[str, tuple[tuple[str, ...], list[tuple]]] = field(default_factory=dict)

    def add_point(self, table: str, sweep_value, algorithm: str, fids, details=None) -> Row:
        fids = [float(f) for f in fids]
        if any(not math.isfinite(f) for f in fids):
            raise ValueError(f"non-finite fidelity in {table} at {algorithm}={sweep_value}")
        mean, std = summarize(fids)
        row = Row(float(sweep_value), algorithm, mean, std, len(fids))
        self.tables.setdefault(table, []).append(row)
        recs = self.records.setdefault(table, [])
        for k, f in enumerate(fids):
            rec = {"sweep_value": row.sweep_value, "algorithm": algorithm, "run": k, "F": f}
            if details is not None:
                rec.update(details[k])
            recs.append(rec)
        return row

    def summaries(self) -> dict[str, list[dict]]:
        return {t: [dataclasses.asdict(r) for r in rows] for t, rows in self.tables.items()}

    def mean(self, table: str, algorithm: str, sweep_value) -> float:
        for r in self.tables[table]:
            if r.algorithm == algorithm and r.sweep_value == float(sweep_value):
                return r.mean_F
        raise KeyError((table, algorithm, sweep_value))


def default_constraint(algorithm: str, n: int, levels: int = 2) -> ConstraintSpec:
    """RL agents act on ``levels`` values in [0, 1]; gradient methods are free."""
    if algorithm in RL_ALGORITHMS:
        return ConstraintSpec(0.0, 1.0, levels - 1, max_pieces=n)
    return ConstraintSpec(max_pieces=n)


def _runs(spec: ExperimentSpec, algorithm: str, constraint: ConstraintSpec,
          problem: ProblemSpec | None = None, n_iter: int | None = None) -> list[RunResult]:
    cfg = spec.config_for(algorithm)
    log.info("%s N=%d bounds=[%g, %g] runs=%d", algorithm, constraint.max_pieces,
             constraint.j_min, constraint.j_max, spec.runs)
    return run_point(algorithm, problem or spec.problem, constraint,
                     n_iter or cfg.n_iter, spec.runs, spec.master_seed, cfg, spec.workers)


def _run_details(results: list[RunResult]) -> list[dict]:
    return [{"seed": r.seed, "i_f": r.i_f, "best_sequence": r.best_sequence.to_record()}
            for r in results]


def _gradient_algorithms(spec: ExperimentSpec) -> list[str]:
    return [a for a in spec.algorithms if a not in RL_ALGORITHMS]


def fig2_sweep(spec: ExperimentSpec) -> ExperimentResult:
    """Mean best fidelity against the piece count N."""
    out = ExperimentResult("fig2")
    for n in spec.n_values:
        for a in spec.algorithms:
            res = _runs(spec, a, default_constraint(a, n))
            out.add_point("fig2", n, a, [r.best_fidelity for r in res], _run_details(res))
    return out


def best_run(results: list[RunResult]) -> RunResult:
    """Highest best_fidelity; the lowest run index wins ties."""
    return max(results, key=lambda r: r.best_fidelity)


def trajectory_rows(problem: ProblemSpec, seq: ControlSequence) -> list[tuple]:
    _, traj = evolve_sequence(problem.initial, seq, problem.physics)
    return [(t, *bloch_vector(s)) for t, s in zip(traj.times, traj.states)]


def fig3_profiles(spec: ExperimentSpec) -> ExperimentResult:
    """Pulse profile and Bloch trajectory of each algorithm's best run."""
    out = ExperimentResult("fig3")
    n = spec.n_pieces
    for a in spec.algorithms:
        res = _runs(spec, a, default_constraint(a, n))
        out.add_point("fig3", n, a, [r.best_fidelity for r in res], _run_details(res))
        seq = best_run(res).best_sequence
        out.files[f"fig3_profile_{a}"] = (("step", "J"), seq.profile_rows())
        out.files[f"fig3_trajectory_{a}"] = (("t", "x", "y", "z"), trajectory_rows(spec.problem, seq))
    return out


def fig4_bounds(spec: ExperimentSpec) -> ExperimentResult:
    """Free versus [0, 1] controls for the gradient methods, plus the Krotov
    sweep over symmetric-about-1/2 bounds [1 - J_max, J_max]."""
    out = ExperimentResult("fig4")
    algs = _gradient_algorithms(spec)
    for n in spec.n_values:
        for a in algs:
            for label, c in ((a, ConstraintSpec(max_pieces=n)),
                             (f"{a}_bounded", ConstraintSpec(0.0, 1.0, max_pieces=n))):
                res = _runs(spec, a, c)
                out.add_point("fig4", n, label, [r.best_fidelity for r in res], _run_details(res))
    if "krotov" in spec.algorithms:
        for jmax in spec.jmax_values:
            c = ConstraintSpec(1.0 - jmax, float(jmax), max_pieces=spec.n_pieces)
            res = _runs(spec, "krotov", c)
            out.add_point("fig4_inset", jmax, "krotov", [r.best_fidelity for r in res],
                          _run_details(res))
    return out


def snapped_fidelities(problem: ProblemSpec, results: list[RunResult], levels: int,
                       grid=None) -> list[float]:
    """Re-evaluate each run's final sequence after snapping it to ``grid``,
    or to its own [min, max] grid with ``levels`` values when ``grid`` is None."""
    fids = []
    for r in results:
        seq = r.final_sequence
        g = posthoc_grid(seq, levels - 1) if grid is None else grid
        snapped = snap_to_grid(seq, g)
        fids.append(problem.evaluate(snapped.values, snapped.dt))
    return fids


def fig5_posthoc_discretization(spec: ExperimentSpec) -> ExperimentResult:
    """Unrestricted optimization, then snapping to M+1 levels spanning the
    run's own range. ``<alg>_unsnapped`` rows repeat the continuous mean."""
    out = ExperimentResult("fig5")
    for n in spec.panel_n:
        table = f"fig5_n{n}"
        for a in _gradient_algorithms(spec):
            res = _runs(spec, a, ConstraintSpec(max_pieces=n))
            raw = [r.final_fidelity for r in res]
            for lv in spec.levels:
                out.add_point(table, lv, a, snapped_fidelities(spec.problem, res, lv))
                out.add_point(table, lv, f"{a}_unsnapped", raw)
    return out


def fig6_restricted_discrete(spec: ExperimentSpec) -> ExperimentResult:
    """J restricted to M+1 evenly spaced values in [0, 1]. RL agents act on
    the set directly; gradient methods optimize in [0, 1] and are snapped."""
    out = ExperimentResult("fig6")
    for n in spec.panel_n:
        table = f"fig6_n{n}"
        for a in spec.algorithms:
            if a in RL_ALGORITHMS:
                for lv in spec.restricted_levels:
                    res = _runs(spec, a, default_constraint(a, n, lv))
                    out.add_point(table, lv, a, [r.best_fidelity for r in res])
            else:
                res = _runs(spec, a, ConstraintSpec(0.0, 1.0, max_pieces=n))
                for lv in spec.restricted_levels:
                    grid = action_set(ConstraintSpec(0.0, 1.0, lv - 1))
                    out.add_point(table, lv, a, snapped_fidelities(spec.problem, res, lv, grid))
    return out


def s1_iteration_sweep(spec: ExperimentSpec, max_iter: int | None = None) -> ExperimentResult:
    """Best-so-far fidelity at each checkpoint, read off one long run per seed."""
    out = ExperimentResult("s1")
    budget = max_iter or max(spec.s1_checkpoints)
    checkpoints = sorted({k for k in spec.s1_checkpoints if k <= budget} | {budget})
    for n in spec.s1_n:
        table = f"s1_n{n}"
        for a in spec.algorithms:
            res = _runs(spec, a, default_constraint(a, n), n_iter=budget)
            for k in checkpoints:
                out.add_point(table, k, a, [r.best_after(k) for r in res])
    return out


def s2_target_sweep(spec: ExperimentSpec) -> ExperimentResult:
    """Equator targets (|0> + e^{i phi}|1>)/sqrt(2)."""
    out = ExperimentResult("s2")
    for phi in spec.phi_values:
        problem = dataclasses.replace(spec.problem, target=equator_target(phi))
        for a in spec.algorithms:
            res = _runs(spec, a, default_constraint(a, spec.n_pieces), problem)
            out.add_point("s2", phi, a, [r.best_fidelity for r in res], _run_details(res))
    return out


def noise_fidelities(seq: ControlSequence, eps: float, K: int, problem: ProblemSpec,
                     rng: np.random.Generator) -> np.ndarray:
    """Fidelity under K independent draws of J_i + U[-eps, eps]. The perturbed
    values are deliberately not clamped back into the optimizer's bounds."""
    if eps < 0 or K < 1:
        raise ConfigError("need eps >= 0 and K >= 1")
    base = np.asarray(seq.values, dtype=float)
    if eps == 0:
        f = problem.evaluate(base, seq.dt)
        return np.full(K, f)
    out = np.empty(K)
    for k in range(K):
        out[k] = problem.evaluate(base + rng.uniform(-eps, eps, size=base.size), seq.dt)
    return out


def s3_noise_eval(seq: ControlSequence, eps: float, K: int, problem: ProblemSpec,
                  rng: np.random.Generator) -> float:
    if eps == 0:
        # bypass the average so the noiseless value comes back bit-for-bit
        return problem.evaluate(seq.values, seq.dt)
    return float(noise_fidelities(seq, eps, K, problem, rng).mean())


def s3_noise_sweep(spec: ExperimentSpec) -> ExperimentResult:
    """Each algorithm's best sequence out of ``runs`` runs, evaluated under
    control noise of increasing amplitude."""
    out = ExperimentResult("s3")
    for a in spec.algorithms:
        ai = ALGORITHMS.index(a)
        res = _runs(spec, a, default_constraint(a, spec.n_pieces))
        seq = best_run(res).best_sequence
        out.files[f"s3_sequence_{a}"] = (("step", "J"), seq.profile_rows())
        for ei, eps in enumerate(spec.noise_levels):
            rng = derive_rng(spec.master_seed, NOISE_STREAM, ai, ei)
            fids = noise_fidelities(seq, eps, spec.noise_realizations, spec.problem, rng)
            out.add_point("s3", eps, a, fids)
    return out


EXPERIMENTS: dict[str, Any] = {
    "fig2": fig2_sweep,
    "fig3": fig3_profiles,
    "fig4": fig4_bounds,
    "fig5": fig5_posthoc_discretization,
    "fig6": fig6_restricted_discrete,
    "s1": s1_iteration_sweep,
    "s2": s2_target_sweep,
    "s3": s3_noise_sweep,
}
