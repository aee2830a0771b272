"""Seeded fan-out of independent optimizer runs."""

from __future__ import annotations

import dataclasses
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable

import numpy as np

from qstatebench.control import ConstraintSpec
from qstatebench.dqn import DqlConfig, dql_run
from qstatebench.errors import ConfigError
from qstatebench.krotov import KrotovConfig, krotov_run
from qstatebench.problem import ProblemSpec, RunResult
from qstatebench.qlearning import QlConfig, ql_run
from qstatebench.sgd import SgdConfig, sgd_run

RUNNERS: dict[str, tuple[Callable, type]] = {
    "sgd": (sgd_run, SgdConfig),
    "krotov": (krotov_run, KrotovConfig),
    "ql": (ql_run, QlConfig),
    "dql": (dql_run, DqlConfig),
}
ALGORITHMS = tuple(RUNNERS)
RL_ALGORITHMS = ("ql", "dql")


def derive_rng(master_seed: int, *keys: int) -> np.random.Generator:
    """Independent stream for (master_seed, *keys) via numpy's SeedSequence."""
    return np.random.default_rng(np.random.SeedSequence([master_seed, *keys]))


def resolve_config(algorithm: str, config: Any = None, n_iter: int | None = None):
    if algorithm not in RUNNERS:
        raise ConfigError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    cfg_type = RUNNERS[algorithm][1]
    cfg = config if config is not None else cfg_type()
    if not isinstance(cfg, cfg_type):
        raise ConfigError(f"{algorithm} expects a {cfg_type.__name__}, got {type(cfg).__name__}")
    if n_iter is not None:
        cfg = dataclasses.replace(cfg, n_iter=n_iter)
    return cfg


def run_single(
    algorithm: str,
    problem: ProblemSpec,
    constraint: ConstraintSpec,
    config: Any,
    master_seed: int,
    run_index: int,
) -> RunResult:
    fn = RUNNERS[algorithm][0]
    result = fn(problem, constraint, config, derive_rng(master_seed, run_index))
    result.seed = [master_seed, run_index]
    return result


def _run_job(job) -> RunResult:
    return run_single(*job)


def run_point(
    algorithm: str,
    problem: ProblemSpec,
    constraint: ConstraintSpec,
    budget: int | None,
    runs: int,
    master_seed: int,
    config: Any = None,
    workers: int = 1,
) -> list[RunResult]:
    """``runs`` independent runs; run k is seeded from (master_seed, k) only.

    The returned list is in run-index order whatever the worker count.
    """
    if runs < 1:
        raise ConfigError("runs must be >= 1")
    cfg = resolve_config(algorithm, config, budget)
    jobs = [(algorithm, problem, constraint, cfg, master_seed, k) for k in range(runs)]
    if workers <= 1 or runs == 1:
        return [_run_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_job, jobs))


def summarize(values) -> tuple[float, float]:
    """Mean and population standard deviation."""
    arr = np.asarray(values, dtype=float)
    return float(arr.mean()), float(arr.std())
