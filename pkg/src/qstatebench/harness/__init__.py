"""Seeded multi-run experiments and their persisted outputs."""

from qstatebench.harness.experiments import (
    EXPERIMENTS,
    ExperimentResult,
    ExperimentSpec,
    Row,
    s3_noise_eval,
)
from qstatebench.harness.runner import ALGORITHMS, derive_rng, run_point

__all__ = [
    "ALGORITHMS",
    "EXPERIMENTS",
    "ExperimentResult",
    "ExperimentSpec",
    "Row",
    "derive_rng",
    "run_point",
    "s3_noise_eval",
]
