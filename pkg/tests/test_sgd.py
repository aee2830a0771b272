import math
from dataclasses import dataclass

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qstatebench.control import ConstraintSpec
from qstatebench.errors import ConfigError
from qstatebench.problem import ProblemSpec
from qstatebench.sgd import SgdConfig, random_direction, sgd_run, sgd_step

UNIT = ConstraintSpec(0.0, 1.0)


@dataclass(frozen=True)
class Surrogate(ProblemSpec):
    """Quadratic stand-in for fidelity: 1 - |J - J*|^2 / c."""

    jstar: tuple = (0.0,)
    c: float = 4.0

    def evaluate(self, values, dt):
        e = np.asarray(values, dtype=float) - np.asarray(self.jstar)
        return 1.0 - float(e @ e) / self.c


@dataclass(frozen=True)
class Linear(ProblemSpec):
    slope: float = 0.2

    def evaluate(self, values, dt):
        return 0.5 + self.slope * float(np.sum(values))


class Flat(ProblemSpec):
    def evaluate(self, values, dt):
        return 0.3


def test_config_validation():
    with pytest.raises(ConfigError):
        SgdConfig(probe_step=0)
    with pytest.raises(ConfigError):
        SgdConfig(learn_rate=-1)
    with pytest.raises(ConfigError):
        SgdConfig(init_low=2, init_high=1)


def test_direction_is_unit():
    rng = np.random.default_rng(0)
    for n in (1, 5, 50):
        assert np.linalg.norm(random_direction(n, rng)) == pytest.approx(1.0, abs=1e-15)


class TestStep:
    def test_plateau_leaves_controls(self):
        J = np.array([0.2, 0.7, 0.4])
        out = sgd_step(J, Flat(), SgdConfig(), np.random.default_rng(1))
        assert np.array_equal(out, J)

    @pytest.mark.parametrize("seed", range(6))
    def test_linear_slope_moves_by_slope(self, seed):
        # for N = 1 the direction is +-1 and the step is beta * g * v = +0.2 either way
        cfg = SgdConfig(probe_step=0.01, learn_rate=1.0)
        out = sgd_step(np.array([0.3]), Linear(), cfg, np.random.default_rng(seed), dt=1.0)
        assert out[0] == pytest.approx(0.5, abs=1e-9)

    def test_upper_bound_holds(self):
        cfg = SgdConfig(learn_rate=1.0)
        for seed in range(5):
            out = sgd_step(np.array([1.0]), Linear(), cfg, np.random.default_rng(seed), UNIT, dt=1.0)
            assert out[0] == 1.0


class TestRun:
    def test_zero_iterations(self):
        res = sgd_run(ProblemSpec(), ConstraintSpec(max_pieces=5), SgdConfig(n_iter=0), np.random.default_rng(3))
        assert res.fidelity_trace == []
        assert res.best_fidelity == res.initial_fidelity
        assert len(res.best_sequence.values) == 5
        assert all(0 <= v <= 1 for v in res.best_sequence.values)

    def test_best_is_running_max(self):
        res = sgd_run(ProblemSpec(), ConstraintSpec(max_pieces=8), SgdConfig(n_iter=200), np.random.default_rng(4))
        bsf = res.best_so_far()
        assert np.all(np.diff(bsf) >= 0)
        assert bsf[-1] == res.best_fidelity
        assert ProblemSpec().evaluate(res.best_sequence.values, res.best_sequence.dt) == res.best_fidelity

    def test_bounds_respected(self):
        c = ConstraintSpec(0.0, 1.0, max_pieces=10)
        res = sgd_run(ProblemSpec(), c, SgdConfig(n_iter=300, learn_rate=1.0), np.random.default_rng(5))
        for seq in (res.best_sequence, res.final_sequence):
            assert all(0.0 <= v <= 1.0 for v in seq.values)

    def test_deterministic(self):
        c = ConstraintSpec(max_pieces=6)
        a = sgd_run(ProblemSpec(), c, SgdConfig(n_iter=50), np.random.default_rng(9))
        b = sgd_run(ProblemSpec(), c, SgdConfig(n_iter=50), np.random.default_rng(9))
        assert a.to_record() == b.to_record()

    def test_few_pieces_restricted_is_worse(self):
        cfg = SgdConfig()

        def mean_best(n, c):
            return np.mean([sgd_run(ProblemSpec(), c, cfg, np.random.default_rng(k)).best_fidelity
                            for k in range(20)])

        two = mean_best(2, ConstraintSpec(0.0, 1.0, max_pieces=2))
        ten = mean_best(10, ConstraintSpec(max_pieces=10))
        assert two < ten - 0.2

    @settings(max_examples=15, deadline=None)
    @given(st.integers(1, 10), st.integers(0, 2**32 - 1))
    def test_converges_on_quadratic_surrogate(self, n, seed):
        rng = np.random.default_rng(seed)
        problem = Surrogate(jstar=tuple(rng.uniform(-1, 2, n)))
        cfg = SgdConfig(learn_rate=1.0, n_iter=2000)
        res = sgd_run(problem, ConstraintSpec(max_pieces=n), cfg, rng)
        assert res.best_fidelity > 1 - 1e-3


def test_problem_step_duration():
    assert ProblemSpec().step_duration(20) == pytest.approx(2 * math.pi / 20)
