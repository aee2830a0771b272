import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qstatebench.errors import InvalidInputError
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

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def expm_eig(J, dt, h=1.0):
    """Independent oracle: exponentiate the Hermitian H through its eigenbasis."""
    H = 4 * J * SZ + h * SX
    w, V = np.linalg.eigh(H)
    return V @ np.diag(np.exp(-1j * w * dt)) @ V.conj().T


def close_states(a, b, tol=1e-12):
    return abs(a.amp0 - b.amp0) < tol and abs(a.amp1 - b.amp1) < tol


def random_state(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return QubitState(v[0], v[1])


class TestPropagator:
    def test_zero_time_is_identity(self):
        U = propagator(3.7, 0.0)
        assert np.array_equal(U.as_array(), np.eye(2))

    def test_half_period_flip(self):
        psi = evolve(KET0, propagator(0.0, math.pi / 2))
        assert abs(psi.amp1 - (-1j)) < 1e-12
        assert fidelity(psi, KET1) == pytest.approx(1.0, abs=1e-12)

    def test_rabi_closed_form_example(self):
        # Omega = sqrt(2) for J = 0.25, h = 1
        dt = math.pi / 10
        c, s = math.cos(math.sqrt(2) * dt), math.sin(math.sqrt(2) * dt)
        expected = c * np.eye(2) - 1j * s * (SZ + SX) / math.sqrt(2)
        U = propagator(0.25, dt).as_array()
        assert np.abs(U - expected).max() < 1e-12
        assert np.abs(U - expm_eig(0.25, dt)).max() < 1e-12

    def test_oracle_equivalence_random(self):
        rng = np.random.default_rng(11)
        worst = 0.0
        for _ in range(1000):
            J, dt = rng.uniform(-25, 25), rng.uniform(0, 2 * math.pi)
            worst = max(worst, np.abs(propagator(J, dt).as_array() - expm_eig(J, dt)).max())
        assert worst < 1e-12

    def test_unitarity_random(self):
        rng = np.random.default_rng(12)
        for _ in range(1000):
            J, dt = rng.uniform(-25, 25), rng.uniform(1e-9, 2 * math.pi)
            U = propagator(J, dt).as_array()
            assert np.abs(U.conj().T @ U - np.eye(2)).max() < 1e-12

    @given(
        st.floats(-25, 25),
        st.floats(0, math.pi),
        st.floats(0, math.pi),
    )
    def test_composition(self, J, a, b):
        U = propagator(J, a) @ propagator(J, b)
        assert np.abs(U.as_array() - propagator(J, a + b).as_array()).max() < 1e-12

    def test_sin_squared_law(self):
        for t in np.linspace(0, 2 * math.pi, 100):
            psi = evolve(KET0, propagator(0.0, t))
            assert abs(psi.amp1) ** 2 == pytest.approx(math.sin(t) ** 2, abs=1e-10)

    @pytest.mark.parametrize("J,dt", [(math.nan, 1.0), (1.0, math.inf), (math.inf, 0.1)])
    def test_rejects_non_finite(self, J, dt):
        with pytest.raises(InvalidInputError):
            propagator(J, dt)

    def test_rejects_negative_dt(self):
        with pytest.raises(InvalidInputError):
            propagator(0.0, -0.1)

    def test_nondefault_h(self):
        cfg = PhysicsConfig(h=2.5)
        U = propagator(0.7, 0.3, cfg).as_array()
        assert np.abs(U - expm_eig(0.7, 0.3, h=2.5)).max() < 1e-12

    def test_physics_rejects_nonpositive_h(self):
        with pytest.raises(InvalidInputError):
            PhysicsConfig(h=0.0)


class TestEvolve:
    def test_identity(self):
        assert evolve(KET0, Unitary2.identity()) == KET0

    def test_flip_from_one(self):
        psi = evolve(KET1, propagator(0.0, math.pi / 2))
        assert close_states(psi, QubitState(-1j, 0))

    def test_norm_conservation_long_chain(self):
        rng = np.random.default_rng(3)
        psi = random_state(rng)
        for _ in range(1000):
            psi = evolve(psi, propagator(rng.uniform(-25, 25), rng.uniform(0, 2 * math.pi)))
        assert abs(psi.norm - 1) < 1e-10


class TestFidelity:
    def test_basic_values(self):
        plus = QubitState(1, 1)
        assert fidelity(KET0, KET0) == 1.0
        assert fidelity(KET0, KET1) == 0.0
        assert fidelity(plus, KET0) == pytest.approx(0.5, abs=1e-15)

    def test_symmetric_and_phase_invariant(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            a, b = random_state(rng), random_state(rng)
            ph = cmath.exp(1j * rng.uniform(0, 2 * math.pi))
            b2 = QubitState(ph * b.amp0, ph * b.amp1)
            assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-15)
            assert fidelity(a, b2) == pytest.approx(fidelity(a, b), abs=1e-14)
            assert 0.0 <= fidelity(a, b) <= 1.0


class TestAngles:
    def test_poles(self):
        assert bloch_angles(KET0) == (0.0, 0.0)
        theta, phi = bloch_angles(KET1)
        assert theta == pytest.approx(math.pi) and phi == 0.0

    def test_equator_plus_i(self):
        theta, phi = bloch_angles(QubitState(1, 1j))
        assert theta == pytest.approx(math.pi / 2, abs=1e-12)
        assert phi == pytest.approx(math.pi / 2, abs=1e-12)

    def test_state_from_angles(self):
        assert close_states(state_from_angles(0, 0), KET0)
        assert close_states(state_from_angles(math.pi, 0), QubitState(0, 1))
        s = state_from_angles(math.pi / 2, 3 * math.pi / 2)
        r = 1 / math.sqrt(2)
        assert close_states(s, QubitState(r, -1j * r))

    @pytest.mark.parametrize("theta,phi", [(-0.1, 0), (3.5, 0), (1.0, 2 * math.pi), (1.0, -0.1)])
    def test_out_of_range(self, theta, phi):
        with pytest.raises(InvalidInputError):
            state_from_angles(theta, phi)

    def test_round_trip(self):
        rng = np.random.default_rng(8)
        for _ in range(1000):
            s = random_state(rng)
            assert fidelity(state_from_angles(*bloch_angles(s)), s) == pytest.approx(1.0, abs=1e-12)

    @settings(max_examples=200)
    @given(st.floats(0, math.pi), st.floats(0, 2 * math.pi, exclude_max=True))
    def test_bloch_vector_unit(self, theta, phi):
        x, y, z = bloch_vector(state_from_angles(theta, phi))
        assert x * x + y * y + z * z == pytest.approx(1.0, abs=1e-12)
        assert z == pytest.approx(math.cos(theta), abs=1e-12)


class TestEquatorTarget:
    def test_examples(self):
        r = 1 / math.sqrt(2)
        assert close_states(equator_target(0.0), QubitState(r, r))
        assert close_states(equator_target(math.pi), QubitState(r, -r))
        assert close_states(equator_target(1.5 * math.pi), QubitState(r, -1j * r))

    def test_range(self):
        with pytest.raises(InvalidInputError):
            equator_target(2 * math.pi)


class TestQubitState:
    def test_normalizes(self):
        s = QubitState(3, 4j)
        assert s.norm == pytest.approx(1.0, abs=1e-15)

    def test_rejects_zero(self):
        with pytest.raises(InvalidInputError):
            QubitState(0, 0)
