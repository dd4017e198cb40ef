import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lsiib.core import DriveParams, HamiltonianMatrix, QuantumState, Trajectory
from lsiib.dynamics import (
    PropagationConfig,
    PropagationMethod,
    evolve,
    populations_at,
    propagate,
    rabi_periods,
)
from lsiib.hamiltonians import build_five_level
from lsiib.reduction import light_shifts_first_order


def random_hermitian(dim, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    labels = tuple(f"s{i}" for i in range(dim))
    return HamiltonianMatrix(labels, scale * (a + a.conj().T) / 2)


def random_state(labels, seed):
    rng = np.random.default_rng(seed + 1)
    v = rng.normal(size=len(labels)) + 1j * rng.normal(size=len(labels))
    return QuantumState(labels, v / np.linalg.norm(v))


def rabi_pair(omega):
    return HamiltonianMatrix(("1", "2"), np.array([[0.0, omega / 2], [omega / 2, 0.0]]))


def test_zero_hamiltonian_is_static():
    h = HamiltonianMatrix(("x", "y", "z"), np.zeros((3, 3)))
    psi = random_state(h.basis_labels, 3)
    traj = propagate(h, psi, PropagationConfig(5.0, 50))
    assert np.allclose(traj.populations, psi.populations, atol=1e-15)


@pytest.mark.parametrize("method", list(PropagationMethod))
def test_two_level_rabi_closed_form(method):
    omega = 0.7
    h = rabi_pair(omega)
    traj = propagate(h, QuantumState.basis_state(h.basis_labels, "1"), PropagationConfig(4 * math.pi / omega, 400, method))
    assert np.allclose(traj.population("2"), np.sin(omega * traj.times / 2) ** 2, atol=1e-10)
    full = evolve(h, QuantumState.basis_state(h.basis_labels, "1"), math.pi / omega)
    assert full.populations[1] == pytest.approx(1.0, abs=1e-14)


def test_baseline_behaviour():
    p = DriveParams.from_detunings(1.0, 0.1, 10.0, 0.0)
    omega_r = light_shifts_first_order(p).omega_r
    h = build_five_level(p)
    cfg = PropagationConfig(rabi_periods(omega_r, 3), 20_000)
    traj = propagate(h, QuantumState.basis_state(h.basis_labels, "1"), cfg)
    assert traj.population("3").max() > 0.95
    assert (traj.population("2") + traj.population("4")).max() < 0.03
    assert traj.population("5").max() < 0.03


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 100), st.integers(0, 2 ** 31))
def test_unitarity_random_hermitian(dim, seed):
    h = random_hermitian(dim, seed)
    psi = random_state(h.basis_labels, seed)
    traj = propagate(h, psi, PropagationConfig(3.0, 30, record_amplitudes=True))
    norms = np.linalg.norm(traj.amplitudes, axis=1)
    assert np.abs(norms - 1).max() <= 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 30), st.integers(0, 2 ** 31), st.floats(0.01, 5), st.floats(0.01, 5))
def test_time_composability(dim, seed, t1, t2):
    h = random_hermitian(dim, seed)
    psi = random_state(h.basis_labels, seed)
    two_step = evolve(h, evolve(h, psi, t1), t2)
    one_step = evolve(h, psi, t1 + t2)
    assert np.abs(two_step.amplitudes - one_step.amplitudes).max() <= 1e-8


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2 ** 31))
def test_energy_conservation(dim, seed):
    h = random_hermitian(dim, seed)
    psi = random_state(h.basis_labels, seed)
    traj = propagate(h, psi, PropagationConfig(4.0, 40, record_amplitudes=True))
    m = np.asarray(h.entries)
    energies = np.einsum("ti,ij,tj->t", traj.amplitudes.conj(), m, traj.amplitudes).real
    assert np.abs(energies - energies[0]).max() <= 1e-8


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 20), st.integers(0, 2 ** 31))
def test_methods_agree(dim, seed):
    h = random_hermitian(dim, seed)
    psi = random_state(h.basis_labels, seed)
    a = propagate(h, psi, PropagationConfig(5.0, 200, PropagationMethod.EIGENDECOMPOSITION))
    b = propagate(h, psi, PropagationConfig(5.0, 200, PropagationMethod.SCALED_EXPM))
    assert np.abs(a.populations - b.populations).max() <= 1e-7


def test_methods_agree_on_model_hamiltonian():
    p = DriveParams.from_detunings(1.0, 0.1, 10.0, 0.0)
    h = build_five_level(p)
    psi = QuantumState.basis_state(h.basis_labels, "1")
    t = rabi_periods(light_shifts_first_order(p).omega_r, 1)
    a = propagate(h, psi, PropagationConfig(t, 2000))
    b = propagate(h, psi, PropagationConfig(t, 2000, "scaled_expm"))
    assert np.abs(a.populations - b.populations).max() <= 1e-7


def test_basis_mismatch():
    h = rabi_pair(1.0)
    with pytest.raises(ValueError, match="basis"):
        propagate(h, QuantumState(("a", "b"), [1.0, 0.0]), PropagationConfig(1.0))


def test_config_validation():
    with pytest.raises(ValueError):
        PropagationConfig(0.0)
    with pytest.raises(ValueError):
        PropagationConfig(1.0, 1)
    assert PropagationConfig(2.0, 4).times.tolist() == [0.0, 0.5, 1.0, 1.5, 2.0]


class TestPopulationsAt:
    traj = Trajectory([0.0, 1.0, 2.0], [[1.0, 0.0], [0.5, 0.5], [0.0, 1.0]], ("a", "b"))

    def test_initial_time(self):
        assert populations_at(self.traj, 0.0).tolist() == [1.0, 0.0]

    def test_grid_point_is_stored_value(self):
        assert populations_at(self.traj, 1.0).tolist() == [0.5, 0.5]

    def test_midpoint(self):
        assert np.allclose(populations_at(self.traj, 1.5), [0.25, 0.75])

    def test_constant_trajectory(self):
        flat = Trajectory([0.0, 1.0], [[0.3, 0.7], [0.3, 0.7]], ("a", "b"))
        assert np.allclose(populations_at(flat, 0.4), [0.3, 0.7], atol=1e-15)

    @given(st.floats(0.0, 2.0))
    def test_sums_to_one(self, t):
        assert populations_at(self.traj, t).sum() == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("t", [-0.1, 2.5])
    def test_out_of_range(self, t):
        with pytest.raises(ValueError, match="outside"):
            populations_at(self.traj, t)
