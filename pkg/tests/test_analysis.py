import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lsiib.analysis import BlockadeReport, blockade_report, fit_rabi_frequency, regime_flags, sweep
from lsiib.core import DriveParams, HamiltonianMatrix, QuantumState, Trajectory
from lsiib.dynamics import PropagationConfig, propagate
from lsiib.scenarios import SINGLE_ATOM, default_propagation

ROLES_2 = {"1": "initial", "2": "target"}


def rabi_trajectory(omega, t_max, n=4000):
    h = HamiltonianMatrix(("1", "2"), np.array([[0.0, omega / 2], [omega / 2, 0.0]]))
    return propagate(h, QuantumState.basis_state(h.basis_labels, "1"), PropagationConfig(t_max, n))


def fine_single_atom(p):
    return default_propagation(p, SINGLE_ATOM, n_steps=60_000)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 20.0), st.floats(3.0, 12.0))
def test_fit_within_one_bin(omega, periods):
    t_max = periods * 2 * math.pi / omega
    times = np.linspace(0, t_max, 3001)
    fitted = fit_rabi_frequency(times, np.sin(omega * times / 2) ** 2)
    assert abs(fitted - omega) <= 2 * math.pi / t_max


def test_fit_flat_signal_is_absent():
    times = np.linspace(0, 10, 100)
    assert fit_rabi_frequency(times, np.full(100, 0.3)) is None


def test_perfect_two_level_report():
    omega = 1.3
    t_max = 3 * 2 * math.pi / omega
    traj = rabi_trajectory(omega, t_max)
    report = blockade_report(traj, ROLES_2)
    assert report.max_leak_excited == 0.0 and report.max_leak_blocked == 0.0
    assert report.transfer_fidelity == pytest.approx(1.0, abs=1e-5)
    # a hundredth of a spectral bin
    assert abs(report.rabi_frequency_fit - omega) <= 0.01 * 2 * math.pi / t_max


def test_zero_hamiltonian_report():
    h = HamiltonianMatrix(("1", "2"), np.zeros((2, 2)))
    psi = QuantumState(("1", "2"), [math.sqrt(0.8), math.sqrt(0.2)])
    report = blockade_report(propagate(h, psi, PropagationConfig(10.0, 100)), ROLES_2)
    assert report.transfer_fidelity == pytest.approx(0.2)
    assert report.rabi_frequency_fit is None


def test_report_is_pure():
    traj = rabi_trajectory(0.9, 30.0)
    assert blockade_report(traj, ROLES_2) == blockade_report(traj, ROLES_2)


def test_report_role_validation():
    traj = rabi_trajectory(0.9, 30.0)
    with pytest.raises(ValueError, match="target"):
        blockade_report(traj, {"1": "initial"})
    with pytest.raises(ValueError, match="unknown role"):
        blockade_report(traj, {"1": "spectator", "2": "target"})


def test_short_trajectory_warns():
    omega = 1.0
    traj = rabi_trajectory(omega, 1.2 * 2 * math.pi / omega)
    with pytest.warns(RuntimeWarning, match="1.5"):
        blockade_report(traj, ROLES_2)


def test_report_values_stay_in_unit_interval():
    traj = Trajectory([0.0, 1.0, 2.0], [[1.0, 0.0, 0.0], [0.2, 0.5, 0.3], [0.0, 0.6, 0.4]], ("1", "2", "3"))
    report = blockade_report(traj, {"1": "initial", "2": "target", "3": "blocked"})
    for key in ("max_leak_excited", "max_leak_blocked", "transfer_fidelity"):
        assert 0.0 <= getattr(report, key) <= 1.0


def test_as_dict_flattens_flags():
    report = BlockadeReport(0.1, 0.2, None, 0.9, {"adiabatic": True, "blockade": False})
    d = report.as_dict()
    assert d["regime_flags.adiabatic"] is True and d["regime_flags.blockade"] is False
    assert d["rabi_frequency_fit"] is None


class TestRegimeFlags:
    def test_baseline(self):
        flags = regime_flags(DriveParams.from_detunings(1.0, 0.1, 10.0, 0.0), collective=False)
        assert flags == {"adiabatic": True, "blockade": True}

    def test_collective_large_raman(self):
        flags = regime_flags(DriveParams.from_detunings(1.0, 0.1, 10.0, 0.0, 6), collective=True)
        assert flags["blockade"] is False

    def test_collective_weak_raman(self):
        flags = regime_flags(DriveParams.from_detunings(1.0, 2e-6, 50.0, 0.0, 100), collective=True)
        assert flags == {"adiabatic": True, "blockade": True}

    def test_resonant_drive(self):
        flags = regime_flags(DriveParams(1.0, 0.1, 0.0, 0.0), collective=False)
        assert flags == {"adiabatic": False, "blockade": False}


class TestSweep:
    def test_blocked_leak_scales_with_second_drive(self):
        ratios = (0.05, 0.1, 0.2, 0.4)
        grid = [DriveParams.from_detunings(1.0, r, 10.0, 0.0) for r in ratios]
        rows = sweep(grid, SINGLE_ATOM, fine_single_atom)
        leaks = [row.report.max_leak_blocked for row in rows]
        assert all(b > a for a, b in zip(leaks, leaks[1:]))
        for r, leak in zip(ratios, leaks):
            assert 0.5 <= leak / r ** 2 <= 2.0

    def test_excited_leak_scales_with_detuning(self):
        deltas = (5.0, 10.0, 20.0, 40.0)
        grid = [DriveParams.from_detunings(1.0, 0.1, d, 0.0) for d in deltas]
        rows = sweep(grid, SINGLE_ATOM, fine_single_atom)
        leaks = [row.report.max_leak_excited for row in rows]
        assert all(b < a for a, b in zip(leaks, leaks[1:]))
        for d, leak in zip(deltas, leaks):
            assert 0.5 <= leak * d ** 2 <= 2.0

    def test_input_order_and_determinism(self):
        grid = [DriveParams.from_detunings(1.0, r, 10.0, 0.0) for r in (0.4, 0.05, 0.2, 0.1)]
        threaded = sweep(grid, SINGLE_ATOM, threads=4)
        serial = sweep(grid, SINGLE_ATOM, threads=1)
        assert [row.index for row in threaded] == [0, 1, 2, 3]
        assert [row.params for row in threaded] == grid
        assert [row.report for row in threaded] == [row.report for row in serial]

    def test_single_point(self):
        rows = sweep([DriveParams.from_detunings(1.0, 0.1, 10.0, 0.0)], SINGLE_ATOM)
        assert len(rows) == 1 and rows[0].error is None

    def test_errors_are_recorded(self):
        grid = [DriveParams.from_detunings(1.0, 0.1, 10.0, 0.0), DriveParams(1.0, 0.1, 0.0, 0.0)]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rows = sweep(grid, SINGLE_ATOM)
        assert rows[0].error is None
        assert rows[1].report is None and "RegimeError" in rows[1].error

    def test_empty_grid(self):
        with pytest.raises(ValueError, match="empty"):
            sweep([], SINGLE_ATOM)
