"""Unitary evolution under time-independent Hamiltonians."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import expm

from .core import NORM_TOL, HamiltonianMatrix, LsiibError, QuantumState, Trajectory, clean_populations

DEFAULT_STEPS = 2000
DEFAULT_PERIODS = 3


class PropagationMethod(str, Enum):
    EIGENDECOMPOSITION = "eigendecomposition"
    SCALED_EXPM = "scaled_expm"


@dataclass(frozen=True)
class PropagationConfig:
    """Uniform output grid ``0, t_max/n_steps, ..., t_max`` (``n_steps + 1`` points)."""

    t_max: float
    n_steps: int = DEFAULT_STEPS
    method: PropagationMethod = PropagationMethod.EIGENDECOMPOSITION
    record_amplitudes: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.t_max) and self.t_max > 0):
            raise ValueError(f"t_max must be positive, got {self.t_max}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 2:
            raise ValueError(f"n_steps must be an integer >= 2, got {self.n_steps}")
        object.__setattr__(self, "t_max", float(self.t_max))
        object.__setattr__(self, "n_steps", int(self.n_steps))
        object.__setattr__(self, "method", PropagationMethod(self.method))

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_steps + 1)


def rabi_periods(frequency: float, periods: float = DEFAULT_PERIODS) -> float:
    """Duration of ``periods`` cycles at angular frequency ``frequency``."""
    if frequency == 0 or not math.isfinite(frequency):
        raise LsiibError("cannot size a time grid from a zero Rabi frequency")
    return periods * 2 * math.pi / abs(frequency)


def _check_inputs(h: HamiltonianMatrix, psi0: QuantumState) -> None:
    if tuple(h.basis_labels) != tuple(psi0.basis_labels):
        raise ValueError(
            f"basis mismatch: Hamiltonian {h.basis_labels[:6]}... vs state {psi0.basis_labels[:6]}..."
        )


def evolve(h: HamiltonianMatrix, psi0: QuantumState, t: float) -> QuantumState:
    """Return ``exp(-i H t) psi0`` computed from the eigendecomposition of ``H``."""
    _check_inputs(h, psi0)
    w, v = np.linalg.eigh(h.entries)
    coeffs = v.conj().T @ psi0.amplitudes
    return QuantumState(h.basis_labels, v @ (np.exp(-1j * w * t) * coeffs))


def _eigen_amplitudes(h: HamiltonianMatrix, psi0: np.ndarray, times: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(h.entries)
    coeffs = v.conj().T @ psi0
    phases = np.exp(-1j * np.outer(times, w))
    return (phases * coeffs) @ v.T


def _expm_amplitudes(h: HamiltonianMatrix, psi0: np.ndarray, times: np.ndarray) -> np.ndarray:
    dt = times[1] - times[0]
    step = expm(-1j * dt * np.asarray(h.entries, dtype=complex))
    out = np.empty((times.size, psi0.size), dtype=complex)
    out[0] = psi0
    for i in range(1, times.size):
        out[i] = step @ out[i - 1]
    return out


def propagate(h: HamiltonianMatrix, psi0: QuantumState, cfg: PropagationConfig) -> Trajectory:
    """Evolve ``psi0`` under ``h`` and sample populations on the config's grid.

    The eigendecomposition method evaluates the exact propagator at every
    output time. The scaled-expm method exponentiates ``-i H dt`` once
    (scaling and squaring) and applies it step by step.
    """
    _check_inputs(h, psi0)
    times = cfg.times
    if cfg.method is PropagationMethod.EIGENDECOMPOSITION:
        amps = _eigen_amplitudes(h, psi0.amplitudes, times)
    else:
        amps = _expm_amplitudes(h, psi0.amplitudes, times)
    norms = np.linalg.norm(amps, axis=1)
    if np.any(np.abs(norms - 1) > NORM_TOL):
        raise LsiibError(f"norm drifted by {np.abs(norms - 1).max():.3e} during propagation")
    return Trajectory(
        times=times,
        populations=clean_populations(amps),
        basis_labels=h.basis_labels,
        amplitudes=amps if cfg.record_amplitudes else None,
    )


def populations_at(traj: Trajectory, t: float) -> np.ndarray:
    """Populations at time ``t`` by linear interpolation between grid points."""
    times = traj.times
    if not (times[0] <= t <= times[-1]):
        raise ValueError(f"t={t} outside the trajectory span [{times[0]}, {times[-1]}]")
    hi = int(np.searchsorted(times, t, side="left"))
    if times[hi] == t:
        return traj.populations[hi].copy()
    lo = hi - 1
    w = (t - times[lo]) / (times[hi] - times[lo])
    return (1 - w) * traj.populations[lo] + w * traj.populations[hi]
