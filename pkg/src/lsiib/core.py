"""Shared value types for drive parameters, Hamiltonians, states and trajectories.

Everything is expressed in angular-frequency units with hbar = 1. Absolute
units are the caller's choice; only ratios such as delta/omega1 matter.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

HERMITIAN_RTOL = 1e-12
NORM_TOL = 1e-9
POPULATION_SUM_TOL = 1e-8


class LsiibError(Exception):
    """Base class for errors raised by this package."""


class RegimeError(LsiibError):
    """The requested computation is outside its numerical/physical regime."""


class AdiabaticityWarning(UserWarning):
    """Emitted when an adiabatic-elimination precondition is only weakly met."""


def _real_scalar(name: str, value) -> float:
    if isinstance(value, (complex, np.complexfloating)):
        raise TypeError(f"{name} must be real, got complex value {value!r}")
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    return value


@dataclass(frozen=True)
class DriveParams:
    """Rabi frequencies, one-photon detunings and ensemble size.

    ``delta`` and ``big_delta`` are derived from ``delta1`` and ``delta2``
    and are never stored separately.
    """

    omega1: float
    omega2: float
    delta1: float
    delta2: float
    n_atoms: int = 1

    def __post_init__(self):
        for name in ("omega1", "omega2", "delta1", "delta2"):
            object.__setattr__(self, name, _real_scalar(name, getattr(self, name)))
        if self.omega1 < 0 or self.omega2 < 0:
            raise ValueError("Rabi frequencies must be non-negative")
        if isinstance(self.n_atoms, bool) or not isinstance(self.n_atoms, numbers.Integral):
            raise TypeError("n_atoms must be an integer")
        if self.n_atoms < 1:
            raise ValueError(f"n_atoms must be positive, got {self.n_atoms}")
        object.__setattr__(self, "n_atoms", int(self.n_atoms))

    @classmethod
    def from_detunings(cls, omega1, omega2, delta, big_delta, n_atoms=1) -> "DriveParams":
        """Build from the mean detuning and the two-photon detuning."""
        delta = _real_scalar("delta", delta)
        big_delta = _real_scalar("big_delta", big_delta)
        return cls(omega1, omega2, delta + big_delta / 2, delta - big_delta / 2, n_atoms)

    @property
    def delta(self) -> float:
        return derived_detunings(self)[0]

    @property
    def big_delta(self) -> float:
        return derived_detunings(self)[1]

    def replace(self, **changes) -> "DriveParams":
        """Return a copy with fields changed; accepts ``delta``/``big_delta`` too."""
        if "delta" in changes or "big_delta" in changes:
            if "delta1" in changes or "delta2" in changes:
                raise ValueError("give either delta1/delta2 or delta/big_delta, not both")
            delta = changes.pop("delta", self.delta)
            big_delta = changes.pop("big_delta", self.big_delta)
            changes["delta1"] = delta + big_delta / 2
            changes["delta2"] = delta - big_delta / 2
        fields = dict(
            omega1=self.omega1,
            omega2=self.omega2,
            delta1=self.delta1,
            delta2=self.delta2,
            n_atoms=self.n_atoms,
        )
        unknown = set(changes) - set(fields)
        if unknown:
            raise ValueError(f"unknown parameter(s): {sorted(unknown)}")
        fields.update(changes)
        return DriveParams(**fields)

    def as_dict(self) -> dict:
        return {
            "omega1": self.omega1,
            "omega2": self.omega2,
            "delta1": self.delta1,
            "delta2": self.delta2,
            "delta": self.delta,
            "big_delta": self.big_delta,
            "n_atoms": self.n_atoms,
        }


def derived_detunings(p: DriveParams) -> tuple[float, float]:
    """Return ``(delta, big_delta) = ((delta1 + delta2)/2, delta1 - delta2)``."""
    return (p.delta1 + p.delta2) / 2, p.delta1 - p.delta2


def _max_abs_asymmetry(a: np.ndarray, block: int = 512) -> float:
    # chunked so the 3^8-dimensional oracle matrix is checked without a full temporary
    worst = 0.0
    for start in range(0, a.shape[0], block):
        rows = a[start:start + block]
        cols = a[:, start:start + block]
        diff = np.abs(rows - cols.conj().T)
        if diff.size:
            worst = max(worst, float(diff.max()))
    return worst


@dataclass(frozen=True, eq=False)
class HamiltonianMatrix:
    """Dense Hermitian matrix over a labelled basis.

    Builders in this package produce real-symmetric ``float64`` arrays; complex
    entries are accepted for general Hermitian input. The stored array is made
    read-only.
    """

    basis_labels: tuple
    entries: np.ndarray

    def __post_init__(self):
        labels = tuple(str(label) for label in self.basis_labels)
        entries = np.asarray(self.entries)
        if not (np.issubdtype(entries.dtype, np.floating) or np.issubdtype(entries.dtype, np.complexfloating)):
            entries = entries.astype(float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError(f"Hamiltonian must be square, got shape {entries.shape}")
        if entries.shape[0] != len(labels):
            raise ValueError(
                f"{len(labels)} basis labels for a {entries.shape[0]}-dimensional matrix"
            )
        if len(set(labels)) != len(labels):
            raise ValueError("basis labels must be unique")
        if not np.all(np.isfinite(entries)):
            raise ValueError("Hamiltonian entries must be finite")
        scale = max(1.0, float(np.abs(entries).max())) if entries.size else 1.0
        asym = _max_abs_asymmetry(entries)
        if asym > HERMITIAN_RTOL * scale:
            raise ValueError(f"Hamiltonian is not Hermitian (max |H - H^dagger| = {asym:.3e})")
        # read-only input is adopted as is (avoids copying the large oracle matrix)
        if entries.flags.writeable:
            entries = entries.copy()
            entries.setflags(write=False)
        object.__setattr__(self, "basis_labels", labels)
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return len(self.basis_labels)

    def index(self, label: str) -> int:
        return self.basis_labels.index(str(label))

    def element(self, row: str, col: str):
        return self.entries[self.index(row), self.index(col)]

    def shifted(self, energy: float) -> "HamiltonianMatrix":
        """Subtract ``energy`` times the identity (move the zero of energy)."""
        return HamiltonianMatrix(self.basis_labels, self.entries - energy * np.eye(self.dim))


@dataclass(frozen=True, eq=False)
class QuantumState:
    basis_labels: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        labels = tuple(str(label) for label in self.basis_labels)
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.shape[0] != len(labels):
            raise ValueError("amplitude vector must match the basis")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "basis_labels", labels)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis_state(cls, basis_labels: Sequence[str], label: str) -> "QuantumState":
        labels = tuple(str(x) for x in basis_labels)
        amps = np.zeros(len(labels), dtype=complex)
        amps[labels.index(str(label))] = 1.0
        return cls(labels, amps)

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def clean_populations(amplitudes: np.ndarray) -> np.ndarray:
    """|amplitude|^2 with round-off negatives in [-1e-12, 0) clamped to zero."""
    pops = np.abs(amplitudes) ** 2
    if np.iscomplexobj(pops):
        pops = pops.real
    pops = np.where((pops < 0) & (pops >= -1e-12), 0.0, pops)
    return pops


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Populations (and optionally amplitudes) on a strictly increasing time grid.

    ``populations[i, k]`` is the population of ``basis_labels[k]`` at ``times[i]``.
    """

    times: np.ndarray
    populations: np.ndarray
    basis_labels: tuple
    amplitudes: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        times = np.array(self.times, dtype=float)
        pops = np.array(self.populations, dtype=float)
        labels = tuple(str(label) for label in self.basis_labels)
        if times.ndim != 1 or times.size < 1:
            raise ValueError("times must be a non-empty 1-D array")
        if times.size > 1 and not np.all(np.diff(times) > 0):
            raise ValueError("times must be strictly increasing")
        if pops.shape != (times.size, len(labels)):
            raise ValueError(
                f"populations shape {pops.shape} does not match ({times.size}, {len(labels)})"
            )
        if pops.size and (pops.min() < 0 or pops.max() > 1 + 1e-12):
            raise ValueError("populations must lie in [0, 1]")
        sums = pops.sum(axis=1)
        if np.any(np.abs(sums - 1) > POPULATION_SUM_TOL):
            raise ValueError(f"populations do not sum to 1 (worst {np.abs(sums - 1).max():.3e})")
        amps = self.amplitudes
        if amps is not None:
            amps = np.array(amps, dtype=complex)
            if amps.shape[0] != times.size:
                raise ValueError("amplitudes must have one row per time")
            amps.setflags(write=False)
        for arr in (times, pops):
            arr.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "populations", pops)
        object.__setattr__(self, "basis_labels", labels)
        object.__setattr__(self, "amplitudes", amps)

    def population(self, label: str) -> np.ndarray:
        return self.populations[:, self.basis_labels.index(str(label))]

    @property
    def t_max(self) -> float:
        return float(self.times[-1])


@dataclass(frozen=True)
class LightShiftSet:
    """First-order light shifts, Raman-Rabi frequencies and the blockade shift.

    Collective entries are ``None`` when ``n_atoms < 3``.
    """

    eps1: float
    eps2: float
    omega_r: float
    delta_b: float
    eps_a: Optional[float] = None
    eps_c1: Optional[float] = None
    eps_c2: Optional[float] = None
    omega_ro: Optional[float] = None

    def as_dict(self) -> dict:
        return {
            "eps1": self.eps1,
            "eps2": self.eps2,
            "eps_a": self.eps_a,
            "eps_c1": self.eps_c1,
            "eps_c2": self.eps_c2,
            "omega_r": self.omega_r,
            "omega_ro": self.omega_ro,
            "delta_b": self.delta_b,
        }
