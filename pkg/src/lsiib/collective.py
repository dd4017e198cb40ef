"""Symmetric collective states of N three-level atoms in the full product space.

A collective state is labelled by how many atoms sit in ``g`` and in ``c``
(the rest are in ``a``); it is the equal-weight superposition of every
product state with that occupation, so its normalization is one over the
square root of the multinomial count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import DriveParams, HamiltonianMatrix, Trajectory, clean_populations
from .hamiltonians import COLLECTIVE_SIX_BASIS, DEFAULT_ATOM_CAP, _level_digits, build_full_ensemble

# label -> (atoms in g, atoms in c)
OCCUPATIONS = {
    "A": (0, 0),
    "G1": (1, 0),
    "C1": (0, 1),
    "G2": (2, 0),
    "C2": (0, 2),
    "G11": (1, 1),
    "G21": (2, 1),
    "G12": (1, 2),
}
DROPPED_LABELS = ("G2", "G21")
OUTSIDE_LABEL = "outside"


def multiplicity(n_atoms: int, n_g: int, n_c: int) -> int:
    """Number of product states with ``n_g`` atoms in g and ``n_c`` in c."""
    return math.factorial(n_atoms) // (
        math.factorial(n_g) * math.factorial(n_c) * math.factorial(n_atoms - n_g - n_c)
    )


@dataclass(frozen=True, eq=False)
class CollectiveState:
    label: str
    n_atoms: int
    amplitudes: np.ndarray

    @property
    def occupation(self) -> tuple:
        return occupation_of(self.label)

    def overlap(self, vector: np.ndarray) -> np.ndarray:
        """``<self|vector>`` for a vector or a stack of row vectors."""
        return np.asarray(vector) @ self.amplitudes.conj()


def occupation_of(label: str) -> tuple:
    if label in OCCUPATIONS:
        return OCCUPATIONS[label]
    raise ValueError(f"unknown collective state {label!r}; expected one of {sorted(OCCUPATIONS)}")


def symmetric_vector(n_atoms: int, n_g: int, n_c: int) -> np.ndarray:
    if n_g < 0 or n_c < 0 or n_g + n_c > n_atoms:
        raise ValueError(f"occupation (g={n_g}, c={n_c}) impossible for {n_atoms} atoms")
    digits = _level_digits(n_atoms)
    mask = ((digits == 1).sum(axis=1) == n_g) & ((digits == 2).sum(axis=1) == n_c)
    vec = np.zeros(3 ** n_atoms)
    vec[mask] = 1.0 / math.sqrt(multiplicity(n_atoms, n_g, n_c))
    return vec


def build_collective_state(label: str, n_atoms: int, cap: int = DEFAULT_ATOM_CAP) -> CollectiveState:
    """Normalized symmetric superposition for one of the eight ladder labels."""
    n_g, n_c = occupation_of(label)
    if n_atoms > cap:
        raise ValueError(f"n_atoms={n_atoms} exceeds the brute-force cap of {cap}")
    if n_g + n_c > n_atoms:
        raise ValueError(f"state {label} needs at least {n_g + n_c} atoms, got {n_atoms}")
    vec = symmetric_vector(n_atoms, n_g, n_c)
    vec.setflags(write=False)
    return CollectiveState(label, n_atoms, vec)


def coupling_matrix_element(
    bra: CollectiveState,
    ket: CollectiveState,
    p: DriveParams,
    hamiltonian: Optional[HamiltonianMatrix] = None,
) -> complex:
    """``<bra| H_full |ket>`` by brute force in the product space.

    Pass a prebuilt ``hamiltonian`` to reuse it across many elements.
    """
    if bra.n_atoms != ket.n_atoms:
        raise ValueError("states belong to ensembles of different size")
    if hamiltonian is None:
        if p.n_atoms != ket.n_atoms:
            p = p.replace(n_atoms=ket.n_atoms)
        hamiltonian = build_full_ensemble(p)
    if hamiltonian.dim != ket.amplitudes.size:
        raise ValueError(
            f"Hamiltonian dimension {hamiltonian.dim} does not match state dimension {ket.amplitudes.size}"
        )
    return complex(bra.amplitudes.conj() @ (hamiltonian.entries @ ket.amplitudes))


def project_hamiltonian(hamiltonian: HamiltonianMatrix, states: Sequence[CollectiveState]) -> HamiltonianMatrix:
    """Matrix of ``hamiltonian`` restricted to the span of orthonormal ``states``."""
    basis = np.array([s.amplitudes for s in states])
    block = basis.conj() @ hamiltonian.entries @ basis.T
    return HamiltonianMatrix(tuple(s.label for s in states), block)


@dataclass(frozen=True)
class TruncationReport:
    """Projection of the full Hamiltonian onto the six-level ladder.

    ``dropped_couplings`` maps ``(kept, dropped)`` label pairs to the nonzero
    couplings toward the two other built states (G2, G21); ``unlisted_weight``
    maps each kept label to the norm of the part of ``H|kept>`` lying outside
    all eight built states (e.g. toward C3).
    """

    block: HamiltonianMatrix
    dropped_couplings: dict
    unlisted_weight: dict


def truncation_report(p: DriveParams, tol: float = 1e-14) -> TruncationReport:
    h = build_full_ensemble(p)
    kept = [build_collective_state(label, p.n_atoms) for label in COLLECTIVE_SIX_BASIS]
    dropped = [build_collective_state(label, p.n_atoms) for label in DROPPED_LABELS]
    everything = np.array([s.amplitudes for s in kept + dropped])
    couplings = {}
    unlisted = {}
    for state in kept:
        image = h.entries @ state.amplitudes
        for other in dropped:
            value = float(other.amplitudes @ image)
            if abs(value) > tol:
                couplings[(state.label, other.label)] = value
        residual = image - everything.T @ (everything @ image)
        unlisted[state.label] = float(np.linalg.norm(residual))
    return TruncationReport(project_hamiltonian(h, kept), couplings, unlisted)


def project_trajectory(full_traj: Trajectory, states: Iterable[CollectiveState]) -> Trajectory:
    """Populations of the listed collective states along a full-space trajectory.

    The last column, ``outside``, holds whatever population the listed states
    miss. The listed states must be orthonormal (distinct ladder labels are).
    """
    if full_traj.amplitudes is None:
        raise ValueError("trajectory has no recorded amplitudes; propagate with record_amplitudes=True")
    states = list(states)
    dim = full_traj.amplitudes.shape[1]
    for s in states:
        if s.amplitudes.size != dim:
            raise ValueError(f"state {s.label} lives in dimension {s.amplitudes.size}, trajectory in {dim}")
    if states:
        basis = np.array([s.amplitudes for s in states])
        listed = clean_populations(full_traj.amplitudes @ basis.conj().T)
    else:
        listed = np.zeros((full_traj.times.size, 0))
    outside = np.clip(1.0 - listed.sum(axis=1), 0.0, 1.0)
    pops = np.column_stack([listed, outside])
    return Trajectory(
        times=full_traj.times,
        populations=pops,
        basis_labels=tuple(s.label for s in states) + (OUTSIDE_LABEL,),
    )


def symmetric_basis(n_atoms: int) -> np.ndarray:
    """Rows: every symmetric occupation state, ``(N+1)(N+2)/2`` of them."""
    rows = [
        symmetric_vector(n_atoms, n_g, n_c)
        for n_g in range(n_atoms + 1)
        for n_c in range(n_atoms + 1 - n_g)
    ]
    return np.array(rows)


def symmetric_residual(full_traj: Trajectory, n_atoms: int) -> np.ndarray:
    """Per-time population outside the permutation-symmetric subspace."""
    if full_traj.amplitudes is None:
        raise ValueError("trajectory has no recorded amplitudes")
    basis = symmetric_basis(n_atoms)
    inside = (np.abs(full_traj.amplitudes @ basis.T) ** 2).sum(axis=1)
    norms = (np.abs(full_traj.amplitudes) ** 2).sum(axis=1)
    return np.abs(norms - inside)
