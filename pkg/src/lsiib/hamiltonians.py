"""Rotating-frame Raman Hamiltonians.

Three builders:

* the single-atom five-level ladder ``|1>..|5>``,
* the truncated six-level collective ladder ``|A>, |G1>, |C1>, |G11>, |C2>, |G12>``,
* the untruncated N-atom product-space Hamiltonian, used as a brute-force oracle.
"""

from __future__ import annotations

import math

import numpy as np

from .core import DriveParams, HamiltonianMatrix, derived_detunings

FIVE_LEVEL_BASIS = ("1", "2", "3", "4", "5")
COLLECTIVE_SIX_BASIS = ("A", "G1", "C1", "G11", "C2", "G12")
ATOM_LEVELS = ("a", "g", "c")
DEFAULT_ATOM_CAP = 8


def _tridiagonal(diagonal, couplings) -> np.ndarray:
    h = np.diag(np.asarray(diagonal, dtype=float))
    for i, value in enumerate(couplings):
        h[i, i + 1] = h[i + 1, i] = value
    h.setflags(write=False)
    return h


def build_five_level(p: DriveParams) -> HamiltonianMatrix:
    """Single-atom five-level Hamiltonian in the basis ``|1>..|5>``.

    Odd levels are ground/metastable, ``|2>`` and ``|4>`` optically excited.
    Leg-1 couplings (``omega1/2``) link 1-2 and 3-4; leg-2 couplings
    (``omega2/2``) link 2-3 and 4-5.
    """
    delta, big_delta = derived_detunings(p)
    diagonal = (big_delta / 2, -delta, -big_delta / 2, -(delta + big_delta), -1.5 * big_delta)
    couplings = (p.omega1 / 2, p.omega2 / 2, p.omega1 / 2, p.omega2 / 2)
    return HamiltonianMatrix(FIVE_LEVEL_BASIS, _tridiagonal(diagonal, couplings))


def build_collective_six(p: DriveParams) -> HamiltonianMatrix:
    """Truncated collective ladder for ``n_atoms`` three-level atoms.

    The leg-1 couplings carry the Dicke enhancement ``sqrt(N)``, ``sqrt(N-1)``
    and ``sqrt(N-2)``; the ``|G1>-|C1>`` coupling is ``omega2/2`` for every N.
    """
    n = p.n_atoms
    if n < 3:
        raise ValueError(f"the six-level collective ladder needs n_atoms >= 3, got {n}")
    delta, big_delta = derived_detunings(p)
    diagonal = (
        big_delta / 2,
        -delta,
        -big_delta / 2,
        -(delta + big_delta),
        -1.5 * big_delta,
        -(delta + 2 * big_delta),
    )
    couplings = (
        math.sqrt(n) * p.omega1 / 2,
        p.omega2 / 2,
        math.sqrt(n - 1) * p.omega1 / 2,
        math.sqrt(2) * p.omega2 / 2,
        math.sqrt(n - 2) * p.omega1 / 2,
    )
    return HamiltonianMatrix(COLLECTIVE_SIX_BASIS, _tridiagonal(diagonal, couplings))


def single_atom_energies(p: DriveParams) -> tuple[float, float, float]:
    """Per-atom energies of ``a, g, c`` for the N-atom product Hamiltonian.

    Chosen so that ``<A|H|A> = big_delta/2``, ``<G1|H|G1> = -delta`` and
    ``<C1|H|C1> = -big_delta/2`` for every N, which makes the projected
    oracle comparable entrywise with the collective ladder.
    """
    delta, big_delta = derived_detunings(p)
    e_a = big_delta / (2 * p.n_atoms)
    return e_a, e_a - delta - big_delta / 2, e_a - big_delta


def product_basis_labels(n_atoms: int) -> tuple[str, ...]:
    """All ``3**n_atoms`` product states, lexicographic with ``a < g < c``; atom 0 leftmost."""
    digits = _level_digits(n_atoms)
    letters = np.array(ATOM_LEVELS)
    return tuple("".join(row) for row in letters[digits])


def _level_digits(n_atoms: int) -> np.ndarray:
    dim = 3 ** n_atoms
    index = np.arange(dim)
    strides = 3 ** np.arange(n_atoms - 1, -1, -1)
    return (index[:, None] // strides[None, :]) % 3


def build_full_ensemble(p: DriveParams, cap: int = DEFAULT_ATOM_CAP) -> HamiltonianMatrix:
    """Sum of single-atom lambda Hamiltonians over ``n_atoms`` atoms.

    Each atom has couplings ``omega1/2`` on a-g and ``omega2/2`` on g-c, and the
    energies of :func:`single_atom_energies`. The matrix is dense, real
    symmetric, of dimension ``3**n_atoms``.
    """
    n = p.n_atoms
    if n > cap:
        raise ValueError(f"n_atoms={n} exceeds the brute-force cap of {cap} (dimension 3^{n})")
    dim = 3 ** n
    digits = _level_digits(n)
    energies = np.array(single_atom_energies(p))
    h = np.zeros((dim, dim))
    rows = np.arange(dim)
    h[rows, rows] = energies[digits].sum(axis=1)
    for pos in range(n):
        stride = 3 ** (n - 1 - pos)
        for level, coupling in ((0, p.omega1 / 2), (1, p.omega2 / 2)):
            src = rows[digits[:, pos] == level]
            h[src, src + stride] = coupling
            h[src + stride, src] = coupling
    h.setflags(write=False)
    return HamiltonianMatrix(product_basis_labels(n), h)
