"""Adiabatic elimination, light shifts and the blockade shift.

Closed forms (leading-order light shifts, effective three-level matrices) sit
next to two numerical routes that check them: a matrix elimination
``H_kk - H_ke H_ee^-1 H_ek`` of arbitrary eliminated blocks, and dressed-state
light shifts from exact 2x2 diagonalizations.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .core import (
    AdiabaticityWarning,
    DriveParams,
    HamiltonianMatrix,
    LightShiftSet,
    RegimeError,
    derived_detunings,
)
from .hamiltonians import build_collective_six, build_five_level, build_full_ensemble

DEFAULT_ADIABATIC_RATIO = 5.0


class EliminationOrder(str, Enum):
    FIRST = "first"
    SECOND = "second"


@dataclass(frozen=True)
class EliminationSpec:
    """Partition of basis indices into kept and eliminated states."""

    kept_indices: tuple
    eliminated_indices: tuple
    order: EliminationOrder = EliminationOrder.FIRST

    def __post_init__(self):
        kept = tuple(int(i) for i in self.kept_indices)
        gone = tuple(int(i) for i in self.eliminated_indices)
        if set(kept) & set(gone):
            raise ValueError("kept and eliminated indices overlap")
        if len(set(kept)) != len(kept) or len(set(gone)) != len(gone):
            raise ValueError("duplicate indices in elimination spec")
        object.__setattr__(self, "kept_indices", kept)
        object.__setattr__(self, "eliminated_indices", gone)
        object.__setattr__(self, "order", EliminationOrder(self.order))

    @classmethod
    def eliminating(cls, h: HamiltonianMatrix, labels: Sequence[str], order="first") -> "EliminationSpec":
        """Eliminate the named states and keep the rest in basis order."""
        gone = [h.index(label) for label in labels]
        kept = [i for i in range(h.dim) if i not in gone]
        return cls(tuple(kept), tuple(gone), order)


def _require_detuned(delta: float) -> None:
    if delta == 0:
        raise RegimeError("not in adiabatic regime: mean detuning delta is zero")


def light_shifts_first_order(p: DriveParams) -> LightShiftSet:
    """Leading-order light shifts, Raman-Rabi frequencies and blockade shift.

    ``eps_j = omega_j**2 / (4 delta)``, ``omega_r = omega1 omega2 / (2 delta)``,
    ``omega_ro = sqrt(N) omega_r`` and
    ``delta_b = -(omega1**4 + omega2**4) / (8 delta**3)``.

    The collective shifts count each optically excited neighbour of the
    ladder: ``eps_a = N eps1``, ``eps_c1 = eps2 + (N-1) eps1`` and
    ``eps_c2 = 2 eps2 + (N-2) eps1``; they are equally spaced by construction.
    """
    delta, _ = derived_detunings(p)
    _require_detuned(delta)
    eps1 = p.omega1 ** 2 / (4 * delta)
    eps2 = p.omega2 ** 2 / (4 * delta)
    omega_r = p.omega1 * p.omega2 / (2 * delta)
    delta_b = -(p.omega2 ** 4 + p.omega1 ** 4) / (8 * delta ** 3)
    n = p.n_atoms
    if n < 3:
        return LightShiftSet(eps1=eps1, eps2=eps2, omega_r=omega_r, delta_b=delta_b)
    return LightShiftSet(
        eps1=eps1,
        eps2=eps2,
        omega_r=omega_r,
        delta_b=delta_b,
        eps_a=n * eps1,
        eps_c1=eps2 + (n - 1) * eps1,
        eps_c2=2 * eps2 + (n - 2) * eps1,
        omega_ro=math.sqrt(n) * omega_r,
    )


def eliminate(
    h: HamiltonianMatrix,
    spec: EliminationSpec,
    ratio: float = DEFAULT_ADIABATIC_RATIO,
) -> HamiltonianMatrix:
    """Adiabatically eliminate states from a Hamiltonian.

    With ``order="first"`` this returns ``H_kk - H_ke H_ee^-1 H_ek``, the
    leading-order effective Hamiltonian in the frame where the kept states sit
    near zero energy. ``order="second"`` adds the next correction from
    renormalizing the kept states, ``H1 - {S, H1}/2`` with
    ``S = H_ke H_ee^-2 H_ek``; this captures the fourth-order part of the
    light shifts.

    A weak precondition (eliminated energies not ``ratio`` times larger than
    the largest kept-eliminated coupling) emits :class:`AdiabaticityWarning`;
    a singular eliminated block raises :class:`RegimeError`.
    """
    kept = list(spec.kept_indices)
    gone = list(spec.eliminated_indices)
    if sorted(kept + gone) != list(range(h.dim)):
        raise ValueError("kept and eliminated indices must cover the basis exactly once")
    a = np.asarray(h.entries)
    h_kk = a[np.ix_(kept, kept)]
    labels = tuple(h.basis_labels[i] for i in kept)
    if not gone:
        return HamiltonianMatrix(labels, h_kk)
    h_ke = a[np.ix_(kept, gone)]
    h_ee = a[np.ix_(gone, gone)]

    max_coupling = float(np.abs(h_ke).max()) if h_ke.size else 0.0
    min_energy = float(np.abs(np.diag(h_ee)).min())
    if max_coupling > 0 and min_energy <= ratio * max_coupling:
        warnings.warn(
            f"eliminated energies ({min_energy:.4g}) are not {ratio:g}x the couplings "
            f"({max_coupling:.4g}); elimination is unreliable",
            AdiabaticityWarning,
            stacklevel=2,
        )
    try:
        if np.linalg.cond(h_ee) > 1e13:
            raise np.linalg.LinAlgError
        inv_hek = np.linalg.solve(h_ee, h_ke.conj().T)
    except np.linalg.LinAlgError:
        raise RegimeError("eliminated block not invertible") from None

    h1 = h_kk - h_ke @ inv_hek
    if spec.order is EliminationOrder.SECOND:
        s = inv_hek.conj().T @ inv_hek
        h1 = h1 - 0.5 * (s @ h1 + h1 @ s)
    h1 = 0.5 * (h1 + h1.conj().T)
    if np.isrealobj(a):
        h1 = h1.real
    return HamiltonianMatrix(labels, h1)


def effective_three_level_single(p: DriveParams, shifted: bool = True) -> HamiltonianMatrix:
    """Closed-form effective Hamiltonian on ``|1>, |3>, |5>``.

    ``shifted=True`` returns the zero-shifted resonant form, valid when the
    two-photon detuning equals ``eps2``::

        [[0, w/2, 0], [w/2, 0, w/2], [0, w/2, -(eps1 + eps2)]]

    with ``w = omega_r``. ``shifted=False`` returns the unshifted matrix at the
    two-photon detuning carried by ``p``.
    """
    ls = light_shifts_first_order(p)
    _, big_delta = derived_detunings(p)
    half = ls.omega_r / 2
    if shifted:
        diagonal = (0.0, 0.0, -(ls.eps1 + ls.eps2))
    else:
        diagonal = (
            big_delta / 2 + ls.eps1,
            -big_delta / 2 + ls.eps1 + ls.eps2,
            -1.5 * big_delta + ls.eps2,
        )
    m = np.diag(diagonal)
    m[0, 1] = m[1, 0] = m[1, 2] = m[2, 1] = half
    return HamiltonianMatrix(("1", "3", "5"), m)


def effective_three_level_collective(
    p: DriveParams,
    exact_coupling: bool = False,
    shifted: bool = True,
) -> HamiltonianMatrix:
    """Closed-form effective Hamiltonian on ``|A>, |C1>, |C2>``.

    The default is the resonant, zero-shifted large-N form::

        [[0, w/2, 0], [w/2, 0, w/sqrt(2)], [0, w/sqrt(2), delta_b]]

    with ``w = omega_ro``. ``exact_coupling=True`` uses the finite-N C1-C2
    coupling ``sqrt(2(N-1)/N) w/2``. ``shifted=False`` returns the unshifted
    matrix at the two-photon detuning carried by ``p`` (always with the exact
    coupling), whose diagonal holds the leading-order collective light shifts.
    """
    if p.n_atoms < 3:
        raise ValueError(f"collective effective Hamiltonian needs n_atoms >= 3, got {p.n_atoms}")
    ls = light_shifts_first_order(p)
    n = p.n_atoms
    exact = math.sqrt(2 * (n - 1) / n) * ls.omega_ro / 2
    if shifted:
        diagonal = (0.0, 0.0, ls.delta_b)
        upper = exact if exact_coupling else ls.omega_ro / math.sqrt(2)
    else:
        _, big_delta = derived_detunings(p)
        diagonal = (
            ls.eps_a + big_delta / 2,
            ls.eps_c1 - big_delta / 2,
            ls.eps_c2 - 1.5 * big_delta,
        )
        upper = exact
    m = np.diag(diagonal)
    m[0, 1] = m[1, 0] = ls.omega_ro / 2
    m[1, 2] = m[2, 1] = upper
    return HamiltonianMatrix(("A", "C1", "C2"), m)


def dressed_shift(energy: float, partner: float, coupling: float, track_ratio: float = 2.0) -> float:
    """Shift of a level dressed by one far-detuned partner.

    Exact 2x2 diagonalization; returns the eigenvalue adiabatically connected
    to ``energy`` minus ``energy``. Raises :class:`RegimeError` when the pair
    is too close to degenerate to tell the branches apart
    (``|energy - partner| <= track_ratio * |coupling|``).
    """
    if coupling == 0:
        return 0.0
    gap = energy - partner
    if abs(gap) <= track_ratio * abs(coupling):
        raise RegimeError("cannot adiabatically track dressed state (near-degenerate crossing)")
    half_split = math.hypot(gap / 2, coupling)
    # branch on the same side as the bare level; sqrt(x^2+g^2) - x written without cancellation
    return math.copysign(coupling ** 2 / (half_split + abs(gap) / 2), gap)


def dressed_light_shifts(h: HamiltonianMatrix, kept: Sequence[str], eliminated: Sequence[str]) -> dict:
    """Per-state light shifts summed over independent 2x2 dressed blocks."""
    a = np.asarray(h.entries)
    shifts = {}
    for label in kept:
        k = h.index(label)
        total = 0.0
        for other in eliminated:
            e = h.index(other)
            total += dressed_shift(float(a[k, k].real), float(a[e, e].real), float(abs(a[k, e])))
        shifts[label] = total
    return shifts


def _collective_dressed(p: DriveParams) -> dict:
    return dressed_light_shifts(build_collective_six(p), ("A", "C1", "C2"), ("G1", "G11", "G12"))


def blockade_shift_numeric(p: DriveParams, ratio: float = DEFAULT_ADIABATIC_RATIO) -> float:
    """Blockade shift from dressed-state light shifts of ``|A>, |C1>, |C2>``.

    Each state's shift is the sum of exact 2x2 dressed shifts against its
    optically excited neighbours in the six-level ladder, so the result
    contains all orders of each two-level shift. Returns
    ``(eps_C2 - eps_C1) - (eps_C1 - eps_A)``, which tends to
    ``-(omega1**4 + omega2**4) / (8 delta**3)`` when
    ``delta >> sqrt(N) omega1, omega2``.
    """
    delta, _ = derived_detunings(p)
    _require_detuned(delta)
    h = build_collective_six(p)
    coupling = float(np.abs(np.diag(np.asarray(h.entries), 1)).max())
    if coupling > 0 and abs(delta) < ratio * coupling:
        warnings.warn(
            f"|delta| = {abs(delta):.4g} is below {ratio:g}x the largest coupling "
            f"{coupling:.4g}; higher-order shifts dominate",
            AdiabaticityWarning,
            stacklevel=2,
        )
    s = _collective_dressed(p)
    return (s["C2"] - s["C1"]) - (s["C1"] - s["A"])


def resonance_detuning(p: DriveParams, mode: str = "single", order: str = "first") -> float:
    """Two-photon detuning that makes the first Raman step resonant.

    ``mode="single"`` targets the ``|1>-|3>`` step (``eps2`` at first order);
    ``mode="collective"`` targets ``|A>-|C1>`` (``eps_C1 - eps_A``, which is
    ``eps2 - eps1`` at first order) in the truncated six-level ladder.
    ``mode="ensemble"`` targets the same step in the untruncated product-space
    model, where it is one atom's ``a-c`` splitting; at first order it equals
    the collective value. ``order="dressed"`` instead solves for the detuning
    that equalizes the dressed-state energies of the two levels, including
    every order of the 2x2 shifts; the mean detuning is held fixed.

    The truncated ladder omits G2 and G21, whose fourth-order shifts of ``|A>``
    and ``|C1>`` differ by about ``N^2 omega1^4 / (16 delta^3)``; use the
    ensemble mode when driving the full model.
    """
    delta, _ = derived_detunings(p)
    _require_detuned(delta)
    ls = light_shifts_first_order(p)
    if mode == "single":
        first = ls.eps2
        pair, gone = ("1", "3"), ("2", "4")
        builder = build_five_level
    elif mode == "collective":
        first = ls.eps2 - ls.eps1
        pair, gone = ("A", "C1"), ("G1", "G11", "G12")
        builder = build_collective_six
    elif mode == "ensemble":
        first = ls.eps2 - ls.eps1
        pair, gone = ("a", "c"), ("g",)

        def builder(q):
            return build_full_ensemble(q.replace(n_atoms=1))
    else:
        raise ValueError(f"unknown resonance mode {mode!r}")
    if order == "first":
        return first
    if order != "dressed":
        raise ValueError(f"unknown resonance order {order!r}")

    def imbalance(big_delta: float) -> float:
        h = builder(p.replace(delta=delta, big_delta=big_delta))
        s = dressed_light_shifts(h, pair, gone)
        a = np.asarray(h.entries)
        lower, upper = h.index(pair[0]), h.index(pair[1])
        return (a[lower, lower] + s[pair[0]]) - (a[upper, upper] + s[pair[1]])

    width = abs(ls.eps1) + abs(ls.eps2) + abs(first) + 1e-300
    lo, hi = first - width, first + width
    for _ in range(60):
        if imbalance(lo) * imbalance(hi) <= 0:
            break
        lo, hi = first - 2 * (first - lo), first + 2 * (hi - first)
    else:
        raise RegimeError("could not bracket the dressed resonance")
    return brentq(imbalance, lo, hi, xtol=1e-15 * max(1.0, abs(first)), rtol=1e-14, maxiter=200)
