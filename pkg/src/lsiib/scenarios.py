"""Named simulation scenarios: Hamiltonian, initial state and basis roles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .collective import DROPPED_LABELS, build_collective_state, project_trajectory, symmetric_residual
from .core import DriveParams, HamiltonianMatrix, QuantumState, Trajectory
from .dynamics import DEFAULT_PERIODS, DEFAULT_STEPS, PropagationConfig, propagate, rabi_periods
from .hamiltonians import COLLECTIVE_SIX_BASIS, build_collective_six, build_five_level, build_full_ensemble
from .reduction import (
    EliminationSpec,
    blockade_shift_numeric,
    effective_three_level_collective,
    effective_three_level_single,
    eliminate,
    light_shifts_first_order,
    resonance_detuning,
)

SINGLE_ATOM = "single-atom-5lvl"
COLLECTIVE_SIX = "collective-6lvl"
EFFECTIVE_THREE = "effective-3lvl"
FULL_ENSEMBLE = "full-ensemble-oracle"
SIMULATION_SCENARIOS = (SINGLE_ATOM, COLLECTIVE_SIX, EFFECTIVE_THREE, FULL_ENSEMBLE)

FIVE_LEVEL_ROLES = {"1": "initial", "2": "excited", "3": "target", "4": "excited", "5": "blocked"}
COLLECTIVE_ROLES = {
    "A": "initial",
    "G1": "excited",
    "C1": "target",
    "G11": "excited",
    "C2": "blocked",
    "G12": "excited",
    "G2": "excited",
    "G21": "excited",
}


@dataclass(frozen=True)
class ModelOptions:
    """Options for the effective three-level scenario."""

    form: str = "collective"
    shifted: bool = True
    exact_coupling: bool = False

    def __post_init__(self):
        if self.form not in ("single", "collective"):
            raise ValueError(f"effective form must be 'single' or 'collective', got {self.form!r}")


@dataclass
class ScenarioResult:
    trajectory: Trajectory
    roles: dict
    hamiltonian: HamiltonianMatrix
    extras: dict = field(default_factory=dict)


def is_collective(scenario: str, model: Optional[ModelOptions] = None) -> bool:
    if scenario == EFFECTIVE_THREE:
        return (model or ModelOptions()).form == "collective"
    return scenario in (COLLECTIVE_SIX, FULL_ENSEMBLE)


def nominal_rabi_frequency(p: DriveParams, collective: bool) -> float:
    ls = light_shifts_first_order(p)
    if collective:
        if ls.omega_ro is None:
            raise ValueError("collective scenarios need n_atoms >= 3")
        return ls.omega_ro
    return ls.omega_r


def default_propagation(
    p: DriveParams,
    scenario: str,
    model: Optional[ModelOptions] = None,
    periods: float = DEFAULT_PERIODS,
    n_steps: int = DEFAULT_STEPS,
    record_amplitudes: bool = False,
    method: str = "eigendecomposition",
) -> PropagationConfig:
    """Grid spanning ``periods`` Raman cycles of the scenario's Raman frequency."""
    frequency = nominal_rabi_frequency(p, is_collective(scenario, model))
    return PropagationConfig(rabi_periods(frequency, periods), n_steps, method, record_amplitudes)


def scenario_hamiltonian(p: DriveParams, scenario: str, model: Optional[ModelOptions] = None) -> HamiltonianMatrix:
    model = model or ModelOptions()
    if scenario == SINGLE_ATOM:
        return build_five_level(p)
    if scenario == COLLECTIVE_SIX:
        return build_collective_six(p)
    if scenario == EFFECTIVE_THREE:
        if model.form == "single":
            return effective_three_level_single(p, shifted=model.shifted)
        return effective_three_level_collective(p, exact_coupling=model.exact_coupling, shifted=model.shifted)
    if scenario == FULL_ENSEMBLE:
        return build_full_ensemble(p)
    raise ValueError(f"unknown scenario {scenario!r}")


def simulate(
    p: DriveParams,
    scenario: str,
    propagation: Optional[PropagationConfig] = None,
    model: Optional[ModelOptions] = None,
) -> ScenarioResult:
    """Run one scenario from its natural initial state (``|1>`` or ``|A>``).

    The full-ensemble oracle is projected onto the eight built collective
    states plus an ``outside`` column; its extras carry the symmetric-subspace
    residual and the raw full-space trajectory.
    """
    h = scenario_hamiltonian(p, scenario, model)
    if propagation is None:
        propagation = default_propagation(p, scenario, model)
    if scenario == FULL_ENSEMBLE:
        start = build_collective_state("A", p.n_atoms)
        psi0 = QuantumState(h.basis_labels, start.amplitudes)
        if not propagation.record_amplitudes:
            propagation = PropagationConfig(propagation.t_max, propagation.n_steps, propagation.method, True)
        full = propagate(h, psi0, propagation)
        states = [build_collective_state(label, p.n_atoms) for label in COLLECTIVE_SIX_BASIS + DROPPED_LABELS]
        projected = project_trajectory(full, states)
        residual = symmetric_residual(full, p.n_atoms)
        extras = {
            "max_symmetric_residual": float(residual.max()),
            "max_outside": float(projected.population("outside").max()),
            "full_trajectory": full,
        }
        return ScenarioResult(projected, COLLECTIVE_ROLES, h, extras)
    first = h.basis_labels[0]
    traj = propagate(h, QuantumState.basis_state(h.basis_labels, first), propagation)
    roles = COLLECTIVE_ROLES if first == "A" else FIVE_LEVEL_ROLES
    return ScenarioResult(traj, roles, h)


def elimination_error(p: DriveParams) -> float:
    """Max entrywise gap between the numerically eliminated five-level matrix
    and the closed-form unshifted effective matrix."""
    h = build_five_level(p)
    numeric = eliminate(h, EliminationSpec.eliminating(h, ("2", "4")))
    closed = effective_three_level_single(p, shifted=False)
    return float(np.abs(np.asarray(numeric.entries) - np.asarray(closed.entries)).max())


def derived_quantities(p: DriveParams, scenario: str, model: Optional[ModelOptions] = None) -> dict:
    """Light shifts, Raman frequencies, blockade shift and scenario-specific checks."""
    out = dict(light_shifts_first_order(p).as_dict())
    collective = is_collective(scenario, model)
    out["resonance_big_delta"] = resonance_detuning(p, "collective" if collective and p.n_atoms >= 3 else "single")
    if p.n_atoms >= 3 and collective:
        out["delta_b_numeric"] = blockade_shift_numeric(p)
    if scenario == SINGLE_ATOM:
        out["elimination_max_error"] = elimination_error(p)
    return out


def resolve_resonance(p: DriveParams, scenario: str, order: str, model: Optional[ModelOptions] = None) -> DriveParams:
    """Return ``p`` with its two-photon detuning set to the scenario's resonance."""
    if scenario == FULL_ENSEMBLE:
        mode = "ensemble"
    else:
        mode = "collective" if is_collective(scenario, model) else "single"
    value = resonance_detuning(p, mode, order)
    if not math.isfinite(value):
        raise ValueError("resonance detuning is not finite")
    return p.replace(delta=p.delta, big_delta=value)
