"""Simulation of light-shift-imbalance induced blockade in Raman ladders.

Single-atom five-level and collective (Dicke) ensemble Hamiltonians, adiabatic
elimination to effective three-level models, unitary propagation and blockade
metrics.
"""

__version__ = "0.1.0"

from .core import (
    AdiabaticityWarning,
    DriveParams,
    HamiltonianMatrix,
    LightShiftSet,
    LsiibError,
    QuantumState,
    RegimeError,
    Trajectory,
    derived_detunings,
)
from .hamiltonians import build_collective_six, build_five_level, build_full_ensemble
from .reduction import (
    EliminationSpec,
    blockade_shift_numeric,
    effective_three_level_collective,
    effective_three_level_single,
    eliminate,
    light_shifts_first_order,
    resonance_detuning,
)
from .dynamics import PropagationConfig, populations_at, propagate
from .collective import build_collective_state, coupling_matrix_element, project_trajectory
from .analysis import BlockadeReport, blockade_report, sweep
from .scenarios import simulate

__all__ = [
    "AdiabaticityWarning",
    "BlockadeReport",
    "DriveParams",
    "EliminationSpec",
    "HamiltonianMatrix",
    "LightShiftSet",
    "LsiibError",
    "PropagationConfig",
    "QuantumState",
    "RegimeError",
    "Trajectory",
    "blockade_report",
    "blockade_shift_numeric",
    "build_collective_six",
    "build_collective_state",
    "build_five_level",
    "build_full_ensemble",
    "coupling_matrix_element",
    "derived_detunings",
    "effective_three_level_collective",
    "effective_three_level_single",
    "eliminate",
    "light_shifts_first_order",
    "populations_at",
    "project_trajectory",
    "propagate",
    "resonance_detuning",
    "simulate",
    "sweep",
]
