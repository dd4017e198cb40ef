"""Blockade metrics, Rabi-frequency estimation and parameter sweeps."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .core import DriveParams, LsiibError, Trajectory
from .reduction import DEFAULT_ADIABATIC_RATIO, light_shifts_first_order

BLOCKADE_RATIO = 0.2
ROLES = ("initial", "target", "excited", "blocked")


@dataclass(frozen=True)
class BlockadeReport:
    max_leak_excited: float
    max_leak_blocked: float
    rabi_frequency_fit: Optional[float]
    transfer_fidelity: float
    regime_flags: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {
            "max_leak_excited": self.max_leak_excited,
            "max_leak_blocked": self.max_leak_blocked,
            "rabi_frequency_fit": self.rabi_frequency_fit,
            "transfer_fidelity": self.transfer_fidelity,
        }
        for key in sorted(self.regime_flags):
            out[f"regime_flags.{key}"] = self.regime_flags[key]
        return out


def fit_rabi_frequency(times: np.ndarray, signal: np.ndarray, min_swing: float = 1e-6, pad: int = 64) -> Optional[float]:
    """Dominant nonzero angular frequency of a uniformly sampled signal.

    Hann-windowed, zero-padded periodogram; the peak bin is refined by
    quadratic interpolation. Frequencies below half a cycle per record are
    ignored. Returns ``None`` for a flat signal.
    """
    times = np.asarray(times, dtype=float)
    x = np.asarray(signal, dtype=float)
    if x.size < 8 or np.ptp(x) < min_swing:
        return None
    dt = times[1] - times[0]
    span = times[-1] - times[0]
    x = (x - x.mean()) * np.hanning(x.size)
    nfft = 1 << int(math.ceil(math.log2(x.size * pad)))
    spectrum = np.abs(np.fft.rfft(x, nfft))
    bin_width = 2 * math.pi / (nfft * dt)
    k_min = max(1, int(math.ceil(0.5 * (2 * math.pi / span) / bin_width)))
    if k_min >= spectrum.size - 1:
        return None
    k = k_min + int(np.argmax(spectrum[k_min:-1]))
    if k == k_min:
        return None
    left, mid, right = spectrum[k - 1], spectrum[k], spectrum[k + 1]
    curvature = left - 2 * mid + right
    offset = 0.5 * (left - right) / curvature if curvature != 0 else 0.0
    return float((k + offset) * bin_width)


def regime_flags(p: DriveParams, collective: bool, ratio: float = DEFAULT_ADIABATIC_RATIO,
                 blockade_ratio: float = BLOCKADE_RATIO) -> dict:
    """``adiabatic``: the mean detuning exceeds ``ratio`` times every coupling.
    ``blockade``: the Raman coupling is below ``blockade_ratio`` times the
    detuning of the blocked step (``eps1 + eps2`` for one atom, the blockade
    shift for the ensemble)."""
    delta = p.delta
    if delta == 0:
        return {"adiabatic": False, "blockade": False}
    ls = light_shifts_first_order(p)
    if collective and ls.omega_ro is not None:
        coupling = max(math.sqrt(p.n_atoms) * p.omega1, math.sqrt(2) * p.omega2)
        blockade = abs(ls.omega_ro) <= blockade_ratio * abs(ls.delta_b)
    else:
        coupling = max(p.omega1, p.omega2)
        blockade = abs(ls.omega_r) <= blockade_ratio * abs(ls.eps1 + ls.eps2)
    return {"adiabatic": bool(abs(delta) >= ratio * coupling), "blockade": bool(blockade)}


def _role_sum(traj: Trajectory, roles: Mapping[str, str], role: str) -> np.ndarray:
    cols = [i for i, label in enumerate(traj.basis_labels) if roles.get(label) == role]
    if not cols:
        return np.zeros(traj.times.size)
    return traj.populations[:, cols].sum(axis=1)


def blockade_report(
    traj: Trajectory,
    roles: Mapping[str, str],
    params: Optional[DriveParams] = None,
    collective: bool = False,
) -> BlockadeReport:
    """Leakage, transfer and Rabi frequency of a trajectory.

    ``roles`` maps basis labels to ``initial``, ``target``, ``excited`` or
    ``blocked``; unmapped labels are ignored. Regime flags are filled when
    ``params`` is given.
    """
    unknown = set(roles.values()) - set(ROLES)
    if unknown:
        raise ValueError(f"unknown role(s) {sorted(unknown)}")
    targets = [label for label in traj.basis_labels if roles.get(label) == "target"]
    if len(targets) != 1:
        raise ValueError("exactly one basis state must have the 'target' role")
    target = traj.population(targets[0])
    frequency = fit_rabi_frequency(traj.times, target)
    if frequency is not None and frequency * traj.t_max / (2 * math.pi) < 1.5:
        warnings.warn("trajectory spans fewer than 1.5 fitted Rabi periods", RuntimeWarning, stacklevel=2)
    flags = regime_flags(params, collective) if params is not None else {}
    return BlockadeReport(
        max_leak_excited=float(min(1.0, _role_sum(traj, roles, "excited").max())),
        max_leak_blocked=float(min(1.0, _role_sum(traj, roles, "blocked").max())),
        rabi_frequency_fit=frequency,
        transfer_fidelity=float(min(1.0, target.max())),
        regime_flags=flags,
    )


@dataclass
class SweepRow:
    index: int
    params: DriveParams
    report: Optional[BlockadeReport] = None
    derived: dict = field(default_factory=dict)
    error: Optional[str] = None


def sweep(
    param_grid: Sequence[DriveParams],
    scenario: str,
    propagation_factory=None,
    model=None,
    threads: Optional[int] = None,
) -> list:
    """Run ``scenario`` at every grid point; rows come back in input order.

    ``propagation_factory(params)`` may supply a per-point
    :class:`~lsiib.dynamics.PropagationConfig`; by default each point spans
    three of its own Raman periods. A failing point records its error in the
    row instead of aborting the sweep.
    """
    from . import scenarios

    grid = list(param_grid)
    if not grid:
        raise ValueError("sweep grid is empty")
    collective = scenarios.is_collective(scenario, model)

    def run_point(item):
        index, p = item
        row = SweepRow(index, p)
        try:
            cfg = propagation_factory(p) if propagation_factory else None
            result = scenarios.simulate(p, scenario, cfg, model)
            row.report = blockade_report(result.trajectory, result.roles, p, collective)
            row.derived = scenarios.derived_quantities(p, scenario, model)
            for key in ("max_symmetric_residual", "max_outside"):
                if key in result.extras:
                    row.derived[key] = result.extras[key]
        except (LsiibError, ValueError, ArithmeticError) as exc:
            row.error = f"{type(exc).__name__}: {exc}"
        return row

    items = list(enumerate(grid))
    if threads == 1 or len(items) == 1:
        return [run_point(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run_point, items))
