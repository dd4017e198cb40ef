"""Run configuration: TOML files with dotted sections.

Example::

    scenario = "single-atom-5lvl"

    [params]
    omega1 = 1.0
    omega2 = 0.1
    delta = 10.0
    big_delta = 0.0        # or "resonance" / "resonance-dressed"
    n_atoms = 1

    [propagation]
    t_max = "auto"         # or a number
    periods = 3
    n_steps = 2000
    method = "eigendecomposition"
    record_amplitudes = false

    [output]
    directory = "out"
    format = "csv"

Sweeps add ``[sweep] base = "<scenario>"`` and a ``[sweep.axes]`` table of
parameter name to list of values; the grid is the Cartesian product with the
first axis varying slowest.
"""

from __future__ import annotations

import itertools
import numbers
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .core import DriveParams, LsiibError
from .dynamics import DEFAULT_PERIODS, DEFAULT_STEPS, PropagationConfig, PropagationMethod
from .hamiltonians import DEFAULT_ATOM_CAP
from .scenarios import (
    COLLECTIVE_SIX,
    EFFECTIVE_THREE,
    FULL_ENSEMBLE,
    SIMULATION_SCENARIOS,
    ModelOptions,
    default_propagation,
    resolve_resonance,
)

ORACLE_COMPARE = "oracle-compare"
SWEEP = "sweep"
SCENARIOS = SIMULATION_SCENARIOS + (ORACLE_COMPARE, SWEEP)
FORMATS = ("csv", "json")
AXIS_NAMES = ("omega1", "omega2", "delta1", "delta2", "delta", "big_delta", "n_atoms")
RESONANCE_KEYWORDS = {"resonance": "first", "resonance-dressed": "dressed"}


class ConfigError(LsiibError):
    """Invalid or incomplete run configuration."""


@dataclass(frozen=True)
class PropagationSettings:
    t_max: Optional[float] = None
    periods: float = DEFAULT_PERIODS
    n_steps: int = DEFAULT_STEPS
    method: str = "eigendecomposition"
    record_amplitudes: bool = False

    def resolve(self, p: DriveParams, scenario: str, model: ModelOptions) -> PropagationConfig:
        if self.t_max is None:
            return default_propagation(p, scenario, model, self.periods, self.n_steps,
                                       self.record_amplitudes, self.method)
        return PropagationConfig(self.t_max, self.n_steps, self.method, self.record_amplitudes)


@dataclass(frozen=True)
class RunConfig:
    scenario: str
    params: DriveParams
    propagation: PropagationSettings = field(default_factory=PropagationSettings)
    model: ModelOptions = field(default_factory=ModelOptions)
    resonance: Optional[str] = None
    sweep_base: Optional[str] = None
    sweep_axes: tuple = ()
    output_dir: str = "lsiib-out"
    output_format: str = "csv"

    @property
    def simulation_scenario(self) -> str:
        """Scenario whose model is propagated (the base scenario for sweeps)."""
        if self.scenario == SWEEP:
            return self.sweep_base
        if self.scenario == ORACLE_COMPARE:
            return FULL_ENSEMBLE
        return self.scenario

    def resolved_params(self, p: Optional[DriveParams] = None) -> DriveParams:
        p = self.params if p is None else p
        if self.resonance is None:
            return p
        return resolve_resonance(p, self.simulation_scenario, self.resonance, self.model)

    def sweep_grid(self) -> list:
        names = [name for name, _ in self.sweep_axes]
        grid = []
        for combo in itertools.product(*(values for _, values in self.sweep_axes)):
            changes = dict(zip(names, combo))
            try:
                point = self.params.replace(**changes)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"sweep point {changes}: {exc}") from None
            grid.append(self.resolved_params(point))
        return grid


def _section(raw: dict, name: str) -> dict:
    value = raw.get(name, {})
    if not isinstance(value, dict):
        raise ConfigError(f"[{name}] must be a table")
    return value


def _number(section: dict, key: str, prefix: str, required: bool = True, default=None):
    if key not in section:
        if required:
            raise ConfigError(f"missing required key '{prefix}.{key}'")
        return default
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigError(f"'{prefix}.{key}' must be a number, got {value!r}")
    return value


def _parse_params(section: dict) -> tuple:
    omega1 = _number(section, "omega1", "params")
    omega2 = _number(section, "omega2", "params")
    n_atoms = section.get("n_atoms", 1)
    if isinstance(n_atoms, bool) or not isinstance(n_atoms, int):
        raise ConfigError(f"'params.n_atoms' must be an integer, got {n_atoms!r}")
    has_pair = "delta1" in section or "delta2" in section
    has_mean = "delta" in section or "big_delta" in section
    if has_pair and has_mean:
        raise ConfigError("give either params.delta1/delta2 or params.delta/big_delta, not both")
    resonance = None
    try:
        if has_pair:
            p = DriveParams(omega1, omega2, _number(section, "delta1", "params"),
                            _number(section, "delta2", "params"), n_atoms)
        else:
            delta = _number(section, "delta", "params")
            big_delta = section.get("big_delta")
            if big_delta is None:
                raise ConfigError("missing required key 'params.big_delta'")
            if isinstance(big_delta, str):
                if big_delta not in RESONANCE_KEYWORDS:
                    raise ConfigError(
                        f"'params.big_delta' must be a number or one of {sorted(RESONANCE_KEYWORDS)}"
                    )
                resonance = RESONANCE_KEYWORDS[big_delta]
                big_delta = 0.0
            big_delta = _number({"big_delta": big_delta}, "big_delta", "params")
            p = DriveParams.from_detunings(omega1, omega2, delta, big_delta, n_atoms)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid [params]: {exc}") from None
    return p, resonance


def _parse_propagation(section: dict) -> PropagationSettings:
    t_max = section.get("t_max", "auto")
    if t_max == "auto":
        t_max = None
    else:
        t_max = _number(section, "t_max", "propagation")
        if t_max <= 0:
            raise ConfigError("'propagation.t_max' must be positive")
    periods = _number(section, "periods", "propagation", required=False, default=DEFAULT_PERIODS)
    n_steps = section.get("n_steps", DEFAULT_STEPS)
    if isinstance(n_steps, bool) or not isinstance(n_steps, int) or n_steps < 2:
        raise ConfigError("'propagation.n_steps' must be an integer >= 2")
    method = section.get("method", "eigendecomposition")
    if method not in {m.value for m in PropagationMethod}:
        raise ConfigError(f"'propagation.method' must be one of {[m.value for m in PropagationMethod]}")
    record = section.get("record_amplitudes", False)
    if not isinstance(record, bool):
        raise ConfigError("'propagation.record_amplitudes' must be true or false")
    return PropagationSettings(float(t_max) if t_max is not None else None, float(periods), n_steps, method, record)


def _parse_model(section: dict) -> ModelOptions:
    try:
        return ModelOptions(
            form=section.get("form", "collective"),
            shifted=bool(section.get("shifted", True)),
            exact_coupling=bool(section.get("exact_coupling", False)),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid [model]: {exc}") from None


def _parse_axes(section: dict) -> tuple:
    axes = section.get("axes")
    if not isinstance(axes, dict) or not axes:
        raise ConfigError("sweep scenario needs a non-empty [sweep.axes] table")
    out = []
    for name, values in axes.items():
        if name not in AXIS_NAMES:
            raise ConfigError(f"unknown sweep axis 'sweep.axes.{name}'; expected one of {AXIS_NAMES}")
        if not isinstance(values, list) or not values:
            raise ConfigError(f"'sweep.axes.{name}' must be a non-empty list")
        for v in values:
            if isinstance(v, bool) or not isinstance(v, numbers.Real):
                raise ConfigError(f"'sweep.axes.{name}' values must be numbers")
        out.append((name, tuple(values)))
    return tuple(out)


def parse_config(raw: dict) -> RunConfig:
    scenario = raw.get("scenario")
    if scenario is None:
        raise ConfigError("missing required key 'scenario'")
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; expected one of {SCENARIOS}")
    if "params" not in raw:
        raise ConfigError("missing required table [params]")
    params, resonance = _parse_params(_section(raw, "params"))
    propagation = _parse_propagation(_section(raw, "propagation"))
    model = _parse_model(_section(raw, "model"))
    output = _section(raw, "output")

    sweep_base, axes = None, ()
    if scenario == SWEEP:
        sweep_section = _section(raw, "sweep")
        sweep_base = sweep_section.get("base")
        if sweep_base not in SIMULATION_SCENARIOS:
            raise ConfigError(f"'sweep.base' must be one of {SIMULATION_SCENARIOS}")
        axes = _parse_axes(sweep_section)
    elif "sweep" in raw:
        raise ConfigError("[sweep] is only allowed with scenario = \"sweep\"")

    fmt = output.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError(f"'output.format' must be one of {FORMATS}")
    directory = output.get("directory", "lsiib-out")
    if not isinstance(directory, str) or not directory:
        raise ConfigError("'output.directory' must be a non-empty string")

    cfg = RunConfig(
        scenario=scenario,
        params=params,
        propagation=propagation,
        model=model,
        resonance=resonance,
        sweep_base=sweep_base,
        sweep_axes=axes,
        output_dir=directory,
        output_format=fmt,
    )
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    base = cfg.simulation_scenario
    n = cfg.params.n_atoms
    needs_ensemble = base in (COLLECTIVE_SIX, FULL_ENSEMBLE) or (
        base == EFFECTIVE_THREE and cfg.model.form == "collective"
    )
    sizes = [n]
    for name, values in cfg.sweep_axes:
        if name == "n_atoms":
            sizes = list(values)
    for size in sizes:
        if needs_ensemble and size < 3:
            raise ConfigError(f"scenario {base} needs params.n_atoms >= 3, got {size}")
        if base == FULL_ENSEMBLE and size > DEFAULT_ATOM_CAP:
            raise ConfigError(
                f"params.n_atoms={size} exceeds the oracle cap of {DEFAULT_ATOM_CAP}"
            )


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    try:
        raw = tomllib.loads(text.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from None
    return parse_config(raw)
