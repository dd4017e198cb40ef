"""Command-line front end.

    lsiib run --config run.toml [--out DIR] [--format csv|json] [--threads N]
    lsiib derive --config run.toml

Exit status: 0 on success, 2 for configuration errors, 3 for numerical or
regime errors. Diagnostics go to stderr as a single line.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import json
import platform
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .analysis import blockade_report, sweep
from .collective import truncation_report
from .config import ORACLE_COMPARE, SWEEP, ConfigError, RunConfig, load_config
from .core import LsiibError
from .output import (
    StagedOutput,
    render_trajectory,
    report_json,
    sha256_text,
    table_csv,
    table_json,
)
from .reduction import light_shifts_first_order
from .scenarios import COLLECTIVE_SIX, FULL_ENSEMBLE, derived_quantities, is_collective, simulate

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _params_flat(p) -> dict:
    return {f"params.{k}": v for k, v in p.as_dict().items()}


def _prefixed(prefix: str, d: dict) -> dict:
    return {f"{prefix}{k}": v for k, v in d.items()}


def _ext(fmt: str) -> str:
    return "csv" if fmt == "csv" else "json"


def run_single(cfg: RunConfig, fmt: str) -> dict:
    p = cfg.resolved_params()
    scenario = cfg.scenario
    prop = cfg.propagation.resolve(p, scenario, cfg.model)
    result = simulate(p, scenario, prop, cfg.model)
    collective = is_collective(scenario, cfg.model)
    report = blockade_report(result.trajectory, result.roles, p, collective)
    flat = {"scenario": scenario, **_params_flat(p), "propagation.t_max": prop.t_max,
            "propagation.n_steps": prop.n_steps, "propagation.method": prop.method.value}
    flat.update(report.as_dict())
    flat.update(derived_quantities(p, scenario, cfg.model))
    for key in ("max_symmetric_residual", "max_outside"):
        if key in result.extras:
            flat[key] = result.extras[key]
    return {
        f"trajectory.{_ext(fmt)}": render_trajectory(result.trajectory, fmt),
        "report.json": report_json(flat),
    }


def run_oracle_compare(cfg: RunConfig, fmt: str) -> dict:
    p = cfg.resolved_params()
    prop = cfg.propagation.resolve(p, COLLECTIVE_SIX, cfg.model)
    full = simulate(p, FULL_ENSEMBLE, prop, cfg.model)
    truncated = simulate(p, COLLECTIVE_SIX, prop, cfg.model)
    labels = truncated.trajectory.basis_labels
    diff = np.column_stack(
        [full.trajectory.population(label) - truncated.trajectory.population(label) for label in labels]
    )
    rows = [
        {"t": t, **{f"d_{label}": d[i] for i, label in enumerate(labels)}}
        for t, d in zip(full.trajectory.times, diff)
    ]
    columns = ["t"] + [f"d_{label}" for label in labels]

    flat = {"scenario": ORACLE_COMPARE, **_params_flat(p), "propagation.t_max": prop.t_max,
            "propagation.n_steps": prop.n_steps}
    for i, label in enumerate(labels):
        flat[f"max_abs_diff.{label}"] = float(np.abs(diff[:, i]).max())
    flat["max_symmetric_residual"] = full.extras["max_symmetric_residual"]
    flat["max_outside"] = full.extras["max_outside"]
    flat.update(_prefixed("full.", blockade_report(full.trajectory, full.roles, p, True).as_dict()))
    flat.update(_prefixed("truncated.", blockade_report(truncated.trajectory, truncated.roles, p, True).as_dict()))
    trunc = truncation_report(p)
    for (kept, dropped), value in sorted(trunc.dropped_couplings.items()):
        flat[f"dropped_coupling.{kept}-{dropped}"] = value
    for kept, weight in trunc.unlisted_weight.items():
        flat[f"unlisted_weight.{kept}"] = weight
    flat.update(derived_quantities(p, COLLECTIVE_SIX, cfg.model))
    ext = _ext(fmt)
    return {
        f"trajectory_full.{ext}": render_trajectory(full.trajectory, fmt),
        f"trajectory_truncated.{ext}": render_trajectory(truncated.trajectory, fmt),
        f"comparison.{ext}": table_csv(rows, columns) if fmt == "csv" else table_json(rows, columns),
        "report.json": report_json(flat),
    }


def run_sweep(cfg: RunConfig, fmt: str, threads: Optional[int]) -> dict:
    grid = cfg.sweep_grid()
    base = cfg.sweep_base
    rows_out = sweep(
        grid,
        base,
        propagation_factory=lambda p: cfg.propagation.resolve(p, base, cfg.model),
        model=cfg.model,
        threads=threads,
    )
    param_cols = ["index", "omega1", "omega2", "delta1", "delta2", "delta", "big_delta", "n_atoms"]
    report_cols, derived_cols = [], []
    table = []
    for row in rows_out:
        record = {"index": row.index, **row.params.as_dict(), "error": row.error}
        if row.report is not None:
            rep = row.report.as_dict()
            report_cols += [k for k in rep if k not in report_cols]
            record.update(rep)
        derived_cols += [k for k in row.derived if k not in derived_cols]
        record.update(row.derived)
        table.append(record)
    columns = param_cols + report_cols + derived_cols + ["error"]
    summary = {
        "scenario": SWEEP,
        "sweep.base": base,
        "sweep.axes": ",".join(name for name, _ in cfg.sweep_axes),
        "sweep.points": len(table),
        "sweep.errors": sum(1 for r in table if r["error"]),
    }
    ext = _ext(fmt)
    body = table_csv(table, columns) if fmt == "csv" else table_json(table, columns)
    return {f"sweep.{ext}": body, "report.json": report_json(summary)}


def execute(cfg: RunConfig, fmt: Optional[str] = None, threads: Optional[int] = None) -> dict:
    """Compute every output file of a run; returns ``{file name: text}``."""
    fmt = fmt or cfg.output_format
    if cfg.scenario == SWEEP:
        return run_sweep(cfg, fmt, threads)
    if cfg.scenario == ORACLE_COMPARE:
        return run_oracle_compare(cfg, fmt)
    return run_single(cfg, fmt)


def _manifest(cfg_path: Path, cfg: RunConfig, files: dict) -> str:
    doc = {
        "tool": "lsiib",
        "version": __version__,
        "scenario": cfg.scenario,
        "config": str(cfg_path),
        "config_sha256": hashlib.sha256(cfg_path.read_bytes()).hexdigest(),
        "files": {name: sha256_text(text) for name, text in sorted(files.items())},
        "python": platform.python_version(),
        "numpy": np.__version__,
        "created_utc": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
    }
    return json.dumps(doc, indent=2) + "\n"


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    out_dir = Path(args.out or cfg.output_dir)
    files = execute(cfg, args.format, args.threads)
    staged = StagedOutput(out_dir)
    for name, text in files.items():
        staged.add(name, text)
    staged.add("manifest.json", _manifest(Path(args.config), cfg, files))
    for path in staged.publish():
        print(path)
    return EXIT_OK


def cmd_derive(args) -> int:
    cfg = load_config(args.config)
    p = cfg.resolved_params()
    print(json.dumps(light_shifts_first_order(p).as_dict(), indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lsiib", description="Light-shift-imbalance blockade simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario and write its output files")
    run.add_argument("--config", required=True)
    run.add_argument("--out", help="output directory (overrides output.directory)")
    run.add_argument("--format", choices=("csv", "json"), help="overrides output.format")
    run.add_argument("--threads", type=int, default=None, help="cap on sweep worker threads")
    run.set_defaults(func=cmd_run)

    derive = sub.add_parser("derive", help="print the light-shift set for a config")
    derive.add_argument("--config", required=True)
    derive.set_defaults(func=cmd_derive)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", None) is not None and args.threads < 1:
        parser.error("--threads must be at least 1")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"lsiib: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (LsiibError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"lsiib: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"lsiib: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
