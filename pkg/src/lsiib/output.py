"""Deterministic writers for trajectories, reports and sweep tables.

Data files contain no timestamps; floats in delimited/trajectory output use 12
significant digits, report JSON keeps full ``repr`` precision so it re-parses
to identical values.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import shutil
import tempfile
from pathlib import Path

import numpy as np

FLOAT_FORMAT = "{:.12g}"


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT.format(float(value))
    return str(value)


def _round12(x: float) -> float:
    return float(FLOAT_FORMAT.format(float(x)))


def trajectory_csv(traj) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t"] + [f"p_{label}" for label in traj.basis_labels])
    for t, row in zip(traj.times, traj.populations):
        writer.writerow([format_value(t)] + [format_value(x) for x in row])
    return buf.getvalue()


def trajectory_json(traj) -> str:
    doc = {
        "basis_labels": list(traj.basis_labels),
        "times": [_round12(t) for t in traj.times],
        "populations": [[_round12(x) for x in row] for row in traj.populations],
    }
    return json.dumps(doc, separators=(",", ":")) + "\n"


def render_trajectory(traj, fmt: str) -> str:
    return trajectory_csv(traj) if fmt == "csv" else trajectory_json(traj)


def _plain(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def report_json(flat: dict) -> str:
    """Flat key/value JSON document."""
    return json.dumps({k: _plain(v) for k, v in flat.items()}, indent=2, allow_nan=False) + "\n"


def table_csv(rows: list, columns: list) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row.get(c)) for c in columns])
    return buf.getvalue()


def table_json(rows: list, columns: list) -> str:
    doc = [{c: _plain(row.get(c)) for c in columns} for row in rows]
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class StagedOutput:
    """Collect files in a staging directory and publish them all at once.

    On failure nothing is published and the staging directory is removed, so
    the output directory never holds a partial run.
    """

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self.files = {}

    def add(self, name: str, text: str) -> None:
        self.files[name] = text

    def publish(self) -> list:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        staging = Path(tempfile.mkdtemp(prefix=".lsiib-stage-", dir=self.out_dir))
        try:
            for name, text in self.files.items():
                with open(staging / name, "w", encoding="utf-8", newline="") as fh:
                    fh.write(text)
            for name in self.files:
                os.replace(staging / name, self.out_dir / name)
        finally:
            shutil.rmtree(staging, ignore_errors=True)
        return [self.out_dir / name for name in self.files]
