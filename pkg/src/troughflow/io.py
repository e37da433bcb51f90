"""CSV and key=value output files, with readers for the same formats.

Floats are written with ``repr`` so that reading them back is bit-exact.
"""
from __future__ import annotations

import csv
import os
from pathlib import Path

import numpy as np

from troughflow.diagnostics import DiagnosticsReport
from troughflow.model import PlantParams
from troughflow.stationary import StationaryProfile
from troughflow.transient import Trajectory

TRAJECTORY_FILE = "trajectory.csv"
STATIONARY_FILE = "stationary.csv"
SUMMARY_FILE = "stationary_summary.txt"
DIAGNOSTICS_FILE = "diagnostics.csv"
DISTANCE_FILE = "distance.csv"

TRAJECTORY_COLUMNS = ("t", "x", "rho", "u", "p", "T")
STATIONARY_COLUMNS = ("x", "rho", "u", "p", "T")
DISTANCE_COLUMNS = ("t", "rho_L1", "rho_L2", "rho_Linf", "u_L1", "u_L2", "u_Linf",
                    "p_L1", "p_L2", "p_Linf")


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _write_rows(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def write_trajectory(traj: Trajectory, params: PlantParams, path) -> Path:
    """``trajectory.csv``: one row per cell per stored frame."""
    def rows():
        for fr in traj.frames:
            x = (np.arange(len(fr.rho)) + 0.5) * fr.dx
            T = params.gamma - fr.rho
            for i in range(len(fr.rho)):
                yield fr.t, x[i], fr.rho[i], fr.u[i], fr.p[i], T[i]
    return _write_rows(Path(path) / TRAJECTORY_FILE, TRAJECTORY_COLUMNS, rows())


def write_stationary(profile: StationaryProfile, path) -> tuple[Path, Path]:
    """``stationary.csv`` plus the key=value summary."""
    path = Path(path)
    rows = zip(profile.x, profile.rho, profile.u, profile.p, profile.T)
    csv_path = _write_rows(path / STATIONARY_FILE, STATIONARY_COLUMNS, rows)
    flux_dev = float(np.max(np.abs(profile.rho * profile.u - profile.j))) if len(profile.rho) else 0.0
    summary = {
        "j": profile.j,
        "p_diff_achieved": profile.p_diff_achieved,
        "ode_residual": profile.ode_residual,
        "flux_residual": flux_dev,
        "rho_left": profile.rho_left,
        "rho_right": profile.rho_right,
        "compatible": profile.compatible,
        "n_cells": len(profile.rho),
    }
    sum_path = path / SUMMARY_FILE
    with open(sum_path, "w", encoding="utf-8") as fh:
        for k, v in summary.items():
            fh.write(f"{k}={_fmt(v)}\n")
    return csv_path, sum_path


def write_diagnostics(reports, path) -> Path:
    """``diagnostics.csv``: one row per frame, monitor columns."""
    rows = ([getattr(r, c) for c in DiagnosticsReport.COLUMNS] for r in reports)
    return _write_rows(Path(path) / DIAGNOSTICS_FILE, DiagnosticsReport.COLUMNS, rows)


def write_distances(times, distances, path) -> Path:
    """``distance.csv``: norms of the gap to the stationary profile per frame."""
    rows = ([t] + [v for key in ("rho", "u", "p") for v in d[key]]
            for t, d in zip(times, distances))
    return _write_rows(Path(path) / DISTANCE_FILE, DISTANCE_COLUMNS, rows)


def write_outputs(result, reports, path, params: PlantParams | None = None) -> list[Path]:
    """Write the file set for a transient or stationary result into ``path``.

    A :class:`Trajectory` gives ``trajectory.csv`` (``params`` is needed for
    the temperature column); a :class:`StationaryProfile` gives
    ``stationary.csv`` and its summary.  ``diagnostics.csv`` is written
    whenever ``reports`` is not None.
    """
    path = Path(path)
    os.makedirs(path, exist_ok=True)
    written: list[Path] = []
    if isinstance(result, Trajectory):
        if params is None:
            raise ValueError("params are required to write temperatures")
        written.append(write_trajectory(result, params, path))
    elif isinstance(result, StationaryProfile):
        written.extend(write_stationary(result, path))
    elif result is not None:
        raise TypeError(f"cannot write result of type {type(result).__name__}")
    if reports is not None:
        written.append(write_diagnostics(reports, path))
    return written


# --- readers ----------------------------------------------------------------

def read_csv(path) -> dict[str, np.ndarray]:
    """Columns of a written CSV as float arrays, keyed by header name."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = [[float(v) for v in row] for row in reader]
    arr = np.array(data, dtype=float).reshape(len(data), len(header))
    return {name: arr[:, k] for k, name in enumerate(header)}


def read_summary(path) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                key, _, value = line.partition("=")
                out[key] = value
    return out
