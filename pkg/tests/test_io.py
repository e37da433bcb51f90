from dataclasses import replace

import numpy as np
import pytest

from conftest import generic_scenario
from troughflow.io import (
    DIAGNOSTICS_FILE, STATIONARY_FILE, SUMMARY_FILE, TRAJECTORY_COLUMNS, TRAJECTORY_FILE,
    read_csv, read_summary, write_distances, write_outputs,
)
from troughflow.model import Grid
from troughflow.stationary import StationaryProblem, solve_stationary
from troughflow.transient import SolverConfig, Trajectory, make_state, run_transient


def test_empty_trajectory_writes_header_only(tmp_path, params):
    files = write_outputs(Trajectory(), [], tmp_path, params=params)
    assert [f.name for f in files] == [TRAJECTORY_FILE, DIAGNOSTICS_FILE]
    lines = (tmp_path / TRAJECTORY_FILE).read_text().splitlines()
    assert lines == [",".join(TRAJECTORY_COLUMNS)]
    assert all(len(v) == 0 for v in read_csv(tmp_path / TRAJECTORY_FILE).values())


def test_single_frame_on_four_cells(tmp_path, params):
    scen = generic_scenario(4)
    state = make_state(0.25, scen.initial_density(), scen, params, SolverConfig())
    write_outputs(Trajectory(frames=[state]), None, tmp_path, params=params)
    data = read_csv(tmp_path / TRAJECTORY_FILE)
    assert len(data["t"]) == 4 and np.all(data["t"] == 0.25)
    assert np.array_equal(data["x"], [0.125, 0.375, 0.625, 0.875])
    assert np.array_equal(data["rho"], state.rho)
    assert np.array_equal(data["T"], params.gamma - state.rho)
    assert not (tmp_path / DIAGNOSTICS_FILE).exists()


def test_trajectory_and_diagnostics_round_trip(tmp_path, params):
    traj = run_transient(generic_scenario(10), params, SolverConfig(t_end=0.1, output_stride=3))
    write_outputs(traj, traj.diagnostics, tmp_path, params=params)
    data = read_csv(tmp_path / TRAJECTORY_FILE)
    assert np.array_equal(data["u"], np.concatenate([fr.u for fr in traj.frames]))
    assert np.array_equal(data["p"], np.concatenate([fr.p for fr in traj.frames]))
    diag = read_csv(tmp_path / DIAGNOSTICS_FILE)
    assert np.array_equal(diag["t"], traj.times)
    assert len(diag) == len(traj.diagnostics[0].COLUMNS)


def test_trajectory_needs_params(tmp_path):
    with pytest.raises(ValueError):
        write_outputs(Trajectory(), None, tmp_path)
    with pytest.raises(TypeError):
        write_outputs(object(), None, tmp_path)


def test_stationary_round_trip_is_bit_exact(tmp_path, params):
    prob = StationaryProblem(lambda x: 0.45 + 0.15 * np.sin(2 * np.pi * x), 0.9, 0.9,
                             1.0, 0.0, params)
    prof = solve_stationary(prob, Grid(33))
    write_outputs(prof, None, tmp_path / "nested")
    data = read_csv(tmp_path / "nested" / STATIONARY_FILE)
    for key in ("x", "rho", "u", "p", "T"):
        assert np.array_equal(data[key], getattr(prof, key))
    summary = read_summary(tmp_path / "nested" / SUMMARY_FILE)
    assert float(summary["j"]) == prof.j
    assert float(summary["p_diff_achieved"]) == prof.p_diff_achieved
    assert float(summary["rho_right"]) == prof.rho_right
    assert summary["compatible"] == "true" and summary["n_cells"] == "33"
    assert float(summary["flux_residual"]) <= 1e-12 * abs(prof.j)


def test_distance_file(tmp_path):
    d = {"rho": (1.0, 2.0, 3.0), "u": (4.0, 5.0, 6.0), "p": (7.0, 8.0, 9.0)}
    write_distances([0.0, 0.5], [d, d], tmp_path)
    data = read_csv(tmp_path / "distance.csv")
    assert np.array_equal(data["t"], [0.0, 0.5])
    assert np.array_equal(data["u_L2"], [5.0, 5.0]) and np.array_equal(data["p_Linf"], [9.0, 9.0])
