"""Simulation toolkit for the asymptotic thermo-fluid model of a collector pipe."""
from troughflow.config import (
    PlantDataCheck, ConfigError, RunConfig, load_config, parse_config, preset_noor_like,
    serialize_config,
)
from troughflow.diagnostics import (
    DiagnosticsReport, EntropyCheckConfig, compute_monitors, distance_to_stationary,
    entropy_residual,
)
from troughflow.elliptic import EllipticSolution, solve_elliptic
from troughflow.model import (
    Grid, ModelError, PlantParams, Scenario, SeparableSource, Table, compose_f, eval_F,
    friction_inverse_g, friction_law_G, temperature_of_density, validate_admissibility,
)
from troughflow.stationary import (
    StationaryProblem, StationaryProfile, solve_flux, solve_stationary,
    solve_zero_flux_profile,
)
from troughflow.transient import SolverConfig, SolverError, Trajectory, run_transient

__version__ = "0.1.0"
