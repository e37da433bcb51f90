"""Explicit finite-volume march of the viscous density equation.

Each step solves the elliptic reconstruction at the current density, then
applies a conservative upwind update with central artificial diffusion,

    rho_i' = rho_i - dt/dx (Phi_{i+1/2} - Phi_{i-1/2})
                   + eps dt/dx^2 (rho_{i+1} - 2 rho_i + rho_{i-1}),

with Dirichlet ghosts ``rho_left(t)``/``rho_right(t)`` at both ends.
Face velocities come straight from the face values of the running integral
of ``F``, so the discrete divergence of each cell equals ``F_i`` and the
update keeps ``gamma* <= rho <= gamma`` under the step restriction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from troughflow import kernels
from troughflow.elliptic import EllipticSolution, solve_elliptic
from troughflow.model import (
    AdmissibilityReport, ModelError, PlantParams, Scenario, heat_balance,
    validate_admissibility,
)
from troughflow.roots import RootFindingError

_GUARD = 1e-12


class SolverError(RuntimeError):
    """Run aborted; ``trajectory`` keeps every frame stored before the failure."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class VacuumError(SolverError):
    pass


class EllipticFailure(SolverError):
    pass


class InadmissibleScenario(ModelError):
    def __init__(self, report: AdmissibilityReport):
        super().__init__("scenario violates the admissibility bounds:\n" + report.summary())
        self.report = report


@dataclass(frozen=True)
class SolverConfig:
    epsilon: Optional[float] = None     # None: eps = dx
    cfl: float = 0.4
    t_end: float = 1.0
    tol_elliptic: float = 1e-12
    output_stride: int = 100
    rho_floor: Optional[float] = None   # None: gamma*/10
    output_times: tuple[float, ...] = ()
    allow_inadmissible: bool = False

    def __post_init__(self):
        if self.epsilon is not None and not self.epsilon >= 0:
            raise ModelError(f"epsilon must be >= 0, got {self.epsilon!r}")
        if not 0 < self.cfl < 1:
            raise ModelError(f"cfl must lie in (0, 1), got {self.cfl!r}")
        if not self.t_end >= 0:
            raise ModelError(f"t_end must be >= 0, got {self.t_end!r}")
        if not self.tol_elliptic > 0:
            raise ModelError("tol_elliptic must be positive")
        if int(self.output_stride) != self.output_stride or self.output_stride < 1:
            raise ModelError("output_stride must be a positive integer")
        object.__setattr__(self, "output_times", tuple(sorted(float(t) for t in self.output_times)))

    def viscosity(self, dx: float) -> float:
        return dx if self.epsilon is None else float(self.epsilon)

    def floor(self, params: PlantParams) -> float:
        return params.gamma_star / 10 if self.rho_floor is None else float(self.rho_floor)


@dataclass(frozen=True)
class TransientState:
    t: float
    rho: np.ndarray
    elliptic: EllipticSolution
    step_count: int
    rho_left: float      # boundary traces at time t
    rho_right: float
    epsilon: float

    @property
    def dx(self) -> float:
        return 1.0 / len(self.rho)

    @property
    def u(self) -> np.ndarray:
        return self.elliptic.u

    @property
    def p(self) -> np.ndarray:
        return self.elliptic.p


@dataclass
class Trajectory:
    frames: list[TransientState] = field(default_factory=list)
    diagnostics: list = field(default_factory=list)

    @property
    def times(self) -> np.ndarray:
        return np.array([fr.t for fr in self.frames])

    @property
    def final(self) -> TransientState:
        return self.frames[-1]

    def frame_at(self, t: float, atol: float = 1e-9) -> TransientState:
        for fr in self.frames:
            if abs(fr.t - t) <= atol:
                return fr
        raise KeyError(f"no stored frame at t={t}")


def make_state(t, rho, scenario: Scenario, params: PlantParams, config: SolverConfig,
               step_count=0) -> TransientState:
    """Bundle ``rho`` with its elliptic reconstruction at time ``t``."""
    rho = np.ascontiguousarray(rho, dtype=float)
    f = scenario.f(t, params)
    ell = solve_elliptic(rho, f, scenario.p_left(t), scenario.p_right(t), params,
                         config.tol_elliptic)
    return TransientState(
        t=float(t), rho=rho, elliptic=ell, step_count=step_count,
        rho_left=float(scenario.rho_left(t)), rho_right=float(scenario.rho_right(t)),
        epsilon=config.viscosity(1.0 / len(rho)),
    )


def source_stiffness(f_min, f_max, params: PlantParams, samples=65) -> float:
    """Bound on ``|d(rho*F)/d rho|`` over ``[gamma*, gamma]`` for ``f`` in ``[f_min, f_max]``."""
    r = np.linspace(params.gamma_star, params.gamma, samples)
    y = params.gamma - r
    dN = params.beta1 + 4 * params.beta2 * y**3
    N = np.maximum(np.abs(heat_balance(f_min, r, params)), np.abs(heat_balance(f_max, r, params)))
    # pad for the sampling of a smooth function
    return 1.1 * float(np.max(dN / r + N / r**2))


def stable_timestep(state: TransientState, config: SolverConfig, source_rate=0.0) -> float:
    """``cfl * min(dx/max|u|, dx^2/(2 eps), 1/source_rate)``, capped at ``t_end``."""
    dx = state.dx
    u_max = float(np.max(np.abs(state.elliptic.u_face)))
    eps = state.epsilon
    dt = config.cfl * min(dx / max(u_max, _GUARD), dx * dx / max(2 * eps, _GUARD))
    if source_rate > 0:
        dt = min(dt, config.cfl / source_rate)
    remaining = config.t_end - state.t
    if remaining > 0:
        dt = min(dt, remaining)
    return dt


def advance_density(state: TransientState, dt: float, scenario: Scenario,
                    params: PlantParams, config: SolverConfig) -> np.ndarray:
    """Density at ``t + dt`` from the conservative upwind update."""
    dx = state.dx
    out = np.empty_like(state.rho)
    kernels.upwind_step(state.rho, state.elliptic.u_face, state.rho_left, state.rho_right,
                        dt / dx, state.epsilon * dt / dx**2, out)
    floor = config.floor(params)
    if not np.all(out >= floor):
        bad = int(np.argmin(out))
        raise VacuumError(
            f"vacuum guard tripped at t={state.t + dt:.6g}, x={(bad + 0.5) * dx:.6g}: "
            f"rho={out[bad]:.6g} < {floor:.6g}"
        )
    return out


def boundary_mass_rate(state: TransientState) -> float:
    """``d/dt (dx * sum rho)`` implied by the boundary fluxes of the scheme."""
    rho, u_face, dx, eps = state.rho, state.elliptic.u_face, state.dx, state.epsilon
    flux_in = u_face[0] * (state.rho_left if u_face[0] > 0 else rho[0])
    flux_out = u_face[-1] * (rho[-1] if u_face[-1] > 0 else state.rho_right)
    diff = eps * ((state.rho_right - rho[-1]) - (rho[0] - state.rho_left)) / dx
    return flux_in - flux_out + diff


def run_transient(scenario: Scenario, params: PlantParams, config: SolverConfig,
                  on_step: Callable | None = None) -> Trajectory:
    """March from ``t = 0`` to ``config.t_end``.

    Frames are stored every ``output_stride`` steps, at each of
    ``config.output_times`` (hit exactly) and at ``t_end``.  ``on_step`` is
    called as ``on_step(prev, next, dt)`` after every step.
    """
    from troughflow.diagnostics import EntropyCheckConfig, compute_monitors, entropy_residual

    if not config.allow_inadmissible:
        report = validate_admissibility(scenario, params)
        if not report.passed:
            raise InadmissibleScenario(report)

    traj = Trajectory()
    grid = scenario.grid
    dx = grid.dx
    eps = config.viscosity(dx)
    entropy_cfg = EntropyCheckConfig.default(params, dx, epsilon=eps)

    def store(state, prev=None, dt=None):
        rep = compute_monitors(state, grid)
        if prev is not None:
            rep.entropy_residual_max = entropy_residual(prev, state, dt, entropy_cfg, params)
        traj.frames.append(state)
        traj.diagnostics.append(rep)

    try:
        state = make_state(0.0, scenario.initial_density(), scenario, params, config)
    except RootFindingError as exc:
        raise EllipticFailure(f"elliptic solve failed at t=0: {exc}", traj) from exc
    store(state)

    targets = [t for t in config.output_times if 0 < t < config.t_end] + [config.t_end]
    steady = scenario.is_steady
    rate = None
    while state.t < config.t_end:
        if rate is None or not steady:
            f_now = scenario.f(state.t, params)
            rate = source_stiffness(float(np.min(f_now)), float(np.max(f_now)), params)
        next_target = next(t for t in targets if t > state.t)
        dt = stable_timestep(state, config, rate)
        hit = dt >= next_target - state.t - 1e-12 * max(1.0, next_target)
        if hit:
            dt = next_target - state.t
        try:
            rho_new = advance_density(state, dt, scenario, params, config)
        except VacuumError as exc:
            exc.trajectory = traj
            raise
        t_new = next_target if hit else state.t + dt
        try:
            new = make_state(t_new, rho_new, scenario, params, config, state.step_count + 1)
        except RootFindingError as exc:
            raise EllipticFailure(f"elliptic solve failed at t={t_new:.6g}: {exc}", traj) from exc
        if on_step is not None:
            on_step(state, new, dt)
        if hit or new.step_count % config.output_stride == 0:
            store(new, state, dt)
        state = new
    return traj
