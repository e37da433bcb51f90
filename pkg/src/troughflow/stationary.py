"""Stationary profile of the pipe model.

With constant mass flux ``j = rho*u`` the stationary system reduces to

    j drho/dx = -(f_inf - beta1 (gamma-rho) - beta2 (gamma-rho)^4)
    dp/dx     = -alpha j|j| / rho

The density ODE is marched from the inflow end (left for ``j > 0``, right for
``j < 0``); the flux is fixed by matching the end-to-end pressure drop

    Psi(j) = -alpha j|j| int_0^1 dx / rho_j(x) = p_right - p_left,

which is strictly decreasing in ``j``.  For ``p_right = p_left`` the flux
vanishes and the density solves the pointwise quartic
``beta2 y^4 + beta1 y = f_inf`` with ``y = gamma - rho``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from troughflow import kernels
from troughflow.elliptic import half_cell_cumulative
from troughflow.model import (
    Grid, ModelError, PlantParams, Scenario, SeparableSource, compose_f, heat_balance,
)
from troughflow.roots import bisect_increasing, bisect_secant


class StationaryError(RuntimeError):
    pass


class BracketExpansionError(StationaryError):
    pass


class StationaryVacuumError(StationaryError):
    def __init__(self, message, x):
        super().__init__(message)
        self.x = x


@dataclass(frozen=True)
class _ScenarioLimit:
    """``f_inf(x)`` built from the large-time limits of a scenario's data."""

    scenario: Scenario
    params: PlantParams

    def __call__(self, x):
        sc = self.scenario
        q = sc.q.limit(x) if isinstance(sc.q, SeparableSource) else sc.q(1e300, x)
        return compose_f(q, sc.T_out.limit, sc.T_sky.limit, self.params)


@dataclass(frozen=True)
class StationaryProblem:
    """Stationary data.  ``f_inf`` is a map of ``x`` or an array of cell values
    (linearly interpolated between cell centres)."""

    f_inf: Callable | np.ndarray
    rho_l_inf: float
    rho_r_inf: float
    p_l_inf: float
    p_r_inf: float
    params: PlantParams

    @classmethod
    def from_scenario(cls, scenario: Scenario, params: PlantParams) -> "StationaryProblem":
        return cls(
            f_inf=_ScenarioLimit(scenario, params),
            rho_l_inf=scenario.rho_left.limit,
            rho_r_inf=scenario.rho_right.limit,
            p_l_inf=scenario.p_left.limit,
            p_r_inf=scenario.p_right.limit,
            params=params,
        )

    def f_at(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if callable(self.f_inf):
            return np.broadcast_to(np.asarray(self.f_inf(x), dtype=float), x.shape).astype(float)
        cells = np.asarray(self.f_inf, dtype=float)
        centers = (np.arange(len(cells)) + 0.5) / len(cells)
        return np.interp(x, centers, cells)

    @property
    def pressure_difference(self) -> float:
        return self.p_r_inf - self.p_l_inf


@dataclass
class ZeroFluxProfile:
    rho: np.ndarray
    compatible: bool
    left_mismatch: float
    right_mismatch: float
    quartic_residual: float


@dataclass
class StationaryProfile:
    j: float
    x: np.ndarray
    rho: np.ndarray
    u: np.ndarray
    p: np.ndarray
    T: np.ndarray
    p_diff_achieved: float
    ode_residual: float
    rho_left: float     # traces at x = 0 and x = 1
    rho_right: float
    p_face: np.ndarray
    compatible: bool = True


# --- zero flux ----------------------------------------------------------------

def quartic_root(f, params: PlantParams):
    """Non-negative root ``y`` of ``beta2 y^4 + beta1 y = f`` (elementwise)."""
    f = np.asarray(f, dtype=float)
    if np.any(f < 0):
        raise ModelError("quartic closure needs f >= 0")
    b1, b2 = params.beta1, params.beta2

    def lhs(y):
        return b2 * y**4 + b1 * y

    hi = np.full(f.shape, params.gamma)
    short = lhs(hi) < f
    if np.any(short):
        # beyond gamma the root still exists; y <= f/beta1 bounds it
        hi = np.where(short, np.maximum(hi, f / b1), hi)
    return bisect_increasing(lhs, f, 0.0, hi)


def solve_zero_flux_profile(problem: StationaryProblem, tol: float = 1e-12,
                            grid: Grid | None = None) -> ZeroFluxProfile:
    """Pointwise quartic profile for ``j = 0`` and its boundary compatibility."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    params = problem.params
    if grid is None:
        if callable(problem.f_inf):
            raise ValueError("a grid is needed when f_inf is a function")
        grid = Grid(len(problem.f_inf))
    f = problem.f_at(grid.centers)
    y = quartic_root(f, params)
    rho = params.gamma - y
    # boundary values of the same closure at x = 0 and x = 1
    y_ends = quartic_root(problem.f_at(np.array([0.0, 1.0])), params)
    left = abs(params.gamma - y_ends[0] - problem.rho_l_inf)
    right = abs(params.gamma - y_ends[1] - problem.rho_r_inf)
    resid = float(np.max(np.abs(params.beta2 * y**4 + params.beta1 * y - f)))
    return ZeroFluxProfile(rho=rho, compatible=bool(left <= tol and right <= tol),
                           left_mismatch=float(left), right_mismatch=float(right),
                           quartic_residual=resid)


# --- flux != 0 ------------------------------------------------------------------

@dataclass
class _March:
    j: float
    s_nodes: np.ndarray     # marching coordinate, s = x (j>0) or 1-x (j<0)
    rho_nodes: np.ndarray
    substeps: int           # steps per cell


def _substeps(j, problem: StationaryProblem, dx, base):
    p = problem.params
    y_max = max(p.gamma, p.gamma - p.gamma_star)
    lipschitz = p.beta1 + 4 * p.beta2 * y_max**3
    need = math.ceil(dx * lipschitz / (2.5 * abs(j)))
    m = max(base, need)
    return m + (m % 2)


def _march(j, problem: StationaryProblem, grid: Grid, substeps=4, bound_tol=1e-9) -> _March:
    if j == 0:
        raise ValueError("the density ODE needs j != 0")
    params = problem.params
    n = grid.n_cells
    m = _substeps(j, problem, grid.dx, substeps)
    h = grid.dx / m
    n_steps = n * m
    s_half = np.arange(2 * n_steps + 1) * (0.5 * h)
    if j > 0:
        f_nodes = problem.f_at(s_half)
        start = problem.rho_l_inf
    else:
        f_nodes = problem.f_at(1.0 - s_half)
        start = problem.rho_r_inf
    lo = params.gamma_star - bound_tol
    hi = params.gamma + bound_tol
    rho_nodes, bad = kernels.rk4_march(abs(j), float(start), np.ascontiguousarray(f_nodes),
                                       h, params.beta1, params.beta2, params.gamma, lo, hi)
    if bad >= 0:
        s_bad = bad * h
        x_bad = s_bad if j > 0 else 1.0 - s_bad
        raise StationaryVacuumError(
            f"density left [{params.gamma_star}, {params.gamma}] at x={x_bad:.6g} "
            f"(rho={rho_nodes[bad]:.6g}, j={j:.6g})", x_bad)
    return _March(j=j, s_nodes=np.arange(n_steps + 1) * h, rho_nodes=np.asarray(rho_nodes),
                  substeps=m)


def _cell_values(march: _March, n):
    m = march.substeps
    idx = m * np.arange(n) + m // 2
    vals = march.rho_nodes[idx]
    return vals if march.j > 0 else vals[::-1].copy()


def integrate_density_ode(j, problem: StationaryProblem, grid: Grid, substeps=4) -> np.ndarray:
    """Density at cell centres from a fixed-step RK4 march from the inflow end."""
    return _cell_values(_march(j, problem, grid, substeps), grid.n_cells)


def pressure_drop_of_flux(j, rho, params: PlantParams) -> float:
    """``-alpha j|j| int_0^1 dx/rho``."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise ModelError("vacuum: density must be positive")
    return float(-params.alpha * j * abs(j) * np.sum(1.0 / rho) / len(rho))


def pressure_drop_function(problem: StationaryProblem, grid: Grid, substeps=4):
    """``Psi(j)``: pressure drop produced by flux ``j`` (``Psi(0) = 0``)."""
    def psi(j):
        if j == 0:
            return 0.0
        rho = integrate_density_ode(j, problem, grid, substeps)
        return pressure_drop_of_flux(j, rho, problem.params)
    return psi


def flux_bracket(problem: StationaryProblem, grid: Grid, tol, substeps=4, max_doublings=60):
    """``(lo, hi)`` magnitudes of ``j`` straddling the target pressure drop.

    Starts at ``max(tol, |dp|/alpha)`` and doubles until ``|Psi|`` exceeds
    ``|dp|``.  Returns the bracket and the ``|Psi|`` values at its ends.
    """
    dp = problem.pressure_difference
    sign = -1.0 if dp > 0 else 1.0
    psi = pressure_drop_function(problem, grid, substeps)
    target = abs(dp)
    lo, g_lo = 0.0, 0.0
    hi = max(tol, target / problem.params.alpha)
    g_hi = abs(psi(sign * hi))
    for _ in range(max_doublings):
        if g_hi >= target:
            return sign, (lo, hi), (g_lo, g_hi)
        lo, g_lo = hi, g_hi
        hi *= 2.0
        g_hi = abs(psi(sign * hi))
    if g_hi >= target:
        return sign, (lo, hi), (g_lo, g_hi)
    raise BracketExpansionError(
        f"|Psi| reached only {g_hi:.6g} < |dp| = {target:.6g} after {max_doublings} doublings"
    )


def solve_flux(problem: StationaryProblem, grid: Grid, tol=1e-12, substeps=4):
    """Flux ``j`` with ``|Psi(j) - dp| <= tol`` and its cell densities."""
    dp = problem.pressure_difference
    if abs(dp) <= tol:
        zero = solve_zero_flux_profile(problem, tol, grid)
        return 0.0, zero.rho
    sign, (lo, hi), (g_lo, g_hi) = flux_bracket(problem, grid, tol, substeps)
    psi = pressure_drop_function(problem, grid, substeps)
    target = abs(dp)

    def excess(mag):
        return (abs(psi(sign * mag)) if mag > 0 else 0.0) - target

    res = bisect_secant(excess, lo, hi, tol, flo=g_lo - target, fhi=g_hi - target,
                        switch_width=1e-3 * hi)
    j = sign * res.root
    return j, integrate_density_ode(j, problem, grid, substeps)


def _ode_residual(march: _March, problem: StationaryProblem, n):
    """``max |j drho/dx + N(rho)|`` at cell centres, 4th-order differences."""
    m = march.substeps
    h = march.s_nodes[1] - march.s_nodes[0]
    r = march.rho_nodes
    k = m * np.arange(n) + m // 2
    d_ds = (-r[k + 2] + 8 * r[k + 1] - 8 * r[k - 1] + r[k - 2]) / (12 * h)
    s = march.s_nodes[k]
    x = s if march.j > 0 else 1.0 - s
    N = heat_balance(problem.f_at(x), r[k], problem.params)
    return float(np.max(np.abs(abs(march.j) * d_ds + N)))


def solve_stationary(problem: StationaryProblem, grid: Grid, tol=1e-12, substeps=4) -> StationaryProfile:
    """Full stationary profile: flux, density, velocity, pressure, temperature."""
    params = problem.params
    n = grid.n_cells
    j, rho = solve_flux(problem, grid, tol, substeps)
    compatible = True
    if j == 0:
        zero = solve_zero_flux_profile(problem, tol, grid)
        compatible = zero.compatible
        ode_res = zero.quartic_residual
        rho_left = rho_right = float("nan")
        y_ends = quartic_root(problem.f_at(np.array([0.0, 1.0])), params)
        rho_left, rho_right = params.gamma - y_ends
        u = np.zeros(n)
        dpdx = np.zeros(n)
    else:
        march = _march(j, problem, grid, substeps)
        rho = _cell_values(march, n)
        ode_res = _ode_residual(march, problem, n)
        ends = march.rho_nodes[[0, -1]]
        rho_left, rho_right = (ends[0], ends[1]) if j > 0 else (ends[1], ends[0])
        u = j / rho
        dpdx = -params.alpha * j * abs(j) / rho
    p_rel, p_rel_face = half_cell_cumulative(dpdx, grid.dx)
    p = problem.p_l_inf + p_rel
    p_face = problem.p_l_inf + p_rel_face
    p_diff = float(p_rel_face[-1])
    slack = 2 * tol + 1e-13 * max(1.0, abs(problem.p_l_inf), abs(problem.p_r_inf))
    if abs(p_face[-1] - problem.p_r_inf) > slack:
        raise StationaryError(
            f"pressure mismatch at x=1: {p_face[-1]:.17g} vs {problem.p_r_inf:.17g}")
    return StationaryProfile(
        j=float(j), x=grid.centers, rho=rho, u=u, p=p, T=params.gamma - rho,
        p_diff_achieved=p_diff, ode_residual=ode_res, rho_left=float(rho_left),
        rho_right=float(rho_right), p_face=p_face, compatible=compatible,
    )
