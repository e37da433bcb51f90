"""Velocity/pressure reconstruction from a density snapshot.

At fixed time the velocity is ``u = K - a`` with ``K(x)`` the running
integral of ``F`` and ``a`` the scalar offset fixed by the pressure drop:

    p_right - p_left = alpha * int_0^1 rho * G(a - K) dy

The right-hand side is strictly increasing in ``a``, so the offset is found by
bracketing (on the scale of ``g = G^{-1}``, so that small flows are resolved).  Pressure follows as ``p(x) = p_left + alpha * int_0^x rho*G(a-K)``.

Quadrature is the composite trapezoid on cell centres closed by boundary
half-cells.  On a uniform grid it reduces to: face values by cell sums, centre
values by adding half of the own cell.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from troughflow import kernels
from troughflow.model import PlantParams, eval_F, friction_inverse_g, friction_law_G
from troughflow.roots import bisect_secant


@dataclass
class EllipticSolution:
    a: float
    u: np.ndarray          # cell centres; u = K - a
    p: np.ndarray          # cell centres
    K: np.ndarray          # cell centres
    F: np.ndarray          # cell values of the velocity divergence
    u_face: np.ndarray     # n+1 faces, u_face[0] = -a
    p_face: np.ndarray     # n+1 faces, p_face[0] = p_left
    residual_momentum: float
    residual_velocity: float
    residual_bc: float

    @property
    def K_face(self) -> np.ndarray:
        return self.u_face + self.a


def half_cell_cumulative(values: np.ndarray, dx: float) -> tuple[np.ndarray, np.ndarray]:
    """Running integral of cell data from x=0: (centre values, face values)."""
    face = np.empty(len(values) + 1)
    face[0] = 0.0
    np.cumsum(values * dx, out=face[1:])
    return face[:-1] + 0.5 * dx * values, face


def cumulative_source(rho, f, params: PlantParams, dx: float | None = None):
    """``K(x) = int_0^x F(z, rho(z)) dz`` at the cell centres."""
    rho = np.asarray(rho, dtype=float)
    dx = 1.0 / len(rho) if dx is None else dx
    F = eval_F(np.asarray(f, dtype=float), rho, params)
    K, _ = half_cell_cumulative(np.broadcast_to(F, rho.shape), dx)
    return K


def offset_bracket(rho, K, p_left, p_right, params: PlantParams):
    """Interval guaranteed to contain the velocity offset.

    Uses ``m = -a`` with ``min g(dp/(alpha*r)) - max|K| <= m <= max g(dp/(alpha*r)) + max|K|``
    over ``r`` in the density range (and the barriers gamma*, gamma).
    """
    dp = p_left - p_right
    k_max = float(np.max(np.abs(K))) if len(K) else 0.0
    r_lo = min(params.gamma_star, float(np.min(rho)))
    r_hi = max(params.gamma, float(np.max(rho)))
    cand = (friction_inverse_g(dp / (params.alpha * r_lo)),
            friction_inverse_g(dp / (params.alpha * r_hi)))
    m_lo, m_hi = min(cand) - k_max, max(cand) + k_max
    # slack keeps the endpoints strictly outside the root
    pad = 1e-9 * max(1.0, abs(m_lo), abs(m_hi)) + 1e-12
    return -(m_hi + pad), -(m_lo - pad)


def solve_velocity_offset(rho, K, p_left, p_right, params: PlantParams, tol=1e-12):
    """Root ``a`` of ``alpha*int rho*G(a-K) = p_right - p_left`` to ``|residual| <= tol``."""
    rho = np.ascontiguousarray(rho, dtype=float)
    K = np.ascontiguousarray(K, dtype=float)
    if tol <= 0:
        raise ValueError("tol must be positive")
    dx = 1.0 / len(rho)
    target = p_right - p_left
    alpha = params.alpha
    objective = kernels.offset_objective

    # Solve on the g-scale, where the residual is linear in the velocity even
    # for vanishing pressure drops.  |g(x) - g(t)| <= eps implies
    # |x - t| <= 2 (sqrt|t| + eps) eps, hence the choice of eps.
    g_target = float(friction_inverse_g(target))
    eps = tol / (2.0 * (abs(g_target) + 1.0))

    def residual(a):
        return float(friction_inverse_g(alpha * objective(a, rho, K, dx))) - g_target

    lo, hi = offset_bracket(rho, K, p_left, p_right, params)
    result = bisect_secant(residual, lo, hi, eps)
    return result.root


def reconstruct_fields(rho, a, K, p_left, params: PlantParams, F=None, p_right=None):
    """Velocity and pressure from the offset ``a``; fills the residual monitors."""
    rho = np.asarray(rho, dtype=float)
    n = len(rho)
    dx = 1.0 / n
    K_face = np.empty(n + 1)
    K_face[0] = 0.0
    if F is None:
        # invert the half-cell rule: K_face[i+1] = 2*K[i] - K_face[i]
        for i in range(n):
            K_face[i + 1] = 2.0 * K[i] - K_face[i]
        F = np.diff(K_face) / dx
    else:
        F = np.asarray(F, dtype=float)
        _, K_face = half_cell_cumulative(F, dx)
    u = K - a
    u_face = K_face - a

    h = params.alpha * rho * friction_law_G(a - K)
    p_rel, p_rel_face = half_cell_cumulative(h, dx)
    p = p_left + p_rel
    p_face = p_left + p_rel_face

    if n >= 3:
        du = (u[2:] - u[:-2]) / (2 * dx)
        dp = (p[2:] - p[:-2]) / (2 * dx)
        res_u = float(np.max(np.abs(du - F[1:-1])))
        inner = slice(1, -1)
        res_p = float(np.max(np.abs(dp + params.alpha * rho[inner] * friction_law_G(u[inner]))))
    else:
        res_u = res_p = 0.0
    res_bc = 0.0 if p_right is None else abs(float(p_face[-1]) - p_right)
    return EllipticSolution(
        a=float(a), u=u, p=p, K=K, F=np.asarray(F, dtype=float), u_face=u_face,
        p_face=p_face, residual_momentum=res_p, residual_velocity=res_u,
        residual_bc=res_bc,
    )


def solve_elliptic(rho, f, p_left, p_right, params: PlantParams, tol=1e-12):
    """Full reconstruction at one time level: ``K``, offset, then fields."""
    rho = np.ascontiguousarray(rho, dtype=float)
    dx = 1.0 / len(rho)
    F = eval_F(np.broadcast_to(np.asarray(f, dtype=float), rho.shape), rho, params)
    F = np.asarray(F, dtype=float)
    K, _ = half_cell_cumulative(F, dx)
    a = solve_velocity_offset(rho, K, p_left, p_right, params, tol)
    return reconstruct_fields(rho, a, K, p_left, params, F=F, p_right=p_right)
