"""Runtime monitors: bounds, total variation, pressure-gradient norm, entropy
residual and distance to the stationary profile."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from troughflow.model import Grid, PlantParams


@dataclass
class DiagnosticsReport:
    t: float
    rho_min: float
    rho_max: float
    tv_rho: float
    p_grad_norm: float
    u_max: float
    mass_total: float
    entropy_residual_max: float = float("nan")

    COLUMNS = ("t", "rho_min", "rho_max", "tv_rho", "p_grad_norm", "u_max",
               "mass_total", "entropy_residual_max")

    def as_dict(self) -> dict:
        return asdict(self)


def total_variation(rho, rho_left, rho_right) -> float:
    """Sum of cell-to-cell jumps plus the jumps to both boundary traces."""
    rho = np.asarray(rho, dtype=float)
    return float(np.sum(np.abs(np.diff(rho))) + abs(rho[0] - rho_left) + abs(rho_right - rho[-1]))


def pressure_gradient_norm(p_face, dx) -> float:
    """``(int |p_x|^{3/2} dx)^{2/3}`` with ``p_x`` constant per cell."""
    grad = np.diff(np.asarray(p_face, dtype=float)) / dx
    return float((dx * np.sum(np.abs(grad) ** 1.5)) ** (2.0 / 3.0))


def compute_monitors(state, grid: Grid) -> DiagnosticsReport:
    rho = state.rho
    ell = state.elliptic
    return DiagnosticsReport(
        t=state.t,
        rho_min=float(np.min(rho)),
        rho_max=float(np.max(rho)),
        tv_rho=total_variation(rho, state.rho_left, state.rho_right),
        p_grad_norm=pressure_gradient_norm(ell.p_face, grid.dx),
        u_max=float(max(np.max(np.abs(ell.u)), np.max(np.abs(ell.u_face)))),
        mass_total=float(grid.dx * np.sum(rho)),
    )


@dataclass(frozen=True)
class EntropyCheckConfig:
    constants_c: tuple[float, ...]
    slack: float
    epsilon: float = 0.0

    def __post_init__(self):
        if not all(np.isfinite(self.constants_c)):
            raise ValueError("Kruzhkov constants must be finite")
        if not self.slack > 0:
            raise ValueError("slack must be positive")

    @classmethod
    def default(cls, params: PlantParams, dx: float, dt: float | None = None,
                epsilon: float = 0.0, n_constants: int = 9, coefficient: float = 1.0):
        """Lattice of ``n_constants`` values spanning ``[gamma*, gamma]``;
        slack ``coefficient * (dx + dt)`` (``dt`` defaults to ``dx``)."""
        cs = tuple(np.linspace(params.gamma_star, params.gamma, n_constants).tolist())
        dt = dx if dt is None else dt
        return cls(constants_c=cs, slack=coefficient * (dx + dt), epsilon=epsilon)


def kruzhkov_residuals(prev, nxt, dt, c, epsilon) -> np.ndarray:
    """Cellwise discrete Kruzhkov residual for one constant, interior cells only.

        D_t|rho-c| + D_x(u_face |rho-c|_upwind) + c sgn(rho-c) F - eps D_xx|rho-c|

    Fluxes and ``F`` are taken at the earlier level, as in the explicit
    scheme; the sign at the later one.  With that choice a monotone step
    satisfies the inequality exactly, so positive values beyond round-off
    flag a loss of monotonicity.
    """
    rho = prev.rho
    dx = prev.dx
    u_face = prev.elliptic.u_face
    F = prev.elliptic.F
    ext = np.concatenate(([prev.rho_left], rho, [prev.rho_right]))
    eta = np.abs(ext - c)
    flux = np.where(u_face > 0, u_face * eta[:-1], u_face * eta[1:])
    d_t = (np.abs(nxt.rho - c) - eta[1:-1]) / dt
    d_x = (flux[1:] - flux[:-1]) / dx
    d_xx = (eta[2:] - 2 * eta[1:-1] + eta[:-2]) / dx**2
    res = d_t + d_x + c * np.sign(nxt.rho - c) * F - epsilon * d_xx
    return res[1:-1]


def entropy_residual(prev, nxt, dt, config: EntropyCheckConfig, params: PlantParams) -> float:
    """Largest positive part of the discrete Kruzhkov residual over interior
    cells and the configured constants."""
    worst = 0.0
    for c in config.constants_c:
        res = kruzhkov_residuals(prev, nxt, dt, c, config.epsilon)
        if res.size:
            worst = max(worst, float(np.max(res)))
    return worst


def _norms(d, dx):
    d = np.abs(np.asarray(d, dtype=float))
    return (float(dx * np.sum(d)), float(np.sqrt(dx * np.sum(d * d))), float(np.max(d)))


def distance_to_stationary(state, target) -> dict[str, tuple[float, float, float]]:
    """``(L1, L2, Linf)`` of the differences in ``rho``, ``u`` and ``p``."""
    if len(state.rho) != len(target.rho):
        raise ValueError(
            f"grid mismatch: state has {len(state.rho)} cells, target {len(target.rho)}"
        )
    dx = 1.0 / len(state.rho)
    return {
        "rho": _norms(state.rho - target.rho, dx),
        "u": _norms(state.u - target.u, dx),
        "p": _norms(state.p - target.p, dx),
    }
