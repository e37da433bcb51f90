"""Plant constants, closure laws, boundary/source data and admissibility checks.

Everything here works in the dimensionless variables of the asymptotic pipe
model: density ``rho``, temperature ``T = gamma - rho``, and the lumped heat
input ``f = q + beta1*T_out + beta2*T_sky**4``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


class ModelError(ValueError):
    """Raised for inputs outside the model's domain of validity."""


@dataclass(frozen=True)
class PlantParams:
    """Dimensionless plant constants.

    ``beta2 = 0`` is accepted here so the closure can be exercised in its
    linear form; :func:`validate_admissibility` flags it.
    """

    alpha: float = 1.0        # wall friction
    beta1: float = 1.0        # convective loss
    beta2: float = 1.0        # radiative loss
    gamma: float = 1.0        # density-temperature offset, T = gamma - rho
    gamma_star: float = 0.2   # lower density barrier

    def __post_init__(self):
        for name in ("alpha", "beta1", "gamma", "gamma_star"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ModelError(f"{name} must be positive, got {value!r}")
        if not np.isfinite(self.beta2) or self.beta2 < 0:
            raise ModelError(f"beta2 must be non-negative, got {self.beta2!r}")
        if self.gamma_star >= self.gamma:
            raise ModelError(
                f"gamma_star ({self.gamma_star}) must be below gamma ({self.gamma})"
            )

    @property
    def source_bound(self) -> float:
        """Largest admissible heat input, beta1*(gamma-gamma*) + beta2*(gamma-gamma*)**4."""
        y = self.gamma - self.gamma_star
        return self.beta1 * y + self.beta2 * y**4


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centred grid on the unit interval."""

    n_cells: int

    def __post_init__(self):
        if int(self.n_cells) != self.n_cells or self.n_cells < 1:
            raise ModelError(f"n_cells must be a positive integer, got {self.n_cells!r}")

    @property
    def dx(self) -> float:
        return 1.0 / self.n_cells

    @property
    def centers(self) -> np.ndarray:
        return (np.arange(self.n_cells) + 0.5) * self.dx

    @property
    def faces(self) -> np.ndarray:
        return np.arange(self.n_cells + 1) * self.dx


@dataclass(frozen=True)
class Table:
    """Piecewise-linear table ``knots -> values``, held constant outside the knots.

    Used both for time series (boundary traces, ambient data) and for spatial
    profiles.  A single knot is a constant.
    """

    knots: tuple[float, ...]
    values: tuple[float, ...]
    _k: np.ndarray = field(init=False, repr=False, compare=False)
    _v: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        knots = tuple(float(k) for k in self.knots)
        values = tuple(float(v) for v in self.values)
        if len(knots) == 0 or len(knots) != len(values):
            raise ModelError("table needs matching, non-empty knots and values")
        if any(b <= a for a, b in zip(knots, knots[1:])):
            raise ModelError(f"table knots must be strictly increasing: {knots}")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_k", np.array(knots))
        object.__setattr__(self, "_v", np.array(values))

    @classmethod
    def constant(cls, value: float) -> "Table":
        return cls((0.0,), (value,))

    @property
    def is_constant(self) -> bool:
        return len(set(self.values)) == 1

    @property
    def limit(self) -> float:
        """Value held beyond the last knot."""
        return self.values[-1]

    def __call__(self, s):
        if len(self.knots) == 1:
            if np.ndim(s) == 0:
                return self.values[0]
            return np.full(np.shape(s), self.values[0])
        out = np.interp(s, self._k, self._v)
        return float(out) if np.ndim(s) == 0 else out


@dataclass(frozen=True)
class SeparableSource:
    """Solar source ``q(t, x) = time(t) * profile(x)``."""

    time: Table
    profile: Table = field(default_factory=lambda: Table.constant(1.0))

    def __call__(self, t: float, x):
        return self.time(t) * np.asarray(self.profile(x), dtype=float)

    @property
    def is_steady(self) -> bool:
        return self.time.is_constant

    def limit(self, x):
        return self.time.limit * np.asarray(self.profile(x), dtype=float)


def _as_table(value) -> Table:
    if isinstance(value, Table):
        return value
    if callable(value):
        return value
    return Table.constant(float(value))


@dataclass(frozen=True)
class Scenario:
    """Source, ambient and boundary data for one pipe on a given grid.

    ``q`` is a map ``(t, x) -> q``; the remaining time-dependent inputs are
    maps of ``t`` and ``rho0`` a map of ``x``.  Plain numbers are promoted to
    constant :class:`Table` objects.
    """

    grid: Grid
    q: Callable
    T_out: Callable = 0.0
    T_sky: Callable = 0.0
    rho_left: Callable = 1.0
    rho_right: Callable = 1.0
    p_left: Callable = 0.0
    p_right: Callable = 0.0
    rho0: Callable = 1.0

    def __post_init__(self):
        q = self.q
        if not callable(q):
            q = SeparableSource(Table.constant(float(q)))
        elif isinstance(q, Table):
            q = SeparableSource(q)
        object.__setattr__(self, "q", q)
        for name in ("T_out", "T_sky", "rho_left", "rho_right", "p_left", "p_right", "rho0"):
            object.__setattr__(self, name, _as_table(getattr(self, name)))

    def f(self, t: float, params: PlantParams, x=None) -> np.ndarray:
        """Lumped heat input ``f(t, x)`` at the cell centres (or at ``x``)."""
        x = self.grid.centers if x is None else x
        return compose_f(self.q(t, x), self.T_out(t), self.T_sky(t), params)

    def initial_density(self) -> np.ndarray:
        return np.asarray(self.rho0(self.grid.centers), dtype=float)

    def time_knots(self) -> np.ndarray:
        """Union of all stored time knots (``[0]`` for purely constant data)."""
        knots = {0.0}
        tables = [self.T_out, self.T_sky, self.rho_left, self.rho_right,
                  self.p_left, self.p_right]
        if isinstance(self.q, SeparableSource):
            tables.append(self.q.time)
        for tab in tables:
            if isinstance(tab, Table):
                knots.update(tab.knots)
        return np.array(sorted(k for k in knots if k >= 0.0))

    @property
    def is_steady(self) -> bool:
        """True when every time-dependent input is a constant table."""
        tables = [self.T_out, self.T_sky, self.rho_left, self.rho_right,
                  self.p_left, self.p_right]
        steady_q = isinstance(self.q, SeparableSource) and self.q.is_steady
        return steady_q and all(isinstance(t, Table) and t.is_constant for t in tables)


# --- closure laws -----------------------------------------------------------

def friction_law_G(xi):
    """``G(xi) = xi*|xi|``."""
    return xi * np.abs(xi)


def friction_inverse_g(xi):
    """``g(xi) = sign(xi)*sqrt(|xi|)``, the inverse of :func:`friction_law_G`."""
    return np.sign(xi) * np.sqrt(np.abs(xi))


def compose_f(q_val, T_out, T_sky, params: PlantParams):
    """Lumped heat input ``q + beta1*T_out + beta2*T_sky**4``."""
    q_val = np.asarray(q_val, dtype=float)
    if np.any(q_val < 0):
        raise ModelError("solar source q must be non-negative")
    out = q_val + params.beta1 * T_out + params.beta2 * np.power(T_sky, 4)
    return float(out) if out.ndim == 0 else out


def heat_balance(f_val, rho, params: PlantParams):
    """Net heating ``f - beta1*(gamma-rho) - beta2*(gamma-rho)**4``."""
    y = params.gamma - rho
    return f_val - params.beta1 * y - params.beta2 * y**4


def eval_F(f_val, rho, params: PlantParams):
    """Velocity divergence ``F = (f - beta1*(gamma-rho) - beta2*(gamma-rho)**4) / rho**2``."""
    rho_arr = np.asarray(rho, dtype=float)
    if np.any(rho_arr <= 0):
        raise ModelError("vacuum: density must be positive to evaluate F")
    out = heat_balance(f_val, rho_arr, params) / rho_arr**2
    return float(out) if np.ndim(out) == 0 else out


def temperature_of_density(rho, params: PlantParams):
    return params.gamma - rho


def density_of_temperature(T, params: PlantParams):
    return params.gamma - T


# --- admissibility ----------------------------------------------------------

@dataclass
class Violation:
    condition: str   # "source", "rho0", "rho_left", "rho_right", "beta2"
    t: float
    x: float
    value: float


@dataclass
class AdmissibilityReport:
    source_ok: bool
    density_ok: bool
    params_ok: bool
    violations: list[Violation]

    @property
    def passed(self) -> bool:
        return self.source_ok and self.density_ok and self.params_ok

    def summary(self) -> str:
        lines = [
            f"source bounds 0 <= f <= beta1(g-g*)+beta2(g-g*)^4: {'pass' if self.source_ok else 'FAIL'}",
            f"density bounds gamma* <= rho0, rho_l, rho_r <= gamma: {'pass' if self.density_ok else 'FAIL'}",
            f"radiative loss beta2 > 0: {'pass' if self.params_ok else 'FAIL'}",
        ]
        for v in self.violations[:20]:
            lines.append(f"  {v.condition} violated at t={v.t:g}, x={v.x:g}: value {v.value:.17g}")
        if len(self.violations) > 20:
            lines.append(f"  ... {len(self.violations) - 20} more")
        return "\n".join(lines)


def validate_admissibility(
    scenario: Scenario,
    params: PlantParams,
    t_samples: Sequence[float] | None = None,
    x_samples: Sequence[float] | None = None,
) -> AdmissibilityReport:
    """Check the source and density bounds at every ``(t, x)`` sample.

    Defaults sample all cell centres at all stored time knots.  Failures are
    returned as data.
    """
    t_samples = scenario.time_knots() if t_samples is None else np.asarray(t_samples, float)
    x_samples = scenario.grid.centers if x_samples is None else np.asarray(x_samples, float)
    if len(t_samples) == 0 or len(x_samples) == 0:
        raise ModelError("sampling sets must be non-empty")

    violations: list[Violation] = []
    upper = params.source_bound
    source_ok = True
    for t in t_samples:
        q = np.asarray(scenario.q(t, x_samples), dtype=float)
        f = q + params.beta1 * scenario.T_out(t) + params.beta2 * scenario.T_sky(t) ** 4
        bad = (f < 0) | (f > upper) | (q < 0)
        if np.any(bad):
            source_ok = False
            violations += [Violation("source", float(t), float(x), float(v))
                           for x, v in zip(x_samples[bad], f[bad])]

    lo, hi = params.gamma_star, params.gamma
    density_ok = True
    rho0 = np.asarray(scenario.rho0(x_samples), dtype=float)
    bad = (rho0 < lo) | (rho0 > hi)
    if np.any(bad):
        density_ok = False
        violations += [Violation("rho0", 0.0, float(x), float(v))
                       for x, v in zip(x_samples[bad], rho0[bad])]
    for name, x_b in (("rho_left", 0.0), ("rho_right", 1.0)):
        trace = getattr(scenario, name)
        for t in t_samples:
            v = float(trace(t))
            if v < lo or v > hi:
                density_ok = False
                violations.append(Violation(name, float(t), x_b, v))

    params_ok = params.beta2 > 0
    if not params_ok:
        violations.append(Violation("beta2", 0.0, float("nan"), params.beta2))
    return AdmissibilityReport(source_ok, density_ok, params_ok, violations)
