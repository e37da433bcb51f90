"""Reference computations written independently of the package internals.

Each oracle uses a different method from the code it checks: dense scans
with interpolation instead of bracketing, separable quadrature instead of
time stepping, explicit per-cell loops instead of vectorized kernels.
"""
import math

import numpy as np


def bisection(func, lo, hi, iters=200):
    """Plain bisection for a scalar increasing function with a sign change."""
    flo = func(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = func(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


class QuarticScan:
    """Dense table of ``beta2 y^4 + beta1 y`` on ``[0, y_max]`` with 1e7 points;
    roots by ``searchsorted`` and linear interpolation."""

    def __init__(self, beta1, beta2, y_max, points=10_000_000):
        self.y = np.linspace(0.0, y_max, points)
        self.v = beta2 * self.y**4 + beta1 * self.y

    def root(self, f):
        f = np.atleast_1d(np.asarray(f, dtype=float))
        k = np.searchsorted(self.v, f)
        k = np.clip(k, 1, len(self.y) - 1)
        y0, y1 = self.y[k - 1], self.y[k]
        v0, v1 = self.v[k - 1], self.v[k]
        return y0 + (f - v0) * (y1 - y0) / (v1 - v0)


def dense_scan_root(xs, values, target):
    """Root of ``values - target`` from a monotone sampled curve by linear
    interpolation between the straddling samples."""
    d = np.asarray(values) - target
    idx = np.nonzero(np.sign(d[:-1]) != np.sign(d[1:]))[0]
    if len(idx) != 1:
        raise AssertionError(f"expected one sign change, found {len(idx)}")
    k = idx[0]
    return xs[k] - d[k] * (xs[k + 1] - xs[k]) / (d[k + 1] - d[k])


class SeparableDensity:
    """Exact density profiles of ``j rho' = -N(rho)`` for constant ``f`` and ``j > 0``.

    With ``N(r) = f - beta1 (gamma-r) - beta2 (gamma-r)^4`` the equation is
    separable: ``x = j * Phi(rho)``, ``Phi(rho) = int_rho^{rho_l} dr / N(r)``.
    ``Phi`` is tabulated in the variable ``s = log|rho - rho_eq|`` with
    8-point Gauss-Legendre panels, so the logarithmic approach to the
    equilibrium density is resolved.
    """

    def __init__(self, f, rho_l, beta1, beta2, gamma, panels=200_000, depth=1e-15):
        self.N = lambda r: f - beta1 * (gamma - r) - beta2 * (gamma - r) ** 4
        y_eq = bisection(lambda y: beta2 * y**4 + beta1 * y - f, 0.0, max(gamma, f / beta1) + 1)
        self.rho_eq = gamma - y_eq
        gap = rho_l - self.rho_eq
        if gap == 0:
            raise ValueError("boundary density already at equilibrium")
        self.side = math.copysign(1.0, gap)
        s_edges = np.linspace(math.log(abs(gap)), math.log(depth), panels + 1)
        nodes, weights = np.polynomial.legendre.leggauss(8)
        a, b = s_edges[:-1], s_edges[1:]
        half = 0.5 * (b - a)
        s = 0.5 * (a + b)[:, None] + half[:, None] * nodes[None, :]
        r = self.rho_eq + self.side * np.exp(s)
        # dr = side * e^s ds ; Phi grows as rho moves from rho_l towards rho_eq
        integrand = -self.side * np.exp(s) / self.N(r)
        pieces = np.sum(integrand * weights[None, :], axis=1) * half
        self.phi = np.concatenate(([0.0], np.cumsum(pieces)))
        self.s = s_edges

    def rho(self, x_over_j):
        s = np.interp(x_over_j, self.phi, self.s)   # beyond the table: deepest s
        return self.rho_eq + self.side * np.exp(s)

    def pressure_drop(self, j, centers, alpha, chunk=5_000):
        """Discrete ``-alpha j|j| dx sum 1/rho(x_i)`` for an array of ``j > 0``."""
        j = np.asarray(j, dtype=float)
        out = np.empty_like(j)
        dx = 1.0 / len(centers)
        for k in range(0, len(j), chunk):
            jj = j[k:k + chunk]
            rho = self.rho(centers[None, :] / jj[:, None])
            out[k:k + chunk] = -alpha * jj * np.abs(jj) * dx * np.sum(1.0 / rho, axis=1)
        return out


def reference_upwind_step(rho, u_face, rho_left, rho_right, dt, dx, eps):
    """Cell-by-cell loop of the conservative upwind update with central diffusion."""
    n = len(rho)
    ext = [rho_left] + list(rho) + [rho_right]
    out = np.empty(n)
    for i in range(n):
        uL, uR = u_face[i], u_face[i + 1]
        flux_L = uL * (ext[i] if uL > 0 else ext[i + 1])
        flux_R = uR * (ext[i + 1] if uR > 0 else ext[i + 2])
        out[i] = (ext[i + 1] - dt / dx * (flux_R - flux_L)
                  + eps * dt / dx**2 * (ext[i + 2] - 2 * ext[i + 1] + ext[i]))
    return out


def rk4_reference(rhs, y0, x0, x1, steps):
    """Scalar classical RK4 with a plain loop; returns the node values."""
    h = (x1 - x0) / steps
    ys = [y0]
    x, y = x0, y0
    for _ in range(steps):
        k1 = rhs(x, y)
        k2 = rhs(x + h / 2, y + h / 2 * k1)
        k3 = rhs(x + h / 2, y + h / 2 * k2)
        k4 = rhs(x + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        x = x + h
        ys.append(y)
    return np.array(ys)
