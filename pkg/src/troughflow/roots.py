"""Bracketing root finders for monotone scalar equations."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class RootFindingError(RuntimeError):
    pass


class BracketError(RootFindingError):
    """The supplied interval does not contain a sign change."""


class ConvergenceError(RootFindingError):
    """Iteration budget exhausted before the tolerance was met."""


@dataclass
class RootResult:
    root: float
    fval: float
    iterations: int
    bracket: tuple[float, float]


def bisect_secant(func, lo, hi, ftol, *, flo=None, fhi=None, switch_width=1e-3,
                  maxiter=300):
    """Root of ``func`` on ``[lo, hi]`` to ``|func(root)| <= ftol``.

    Bisection until the bracket is narrower than ``switch_width``, then a
    secant step on the two latest iterates, falling back to regula falsi on the
    bracket when the secant leaves it and to bisection when the bracket stops
    halving.  Stops early if the bracket collapses to adjacent floats, in which
    case the better endpoint is returned.
    """
    if not lo < hi:
        raise BracketError(f"empty bracket [{lo}, {hi}]")
    flo = func(lo) if flo is None else flo
    fhi = func(hi) if fhi is None else fhi
    if abs(flo) <= ftol:
        return RootResult(lo, flo, 0, (lo, hi))
    if abs(fhi) <= ftol:
        return RootResult(hi, fhi, 0, (lo, hi))
    if np.sign(flo) == np.sign(fhi):
        raise BracketError(
            f"no sign change on [{lo:.6g}, {hi:.6g}]: f = ({flo:.6g}, {fhi:.6g})"
        )

    x_prev, f_prev = lo, flo
    x_curr, f_curr = hi, fhi
    widths = [hi - lo]
    for it in range(1, maxiter + 1):
        width = hi - lo
        if width > switch_width:
            x = 0.5 * (lo + hi)
        else:
            x = math.nan
            if f_curr != f_prev:
                x = x_curr - f_curr * (x_curr - x_prev) / (f_curr - f_prev)
            if not lo < x < hi:
                x = hi - fhi * (hi - lo) / (fhi - flo)
            # bracket must at least halve every two steps
            stalled = len(widths) >= 3 and width > 0.5 * widths[-3]
            if not lo < x < hi or stalled:
                x = 0.5 * (lo + hi)
        fx = func(x)
        if abs(fx) <= ftol:
            return RootResult(x, fx, it, (lo, hi))
        if np.sign(fx) == np.sign(flo):
            lo, flo = x, fx
        else:
            hi, fhi = x, fx
        x_prev, f_prev, x_curr, f_curr = x_curr, f_curr, x, fx
        widths.append(hi - lo)
        if hi - lo <= 4 * np.finfo(float).eps * max(1.0, abs(lo), abs(hi)):
            best, fbest = (lo, flo) if abs(flo) < abs(fhi) else (hi, fhi)
            return RootResult(best, fbest, it, (lo, hi))
    raise ConvergenceError(
        f"no convergence after {maxiter} iterations; bracket [{lo:.17g}, {hi:.17g}]"
    )


def bisect_increasing(func, target, lo, hi, maxiter=200):
    """Elementwise root of an increasing ``func`` with ``func(y) = target``.

    ``lo``/``hi`` may be scalars or arrays broadcastable against ``target`` and
    must bracket the solution.  Iterates until every interval has collapsed to
    adjacent floats, keeping exact hits.
    """
    target = np.asarray(target, dtype=float)
    lo = np.broadcast_to(np.asarray(lo, dtype=float), target.shape).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), target.shape).copy()
    at_lo = func(lo) == target
    at_hi = func(hi) == target
    hi = np.where(at_lo, lo, hi)
    lo = np.where(at_hi & ~at_lo, hi, lo)
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        val = func(mid)
        below = val < target
        above = val > target
        lo = np.where(below, mid, lo)
        hi = np.where(above, mid, hi)
        exact = ~(below | above)
        lo = np.where(exact, mid, lo)
        hi = np.where(exact, mid, hi)
        if np.all(hi - lo <= 2 * np.spacing(np.maximum(np.abs(lo), np.abs(hi)))):
            break
    mid = 0.5 * (lo + hi)
    return float(mid) if mid.ndim == 0 else mid
