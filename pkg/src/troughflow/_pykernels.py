"""Pure-Python/numpy kernels; reference implementation of ``_ckernels``."""
import numpy as np


def offset_objective(a, rho, K, dx):
    """``dx * sum(rho * G(a - K))``."""
    s = a - K
    return float(dx * np.sum(rho * s * np.abs(s)))


def upwind_step(rho, u_face, rho_left, rho_right, lam, mu, out):
    """One explicit Euler step of the upwind/central-diffusion update.

    ``u_face`` holds the ``n+1`` face velocities; ``lam = dt/dx`` and
    ``mu = eps*dt/dx**2``.  Dirichlet ghosts ``rho_left``/``rho_right`` enter
    both the upwind flux and the diffusion stencil.  Writes into ``out``.
    """
    ext = np.empty(rho.shape[0] + 2)
    ext[0] = rho_left
    ext[1:-1] = rho
    ext[-1] = rho_right
    flux = np.where(u_face > 0, u_face * ext[:-1], u_face * ext[1:])
    out[:] = rho - lam * (flux[1:] - flux[:-1]) + mu * (ext[2:] - 2.0 * rho + ext[:-2])
    return out


def rk4_march(j, rho_start, f_nodes, h, beta1, beta2, gamma, lo, hi):
    """Integrate ``j * drho/ds = -(f - beta1*y - beta2*y**4)``, ``y = gamma - rho``.

    ``f_nodes[k]`` samples ``f`` at ``s = k*h/2``; the march takes
    ``(len(f_nodes)-1)//2`` steps of size ``h``.  Returns the density at every
    step node and the index of the first node outside ``[lo, hi]`` (or -1);
    the march stops there.
    """
    n_steps = (len(f_nodes) - 1) // 2
    out = np.empty(n_steps + 1)
    out[0] = rho_start
    inv_j = 1.0 / j

    def rhs(f, r):
        y = gamma - r
        return -(f - beta1 * y - beta2 * y * y * y * y) * inv_j

    r = rho_start
    if not lo <= r <= hi:
        return out[:1], 0
    for k in range(n_steps):
        f0 = f_nodes[2 * k]
        fm = f_nodes[2 * k + 1]
        f1 = f_nodes[2 * k + 2]
        k1 = rhs(f0, r)
        k2 = rhs(fm, r + 0.5 * h * k1)
        k3 = rhs(fm, r + 0.5 * h * k2)
        k4 = rhs(f1, r + h * k3)
        r = r + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        out[k + 1] = r
        if not lo <= r <= hi:
            return out[: k + 2], k + 1
    return out, -1
