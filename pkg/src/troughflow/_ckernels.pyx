# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops.  Signatures and results mirror ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


def offset_objective(double a, const double[::1] rho, const double[::1] K, double dx):
    cdef Py_ssize_t i, n = rho.shape[0]
    cdef double s, acc = 0.0
    for i in range(n):
        s = a - K[i]
        acc += rho[i] * s * fabs(s)
    return dx * acc


def upwind_step(const double[::1] rho, const double[::1] u_face, double rho_left,
                double rho_right, double lam, double mu, double[::1] out):
    cdef Py_ssize_t i, n = rho.shape[0]
    cdef double u, flux_l, flux_r, left, right
    # flux through the left boundary face
    u = u_face[0]
    flux_l = u * rho_left if u > 0 else u * rho[0]
    for i in range(n):
        u = u_face[i + 1]
        right = rho[i + 1] if i + 1 < n else rho_right
        flux_r = u * rho[i] if u > 0 else u * right
        left = rho[i - 1] if i > 0 else rho_left
        out[i] = rho[i] - lam * (flux_r - flux_l) + mu * (right - 2.0 * rho[i] + left)
        flux_l = flux_r
    return np.asarray(out)


cdef inline double _rhs(double f, double r, double inv_j, double beta1,
                        double beta2, double gamma) nogil:
    cdef double y = gamma - r
    return -(f - beta1 * y - beta2 * y * y * y * y) * inv_j


def rk4_march(double j, double rho_start, const double[::1] f_nodes, double h,
              double beta1, double beta2, double gamma, double lo, double hi):
    cdef Py_ssize_t k, n_steps = (f_nodes.shape[0] - 1) // 2
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.empty(n_steps + 1)
    cdef double[::1] out = out_arr
    cdef double r = rho_start, inv_j = 1.0 / j
    cdef double k1, k2, k3, k4, f0, fm, f1
    out[0] = r
    if not (lo <= r <= hi):
        return out_arr[:1], 0
    for k in range(n_steps):
        f0 = f_nodes[2 * k]
        fm = f_nodes[2 * k + 1]
        f1 = f_nodes[2 * k + 2]
        k1 = _rhs(f0, r, inv_j, beta1, beta2, gamma)
        k2 = _rhs(fm, r + 0.5 * h * k1, inv_j, beta1, beta2, gamma)
        k3 = _rhs(fm, r + 0.5 * h * k2, inv_j, beta1, beta2, gamma)
        k4 = _rhs(f1, r + h * k3, inv_j, beta1, beta2, gamma)
        r = r + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        out[k + 1] = r
        if not (lo <= r <= hi):
            return out_arr[:k + 2], k + 1
    return out_arr, -1
