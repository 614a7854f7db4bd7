# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: Mathieu RK4 integration and constituent pair sums.

Signatures mirror ``_kernels_py``; the two are interchangeable.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, exp, fabs

cnp.import_array()


cdef inline double _accel(double a, double q, double tau, double y) nogil:
    return -(a - 2.0 * q * cos(2.0 * tau)) * y


cdef double _max_amp(double a, double q, Py_ssize_t n_steps, double h,
                     double threshold) nogil:
    cdef double y = 1.0, v = 0.0, tau = 0.0, peak = 1.0
    cdef double k1y, k1v, k2y, k2v, k3y, k3v, k4y, k4v, half = 0.5 * h
    cdef Py_ssize_t n
    for n in range(n_steps):
        k1y = v
        k1v = _accel(a, q, tau, y)
        k2y = v + half * k1v
        k2v = _accel(a, q, tau + half, y + half * k1y)
        k3y = v + half * k2v
        k3v = _accel(a, q, tau + half, y + half * k2y)
        k4y = v + h * k3v
        k4v = _accel(a, q, tau + h, y + h * k3y)
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        tau = (n + 1) * h
        if fabs(y) > peak:
            peak = fabs(y)
            if peak >= threshold:
                break
    return peak


def mathieu_max_amplitude(double a, double q, Py_ssize_t n_steps, double h,
                          double threshold):
    """Peak |rho| from rho(0)=1, rho'(0)=0; stops early once ``threshold`` is hit."""
    return _max_amp(a, q, n_steps, h, threshold)


def mathieu_max_amplitude_batch(a, q, Py_ssize_t n_steps, double h, double threshold):
    cdef double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[::1] qv = np.ascontiguousarray(q, dtype=np.float64)
    cdef Py_ssize_t i, n = av.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    with nogil:
        for i in range(n):
            ov[i] = _max_amp(av[i], qv[i], n_steps, h, threshold)
    return out


def mathieu_trajectory(double a, double q, Py_ssize_t n_steps, double h):
    """rho sampled at every step, including the initial value (length n_steps+1)."""
    out = np.empty(n_steps + 1, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double y = 1.0, v = 0.0, tau = 0.0, half = 0.5 * h
    cdef double k1y, k1v, k2y, k2v, k3y, k3v, k4y, k4v
    cdef Py_ssize_t n
    ov[0] = y
    with nogil:
        for n in range(n_steps):
            k1y = v
            k1v = _accel(a, q, tau, y)
            k2y = v + half * k1v
            k2v = _accel(a, q, tau + half, y + half * k1y)
            k3y = v + half * k2v
            k3v = _accel(a, q, tau + half, y + half * k2y)
            k4y = v + h * k3v
            k4v = _accel(a, q, tau + h, y + h * k3y)
            y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
            tau = (n + 1) * h
            ov[n + 1] = y
    return out


def pair_sum(positions, coeffs, double r_c, bint axial):
    """Sum over constituent pairs of c_n c_m exp(-|d|^2/4rc^2) G(d).

    G = 1 - dz^2/(2 rc^2) for axial modes, 1 - (dx^2+dy^2)/(4 rc^2) for radial.
    Uses the n<->m symmetry: diagonal terms once, off-diagonal twice.
    """
    cdef double[:, ::1] p = np.ascontiguousarray(positions, dtype=np.float64)
    cdef double[::1] c = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef Py_ssize_t n = c.shape[0], i, j
    cdef double inv4 = 1.0 / (4.0 * r_c * r_c), inv2 = 1.0 / (2.0 * r_c * r_c)
    cdef double dx, dy, dz, g, diag = 0.0, off = 0.0
    with nogil:
        for i in range(n):
            diag += c[i] * c[i]
            for j in range(i + 1, n):
                dx = p[i, 0] - p[j, 0]
                dy = p[i, 1] - p[j, 1]
                dz = p[i, 2] - p[j, 2]
                if axial:
                    g = 1.0 - dz * dz * inv2
                else:
                    g = 1.0 - (dx * dx + dy * dy) * inv4
                off += c[i] * c[j] * exp(-(dx * dx + dy * dy + dz * dz) * inv4) * g
    return diag + 2.0 * off
