"""Pure-Python (numpy) versions of the compiled kernels.

Used when the extension is not built or ``CSLTRAP_PURE_PYTHON`` is set. The
Mathieu integrator vectorises across a batch of (a, q) points instead of
looping per point.
"""
import math

import numpy as np


def _rk4_batch(a, q, n_steps, h, threshold):
    a = np.asarray(a, dtype=float)
    q = np.asarray(q, dtype=float)
    y = np.ones_like(a)
    v = np.zeros_like(a)
    peak = np.ones_like(a)
    live = np.ones(a.shape, dtype=bool)
    half = 0.5 * h
    for n in range(n_steps):
        tau = n * h
        c0 = np.cos(2.0 * tau)
        c1 = np.cos(2.0 * (tau + half))
        c2 = np.cos(2.0 * (tau + h))
        w0 = -(a - 2.0 * q * c0)
        w1 = -(a - 2.0 * q * c1)
        w2 = -(a - 2.0 * q * c2)
        k1y, k1v = v, w0 * y
        k2y, k2v = v + half * k1v, w1 * (y + half * k1y)
        k3y, k3v = v + half * k2v, w1 * (y + half * k2y)
        k4y, k4v = v + h * k3v, w2 * (y + h * k3y)
        y_new = y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        v_new = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        # frozen entries keep the state at which they crossed the threshold
        y = np.where(live, y_new, y)
        v = np.where(live, v_new, v)
        peak = np.where(live, np.maximum(peak, np.abs(y)), peak)
        live &= peak < threshold
        if not live.any():
            break
    return peak


def _rk4_scalar(a, q, n_steps, h, threshold, out=None):
    y, v, peak, half = 1.0, 0.0, 1.0, 0.5 * h
    cos = math.cos
    for n in range(n_steps):
        tau = n * h
        w0 = -(a - 2.0 * q * cos(2.0 * tau))
        w1 = -(a - 2.0 * q * cos(2.0 * tau + h))
        w2 = -(a - 2.0 * q * cos(2.0 * tau + 2.0 * h))
        k1y, k1v = v, w0 * y
        k2y, k2v = v + half * k1v, w1 * (y + half * k1y)
        k3y, k3v = v + half * k2v, w1 * (y + half * k2y)
        k4y, k4v = v + h * k3v, w2 * (y + h * k3y)
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if out is not None:
            out[n + 1] = y
        elif abs(y) > peak:
            peak = abs(y)
            if peak >= threshold:
                break
    return peak


def mathieu_max_amplitude(a, q, n_steps, h, threshold):
    return _rk4_scalar(float(a), float(q), n_steps, h, threshold)


def mathieu_max_amplitude_batch(a, q, n_steps, h, threshold):
    return _rk4_batch(a, q, n_steps, h, threshold)


def mathieu_trajectory(a, q, n_steps, h):
    out = np.empty(n_steps + 1)
    out[0] = 1.0
    _rk4_scalar(float(a), float(q), n_steps, h, math.inf, out)
    return out


def pair_sum(positions, coeffs, r_c, axial):
    p = np.asarray(positions, dtype=float)
    c = np.asarray(coeffs, dtype=float)
    d = p[:, None, :] - p[None, :, :]
    r2 = np.einsum("ijk,ijk->ij", d, d)
    if axial:
        g = 1.0 - d[..., 2] ** 2 / (2.0 * r_c**2)
    else:
        g = 1.0 - (d[..., 0] ** 2 + d[..., 1] ** 2) / (4.0 * r_c**2)
    return float(np.einsum("i,j,ij->", c, c, np.exp(-r2 / (4.0 * r_c**2)) * g))
