"""Heating from a spatially uniform fluctuating electric field, and the
charge/mass scaling diagnostics that separate it from CSL heating.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import HBAR
from .csl import csl_heating_extended, HeatingResult
from .modes import MODE_ORDER, Axis, TwoIonSystem


def _constant(value):
    value = float(value)
    return lambda omega: value + 0.0 * np.asarray(omega, dtype=float)


@dataclass(frozen=True)
class NoiseSpectrum:
    """Field PSD per axis, (V/m)^2 per (rad/s), as functions of angular frequency."""

    s_x: object
    s_y: object
    s_z: object

    @classmethod
    def flat(cls, s_x, s_y=None, s_z=None):
        s_y = s_x if s_y is None else s_y
        s_z = s_x if s_z is None else s_z
        return cls(_constant(s_x), _constant(s_y), _constant(s_z))

    @staticmethod
    def interpolated(omega, values):
        """Linear interpolation in a tabulated PSD; held constant outside the table."""
        omega = np.asarray(omega, dtype=float)
        values = np.asarray(values, dtype=float)
        order = np.argsort(omega)
        omega, values = omega[order], values[order]
        return lambda w: np.interp(w, omega, values)

    def _eval(self, fn, omega):
        value = float(fn(omega))
        if value < 0 or not math.isfinite(value):
            raise ValueError(f"noise PSD must be finite and non-negative, got {value}")
        return value

    def axial(self, omega):
        return self._eval(self.s_z, omega)

    def radial(self, omega):
        return self._eval(self.s_x, omega) + self._eval(self.s_y, omega)

    def scaled(self, factor):
        return NoiseSpectrum(lambda w: factor * self.s_x(w), lambda w: factor * self.s_y(w),
                             lambda w: factor * self.s_z(w))


def electrical_heating(system, spectrum, noise, mode, mode_projected=False):
    """Energy gain of ``mode`` from electric-field noise.

    The default sums q_i q_j / sqrt(m_i m_j) over both ions without eigenvector
    weights. ``mode_projected`` additionally weights each pair by the mode's
    eigenvector components.
    """
    m = spectrum[mode]
    q = (system.ion1.charge, system.ion2.charge)
    masses = (system.ion1.mass, system.ion2.mass)
    s = noise.axial(m.omega) if m.axis is Axis.AXIAL else noise.radial(m.omega)
    total = 0.0
    for i in range(2):
        for j in range(2):
            term = q[i] * q[j] / math.sqrt(masses[i] * masses[j])
            if mode_projected:
                term *= m.eigvec[i] * m.eigvec[j]
            total += term
    power = 0.5 * m.omega * total * s / m.omega
    return HeatingResult(mode, power, power / (HBAR * m.omega))


def _log_slope(fn, h):
    up, down = fn(math.exp(h)), fn(math.exp(-h))
    if up <= 0 or down <= 0:
        return float("nan")
    return (math.log(up) - math.log(down)) / (2.0 * h)


def scaling_exponents(system, equilibrium, spectrum, noise, csl_params, mode,
                      orientation="axial", mode_projected=False, h=1e-3):
    """d ln P / d ln(scale) for charges and masses of both ions.

    Evaluated at formula level: the equilibrium and mode spectrum are held
    fixed while the ions' charges or masses are rescaled.
    """
    def with_scale(mass_f=1.0, charge_f=1.0):
        return TwoIonSystem(system.ion1.scaled(mass_f, charge_f),
                            system.ion2.scaled(mass_f, charge_f), system.trap)

    def p_csl(sys):
        return csl_heating_extended(sys, equilibrium, spectrum, csl_params, mode, orientation).power

    def p_e(sys):
        return electrical_heating(sys, spectrum, noise, mode, mode_projected).power

    return {
        "csl_charge": _log_slope(lambda s: p_csl(with_scale(charge_f=s)), h),
        "csl_mass": _log_slope(lambda s: p_csl(with_scale(mass_f=s)), h),
        "electric_charge": _log_slope(lambda s: p_e(with_scale(charge_f=s)), h),
        "electric_mass": _log_slope(lambda s: p_e(with_scale(mass_f=s)), h),
    }


def discrimination_report(system, equilibrium, spectrum, noise, csl_params,
                          orientation="axial", mode_projected=False):
    """Per-mode CSL vs electrical heating, their ratio and scaling exponents."""
    rows = []
    for mode in MODE_ORDER:
        p_c = csl_heating_extended(system, equilibrium, spectrum, csl_params, mode,
                                   orientation).power
        p_e = electrical_heating(system, spectrum, noise, mode, mode_projected).power
        row = {"mode": mode, "p_csl": p_c, "p_electric": p_e,
               "ratio": p_c / p_e if p_e > 0 else math.inf}
        row.update(scaling_exponents(system, equilibrium, spectrum, noise, csl_params, mode,
                                     orientation, mode_projected))
        rows.append(row)
    return rows
