"""Red-sideband readout of a single motional quantum on the atomic ion."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import ZeroCouplingError
from .modes import lamb_dicke

ETA_WARN = 0.3


@dataclass(frozen=True)
class ReadoutPlan:
    mode: object
    eta: float
    omega0: float
    tau_read: float
    p_signal: float
    p_false: float
    discrimination: float
    feasible: bool


def sideband_prob(eta, omega0, t):
    """Red-sideband excitation probability starting from one motional quantum."""
    if eta > ETA_WARN:
        warnings.warn(f"eta = {eta:.3g} is outside the Lamb-Dicke regime", RuntimeWarning,
                      stacklevel=2)
    return math.sin(0.5 * eta * omega0 * t) ** 2


def carrier_envelope(omega0, omega_mode, strict=False):
    """Peak off-resonant carrier probability at detuning ``omega_mode``.

    ``strict`` returns the prefactor with a square root in the denominator.
    That form is not dimensionless and is only kept for comparison.
    """
    if omega0 == 0:
        return 0.0
    # ratio form avoids underflow of the squares for tiny arguments
    r = abs(omega_mode / omega0)
    if strict:
        return abs(omega0) / math.hypot(1.0, r)
    return 1.0 / (1.0 + r * r) if r < 1e154 else 0.0


def carrier_prob(omega0, omega_mode, t, strict=False):
    """Off-resonant carrier excitation probability in the motional ground state."""
    generalized = math.hypot(omega0, omega_mode)
    return carrier_envelope(omega0, omega_mode, strict) * math.sin(0.5 * generalized * t) ** 2


def plan_readout(spectrum, mode, wavelength, m1, omega0, min_discrimination=100.0,
                 strict=False):
    """Pi-pulse readout on ``mode`` and its false-positive margin.

    The false-positive probability is the carrier envelope, an upper bound
    over all pulse lengths, since the carrier phase at the end of the pulse is
    not controlled.
    """
    eta = lamb_dicke(spectrum, mode, wavelength, m1)
    if eta == 0:
        raise ZeroCouplingError(f"{mode.value}: ion 1 does not move in this mode")
    tau = math.pi / (eta * omega0)
    p_signal = sideband_prob(eta, omega0, tau)
    p_false = carrier_envelope(omega0, spectrum[mode].omega, strict)
    disc = p_signal / p_false
    return ReadoutPlan(mode, eta, omega0, tau, p_signal, p_false, disc, disc >= min_discrimination)
