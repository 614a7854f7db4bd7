"""Single-ion linear Paul trap: Mathieu parameters, secular frequencies and
stability in the lowest stability zone.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import RadialUnconfinedError

# Trap geometry used throughout the reference setup.
REFERENCE_KAPPA = 0.248
REFERENCE_OMEGA_RF = 2 * math.pi * 5.2e6
REFERENCE_Z0 = 2.03e-3
REFERENCE_R0 = 2.63e-3
REFERENCE_V_END = 4.68
REFERENCE_V_RF = 720.4

# Stability-edge polynomial coefficients, lowest order first.
A0_COEFFS = (0.0, 0.0, -1 / 2, 0.0, 7 / 128, 0.0, -29 / 2304, 0.0, 68687 / 18874368)
B1_COEFFS = (1.0, -1.0, -1 / 8, 1 / 64, -1 / 1536, -11 / 36864)

# Past this |q| the truncated series for the edges is no longer trustworthy.
POLYNOMIAL_VALID_Q = 1.0


@dataclass(frozen=True)
class TrapConfig:
    kappa: float = REFERENCE_KAPPA
    omega_rf: float = REFERENCE_OMEGA_RF
    z0: float = REFERENCE_Z0
    r0: float = REFERENCE_R0
    v_end: float = REFERENCE_V_END
    v_rf: float = REFERENCE_V_RF

    def __post_init__(self):
        if not 0 < self.kappa < 1:
            raise ValueError(f"kappa must lie in (0, 1), got {self.kappa}")
        for name in ("omega_rf", "z0", "r0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.v_end > 0:
            raise ValueError("v_end must be positive for axial confinement")
        if self.v_rf < 0:
            raise ValueError("v_rf must be non-negative")

    @classmethod
    def from_lab_units(cls, kappa, omega_rf_hz, z0_mm, r0_mm, v_end, v_rf):
        return cls(kappa, 2 * math.pi * omega_rf_hz, z0_mm * 1e-3, r0_mm * 1e-3, v_end, v_rf)

    def with_voltages(self, v_end=None, v_rf=None):
        return TrapConfig(self.kappa, self.omega_rf, self.z0, self.r0,
                          self.v_end if v_end is None else v_end,
                          self.v_rf if v_rf is None else v_rf)


@dataclass(frozen=True)
class MathieuPoint:
    a: float
    q: float  # q_x; q_y = -q_x


class StabilityReason(enum.Enum):
    OK = "OK"
    A_NONNEGATIVE = "A_NONNEGATIVE"
    BELOW_A0 = "BELOW_A0"
    ABOVE_B1 = "ABOVE_B1"


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    reason: StabilityReason

    def __bool__(self):
        return self.stable


def mathieu_params(ion, trap):
    denom = ion.mass * trap.omega_rf**2
    a = -4.0 * ion.charge * trap.kappa * trap.v_end / (denom * trap.z0**2)
    q = 2.0 * ion.charge * trap.v_rf / (denom * trap.r0**2)
    return MathieuPoint(a, q)


def axial_frequency(ion, trap):
    return math.sqrt(2.0 * ion.charge * trap.kappa * trap.v_end / (ion.mass * trap.z0**2))


def secular_frequencies(ion, trap):
    """Axial and radial secular angular frequencies (pseudopotential).

    Raises
    ------
    RadialUnconfinedError
        If ``q**2/2 + a <= 0``.
    """
    p = mathieu_params(ion, trap)
    beta2 = p.q**2 / 2.0 + p.a
    if beta2 <= 0:
        raise RadialUnconfinedError(
            f"radial pseudopotential not confining: q^2/2 + a = {beta2:.3e}")
    return axial_frequency(ion, trap), 0.5 * trap.omega_rf * math.sqrt(beta2)


def epsilon_squared(ion, trap):
    """Radial-to-axial strength ratio with omega_r = sqrt(eps^2 - 1/2) * omega_z."""
    return (ion.charge * trap.v_rf**2 * trap.z0**2
            / (4.0 * trap.omega_rf**2 * ion.mass * trap.r0**4 * trap.kappa * trap.v_end))


def stability_boundaries(q):
    """Edges a0(q) and b1(q) of the lowest Mathieu stability zone.

    Truncated series; accuracy degrades for |q| > 1.
    """
    q = np.asarray(q, dtype=float)
    a0 = np.polynomial.polynomial.polyval(q, A0_COEFFS)
    b1 = np.polynomial.polynomial.polyval(q, B1_COEFFS)
    if a0.ndim == 0:
        return float(a0), float(b1)
    return a0, b1


def stability_classify(p):
    if p.a >= 0:
        return StabilityVerdict(False, StabilityReason.A_NONNEGATIVE)
    a0, b1 = stability_boundaries(p.q)
    if not p.a > a0:
        return StabilityVerdict(False, StabilityReason.BELOW_A0)
    if not p.a < b1:
        return StabilityVerdict(False, StabilityReason.ABOVE_B1)
    return StabilityVerdict(True, StabilityReason.OK)


def in_mathieu_zone(a, q):
    """Vectorised a0(q) < a < b1(q) test, without the a < 0 trapping requirement."""
    a0, b1 = stability_boundaries(q)
    return (np.asarray(a) > a0) & (np.asarray(a) < b1)


def _steps(n_periods, samples_per_period):
    # one drive period is pi in the scaled time tau = Omega t / 2
    return int(n_periods) * int(samples_per_period), math.pi / samples_per_period


def mathieu_integrate(p, n_periods=500, samples_per_period=200, threshold=1e3):
    """Integrate rho'' + (a - 2q cos 2tau) rho = 0 from rho=1, rho'=0 with RK4.

    Returns ``(bounded, max_amplitude)``. Integration stops as soon as the
    amplitude reaches ``threshold``.
    """
    n, h = _steps(n_periods, samples_per_period)
    peak = kernels.mathieu_max_amplitude(float(p.a), float(p.q), n, h, float(threshold))
    return bool(peak < threshold), float(peak)


def mathieu_integrate_grid(a, q, n_periods=500, samples_per_period=200, threshold=1e3):
    """Batch version of :func:`mathieu_integrate`; returns (bounded, peaks) arrays."""
    a = np.asarray(a, dtype=float).ravel()
    q = np.asarray(q, dtype=float).ravel()
    n, h = _steps(n_periods, samples_per_period)
    peaks = np.asarray(kernels.mathieu_max_amplitude_batch(a, q, n, h, float(threshold)))
    return peaks < threshold, peaks


def mathieu_trajectory(p, n_periods, samples_per_period=200):
    """(tau, rho) sampled at every RK4 step."""
    n, h = _steps(n_periods, samples_per_period)
    rho = np.asarray(kernels.mathieu_trajectory(float(p.a), float(p.q), n, h))
    return np.arange(n + 1) * h, rho


def ion_stable(ion, trap):
    return stability_classify(mathieu_params(ion, trap)).stable
