"""CSL heating of the two-ion normal modes and the resulting exclusion bounds.

Two evaluations are provided: point-like ions, and a rigid extended second
ion built from constituent point masses. Both are linear in the collapse
rate, so bounds follow from one evaluation at unit rate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .core import AMU, HBAR
from .errors import DegenerateModeError
from .modes import Axis, ModeId

M0 = AMU

# Fraction of one motional quantum per readout interval taken as detectable.
DEFAULT_QUANTA_FRACTION = 1e-5
DEFAULT_TAU = 1.0
DEFAULT_RC_EVAL = 1e-7
DEFAULT_RC_GRID = (1e-10, 1e-2, 200)

ORIENTATIONS = {"axial": "z", "radial": "x", "z": "z", "x": "x"}


@dataclass(frozen=True)
class CslParams:
    lam: float  # collapse rate, 1/s
    r_c: float  # correlation length, m

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("collapse rate must be non-negative")
        if not self.r_c > 0:
            raise ValueError("correlation length must be positive")


@dataclass(frozen=True)
class HeatingResult:
    mode: ModeId
    power: float
    quanta_rate: float


@dataclass(frozen=True)
class ExclusionCurve:
    mode: ModeId
    p_exp: float
    r_c: np.ndarray
    lambda_upper: np.ndarray
    omitted: tuple = field(default=())  # r_C values where the bound is unconstrained

    def at(self, r_c):
        idx = np.flatnonzero(np.isclose(self.r_c, r_c, rtol=1e-12, atol=0.0))
        if idx.size == 0:
            raise KeyError(f"r_C = {r_c!r} not on the curve")
        return float(self.lambda_upper[idx[0]])


def _prefactor(params):
    return params.lam * HBAR**2 / (4.0 * M0**2 * params.r_c**2)


def _result(mode, power, omega, degeneracy):
    power *= degeneracy
    return HeatingResult(mode, power, power / (HBAR * omega))


def csl_heating_pointlike(system, equilibrium, spectrum, params, mode, both_radial=False):
    """CSL energy gain of one mode with both ions treated as point masses.

    ``both_radial`` counts the two degenerate transverse modes together.
    """
    m = spectrum[mode]
    masses = (system.ion1.mass, system.ion2.mass)
    z = (equilibrium.z_eq1, equilibrium.z_eq2)
    rc2 = params.r_c**2
    total = 0.0
    for i in range(2):
        for j in range(2):
            dz2 = (z[i] - z[j]) ** 2
            term = math.sqrt(masses[i] * masses[j]) * math.exp(-dz2 / (4.0 * rc2))
            term *= m.eigvec[i] * m.eigvec[j] / m.omega
            if m.axis is Axis.AXIAL:
                term *= 1.0 - dz2 / (2.0 * rc2)
            total += term
    power = _prefactor(params) * m.omega * total
    return _result(mode, power, m.omega, m.degeneracy if both_radial and m.axis is Axis.RADIAL else 1)


def constituent_layout(system, equilibrium, orientation="axial"):
    """Lab-frame positions, masses and owning-ion index of every constituent."""
    axis = ORIENTATIONS[orientation]
    pos, mass, owner = [], [], []
    for i, (ion, z) in enumerate(((system.ion1, equilibrium.z_eq1),
                                  (system.ion2, equilibrium.z_eq2))):
        if ion.distribution is None:
            offsets = np.zeros((1, 3))
            masses = np.array([ion.mass])
        else:
            offsets = ion.distribution.rotated_to(axis)
            masses = ion.distribution.masses
        pos.append(offsets + np.array([0.0, 0.0, z]))
        mass.append(masses)
        owner.append(np.full(masses.size, i))
    return np.concatenate(pos), np.concatenate(mass), np.concatenate(owner)


def csl_heating_extended(system, equilibrium, spectrum, params, mode,
                         orientation="axial", both_radial=False, layout=None):
    """CSL energy gain with each ion resolved into its rigid constituents.

    All constituents of an ion share that ion's fluctuation; only their static
    offsets differ. Radial modes carry the transverse geometric factor averaged
    over the two degenerate directions.
    """
    m = spectrum[mode]
    pos, masses, owner = layout if layout is not None else constituent_layout(
        system, equilibrium, orientation)
    ion_mass = np.array([system.ion1.mass, system.ion2.mass])
    w = np.asarray(m.eigvec)
    coeffs = masses * w[owner] / np.sqrt(ion_mass[owner])
    total = kernels.pair_sum(pos, coeffs, params.r_c, m.axis is Axis.AXIAL) / m.omega
    power = _prefactor(params) * m.omega * total
    return _result(mode, power, m.omega, m.degeneracy if both_radial and m.axis is Axis.RADIAL else 1)


def expected_power(omega, tau=DEFAULT_TAU, fraction=DEFAULT_QUANTA_FRACTION):
    """Smallest resolvable heating power: ``fraction`` quanta of hbar*omega per ``tau``."""
    return fraction * HBAR * omega / tau


def rc_grid(r_min=DEFAULT_RC_GRID[0], r_max=DEFAULT_RC_GRID[1], n=DEFAULT_RC_GRID[2]):
    if not (0 < r_min < r_max) or n < 2:
        raise ValueError("r_C grid needs 0 < r_min < r_max and at least two points")
    return np.geomspace(r_min, r_max, int(n))


def exclusion_bound(system, equilibrium, spectrum, mode, r_c_grid, p_exp,
                    orientation="axial", both_radial=False, strict=False):
    """Upper bound on the collapse rate for each r_C in ``r_c_grid``.

    Points where the mode does not heat at all are dropped and listed in
    ``omitted``; with ``strict=True`` they raise instead.
    """
    if not p_exp > 0:
        raise ValueError("p_exp must be positive")
    layout = constituent_layout(system, equilibrium, orientation)
    grid = np.asarray(r_c_grid, dtype=float)
    keep_rc, keep_lam, omitted = [], [], []
    for rc in grid:
        p1 = csl_heating_extended(system, equilibrium, spectrum, CslParams(1.0, rc), mode,
                                  orientation, both_radial, layout).power
        if not p1 > 0:
            if strict:
                raise DegenerateModeError(f"{mode.value}: no CSL heating at r_C = {rc:.3e} m")
            omitted.append(float(rc))
            continue
        keep_rc.append(rc)
        keep_lam.append(p_exp / p1)
    return ExclusionCurve(mode, p_exp, np.array(keep_rc), np.array(keep_lam), tuple(omitted))


def lambda_rel(candidate, reference, r_c_eval):
    """Improvement factor reference/candidate at ``r_c_eval`` (10**N = N decades)."""
    return reference.at(r_c_eval) / candidate.at(r_c_eval)


def lambda_rel_min(candidate, reference):
    """Ratio of the two curves' minima (their most restrictive points)."""
    return float(np.min(reference.lambda_upper) / np.min(candidate.lambda_upper))
