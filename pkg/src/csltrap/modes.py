"""Two-ion crystal along the trap axis: equilibrium, stiffness matrix and the
four normal modes (axial and radial, in-phase and out-of-phase).

Mode labels follow the convention in which the in-phase axial mode is the
lower axial root and the in-phase radial mode is the *upper* radial root.
With ion 2's eigenvector component fixed positive, that labelling coincides
with the sign pattern of the eigenvector (same signs = in phase).
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .core import COULOMB_K, HBAR
from .errors import MisalignedError, SoftModeError
from .trap import axial_frequency, ion_stable, secular_frequencies


class Axis(enum.Enum):
    AXIAL = "axial"
    RADIAL = "radial"


class Phase(enum.Enum):
    IN = "in"
    OUT = "out"


class ModeId(enum.Enum):
    AXIAL_IN = "axial-in"
    AXIAL_OUT = "axial-out"
    RADIAL_IN = "radial-in"
    RADIAL_OUT = "radial-out"

    @property
    def axis(self):
        return Axis.AXIAL if self.name.startswith("AXIAL") else Axis.RADIAL

    @property
    def phase(self):
        return Phase.IN if self.name.endswith("IN") else Phase.OUT

    @classmethod
    def parse(cls, text):
        return cls(text.strip().lower())


MODE_ORDER = (ModeId.AXIAL_IN, ModeId.AXIAL_OUT, ModeId.RADIAL_IN, ModeId.RADIAL_OUT)


@dataclass(frozen=True)
class TwoIonSystem:
    """Atomic coolant ``ion1`` plus (macro-)molecular ``ion2`` in one trap."""

    ion1: object
    ion2: object
    trap: object

    def __post_init__(self):
        if self.charge_ratio <= 0:
            raise ValueError("both ions must carry charge of the same sign")

    @property
    def mass_ratio(self):
        return self.ion2.mass / self.ion1.mass

    @property
    def charge_ratio(self):
        return self.ion2.charge / self.ion1.charge

    @property
    def omega_1z(self):
        return axial_frequency(self.ion1, self.trap)

    @property
    def omega_2z(self):
        return axial_frequency(self.ion2, self.trap)

    @property
    def omega_1r(self):
        return secular_frequencies(self.ion1, self.trap)[1]

    @property
    def omega_2r(self):
        return secular_frequencies(self.ion2, self.trap)[1]

    def single_ion_frequencies(self):
        """(w1z, w1r, w2z, w2r) in rad/s."""
        return self.omega_1z, self.omega_1r, self.omega_2z, self.omega_2r

    @property
    def stable_1(self):
        return ion_stable(self.ion1, self.trap)

    @property
    def stable_2(self):
        return ion_stable(self.ion2, self.trap)

    def with_trap(self, trap):
        return TwoIonSystem(self.ion1, self.ion2, trap)

    def with_ion2(self, ion2):
        return TwoIonSystem(self.ion1, ion2, self.trap)


@dataclass(frozen=True)
class Equilibrium:
    z_eq1: float
    z_eq2: float

    @property
    def separation(self):
        return self.z_eq1 - self.z_eq2

    @property
    def positions(self):
        return np.array([self.z_eq1, self.z_eq2])


@dataclass(frozen=True)
class StiffnessMatrix:
    """Mass-weighted Hessian, (rad/s)^2. Axial block (1,2), radial block (3,4)."""

    K11: float
    K12: float
    K22: float
    K33: float
    K34: float
    K44: float

    @property
    def axial_block(self):
        return np.array([[self.K11, self.K12], [self.K12, self.K22]])

    @property
    def radial_block(self):
        return np.array([[self.K33, self.K34], [self.K34, self.K44]])

    def as_array(self):
        k = np.zeros((4, 4))
        k[:2, :2] = self.axial_block
        k[2:, 2:] = self.radial_block
        return k


@dataclass(frozen=True)
class Mode:
    id: ModeId
    omega: float
    eigvec: tuple
    degeneracy: int
    # label the explicit eps/chi radial expression gives this root (flipped
    # relative to the stiffness-matrix form for the radial pair)
    alt_phase: Phase

    @property
    def axis(self):
        return self.id.axis

    @property
    def phase(self):
        return self.id.phase

    @property
    def sign_phase(self):
        return Phase.IN if self.eigvec[0] * self.eigvec[1] >= 0 else Phase.OUT


@dataclass(frozen=True)
class ModeSpectrum:
    modes: tuple
    stiffness: StiffnessMatrix

    def __getitem__(self, mode_id):
        for m in self.modes:
            if m.id is mode_id:
                return m
        raise KeyError(mode_id)

    def __iter__(self):
        return iter(self.modes)

    @cached_property
    def omegas(self):
        return {m.id: m.omega for m in self.modes}


def equilibrium(system):
    """Axial equilibrium positions; ion 1 sits at positive z."""
    q_ratio = system.charge_ratio
    coulomb = COULOMB_K * system.ion1.charge * system.ion2.charge
    z1_cubed = coulomb / (system.ion1.mass * system.omega_1z**2) / (1.0 + 1.0 / q_ratio) ** 2
    z1 = math.copysign(abs(z1_cubed) ** (1.0 / 3.0), z1_cubed)
    return Equilibrium(z1, -z1 / q_ratio)


def alignment_check(system):
    """True iff the axial effective coupling is strictly weaker than the radial one."""
    m1, m2 = system.ion1.mass, system.ion2.mass
    w1z, w1r, w2z, w2r = system.single_ion_frequencies()
    lhs = m1 * m2 * w1z**2 * w2z**2 / (m1 * w1z**2 + m2 * w2z**2)
    rhs = m1 * m2 * w1r**2 * w2r**2 / (m1 * w1r**2 + m2 * w2r**2)
    return lhs < rhs


def stiffness(system):
    if not alignment_check(system):
        raise MisalignedError("ions do not align along the trap axis")
    M, Q = system.mass_ratio, system.charge_ratio
    w1z2 = system.omega_1z**2
    w1r2 = system.omega_1r**2
    w2r2 = system.omega_2r**2
    g = 1.0 + 1.0 / Q
    K11 = w1z2 * (1.0 + 2.0 / g)
    K12 = -2.0 * w1z2 / (math.sqrt(M) * g)
    K22 = w1z2 * (Q / M) * (1.0 + 2.0 / (1.0 + Q))
    K33 = w1r2 - w1z2 / g
    K34 = -0.5 * K12
    K44 = w2r2 - w1z2 / (M * g)
    return StiffnessMatrix(K11, K12, K22, K33, K34, K44)


def _roots(k11, k12, k22):
    """(lower, upper) eigenvalues of a symmetric 2x2 block."""
    root = math.sqrt((k11 - k22) ** 2 + 4.0 * k12**2)
    upper = 0.5 * (k11 + k22 + root)
    if upper <= 0:
        return upper, upper
    # product form avoids cancellation in (trace - root)
    lower = (k11 * k22 - k12**2) / upper
    return lower, upper


def _unit(t):
    n = math.sqrt(1.0 + t * t)
    return (t / n, 1.0 / n)


def mode_spectrum(system, K=None):
    """Closed-form normal modes of the aligned two-ion crystal.

    Raises
    ------
    SoftModeError
        If any squared mode frequency is non-positive.
    """
    if K is None:
        K = stiffness(system)
    ax_lo, ax_hi = _roots(K.K11, K.K12, K.K22)
    rad_lo, rad_hi = _roots(K.K33, K.K34, K.K44)
    for label, w2 in (("axial", ax_lo), ("radial", rad_lo)):
        if not w2 > 0:
            raise SoftModeError(f"{label} mode has omega^2 = {w2:.3e} <= 0")

    def axial_vec(w2):
        return _unit((w2 - K.K22) / K.K12)

    def radial_vec(w2):
        return _unit((w2 - K.K44) / K.K34)

    modes = (
        Mode(ModeId.AXIAL_IN, math.sqrt(ax_lo), axial_vec(ax_lo), 1, Phase.IN),
        Mode(ModeId.AXIAL_OUT, math.sqrt(ax_hi), axial_vec(ax_hi), 1, Phase.OUT),
        Mode(ModeId.RADIAL_IN, math.sqrt(rad_hi), radial_vec(rad_hi), 2, Phase.OUT),
        Mode(ModeId.RADIAL_OUT, math.sqrt(rad_lo), radial_vec(rad_lo), 2, Phase.IN),
    )
    for m in modes:
        if m.sign_phase is not m.phase:
            warnings.warn(f"{m.id.value}: eigenvector signs suggest {m.sign_phase.value}-phase "
                          "motion; label kept by root ordering", RuntimeWarning, stacklevel=2)
    return ModeSpectrum(modes, K)


def axial_closed_form(M, Q, omega_1z):
    """(in-phase, out-of-phase) axial frequencies written directly in M and Q."""
    s = 1.0 + Q / M + (1.0 + 1.0 / M) * 2.0 * Q / (1.0 + Q)
    d = math.sqrt((1.0 - Q / M + (1.0 - 1.0 / M) * 2.0 * Q / (1.0 + Q)) ** 2
                  + 16.0 * Q**2 / (M * (1.0 + Q) ** 2))
    return (omega_1z * math.sqrt(0.5 * (s - d)), omega_1z * math.sqrt(0.5 * (s + d)))


def radial_closed_form(M, Q, eps2, omega_1z):
    """(in-phase, out-of-phase) radial frequencies in terms of M, Q and eps^2.

    Returned in this module's labelling (in-phase = upper root), even though
    the explicit expression's sign placement would call the lower root +.
    """
    chi2 = (Q / M) * (Q / M * eps2 - 0.5) / (eps2 - 0.5)
    g = 1.0 + 1.0 / Q
    base = eps2 - 0.5
    s = base - 1.0 / g + chi2 * base - 1.0 / (M * g)
    d = math.sqrt(((1.0 - chi2) * base - (1.0 - 1.0 / M) / g) ** 2 + 4.0 / (M * g**2))
    lower, upper = 0.5 * (s - d), 0.5 * (s + d)
    return omega_1z * math.sqrt(upper), omega_1z * math.sqrt(lower)


def lamb_dicke(spectrum, mode, wavelength, m1):
    """|eta| for a laser of ``wavelength`` addressing ion 1 on ``mode``.

    The sign of the eigenvector is a convention, so the magnitude is returned.
    """
    if not wavelength > 0:
        raise ValueError("wavelength must be positive")
    m = spectrum[mode]
    k = 2.0 * math.pi / wavelength
    return abs(k * m.eigvec[0] * math.sqrt(HBAR / (2.0 * m1 * m.omega)))


def system_flags(system):
    """Stability/alignment/soft-mode flags without raising."""
    flags = {"stable_1": False, "stable_2": False, "aligned": False, "soft_mode": False}
    flags["stable_1"] = system.stable_1
    flags["stable_2"] = system.stable_2
    if not (flags["stable_1"] and flags["stable_2"]):
        return flags
    flags["aligned"] = alignment_check(system)
    if flags["aligned"]:
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                mode_spectrum(system)
        except SoftModeError:
            flags["soft_mode"] = True
    return flags


def flags_ok(flags):
    return flags["stable_1"] and flags["stable_2"] and flags["aligned"] and not flags["soft_mode"]
