"""Physical constants, ion species and rigid mass distributions.

Everything is stored in SI. Constructors take laboratory units (amu, multiples
of the elementary charge, nanometres) and convert once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np
from scipy import constants as _sc

# Atomic mass unit, used as the reference nucleon mass m0.
AMU = 1.66053906660e-27
E_CHARGE = _sc.e
HBAR = _sc.hbar
EPS0 = _sc.epsilon_0
COULOMB_K = 1.0 / (4.0 * math.pi * EPS0)

CONSTANTS = MappingProxyType({"m0": AMU, "e": E_CHARGE, "hbar": HBAR, "eps0": EPS0})

NM = 1e-9

# Porphyrin barrel defaults. Ring geometry is not published; these are
# molecular-scale placeholders and stay configurable.
PORPHYRIN_RING_MASS_AMU = 4338.0
PORPHYRIN_RING_CHARGE_E = 12
DEFAULT_RING_RADIUS = 1.0 * NM
DEFAULT_RING_SPACING = 0.5 * NM
MOLECULES_PER_RING = 6


def amu_to_kg(mass_amu):
    return mass_amu * AMU


def kg_to_amu(mass_kg):
    return mass_kg / AMU


@dataclass(frozen=True)
class MassDistribution:
    """Rigid set of point masses with body-frame offsets (metres).

    ``masses`` has shape (N,), ``offsets`` has shape (N, 3).
    """

    masses: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        masses = np.array(self.masses, dtype=float).reshape(-1)
        offsets = np.array(self.offsets, dtype=float).reshape(-1, 3)
        if masses.size == 0:
            raise ValueError("mass distribution needs at least one constituent")
        if offsets.shape[0] != masses.size:
            raise ValueError("masses and offsets disagree in length")
        if np.any(masses <= 0):
            raise ValueError("constituent masses must be positive")
        masses.setflags(write=False)
        offsets.setflags(write=False)
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "offsets", offsets)

    @classmethod
    def point(cls, mass):
        return cls(np.array([mass]), np.zeros((1, 3)))

    @property
    def total_mass(self):
        return float(self.masses.sum())

    @property
    def center_of_mass(self):
        return self.masses @ self.offsets / self.total_mass

    @property
    def size(self):
        """Largest offset norm."""
        return float(np.max(np.linalg.norm(self.offsets, axis=1)))

    def __len__(self):
        return self.masses.size

    def rotated_to(self, axis):
        """Offsets in the lab frame for a body whose stacking axis is ``axis``.

        Body frame stacks along its local z. ``axis="x"`` swaps x and z.
        """
        if axis == "z":
            return self.offsets
        if axis == "x":
            return self.offsets[:, [2, 1, 0]]
        raise ValueError(f"unknown orientation axis {axis!r}")


@dataclass(frozen=True)
class IonSpecies:
    mass: float
    charge: float
    distribution: MassDistribution | None = field(default=None, compare=False)
    name: str = ""

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError("ion mass must be positive")
        if self.charge == 0:
            raise ValueError("ion charge must be non-zero")
        d = self.distribution
        if d is not None:
            if abs(d.total_mass - self.mass) > 1e-12 * self.mass:
                raise ValueError("constituent masses do not add up to the ion mass")
            scale = max(d.size, 1e-300)
            if np.linalg.norm(d.center_of_mass) > 1e-12 * scale:
                raise ValueError("mass distribution is not centred on its centre of mass")

    @property
    def mass_amu(self):
        return kg_to_amu(self.mass)

    @property
    def charge_e(self):
        return self.charge / E_CHARGE

    @property
    def is_point_like(self):
        return self.distribution is None

    def constituents(self):
        """(masses, offsets) with a point-like ion reported as one constituent."""
        if self.distribution is None:
            return np.array([self.mass]), np.zeros((1, 3))
        return self.distribution.masses, self.distribution.offsets

    def scaled(self, mass_factor=1.0, charge_factor=1.0):
        """Same species with mass and/or charge multiplied; geometry kept."""
        dist = self.distribution
        if dist is not None and mass_factor != 1.0:
            dist = MassDistribution(dist.masses * mass_factor, dist.offsets)
        return IonSpecies(self.mass * mass_factor, self.charge * charge_factor, dist, self.name)


def make_point_ion(mass_amu, charge_e, name=""):
    if not mass_amu > 0:
        raise ValueError(f"mass_amu must be positive, got {mass_amu}")
    if int(charge_e) != charge_e:
        raise ValueError(f"charge_e must be an integer, got {charge_e}")
    if charge_e == 0:
        raise ValueError("charge_e must be non-zero")
    return IonSpecies(amu_to_kg(mass_amu), int(charge_e) * E_CHARGE, None, name)


def build_porphyrin_barrel(
    n_rings,
    ring_radius=DEFAULT_RING_RADIUS,
    ring_spacing=DEFAULT_RING_SPACING,
    per_ring_mass_amu=PORPHYRIN_RING_MASS_AMU,
    per_ring_charge_e=PORPHYRIN_RING_CHARGE_E,
):
    """Stacked rings of six porphyrin units as a rigid extended ion.

    Each ring carries six equal point masses on a circle of ``ring_radius``
    in the body x-y plane; rings are ``ring_spacing`` apart along body z and
    centred on the origin. Use :meth:`MassDistribution.rotated_to` to orient
    the stack in the trap.
    """
    if int(n_rings) != n_rings or n_rings < 1:
        raise ValueError(f"n_rings must be a positive integer, got {n_rings}")
    if ring_radius < 0 or ring_spacing < 0:
        raise ValueError("ring radius and spacing must be non-negative")
    n_rings = int(n_rings)
    unit_mass = amu_to_kg(per_ring_mass_amu) / MOLECULES_PER_RING
    angles = 2 * np.pi * np.arange(MOLECULES_PER_RING) / MOLECULES_PER_RING
    ring = np.column_stack([ring_radius * np.cos(angles), ring_radius * np.sin(angles),
                            np.zeros(MOLECULES_PER_RING)])
    heights = (np.arange(n_rings) - (n_rings - 1) / 2.0) * ring_spacing
    offsets = np.concatenate([ring + [0.0, 0.0, h] for h in heights])
    # cos/sin round-off leaves ~1e-26 m residue; recentre exactly.
    masses = np.full(offsets.shape[0], unit_mass)
    offsets = offsets - masses @ offsets / masses.sum()
    dist = MassDistribution(masses, offsets)
    total_mass = dist.total_mass
    charge = n_rings * int(per_ring_charge_e) * E_CHARGE
    return IonSpecies(total_mass, charge, dist, f"porphyrin-{MOLECULES_PER_RING * n_rings}")


def barium_ion():
    return make_point_ion(138, 1, "138Ba+")
