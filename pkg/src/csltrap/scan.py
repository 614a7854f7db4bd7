"""One-dimensional parameter sweeps around a reference two-ion configuration.

Each grid point reports single-ion and mode frequencies, the improvement
factor of the collapse-rate bound relative to the reference configuration,
Lamb-Dicke parameters, and the stability/alignment flags. Points failing a
flag are kept (flags only) so excluded regions can be shaded.
"""
from __future__ import annotations

import enum
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .core import DEFAULT_RING_RADIUS, DEFAULT_RING_SPACING, IonSpecies, \
    PORPHYRIN_RING_CHARGE_E, PORPHYRIN_RING_MASS_AMU, build_porphyrin_barrel
from .csl import DEFAULT_QUANTA_FRACTION, DEFAULT_RC_EVAL, DEFAULT_TAU, CslParams, \
    csl_heating_extended, constituent_layout, expected_power
from .errors import InvalidBaseError
from .modes import MODE_ORDER, equilibrium, flags_ok, lamb_dicke, mode_spectrum, system_flags

DEFAULT_WAVELENGTH = 1762e-9


class ScanVariable(enum.Enum):
    V_END = "v_end"
    V_RF = "v_rf"
    MASS_RATIO = "mass_ratio"
    CHARGE_RATIO = "charge_ratio"
    N_RINGS = "n_rings"

    @classmethod
    def parse(cls, text):
        return cls(text.strip().lower().replace("-", "_"))


# (min, max, points, scale) per variable; N_RINGS uses an integer range.
DEFAULT_RANGES = {
    ScanVariable.V_END: (0.5, 30.0, 120, "linear"),
    ScanVariable.V_RF: (250.0, 1500.0, 120, "linear"),
    ScanVariable.MASS_RATIO: (0.1, 100.0, 61, "log"),
    ScanVariable.CHARGE_RATIO: (0.1, 100.0, 61, "log"),
    ScanVariable.N_RINGS: (1, 10, 10, "linear"),
}


@dataclass(frozen=True)
class MoleculeGeometry:
    n_rings: int = 2
    ring_radius: float = DEFAULT_RING_RADIUS
    ring_spacing: float = DEFAULT_RING_SPACING
    per_ring_mass_amu: float = PORPHYRIN_RING_MASS_AMU
    per_ring_charge_e: int = PORPHYRIN_RING_CHARGE_E

    def build(self, n_rings=None):
        return build_porphyrin_barrel(self.n_rings if n_rings is None else n_rings,
                                      self.ring_radius, self.ring_spacing,
                                      self.per_ring_mass_amu, self.per_ring_charge_e)


@dataclass(frozen=True)
class ScanBase:
    """Reference configuration and the settings used to compare against it."""

    system: object
    molecule: MoleculeGeometry | None = None
    orientation: str = "axial"
    r_c_eval: tuple = (DEFAULT_RC_EVAL,)
    tau: float = DEFAULT_TAU
    quanta_fraction: float = DEFAULT_QUANTA_FRACTION
    wavelength: float = DEFAULT_WAVELENGTH
    both_radial: bool = False


@dataclass(frozen=True)
class ScanSpec:
    variable: ScanVariable
    base: ScanBase
    low: float = None
    high: float = None
    points: int = None
    scale: str = None
    include_reference: bool = True

    def __post_init__(self):
        lo, hi, n, sc = DEFAULT_RANGES[self.variable]
        for name, default in (("low", lo), ("high", hi), ("points", n), ("scale", sc)):
            if getattr(self, name) is None:
                object.__setattr__(self, name, default)
        if not self.low < self.high:
            raise ValueError("scan range must satisfy low < high")
        if self.points < 2:
            raise ValueError("scan needs at least two points")
        if self.scale not in ("linear", "log"):
            raise ValueError(f"unknown scale {self.scale!r}")
        if self.scale == "log" and self.low <= 0:
            raise ValueError("log scale needs a positive lower bound")

    def grid(self):
        if self.variable is ScanVariable.N_RINGS:
            values = np.arange(int(math.ceil(self.low)), int(math.floor(self.high)) + 1)
            return values.astype(float)
        if self.scale == "log":
            values = np.geomspace(self.low, self.high, int(self.points))
        else:
            values = np.linspace(self.low, self.high, int(self.points))
        ref = reference_value(self.variable, self.base)
        if self.include_reference and self.low <= ref <= self.high and ref not in values:
            values = np.sort(np.append(values, ref))
        return values


@dataclass
class ScanRow:
    value: float
    r_c: float
    flags: dict
    single_ion: tuple | None = None  # (w1z, w1r, w2z, w2r); None if undefined
    omegas: dict = field(default_factory=dict)
    lambda_rel: dict = field(default_factory=dict)
    eta: dict = field(default_factory=dict)

    @property
    def valid(self):
        return flags_ok(self.flags)


def reference_value(variable, base):
    s = base.system
    if variable is ScanVariable.V_END:
        return s.trap.v_end
    if variable is ScanVariable.V_RF:
        return s.trap.v_rf
    if variable is ScanVariable.MASS_RATIO:
        return s.mass_ratio
    if variable is ScanVariable.CHARGE_RATIO:
        return s.charge_ratio
    return float((base.molecule or MoleculeGeometry()).n_rings)


def system_at(variable, base, value):
    """The base system with the swept quantity set to ``value``."""
    s = base.system
    if variable is ScanVariable.V_END:
        return s.with_trap(s.trap.with_voltages(v_end=value))
    if variable is ScanVariable.V_RF:
        return s.with_trap(s.trap.with_voltages(v_rf=value))
    if variable is ScanVariable.MASS_RATIO:
        return s.with_ion2(IonSpecies(value * s.ion1.mass, s.ion2.charge, None, s.ion2.name))
    if variable is ScanVariable.CHARGE_RATIO:
        return s.with_ion2(IonSpecies(s.ion2.mass, value * s.ion1.charge, None, s.ion2.name))
    return s.with_ion2((base.molecule or MoleculeGeometry()).build(int(round(value))))


def lambda_upper(system, eq, spectrum, mode, r_c, base):
    """Collapse-rate bound of one mode at a single correlation length."""
    m = spectrum[mode]
    p_exp = expected_power(m.omega, base.tau, base.quanta_fraction)
    layout = constituent_layout(system, eq, base.orientation)
    p1 = csl_heating_extended(system, eq, spectrum, CslParams(1.0, r_c), mode,
                              base.orientation, base.both_radial, layout).power
    return p_exp / p1 if p1 > 0 else math.inf


def _analyze(system):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return equilibrium(system), mode_spectrum(system)


def reference_bounds(base):
    """Per-mode bound of the base configuration at each evaluation r_C."""
    flags = system_flags(base.system)
    if not flags_ok(flags):
        bad = [k for k, v in flags.items() if v is (k == "soft_mode")]
        raise InvalidBaseError(f"reference configuration fails flags: {', '.join(bad)}")
    eq, sp = _analyze(base.system)
    return {rc: {m: lambda_upper(base.system, eq, sp, m, rc, base) for m in MODE_ORDER}
            for rc in base.r_c_eval}


def _evaluate(args):
    variable, base, value, ref = args
    system = system_at(variable, base, value)
    flags = system_flags(system)
    try:
        single = system.single_ion_frequencies()
    except Exception:
        single = None
    rows = []
    if not flags_ok(flags):
        return [ScanRow(value, rc, flags, single) for rc in base.r_c_eval]
    eq, sp = _analyze(system)
    omegas = {m: sp[m].omega for m in MODE_ORDER}
    eta = {m: lamb_dicke(sp, m, base.wavelength, system.ion1.mass) for m in MODE_ORDER}
    for rc in base.r_c_eval:
        rel = {m: ref[rc][m] / lambda_upper(system, eq, sp, m, rc, base) for m in MODE_ORDER}
        rows.append(ScanRow(value, rc, flags, single, omegas, rel, eta))
    return rows


def run_scan(spec, workers=1):
    """Evaluate every grid point; rows come back in grid order regardless of ``workers``."""
    ref = reference_bounds(spec.base)
    jobs = [(spec.variable, spec.base, float(v), ref) for v in spec.grid()]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_evaluate, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        chunks = [_evaluate(j) for j in jobs]
    return [row for chunk in chunks for row in chunk]


def frequency_table(spec, workers=1):
    """Single-ion and mode frequencies along the sweep (no bounds evaluated)."""
    quick = replace(spec, base=replace(spec.base, r_c_eval=(DEFAULT_RC_EVAL,)))
    rows = []
    for v in quick.grid():
        system = system_at(spec.variable, spec.base, float(v))
        flags = system_flags(system)
        try:
            single = system.single_ion_frequencies()
        except Exception:
            single = None
        omegas = {}
        if flags_ok(flags):
            omegas = {m: s.omega for m, s in zip(MODE_ORDER, _analyze(system)[1])}
        rows.append(ScanRow(float(v), math.nan, flags, single, omegas))
    return rows


def find_alignment_threshold(base_system, v_rf_low, v_rf_high, tol=1e-9):
    """Bisect the V_RF at which the aligned configuration is lost."""
    from .modes import alignment_check

    def aligned(v):
        s = base_system.with_trap(base_system.trap.with_voltages(v_rf=v))
        return alignment_check(s)

    lo, hi = v_rf_low, v_rf_high
    if aligned(lo) or not aligned(hi):
        raise ValueError("bracket must be misaligned at the low end and aligned at the high end")
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if aligned(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
