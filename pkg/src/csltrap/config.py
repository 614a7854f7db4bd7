"""Run configuration: a sectioned ``key = value`` text format.

Keys may be written under a ``[section]`` header or fully qualified as
``section.key``. ``#`` starts a comment. Every key not in the schema is
rejected with its line number, and every value is range-checked at parse
time. Absent keys take the reference-setup defaults.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

from .core import AMU, DEFAULT_RING_RADIUS, DEFAULT_RING_SPACING, NM, \
    PORPHYRIN_RING_CHARGE_E, PORPHYRIN_RING_MASS_AMU, make_point_ion
from .errors import ConfigError
from .modes import ModeId, TwoIonSystem
from .noise import NoiseSpectrum
from .scan import DEFAULT_RANGES, MoleculeGeometry, ScanBase, ScanSpec, ScanVariable
from .trap import REFERENCE_KAPPA, REFERENCE_V_END, REFERENCE_V_RF, TrapConfig

CONFIG_PREFIX = "# config: "


def _positive(v):
    return v > 0


def _non_negative(v):
    return v >= 0


def _unit_open(v):
    return 0 < v < 1


def _nonzero_int(v):
    return v != 0


def _always(v):
    return True


# section -> key -> (type, default, predicate, constraint text)
SCHEMA = {
    "trap": {
        "kappa": (float, REFERENCE_KAPPA, _unit_open, "0 < kappa < 1"),
        "omega_rf_hz": (float, 5.2e6, _positive, "> 0"),
        "z0_mm": (float, 2.03, _positive, "> 0"),
        "r0_mm": (float, 2.63, _positive, "> 0"),
        "v_end": (float, REFERENCE_V_END, _positive, "> 0"),
        "v_rf": (float, REFERENCE_V_RF, _non_negative, ">= 0"),
    },
    "ion1": {
        "mass_amu": (float, 138.0, _positive, "> 0"),
        "charge_e": (int, 1, _nonzero_int, "non-zero integer"),
    },
    "ion2": {
        # n_rings = 0 selects a point-like ion with mass_amu/charge_e below
        "n_rings": (int, 2, _non_negative, ">= 0"),
        "mass_amu": (float, 2 * PORPHYRIN_RING_MASS_AMU, _positive, "> 0"),
        "charge_e": (int, 2 * PORPHYRIN_RING_CHARGE_E, _nonzero_int, "non-zero integer"),
        "ring_radius_nm": (float, DEFAULT_RING_RADIUS / NM, _non_negative, ">= 0"),
        "ring_spacing_nm": (float, DEFAULT_RING_SPACING / NM, _non_negative, ">= 0"),
        "per_ring_mass_amu": (float, PORPHYRIN_RING_MASS_AMU, _positive, "> 0"),
        "per_ring_charge_e": (int, PORPHYRIN_RING_CHARGE_E, _nonzero_int, "non-zero integer"),
        "orientation": (str, "axial", lambda v: v in ("axial", "radial"), "axial or radial"),
    },
    "csl": {
        "rc_min": (float, 1e-10, _positive, "> 0"),
        "rc_max": (float, 1e-2, _positive, "> 0"),
        "rc_points": (int, 200, lambda v: v >= 2, ">= 2"),
        "lambda": (float, 1e-8, _non_negative, ">= 0"),
        "quanta_fraction": (float, 1e-5, _positive, "> 0"),
        "tau_s": (float, 1.0, _positive, "> 0"),
        "lambda_rel_rc": (float, 1e-7, _positive, "> 0"),
        "both_radial": (bool, False, _always, "true or false"),
    },
    "noise": {
        # (V/m)^2 per rad/s; a number, or a path to a two-column table
        "psd_x": (str, "1e-14", _always, "number or table path"),
        "psd_y": (str, "1e-14", _always, "number or table path"),
        "psd_z": (str, "1e-14", _always, "number or table path"),
        "mode_projected": (bool, False, _always, "true or false"),
    },
    "readout": {
        "wavelength_nm": (float, 1762.0, _positive, "> 0"),
        "omega0_hz": (float, 1e3, _positive, "> 0"),
        "min_discrimination": (float, 100.0, _positive, "> 0"),
        "strict": (bool, False, _always, "true or false"),
    },
    "scan": {
        "variable": (str, "v_end", lambda v: v in {x.value for x in ScanVariable},
                     "one of " + ", ".join(x.value for x in ScanVariable)),
        "low": (float, math.nan, _always, "number"),
        "high": (float, math.nan, _always, "number"),
        "points": (int, 0, _non_negative, ">= 0 (0 = default)"),
        "scale": (str, "default", lambda v: v in ("default", "linear", "log"),
                  "default, linear or log"),
        "full_curve": (bool, False, _always, "true or false"),
    },
}

_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}
_SECTION = re.compile(r"^\[\s*([A-Za-z0-9_]+)\s*\]$")


def _convert(kind, raw):
    if kind is bool:
        low = raw.lower()
        if low in _TRUE:
            return True
        if low in _FALSE:
            return False
        raise ValueError(f"expected a boolean, got {raw!r}")
    if kind is int:
        value = float(raw)
        if value != int(value):
            raise ValueError(f"expected an integer, got {raw!r}")
        return int(value)
    if kind is float:
        value = float(raw)
        if math.isinf(value):
            raise ValueError("value must be finite")
        return value
    if len(raw) >= 2 and raw[0] == raw[-1] and raw[0] in "'\"":
        raw = raw[1:-1]
    return raw


def _format(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True, eq=False)
class RunConfig:
    """Resolved configuration; ``values[section][key]`` holds typed values."""

    values: MappingProxyType

    def __eq__(self, other):
        # compare canonical text so unset (nan) scan bounds compare equal
        return isinstance(other, RunConfig) and self.dump() == other.dump()

    __hash__ = None

    def __getitem__(self, section):
        return self.values[section]

    def get(self, dotted):
        section, key = dotted.split(".", 1)
        return self.values[section][key]

    def replace(self, **dotted):
        """Copy with ``section__key=value`` overrides, re-validated."""
        merged = {s: dict(v) for s, v in self.values.items()}
        for name, value in dotted.items():
            section, key = name.split("__", 1)
            if section not in SCHEMA or key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {section}.{key}", key=f"{section}.{key}")
            merged[section][key] = value
        return _validate(merged, explicit=set())

    def dump(self):
        """Canonical text form; parses back to an equal config."""
        lines = []
        for section, keys in self.values.items():
            lines.append(f"[{section}]")
            for key, value in keys.items():
                lines.append(f"{key} = {_format(value)}")
        return "\n".join(lines) + "\n"

    # builders ---------------------------------------------------------

    def trap(self):
        t = self["trap"]
        return TrapConfig.from_lab_units(t["kappa"], t["omega_rf_hz"], t["z0_mm"], t["r0_mm"],
                                         t["v_end"], t["v_rf"])

    def molecule(self):
        i2 = self["ion2"]
        if i2["n_rings"] == 0:
            return None
        return MoleculeGeometry(i2["n_rings"], i2["ring_radius_nm"] * NM,
                                i2["ring_spacing_nm"] * NM, i2["per_ring_mass_amu"],
                                i2["per_ring_charge_e"])

    def ion1(self):
        i1 = self["ion1"]
        name = "138Ba+" if (i1["mass_amu"], i1["charge_e"]) == (138.0, 1) else "ion1"
        return make_point_ion(i1["mass_amu"], i1["charge_e"], name)

    def ion2(self):
        mol = self.molecule()
        if mol is not None:
            return mol.build()
        i2 = self["ion2"]
        return make_point_ion(i2["mass_amu"], i2["charge_e"], "ion2")

    def system(self):
        return TwoIonSystem(self.ion1(), self.ion2(), self.trap())

    def orientation(self):
        return self["ion2"]["orientation"]

    def rc_grid(self):
        c = self["csl"]
        return np.geomspace(c["rc_min"], c["rc_max"], c["rc_points"])

    def noise(self):
        n = self["noise"]
        return NoiseSpectrum(*(_psd(n[k], f"noise.{k}") for k in ("psd_x", "psd_y", "psd_z")))

    def wavelength(self):
        return self["readout"]["wavelength_nm"] * 1e-9

    def omega0(self):
        return 2 * math.pi * self["readout"]["omega0_hz"]

    def scan_base(self):
        c = self["csl"]
        return ScanBase(self.system(), self.molecule(), self.orientation(),
                        (c["lambda_rel_rc"],), c["tau_s"], c["quanta_fraction"],
                        self.wavelength(), c["both_radial"])

    def scan_spec(self, variable=None):
        s = self["scan"]
        var = ScanVariable.parse(variable or s["variable"])
        base = self.scan_base()
        if var is ScanVariable.N_RINGS and base.molecule is None:
            raise ConfigError("an n_rings scan needs ion2.n_rings >= 1", key="ion2.n_rings")
        if var in (ScanVariable.MASS_RATIO, ScanVariable.CHARGE_RATIO):
            # ratio sweeps treat ion 2 as a point mass
            base = ScanBase(base.system.with_ion2(
                make_point_ion(base.system.ion2.mass / AMU, round(base.system.ion2.charge_e), "ion2")),
                None, base.orientation, base.r_c_eval, base.tau, base.quanta_fraction,
                base.wavelength, base.both_radial)
        own = s["variable"] == var.value
        lo, hi, n, sc = DEFAULT_RANGES[var]
        if own:
            lo = lo if math.isnan(s["low"]) else s["low"]
            hi = hi if math.isnan(s["high"]) else s["high"]
            n = s["points"] or n
            sc = sc if s["scale"] == "default" else s["scale"]
        try:
            return ScanSpec(var, base, lo, hi, n, sc)
        except ValueError as exc:
            raise ConfigError(str(exc), key="scan") from None


def _psd(text, key):
    try:
        value = float(text)
    except ValueError:
        value = None
    if value is not None:
        _check_psd_number(value, key)
        return NoiseSpectrum.flat(value).s_x
    try:
        table = np.loadtxt(text, delimiter=None, comments="#", ndmin=2)
    except OSError as exc:
        raise ConfigError(f"{key}: cannot read PSD table {text!r}: {exc}", key=key) from None
    except ValueError as exc:
        raise ConfigError(f"{key}: malformed PSD table {text!r}: {exc}", key=key) from None
    if table.shape[1] != 2 or table.shape[0] < 1:
        raise ConfigError(f"{key}: PSD table needs two columns (omega, psd)", key=key)
    if np.any(table[:, 1] < 0) or not np.all(np.isfinite(table)):
        raise ConfigError(f"{key}: PSD table values must be finite and non-negative", key=key)
    return NoiseSpectrum.interpolated(table[:, 0], table[:, 1])


def _check_psd_number(value, key):
    if not (value >= 0 and math.isfinite(value)):
        raise ConfigError(f"{key} must be a finite non-negative number", key=key)
    return True


def _validate(values, explicit, lines=None):
    lines = lines or {}
    for section, keys in SCHEMA.items():
        for key, (kind, _default, check, constraint) in keys.items():
            value = values[section][key]
            ok = check(value) and not (kind is float and math.isinf(value))
            if not ok:
                name = f"{section}.{key}"
                raise ConfigError(f"{name} = {_format(value)} violates {constraint}",
                                  line=lines.get(name), key=name)
    c = values["csl"]
    if not c["rc_min"] < c["rc_max"]:
        raise ConfigError("csl.rc_min must be below csl.rc_max", line=lines.get("csl.rc_min"),
                          key="csl.rc_min")
    i2 = values["ion2"]
    if i2["n_rings"] > 0:
        # mass and charge follow from the rings
        mass = i2["n_rings"] * i2["per_ring_mass_amu"]
        charge = i2["n_rings"] * i2["per_ring_charge_e"]
        for key, derived in (("mass_amu", mass), ("charge_e", charge)):
            name = f"ion2.{key}"
            if name in explicit and not math.isclose(i2[key], derived, rel_tol=1e-12):
                raise ConfigError(f"{name} conflicts with the ring model ({derived!r}); "
                                  "set ion2.n_rings = 0 for a point-like ion",
                                  line=lines.get(name), key=name)
        i2["mass_amu"] = float(mass)
        i2["charge_e"] = int(charge)
    if values["ion1"]["charge_e"] * i2["charge_e"] <= 0:
        raise ConfigError("ion1 and ion2 must carry charge of the same sign", key="ion2.charge_e")
    for key in ("psd_x", "psd_y", "psd_z"):
        text = values["noise"][key]
        try:
            _check_psd_number(float(text), f"noise.{key}")
        except ValueError:
            pass
    frozen = {s: MappingProxyType(dict(v)) for s, v in values.items()}
    return RunConfig(MappingProxyType(frozen))


def default_config():
    return parse_config("")


def parse_config(text):
    """Parse and validate configuration text; see the module docstring."""
    values = {s: {k: spec[1] for k, spec in keys.items()} for s, keys in SCHEMA.items()}
    explicit, lines = set(), {}
    section = None
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        m = _SECTION.match(line)
        if m:
            section = m.group(1)
            if section not in SCHEMA:
                raise ConfigError(f"unknown section [{section}]", line=lineno,
                                  column=raw_line.index(section) + 1, key=section)
            continue
        if line.startswith("["):
            raise ConfigError("malformed section header", line=lineno, column=1)
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno, column=1)
        key, raw = (part.strip() for part in line.split("=", 1))
        column = raw_line.index(key) + 1 if key else 1
        if "." in key:
            sec, key = key.split(".", 1)
        elif section is None:
            raise ConfigError(f"key {key!r} outside any section", line=lineno, column=column,
                              key=key)
        else:
            sec = section
        name = f"{sec}.{key}"
        if sec not in SCHEMA or key not in SCHEMA[sec]:
            raise ConfigError(f"unknown key {name}", line=lineno, column=column, key=name)
        if name in explicit:
            raise ConfigError(f"duplicate key {name}", line=lineno, column=column, key=name)
        if not raw:
            raise ConfigError(f"missing value for {name}", line=lineno,
                              column=len(raw_line.rstrip()) + 1, key=name)
        kind = SCHEMA[sec][key][0]
        try:
            values[sec][key] = _convert(kind, raw)
        except ValueError as exc:
            raise ConfigError(f"{name}: {exc}", line=lineno,
                              column=raw_line.index(raw) + 1, key=name) from None
        explicit.add(name)
        lines[name] = lineno
    return _validate(values, explicit, lines)


def extract_embedded(text):
    """Config text recorded in the metadata block of a CSV written by the CLI."""
    found = [ln[len(CONFIG_PREFIX):] for ln in text.splitlines() if ln.startswith(CONFIG_PREFIX)]
    if not found:
        return None
    return "\n".join(found) + "\n"


def load_config(path=None):
    """Read a config file, or the config embedded in a CSV output."""
    if path is None:
        return default_config()
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    embedded = extract_embedded(text)
    return parse_config(embedded if embedded is not None else text)


def parse_mode(text):
    try:
        return ModeId.parse(text)
    except ValueError:
        raise ConfigError(f"unknown mode {text!r}") from None
