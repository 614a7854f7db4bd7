"""Command-line front end.

Every subcommand writes one or more CSV files into ``--out``. Each file
starts with ``#`` metadata lines holding the package version, the command
and the fully resolved configuration, so ``--config <that csv>`` reproduces
it byte for byte.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import tempfile
import warnings

from . import __version__
from .config import CONFIG_PREFIX, load_config, parse_mode
from .csl import (CslParams, csl_heating_extended, csl_heating_pointlike, exclusion_bound,
                  expected_power)
from .errors import ConfigError, PhysicsError
from .modes import MODE_ORDER, equilibrium, lamb_dicke, mode_spectrum, system_flags
from .noise import discrimination_report, electrical_heating
from .readout import plan_readout
from .scan import ScanVariable, frequency_table, run_scan
from .trap import POLYNOMIAL_VALID_Q, mathieu_params, secular_frequencies, stability_boundaries, \
    stability_classify

MODE_CHOICES = [m.value for m in MODE_ORDER]
FIGURE_SCANS = (ScanVariable.V_END, ScanVariable.V_RF, ScanVariable.N_RINGS,
                ScanVariable.MASS_RATIO, ScanVariable.CHARGE_RATIO)


def _col(mode):
    return mode.value.replace("-", "_")


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(command, config, header, rows):
    buf = io.StringIO()
    buf.write(f"# csltrap {__version__}\n")
    buf.write(f"# command: {command}\n")
    for line in config.dump().splitlines():
        buf.write(CONFIG_PREFIX + line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def write_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", suffix=".csv", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, config, name, header, rows):
    path = os.path.join(args.out, name)
    write_atomic(path, render_csv(args.command, config, header, rows))
    print(path)
    return path


def _selected_modes(args):
    return [parse_mode(args.mode)] if args.mode else list(MODE_ORDER)


def _warn_q(system):
    for label, ion in (("ion1", system.ion1), ("ion2", system.ion2)):
        q = mathieu_params(ion, system.trap).q
        if abs(q) > POLYNOMIAL_VALID_Q:
            print(f"warning: {label} has |q| = {abs(q):.3g} > {POLYNOMIAL_VALID_Q:g}; "
                  "stability edges are extrapolated", file=sys.stderr)


def _analysis(system):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return equilibrium(system), mode_spectrum(system)


# subcommands ------------------------------------------------------------

def cmd_stability(args, config):
    system = config.system()
    rows = []
    for label, ion in (("ion1", system.ion1), ("ion2", system.ion2)):
        p = mathieu_params(ion, system.trap)
        a0, b1 = stability_boundaries(p.q)
        verdict = stability_classify(p)
        try:
            wz, wr = secular_frequencies(ion, system.trap)
        except PhysicsError:
            wz, wr = math.sqrt(2 * ion.charge * system.trap.kappa * system.trap.v_end
                               / (ion.mass * system.trap.z0**2)), None
        rows.append([label, p.a, p.q, a0, b1, verdict.stable, verdict.reason.value, wz, wr])
    _emit(args, config, "stability.csv",
          ["ion", "a", "q", "a0_edge", "b1_edge", "stable", "reason", "omega_z", "omega_r"], rows)
    flags = system_flags(system)
    _emit(args, config, "two_ion_flags.csv", list(flags), [list(flags.values())])
    return 0


def cmd_modes(args, config):
    system = config.system()
    eq, sp = _analysis(system)
    K = sp.stiffness
    entries = [("z_eq1", eq.z_eq1), ("z_eq2", eq.z_eq2), ("separation", eq.separation)]
    entries += [(k, getattr(K, k)) for k in ("K11", "K12", "K22", "K33", "K34", "K44")]
    _emit(args, config, "equilibrium.csv", ["quantity", "value"], entries)
    rows = []
    for m in sp:
        eta = lamb_dicke(sp, m.id, config.wavelength(), system.ion1.mass)
        rows.append([m.id.value, m.omega, m.omega / (2 * math.pi), m.eigvec[0], m.eigvec[1],
                     m.degeneracy, eta])
    _emit(args, config, "modes.csv",
          ["mode", "omega", "freq_hz", "w1", "w2", "degeneracy", "eta"], rows)
    return 0


def cmd_csl_heating(args, config):
    system = config.system()
    eq, sp = _analysis(system)
    lam = config["csl"]["lambda"]
    both = config["csl"]["both_radial"]
    rows = []
    for mode in _selected_modes(args):
        for rc in config.rc_grid():
            params = CslParams(lam, float(rc))
            point = csl_heating_pointlike(system, eq, sp, params, mode, both)
            ext = csl_heating_extended(system, eq, sp, params, mode, config.orientation(), both)
            ratio = ext.power / point.power if point.power != 0 else None
            rows.append([mode.value, float(rc), point.power, ext.power, ext.quanta_rate, ratio])
    _emit(args, config, "csl_heating.csv",
          ["mode", "r_c", "p_pointlike", "p_extended", "quanta_rate_extended",
           "extended_over_pointlike"], rows)
    return 0


def _write_bounds(args, config, system, eq, sp, modes, prefix="bounds"):
    c = config["csl"]
    for mode in modes:
        p_exp = expected_power(sp[mode].omega, c["tau_s"], c["quanta_fraction"])
        curve = exclusion_bound(system, eq, sp, mode, config.rc_grid(), p_exp,
                                config.orientation(), c["both_radial"])
        for rc in curve.omitted:
            print(f"warning: {mode.value}: no heating at r_C = {rc!r}; point omitted",
                  file=sys.stderr)
        rows = [[float(r), float(lam)] for r, lam in zip(curve.r_c, curve.lambda_upper)]
        _emit(args, config, f"{prefix}_{_col(mode)}.csv", ["r_c", "lambda_upper"], rows)


def cmd_bounds(args, config):
    system = config.system()
    eq, sp = _analysis(system)
    _write_bounds(args, config, system, eq, sp, _selected_modes(args))
    return 0


def cmd_noise_heating(args, config):
    system = config.system()
    eq, sp = _analysis(system)
    projected = config["noise"]["mode_projected"]
    params = CslParams(config["csl"]["lambda"], config["csl"]["lambda_rel_rc"])
    report = discrimination_report(system, eq, sp, config.noise(), params,
                                   config.orientation(), projected)
    wanted = set(_selected_modes(args))
    rows = []
    for r in report:
        if r["mode"] not in wanted:
            continue
        p_e = electrical_heating(system, sp, config.noise(), r["mode"], projected)
        rows.append([r["mode"].value, r["p_csl"], r["p_electric"], p_e.quanta_rate, r["ratio"],
                     r["csl_charge"], r["csl_mass"], r["electric_charge"], r["electric_mass"]])
    _emit(args, config, "noise_heating.csv",
          ["mode", "p_csl", "p_electric", "quanta_rate_electric", "csl_over_electric",
           "csl_charge_exponent", "csl_mass_exponent", "electric_charge_exponent",
           "electric_mass_exponent"], rows)
    return 0


def cmd_readout(args, config):
    system = config.system()
    _, sp = _analysis(system)
    r = config["readout"]
    rows = []
    for mode in _selected_modes(args):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            plan = plan_readout(sp, mode, config.wavelength(), system.ion1.mass, config.omega0(),
                                r["min_discrimination"], r["strict"])
        rows.append([mode.value, plan.eta, plan.omega0, plan.tau_read, plan.p_signal,
                     plan.p_false, plan.discrimination, plan.feasible])
    _emit(args, config, "readout.csv",
          ["mode", "eta", "omega0", "tau_read", "p_signal", "p_false", "discrimination",
           "feasible"], rows)
    return 0


def scan_table(spec, rows):
    var = spec.variable.value
    header = [var, "r_c", "stable_1", "stable_2", "aligned", "soft_mode",
              "omega_1z", "omega_1r", "omega_2z", "omega_2r"]
    header += [f"omega_{_col(m)}" for m in MODE_ORDER]
    header += [f"lambda_rel_{_col(m)}" for m in MODE_ORDER]
    header += [f"eta_{_col(m)}" for m in MODE_ORDER]
    out = []
    for row in rows:
        f = row.flags
        single = list(row.single_ion) if row.single_ion else [None] * 4
        r_c = None if isinstance(row.r_c, float) and math.isnan(row.r_c) else row.r_c
        line = [row.value, r_c, f["stable_1"], f["stable_2"], f["aligned"], f["soft_mode"]]
        line += single
        line += [row.omegas.get(m) for m in MODE_ORDER]
        line += [row.lambda_rel.get(m) for m in MODE_ORDER]
        line += [row.eta.get(m) for m in MODE_ORDER]
        out.append(line)
    return header, out


def _spec_for(config, variable):
    spec = config.scan_spec(variable)
    if config["scan"]["full_curve"]:
        from dataclasses import replace
        spec = replace(spec, base=replace(spec.base, r_c_eval=tuple(map(float, config.rc_grid()))))
    return spec


def _check_v_rf_monotone(rows, reference):
    """Report alignment recovering while V_RF decreases from the reference."""
    lost = False
    for row in sorted((r for r in rows if r.value <= reference), key=lambda r: -r.value):
        if not row.flags["aligned"]:
            lost = True
        elif lost:
            print(f"warning: alignment recovers at v_rf = {row.value!r} below a misaligned point",
                  file=sys.stderr)
            return False
    return True


def cmd_scan(args, config):
    spec = _spec_for(config, None)
    rows = run_scan(spec, workers=args.workers)
    if spec.variable is ScanVariable.V_RF:
        _check_v_rf_monotone(rows, config.trap().v_rf)
    header, table = scan_table(spec, rows)
    _emit(args, config, f"scan_{spec.variable.value}.csv", header, table)
    return 0


def cmd_reproduce_figures(args, config):
    system = config.system()
    eq, sp = _analysis(system)
    _write_bounds(args, config, system, eq, sp, list(MODE_ORDER))
    for variable in FIGURE_SCANS:
        spec = _spec_for(config, variable.value)
        rows = run_scan(spec, workers=args.workers)
        if variable is ScanVariable.V_RF:
            _check_v_rf_monotone(rows, config.trap().v_rf)
        header, table = scan_table(spec, rows)
        _emit(args, config, f"scan_{variable.value}.csv", header, table)
    spec = _spec_for(config, ScanVariable.V_END.value)
    header, table = scan_table(spec, frequency_table(spec))
    drop = {"r_c"} | {h for h in header if h.startswith(("lambda_rel_", "eta_"))}
    keep = [i for i, h in enumerate(header) if h not in drop]
    _emit(args, config, "frequencies_v_end.csv", [header[i] for i in keep],
          [[row[i] for i in keep] for row in table])
    return 0


COMMANDS = {
    "stability": (cmd_stability, "single-ion Mathieu verdicts and two-ion flags"),
    "modes": (cmd_modes, "equilibrium, stiffness matrix, normal modes, Lamb-Dicke table"),
    "csl-heating": (cmd_csl_heating, "per-mode CSL heating, point-like and extended"),
    "bounds": (cmd_bounds, "collapse-rate exclusion curve per mode"),
    "noise-heating": (cmd_noise_heating, "electric-noise heating and discrimination report"),
    "readout": (cmd_readout, "sideband readout plan per mode"),
    "scan": (cmd_scan, "one-dimensional parameter sweep"),
    "reproduce-figures": (cmd_reproduce_figures, "bounds, all sweeps and the frequency table"),
}


def build_parser():
    parser = argparse.ArgumentParser(prog="csltrap", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"csltrap {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="config file, or a CSV previously written by this tool")
    common.add_argument("--out", metavar="DIR", default=".", help="output directory")
    common.add_argument("--mode", choices=MODE_CHOICES, help="restrict to one mode")
    common.add_argument("--rc-min", type=float)
    common.add_argument("--rc-max", type=float)
    common.add_argument("--rc-points", type=int)
    common.add_argument("--tau", type=float, help="readout interval for P_exp, s")
    common.add_argument("--lambda-rel-rc", type=float, help="r_C at which scans compare bounds")
    common.add_argument("--full-curve", action="store_true",
                        help="scans: emit the bound ratio over the whole r_C grid")
    common.add_argument("--mode-projected", action="store_true",
                        help="noise: weight ion pairs by mode eigenvector components")
    common.add_argument("--strict-paper-formulas", action="store_true",
                        help="readout: use the carrier prefactor with a square root")
    common.add_argument("--variable", choices=[v.value for v in ScanVariable])
    common.add_argument("--workers", type=int, default=1, help="scan worker processes")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, (_fn, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text, description=help_text)
    return parser


def resolve_config(args):
    config = load_config(args.config)
    overrides = {}
    for flag, key in (("rc_min", "csl__rc_min"), ("rc_max", "csl__rc_max"),
                      ("rc_points", "csl__rc_points"), ("tau", "csl__tau_s"),
                      ("lambda_rel_rc", "csl__lambda_rel_rc"), ("variable", "scan__variable")):
        value = getattr(args, flag)
        if value is not None:
            overrides[key] = value
    if args.full_curve:
        overrides["scan__full_curve"] = True
    if args.mode_projected:
        overrides["noise__mode_projected"] = True
    if args.strict_paper_formulas:
        overrides["readout__strict"] = True
    return config.replace(**overrides) if overrides else config


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.workers < 1:
        parser.error("--workers must be at least 1")
    try:
        config = resolve_config(args)
        system = config.system()
        _warn_q(system)
        return COMMANDS[args.command][0](args, config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except PhysicsError as exc:
        print(f"{args.command}: {exc.code}: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # constructor-level validation of configured values
        print(f"config error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
