"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 validity violation
(L >= lambda/2), 4 verification failure, 1 any other library error.
"""

import argparse
import json
import math
import sys
from importlib import resources

import numpy as np

from . import __version__
from .conductivity import (
    bounds_for_family,
    eldredge_conductivity,
    end_correction_shift_circular,
    end_correction_shift_elliptical,
)
from .errors import ConfigError, PerfPlateError, ValidityError
from .geometry import IncidentWave, PlateScenario, validate_homogenization
from .lattice_sum import DEFAULT_TOL, lattice_s0
from .output import Table, provenance, render
from .scattering import MODELS, scenario_kr, sweep
from .scenario import load_scenario, parse_scenario
from .verify import FAULTS, SUITES, run_suites

__all__ = ["main", "build_parser", "PRESETS"]

EXIT_OK, EXIT_ERROR, EXIT_CONFIG, EXIT_VALIDITY, EXIT_VERIFY = 0, 1, 2, 3, 4
PRESETS = ("eldredge-table1", "typical-plate", "lattice-comparison")

SWEEP_COLUMNS = ["freq_hz", "abs_R", "phase_R_deg", "abs_T", "K_eff", "Re_s0", "Im_s0", "valid", "energy_defect", "L_over_lambda"]
SWEEP_UNITS = {"freq_hz": "Hz", "phase_R_deg": "deg", "K_eff": "1/m", "Re_s0": "1/m", "Im_s0": "1/m"}


# ---------------------------------------------------------------- helpers

def _load(args):
    if args.scenario and args.inline:
        raise ConfigError("give either --scenario or --inline, not both", "scenario")
    if args.scenario:
        cfg = load_scenario(args.scenario)
    elif args.inline:
        try:
            data = json.loads(args.inline)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc.msg}", "inline") from exc
        cfg = parse_scenario(data)
    else:
        raise ConfigError("a scenario is required (--scenario PATH or --inline JSON)", "scenario")
    return cfg


def _wave(cfg, args):
    wave = cfg.wave if cfg.wave is not None else IncidentWave(1000.0)
    if getattr(args, "frequency", None) is not None:
        if not args.frequency > 0:
            raise ConfigError("must be > 0", "frequency")
        wave = wave.with_frequency(args.frequency)
    return wave


def _plate(cfg, args):
    if cfg.lattice is None:
        raise ConfigError("a lattice is required for this command", "lattice")
    return PlateScenario(cfg.perforation, cfg.lattice, _wave(cfg, args), cfg.bore)


def _kr(scenario, spec):
    if spec in ("lower", "upper", "mean"):
        return scenario_kr(scenario, spec), spec
    try:
        v = float(spec)
    except ValueError:
        raise ConfigError(f"expected lower, upper, mean or a length in metres, got {spec!r}", "kr") from None
    if not (v >= 0 and math.isfinite(v)):
        raise ConfigError(f"must be a finite length >= 0, got {spec!r}", "kr")
    return v, "explicit"


def _emit(table, args):
    text = render(table, args.output)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _sweep_table(rows, command, inputs, extra=None):
    out = []
    for row in rows:
        d = row.as_dict()
        if extra:
            d.update(extra)
        out.append(d)
    return out


def _load_preset(name):
    text = resources.files("perfplate.presets").joinpath(f"{name}.json").read_text(encoding="utf-8")
    return json.loads(text)


# --------------------------------------------------------------- commands

def cmd_conductivity(args):
    cfg = _load(args)
    b = bounds_for_family(cfg.family, cfg.perforation, cfg.bore)
    row = b.as_dict()
    cols = ["family", "k_lower_m", "k_upper_m", "k_mean_m", "s_m2", "area_convention", "h_eff_m", "lprime_lower_m", "lprime_upper_m"]
    prov = provenance("conductivity", cfg.source, {"lengths": "m", "areas": "m^2"})
    return Table(cols, [row], prov), EXIT_OK


def cmd_end_correction(args):
    cfg = _load(args)
    g = cfg.perforation
    b = bounds_for_family(cfg.family, g, cfg.bore)
    if cfg.family in ("tilted_elliptical", "circular_bore") and g.theta > 0:
        shift = end_correction_shift_elliptical(g)
    elif cfg.family == "tilted_circular_opening" and g.theta > 0:
        shift = end_correction_shift_circular(g.b, g.h, g.theta)
    else:
        shift = 0.0
    row = {
        "family": cfg.family,
        "lprime_lower_m": b.lprime_lower,
        "lprime_upper_m": b.lprime_upper,
        "shift_m": shift,
        "h_eff_m": b.h_eff,
        "area_convention": b.area_convention,
    }
    prov = provenance("end-correction", cfg.source, {"lengths": "m"})
    return Table(list(row), [row], prov), EXIT_OK


def cmd_lattice_sum(args):
    cfg = _load(args)
    sc = _plate(cfg, args)
    rep = validate_homogenization(sc)
    if not rep.valid:
        raise ValidityError(f"L/lambda = {rep.ratio:.6g} is not below 1/2")
    res = lattice_s0(sc.lattice, sc.wave, args.tol, args.method)
    w, lat = sc.wave, sc.lattice
    row = {
        "freq_hz": w.frequency,
        "method": res.method,
        "Re_s0": res.s0.real,
        "Im_s0": res.s0.imag,
        "Re_s0_L": res.s0_scaled.real,
        "Im_s0_L": res.s0_scaled.imag,
        "est_error": res.est_error,
        "identity_residual": 2.0 * res.s0.imag * w.kappa * lat.cell_area * w.cos_phi - 1.0,
        "L_m": lat.spacing,
        "L_over_lambda": rep.ratio,
    }
    prov = provenance("lattice-sum", cfg.source, {"Re_s0": "1/m", "Im_s0": "1/m", "est_error": "1/m", "Re_s0_L": "1", "L_m": "m"})
    return Table(list(row), [row], prov), EXIT_OK


def cmd_reflection(args):
    cfg = _load(args)
    sc = _plate(cfg, args)
    kr, choice = _kr(sc, args.kr)
    rows = sweep(sc, [sc.wave.frequency], args.model, kr=kr, tol=args.tol, jobs=1)
    prov = provenance("reflection", cfg.source, {**SWEEP_UNITS, "K_R": "m"})
    table = Table(SWEEP_COLUMNS, _sweep_table(rows, "reflection", cfg.source), prov, {"model": args.model, "K_R_m": kr, "K_R_choice": choice})
    if rows[0].errors:
        table.summary["errors"] = "; ".join(rows[0].errors)
    if not rows[0].valid:
        return table, EXIT_VALIDITY
    return table, EXIT_OK


def _frequencies(cfg, args):
    if args.f_min is not None or args.f_max is not None:
        if args.f_min is None or args.f_max is None:
            raise ConfigError("--f-min and --f-max go together", "sweep")
        if not (0 < args.f_min <= args.f_max):
            raise ConfigError("need 0 < f_min <= f_max", "sweep")
        return [float(f) for f in np.linspace(args.f_min, args.f_max, args.n)]
    if cfg.frequencies is not None:
        return cfg.frequencies
    return [_wave(cfg, args).frequency]


def cmd_sweep(args):
    cfg = _load(args)
    sc = _plate(cfg, args)
    kr, choice = _kr(sc, args.kr)
    freqs = _frequencies(cfg, args)
    rows = sweep(sc, freqs, args.model, kr=kr, tol=args.tol, jobs=args.jobs)
    prov = provenance("sweep", cfg.source, {**SWEEP_UNITS, "K_R": "m"})
    summary = {"model": args.model, "K_R_m": kr, "K_R_choice": choice, "invalid_rows": sum(not r.valid for r in rows)}
    return Table(SWEEP_COLUMNS, _sweep_table(rows, "sweep", cfg.source), prov, summary), EXIT_OK


def _parse_ratios(text):
    if text is None:
        return None
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}", "ratios") from None
    if not vals or any(not v > 0 for v in vals):
        raise ConfigError("ratios must be positive", "ratios")
    return vals


def _verify(suites, ratios, fault, args):
    names = [s for s in suites if s != "all"] or None
    for n in names or []:
        if n not in SUITES:
            raise ConfigError(f"unknown suite {n!r} (choose from {', '.join(SUITES)})", "verify")
    reports = run_suites(names, fault=fault, ratios=_parse_ratios(ratios))
    rows = []
    for rep in reports:
        for c in rep.checks:
            rows.append({"suite": rep.name, "check": c.name, "residual": float(c.residual), "tol": float(c.tol), "passed": c.passed})
    passed = all(r.passed for r in reports)
    prov = provenance("verify", {"suites": [r.name for r in reports], "fault": fault, "ratios": ratios}, {"residual": "relative unless noted"})
    summary = {"passed": passed}
    if args.output == "json":
        summary["reports"] = [r.as_dict() for r in reports]
    table = Table(["suite", "check", "residual", "tol", "passed"], rows, prov, summary)
    return table, EXIT_OK if passed else EXIT_VERIFY


def cmd_verify(args):
    return _verify(args.suites or ["all"], args.ratios, args.fault, args)


def _reproduce_eldredge(preset, args):
    rows = []
    sc = {k: parse_scenario(v) for k, v in preset["scenarios"].items()}
    circ = sc["circular_opening"]
    bc = bounds_for_family(circ.family, circ.perforation)
    rows.append({"quantity": "k_lower", "family": circ.family, "value_m": bc.k_lower})
    rows.append({"quantity": "k_upper", "family": circ.family, "value_m": bc.k_upper})
    bore = sc["bore"]
    bb = bounds_for_family(bore.family, bore.perforation, bore.bore)
    rows.append({"quantity": "k_lower", "family": "tilted_elliptical", "value_m": bb.k_lower})
    rows.append({"quantity": "k_upper", "family": "tilted_elliptical", "value_m": bb.k_upper})
    rows.append({"quantity": "k_mean", "family": "tilted_elliptical", "value_m": bb.mean_kr})
    r, h, th = bore.bore.r, bore.bore.h, bore.bore.theta
    for f in preset["height_factors"]:
        rows.append({"quantity": f"slanted_height_x{f:g}", "family": "eldredge", "value_m": eldredge_conductivity(r, h, th, f)})
    prov = provenance("reproduce eldredge-table1", preset, {"value_m": "m"})
    return Table(["quantity", "family", "value_m"], rows, prov)


def _reproduce_typical(preset, args):
    rows = []
    summary = {}
    for label, data in preset["scenarios"].items():
        cfg = parse_scenario(data)
        scen = cfg.plate()
        per_model = {}
        for model in preset["models"]:
            res = sweep(scen, cfg.frequencies, model, jobs=args.jobs)
            per_model[model] = res
            rows.extend(_sweep_table(res, "reproduce", data, {"geometry": label, "model": model}))
        if {"order1", "order2"} <= set(per_model):
            dev = max(abs(a.result.abs_R - b.result.abs_R) / a.result.abs_R for a, b in zip(per_model["order1"], per_model["order2"]))
            summary[f"max_rel_dev_abs_R_order1_vs_order2_{label}"] = dev
    prov = provenance("reproduce typical-plate", preset, SWEEP_UNITS)
    return Table(["geometry", "model"] + SWEEP_COLUMNS, rows, prov, summary)


def _reproduce_lattices(preset, args):
    rows = []
    summary = {}
    model = preset["model"]
    for label, data in preset["scenarios"].items():
        curves = {}
        for lat_name, lat in preset["lattices"].items():
            cfg = parse_scenario({**data, "lattice": lat})
            curves[lat_name] = sweep(cfg.plate(), cfg.frequencies, model, jobs=args.jobs)
        worst_a = worst_p = 0.0
        for rr, ss in zip(curves["rectangular"], curves["staggered"]):
            a_r, a_s = rr.result.abs_R, ss.result.abs_R
            p_r, p_s = rr.result.phase_R_deg, ss.result.phase_R_deg
            da = 100.0 * (a_s - a_r) / a_r
            dp = 100.0 * (p_s - p_r) / abs(p_r)
            worst_a, worst_p = max(worst_a, abs(da)), max(worst_p, abs(dp))
            rows.append({
                "geometry": label,
                "freq_hz": rr.freq_hz,
                "abs_R_rect": a_r,
                "abs_R_stag": a_s,
                "dev_abs_R_pct": da,
                "phase_R_rect_deg": p_r,
                "phase_R_stag_deg": p_s,
                "dev_phase_R_pct": dp,
                "valid": rr.valid and ss.valid,
            })
        summary[f"max_abs_dev_abs_R_pct_{label}"] = worst_a
        summary[f"max_abs_dev_phase_R_pct_{label}"] = worst_p
    cols = ["geometry", "freq_hz", "abs_R_rect", "abs_R_stag", "dev_abs_R_pct", "phase_R_rect_deg", "phase_R_stag_deg", "dev_phase_R_pct", "valid"]
    prov = provenance("reproduce lattice-comparison", preset, {"freq_hz": "Hz", "phase": "deg", "dev": "percent of rectangular"})
    return Table(cols, rows, prov, summary)


def cmd_reproduce(args):
    preset = _load_preset(args.name)
    builder = {
        "eldredge-table1": _reproduce_eldredge,
        "typical-plate": _reproduce_typical,
        "lattice-comparison": _reproduce_lattices,
    }[args.name]
    return builder(preset, args), EXIT_OK


# ----------------------------------------------------------------- parser

def build_parser():
    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--output", choices=("csv", "json", "pretty"), default="csv", help="output format (default csv)")
    out.add_argument("--out", metavar="PATH", help="write to PATH instead of stdout")
    scen = argparse.ArgumentParser(add_help=False)
    scen.add_argument("--scenario", metavar="PATH", help="scenario JSON file")
    scen.add_argument("--inline", metavar="JSON", help="scenario given inline as JSON text")
    freq = argparse.ArgumentParser(add_help=False)
    freq.add_argument("--frequency", type=float, metavar="HZ", help="override the wave frequency")
    freq.add_argument("--tol", type=float, default=DEFAULT_TOL, help="lattice-sum tolerance on s0*L")
    scat = argparse.ArgumentParser(add_help=False)
    scat.add_argument("--model", choices=MODELS, default="order2")
    scat.add_argument("--kr", default="mean", help="lower, upper, mean or an explicit K_R in metres")
    jobs = argparse.ArgumentParser(add_help=False)
    jobs.add_argument("--jobs", type=int, default=None, help="worker processes (default PERFPLATE_JOBS or 1)")

    p = argparse.ArgumentParser(prog="perfplate", description="Rayleigh conductivity bounds and reflection by perforated plates.")
    p.add_argument("--version", action="version", version=f"perfplate {__version__}")
    p.add_argument("--verify", nargs="?", const="all", metavar="SUITES", help="run verification suites (comma-separated) and exit")
    p.add_argument("--ratios", metavar="LIST", help="h/r ratios for the fd suite, e.g. 0.5,2,8.9")
    p.add_argument("--fault", choices=FAULTS, help="inject a known fault to exercise the harness")
    p.add_argument("--output", choices=("csv", "json", "pretty"), default="json", help=argparse.SUPPRESS)
    p.add_argument("--out", metavar="PATH", help=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command")

    sub.add_parser("conductivity", parents=[scen, out], help="conductivity bounds").set_defaults(func=cmd_conductivity)
    sub.add_parser("end-correction", parents=[scen, out], help="end-correction bounds").set_defaults(func=cmd_end_correction)
    s = sub.add_parser("lattice-sum", parents=[scen, freq, out], help="lattice constant s0")
    s.add_argument("--method", choices=("ewald", "direct_accelerated"), default="ewald")
    s.set_defaults(func=cmd_lattice_sum)
    sub.add_parser("reflection", parents=[scen, freq, scat, out], help="R and T at one frequency").set_defaults(func=cmd_reflection)
    s = sub.add_parser("sweep", parents=[scen, freq, scat, jobs, out], help="R and T over a frequency grid")
    s.add_argument("--f-min", type=float, dest="f_min")
    s.add_argument("--f-max", type=float, dest="f_max")
    s.add_argument("--n", type=int, default=91)
    s.set_defaults(func=cmd_sweep)
    s = sub.add_parser("verify", parents=[out], help="self-verification suites")
    s.add_argument("suites", nargs="*", help=f"any of: {', '.join(SUITES)} (default all)")
    s.add_argument("--ratios", metavar="LIST")
    s.add_argument("--fault", choices=FAULTS)
    s.set_defaults(func=cmd_verify)
    s = sub.add_parser("reproduce", parents=[jobs, out], help="pinned reference scenarios")
    s.add_argument("name", choices=PRESETS)
    s.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.verify is not None:
            suites = [v.strip() for v in args.verify.split(",") if v.strip()]
            table, code = _verify(suites, args.ratios, args.fault, args)
        elif args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_CONFIG
        else:
            if args.command == "sweep" and args.n < 1:
                raise ConfigError("must be >= 1", "n")
            table, code = args.func(args)
        _emit(table, args)
        return code
    except ConfigError as exc:
        print(f"perfplate: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValidityError as exc:
        print(f"perfplate: validity condition violated: {exc}", file=sys.stderr)
        return EXIT_VALIDITY
    except PerfPlateError as exc:
        print(f"perfplate: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
