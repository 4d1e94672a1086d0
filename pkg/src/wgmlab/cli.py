"""Command-line interface.

    wgmlab modes     -c paper.cfg
    wgmlab perturb   -c paper.cfg
    wgmlab scan      -c paper.cfg --axis y --range -10:10:0.1 --csv scan.csv
    wgmlab gain      -c paper.cfg --json gain.json
    wgmlab threshold -c paper.cfg
    wgmlab llcurve   -c paper.cfg --range 1e7:1e13:log121 --csv ll.csv
    wgmlab report    -c paper.cfg --paper --json report.json
    wgmlab sweep     -c paper.cfg --param qd.gamma_hom_GHz=2.5:2500:log25 --observe threshold_total

Exit status: 0 success, 1 configuration error, 2 numerical or I/O failure.
A bare config name that does not exist on disk (paper.cfg, cryo.cfg) is
looked up among the bundled configs.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import report as rp
from .config import ConfigError, RunConfig, parse_config
from .laser import NumericalError
from .output import csv_text, emit_plot_data, write_atomic, write_json

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2

# flags whose values may legitimately start with '-'
_VALUE_FLAGS = ("--range", "--param")


class UsageError(ConfigError):
    pass


def parse_range(text: str) -> np.ndarray:
    """'start:stop:step' (linear, inclusive) or 'start:stop:logN' (N log-spaced points)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"range {text!r} must be start:stop:step or start:stop:logN")
    try:
        start, stop = float(parts[0]), float(parts[1])
    except ValueError:
        raise UsageError(f"range {text!r}: start and stop must be numbers") from None
    if start > stop:
        raise UsageError(f"range {text!r}: start must not exceed stop")
    step = parts[2].strip()
    if step.startswith("log"):
        try:
            count = int(step[3:])
        except ValueError:
            raise UsageError(f"range {text!r}: log step must look like log25") from None
        if count < 2 or start <= 0:
            raise UsageError(f"range {text!r}: log spacing needs >= 2 points and start > 0")
        return np.geomspace(start, stop, count)
    try:
        dx = float(step)
    except ValueError:
        raise UsageError(f"range {text!r}: step must be a number") from None
    if not dx > 0:
        raise UsageError(f"range {text!r}: step must be positive")
    count = int(round((stop - start) / dx))
    if not np.isclose(start + count * dx, stop, rtol=0, atol=1e-9 * max(1.0, abs(stop))):
        raise UsageError(f"range {text!r}: (stop - start) is not a multiple of step")
    return np.linspace(start, stop, count + 1)


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        write_atomic(path, text)


def _scalars_json(path: str, scalars: dict, **extra) -> None:
    payload = {"scalars": scalars}
    payload.update(extra)
    write_json(path, payload)


def _print_scalars(scalars: dict) -> None:
    sys.stdout.write(rp.Report(scalars=scalars).to_text())


def cmd_modes(cfg: RunConfig, args) -> None:
    scalars, _, mode = rp.mode_scalars(cfg)
    if cfg.has("loading"):
        scalars.update(rp.loading_scalars(cfg, mode))
    _print_scalars(scalars)
    if args.json:
        _scalars_json(args.json, scalars)


def cmd_perturb(cfg: RunConfig, args) -> None:
    if not (cfg.has("prism") or cfg.has("sample")):
        raise ConfigError(f"{cfg.source}: perturb needs a [prism] or [sample] section")
    scalars, sphere, mode = rp.mode_scalars(cfg)
    out = {k: scalars[k] for k in ("n_eff", "kappa_per_um", "decay_length_nm")}
    out.update(rp.perturbation_scalars(cfg, sphere, mode))
    if cfg.has("loading"):
        out.update(rp.loading_scalars(cfg, mode))
    _print_scalars(out)
    if args.json:
        _scalars_json(args.json, out)


def cmd_scan(cfg: RunConfig, args) -> None:
    grid = parse_range(args.range) if args.range else rp.default_scan_grid()
    wavelength = None
    if args.at_mode:
        wavelength = rp.build_mode(cfg, rp.build_sphere(cfg)).wavelength
    profile, mode = rp.scan(cfg, args.axis, grid, wavelength)
    rows = list(profile.rows())
    try:
        width = profile.fwhm
    except ValueError:
        width = None
    params = {
        "axis": args.axis,
        "wavelength_um": mode.wavelength,
        "l": mode.index.l,
        "polar_order": mode.index.polar_order,
        "kappa_per_um": mode.kappa,
        "fwhm_um": width,
        "multi_peak": profile.multi_peak,
    }
    if args.csv:
        emit_plot_data("scan", rows, args.csv, params)
        _print_scalars(params)
    else:
        sys.stdout.write(csv_text(("position_um", "coupling", "broadening_GHz", "shift_GHz"), rows))
    if args.json:
        write_json(args.json, params)


def cmd_gain(cfg: RunConfig, args) -> None:
    cfg.require("qd")
    fsr = None
    if cfg.has("sphere"):
        _, _, mode = rp.mode_scalars(cfg)
        fsr = mode.fsr
    scalars, budget = rp.gain_scalars(cfg, fsr)
    rep = rp.Report(scalars=scalars, pump_budget=budget)
    sys.stdout.write(rep.to_text())
    if args.json:
        _scalars_json(args.json, scalars, pump_budget=budget)


def cmd_threshold(cfg: RunConfig, args) -> None:
    cfg.require("qd", "cqed")
    _, sphere, mode = rp.mode_scalars(cfg)
    gain, _ = rp.gain_scalars(cfg, mode.fsr)
    scalars = rp.threshold_scalars(cfg, sphere, mode, gain)
    _print_scalars(scalars)
    if args.json:
        _scalars_json(args.json, scalars)


def cmd_llcurve(cfg: RunConfig, args) -> None:
    grid = None
    if args.range:
        rates = parse_range(args.range)
        grid = rates if rates[0] == 0 else np.concatenate(([0.0], rates))
    curve, params = rp.llcurve_from_config(cfg, grid)
    rows = list(curve.rows())
    if args.csv:
        emit_plot_data("llcurve", rows, args.csv, params)
        _print_scalars(params)
    else:
        sys.stdout.write(csv_text(("pump_rate_per_s", "n_mean", "rho"), rows))
    if args.json:
        write_json(args.json, params)


def cmd_report(cfg: RunConfig, args) -> None:
    rep = rp.design_report(cfg, paper=args.paper)
    sys.stdout.write(rep.to_text())
    if args.json:
        write_atomic(args.json, rep.to_json())


def run_sweep(cfg: RunConfig, param: str, observe: str) -> list[tuple[float, object]]:
    if "=" not in param:
        raise UsageError(f"--param {param!r} must look like section.key=start:stop:step")
    path, spec = param.split("=", 1)
    values = parse_range(spec)
    cfg.get(path)  # unknown section/key -> error before any work
    rows = []
    for v in values:
        cell = cfg.with_value(path, float(v))
        scalars, _ = rp.collect_scalars(cell)
        if observe not in scalars:
            raise UsageError(
                f"observable {observe!r} not produced by this config; available: {', '.join(sorted(scalars))}"
            )
        rows.append((float(v), scalars[observe]))
    return rows


def cmd_sweep(cfg: RunConfig, args) -> None:
    rows = run_sweep(cfg, args.param, args.observe)
    path = args.param.split("=", 1)[0]
    _emit(csv_text((path, args.observe), rows), args.csv)


COMMANDS = {
    "modes": (cmd_modes, "mode structure: N_eff, l, FSR, kappa, volume"),
    "perturb": (cmd_perturb, "Fresnel coefficients, shift/broadening, loading"),
    "scan": (cmd_scan, "synthetic mesa alignment scan"),
    "gain": (cmd_gain, "QD ensemble widths and pump budget"),
    "threshold": (cmd_threshold, "cavity-QED threshold parameters"),
    "llcurve": (cmd_llcurve, "steady-state photon number vs pump rate"),
    "report": (cmd_report, "full design report"),
    "sweep": (cmd_sweep, "sweep one config parameter and record an observable"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wgmlab", description="WGM microsphere / quantum-dot laser design toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("-c", "--config", required=True, help="INI or JSON run configuration")
        p.add_argument("--json", metavar="PATH", help="also write results as JSON")
        if name in ("scan", "llcurve", "sweep"):
            p.add_argument("--csv", metavar="PATH", help="write CSV here instead of stdout")
        if name in ("scan", "llcurve"):
            p.add_argument("--range", metavar="A:B:STEP", help="grid, e.g. -10:10:0.1 or 1e7:1e13:log61")
        if name == "scan":
            p.add_argument("--axis", choices=("y", "z"), default="y")
            p.add_argument("--at-mode", action="store_true", help="use the mode wavelength instead of the probe")
        if name == "report":
            p.add_argument("--paper", action="store_true", help="compare against published values")
        if name == "sweep":
            p.add_argument("--param", required=True, metavar="SECTION.KEY=A:B:STEP")
            p.add_argument("--observe", required=True, metavar="SCALAR")
    return parser


def _normalize_argv(argv: list[str]) -> list[str]:
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(_normalize_argv(argv))
    func = COMMANDS[args.command][0]
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            cfg = parse_config(args.config)
            func(cfg, args)
    except ConfigError as exc:
        print(f"wgmlab: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"wgmlab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"wgmlab: cannot write output: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, NotImplementedError) as exc:
        print(f"wgmlab: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
