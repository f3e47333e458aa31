"""Command-line entry point.

Commands read a flat key = value config file (see config.py), run the
requested computation, and write one delimited table (CSV or JSON).
Exit codes: 0 success, 1 convergence failure(s), 2 config error,
3 I/O error.  Errors are reported as a JSON record on stderr so scripts
can parse failures without scraping text.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import __version__
from .config import (ALLOWED_KEYS, ConfigError, RunConfig, default_output_name,
                     parse_config)
from .ensemble import Cylinder, Sphere, sweep_geometry
from .greens import pair_terms
from .model import ModelParams, PhysicalInput, cooperativity
from .solver import (ConvergenceError, SolverConfig, solve, sweep_density,
                     sweep_detuning)
from .validation import format_report, run_all

_OVERRIDE_KEYS = ("out", "format", "seed", "quiet", "plot")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _print_error("config", "arguments", message)
        raise SystemExit(2)


def _print_error(kind: str, field: str, message: str) -> None:
    record = {"error": {"kind": kind, "field": field, "message": message}}
    print(json.dumps(record), file=sys.stderr)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="collamb",
                     description="collective linewidth/shift calculator")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for command in ("solve", "sweep-detuning", "sweep-density", "pair-sweep",
                    "ensemble-sweep", "validate"):
        p = sub.add_parser(command)
        p.add_argument("--config", help="path to a key = value config file")
        p.add_argument("--out", help="output path (default <command>.<format>)")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--seed", type=int, help="RNG seed (ensemble commands)")
        p.add_argument("--quiet", action="store_true", default=None)
        if "plot" in ALLOWED_KEYS[command]:
            p.add_argument("--plot", action="store_true", default=None,
                           help="also render figures next to the output")
    return parser


def _effective_config(args) -> RunConfig:
    if args.config is not None:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = ""
    overrides = {k: getattr(args, k, None) for k in _OVERRIDE_KEYS}
    active = {k: v for k, v in overrides.items() if v not in (None, False)}
    if active:
        # drop overridden lines, then append the flag values; the full
        # config validation then applies to the merged text
        kept = []
        for line in text.splitlines():
            key = line.split("#", 1)[0].split("=", 1)[0].strip()
            if key not in active:
                kept.append(line)
        for k, v in active.items():
            kept.append(f"{k} = {'true' if v is True else v}")
        text = "\n".join(kept) + "\n"
    return parse_config(text, command=args.command)


def _model_params(cfg: RunConfig, coop: float | None = None) -> ModelParams:
    if coop is None:
        if cfg.cooperativity is not None:
            coop = cfg.cooperativity
        else:
            coop = cooperativity(PhysicalInput(number_density=cfg.number_density,
                                               wavelength=cfg.wavelength))
    return ModelParams(cooperativity=coop, detuning=cfg.detuning, rabi=cfg.rabi)


def _solver_config(cfg: RunConfig) -> SolverConfig:
    return SolverConfig(tol=cfg.tol, max_iter=cfg.max_iter, damping=cfg.damping)


_SOLVE_COLUMNS = ("cooperativity", "detuning", "gamma11", "delta11p",
                  "s_re", "s_im", "residual_norm", "iterations", "converged",
                  "branch")


def _solution_row(sol):
    return [sol.cooperativity, sol.detuning, sol.gamma11, sol.delta11p,
            sol.s.real, sol.s.imag, sol.residual_norm, sol.iterations,
            sol.converged, sol.branch]


def _run_solve(cfg: RunConfig):
    params = _model_params(cfg)
    try:
        sol = solve(params, _solver_config(cfg))
    except ConvergenceError as exc:
        sol = exc.solution      # best iterate, flagged unconverged
    return _SOLVE_COLUMNS, [_solution_row(sol)], sol.converged


def _run_sweep_detuning(cfg: RunConfig):
    params = _model_params(cfg)
    grid = np.linspace(cfg.detuning_min, cfg.detuning_max, cfg.detuning_steps)
    sols = sweep_detuning(params.cooperativity, grid, _solver_config(cfg))
    return (_SOLVE_COLUMNS, [_solution_row(s) for s in sols],
            all(s.converged for s in sols))


def _run_sweep_density(cfg: RunConfig):
    grid = np.linspace(cfg.coop_min, cfg.coop_max, cfg.coop_steps)
    sols = sweep_density(cfg.detuning, grid, _solver_config(cfg))
    return (_SOLVE_COLUMNS, [_solution_row(s) for s in sols],
            all(s.converged for s in sols))


def _run_pair_sweep(cfg: RunConfig):
    params = _model_params(cfg)
    sol = solve(params, _solver_config(cfg))
    columns = ("cooperativity", "detuning", "r", "gamma12", "delta12",
               "converged")
    rows = []
    for r in np.linspace(cfg.r_min, cfg.r_max, cfg.r_steps):
        pt = pair_terms(float(r), sol.s)
        rows.append([params.cooperativity, params.detuning, pt.r, pt.gamma12,
                     pt.delta12, sol.converged])
    return columns, rows, sol.converged


def _run_ensemble_sweep(cfg: RunConfig):
    params = _model_params(cfg)
    sol = solve(params, _solver_config(cfg))
    sizes = np.linspace(cfg.size_min, cfg.size_max, cfg.size_steps)
    if cfg.geometry == "sphere":
        family = [Sphere(float(s)) for s in sizes]
    else:
        family = [Cylinder(radius=cfg.cylinder_radius, length=float(s))
                  for s in sizes]
    results = sweep_geometry(family, sol, params, n_samples=cfg.n_samples,
                             seed=cfg.seed)
    columns = ("geometry", "size", "cooperativity", "detuning", "rabi",
               "n_samples", "seed", "rho_eff_re", "rho_eff_im", "gamma_eff",
               "delta_eff", "mc_stderr", "converged")
    rows = []
    for size, res in zip(sizes, results):
        rows.append([cfg.geometry, float(size), params.cooperativity,
                     params.detuning, params.rabi, res.n_samples, res.seed,
                     res.rho_eff.real, res.rho_eff.imag, res.gamma_eff,
                     res.delta_eff, res.mc_stderr, sol.converged])
    return columns, rows, sol.converged


def _run_validate(cfg: RunConfig):
    results = run_all()
    if not cfg.quiet:
        print(format_report(results))
    columns = ("check", "passed", "detail")
    rows = [[r.name, r.passed, r.detail] for r in results]
    return columns, rows, all(r.passed for r in results)


_RUNNERS = {
    "solve": _run_solve,
    "sweep-detuning": _run_sweep_detuning,
    "sweep-density": _run_sweep_density,
    "pair-sweep": _run_pair_sweep,
    "ensemble-sweep": _run_ensemble_sweep,
    "validate": _run_validate,
}


def _format_cell(value, precision: int) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{value + 0.0:.{precision}e}"      # +0.0 folds away -0.0
    return str(value)


def _json_cell(value, precision: int):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(f"{value + 0.0:.{precision}e}")
    return str(value)


def _write_table(path: str, fmt: str, columns, rows, precision: int) -> None:
    if fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_format_cell(v, precision) for v in row])
    else:
        payload = {
            "columns": list(columns),
            "rows": [[_json_cell(v, precision) for v in row] for row in rows],
        }
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(payload, indent=2))
            fh.write("\n")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _effective_config(args)
    except ConfigError as exc:
        _print_error("config", exc.field, exc.message)
        return 2
    except OSError as exc:
        _print_error("io", "config", str(exc))
        return 3

    try:
        columns, rows, all_ok = _RUNNERS[cfg.command](cfg)
    except ConfigError as exc:
        _print_error("config", exc.field, exc.message)
        return 2
    except ConvergenceError as exc:
        _print_error("convergence", cfg.command, str(exc))
        return 1
    except ValueError as exc:
        _print_error("config", cfg.command, str(exc))
        return 2

    out_path = default_output_name(cfg)
    try:
        _write_table(out_path, cfg.format, columns, rows, cfg.precision)
        written = [out_path]
        if cfg.plot:
            from .plots import render_plots
            written += render_plots(cfg.command, columns, rows, out_path)
    except OSError as exc:
        _print_error("io", "out", str(exc))
        return 3

    if not cfg.quiet:
        for path in written:
            print(f"wrote {path} ({len(rows)} rows)")
    if not all_ok:
        kind = "validation" if cfg.command == "validate" else "convergence"
        _print_error(kind, cfg.command, "one or more points did not converge"
                     if kind == "convergence" else "one or more checks failed")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
