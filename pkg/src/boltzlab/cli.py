"""Unified command-line entry point and configuration parsing.

Subcommands: admissible, region, norm, stream, verify-bounds, simulate,
scatter, wave.  Config files are INI-style with sections [grid],
[kernel], [solver] and optional [experiment].  Rationals on the command
line and in config files are written as 'a/b', an integer, or 'inf'.

Exit codes: 0 success, 1 validation error, 2 non-convergence outcome.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .collision import build_kernel, verify_bilinear_bound
from .exponents import (
    ExponentTriplet,
    exponent_of_reciprocal,
    feasibility_scan,
    kt_admissible,
    reciprocal_of_exponent,
)
from .mild_solver import SolverConfig, picard_solve
from .phase_grid import (
    DistributionFunction,
    PhaseGrid,
    lebesgue_norm_a,
    load_snapshot,
    make_gaussian,
    make_maxwellian,
    mixed_norm_xv,
    save_snapshot,
)
from .scattering import (
    partial_scattering_integrals,
    scattering_defect,
    scattering_state,
    wave_operator,
)
from .transport import free_stream

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NONCONVERGED = 2


class CliError(Exception):
    """Validation failure mapped to exit code 1."""


import re


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # let option values like -1/2 through as arguments, not flags
        self._negative_number_matcher = re.compile(r"^-\d+(/\d+)?$|^-\d*\.\d+$")

    def error(self, message):  # argparse default exits with 2; keep 2 for non-convergence
        self.print_usage(sys.stderr)
        raise CliError(message)


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(f"not a rational: {text!r}") from exc


def _exponent_reciprocal(text: str) -> Fraction:
    try:
        return reciprocal_of_exponent(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(str(exc)) from exc


def parse_data_spec(spec: str, grid: PhaseGrid) -> DistributionFunction:
    """Build initial data from a spec like 'gaussian:amplitude=0.01,sigma_x=0.5'.

    Families: gaussian (amplitude, sigma_x, sigma_v, x0, v0) and
    maxwellian (rho, temperature, u).  Scalar x0/v0/u apply to every
    component; x0 defaults to the torus center, v0/u to zero.
    """
    kind, _, rest = spec.partition(":")
    params: dict[str, float] = {}
    if rest:
        for item in rest.split(","):
            key, _, val = item.partition("=")
            if not val:
                raise CliError(f"malformed data spec item {item!r}")
            try:
                params[key.strip()] = float(val)
            except ValueError as exc:
                raise CliError(f"malformed data spec item {item!r}") from exc
    try:
        if kind == "gaussian":
            return make_gaussian(
                grid,
                x0=[params.pop("x0", grid.x_period / 2)] * grid.dim,
                v0=[params.pop("v0", 0.0)] * grid.dim,
                sigma_x=params.pop("sigma_x"),
                sigma_v=params.pop("sigma_v"),
                amplitude=params.pop("amplitude"),
            )
        if kind == "maxwellian":
            return make_maxwellian(
                grid,
                rho=params.pop("rho"),
                u=[params.pop("u", 0.0)] * grid.dim,
                temperature=params.pop("temperature"),
            )
    except KeyError as exc:
        raise CliError(f"data spec {kind!r} missing parameter {exc}") from None
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    raise CliError(f"unknown data family {kind!r} (want gaussian or maxwellian)")


def load_config(path: str) -> tuple[PhaseGrid, dict, SolverConfig, dict]:
    """Parse an INI config into (grid, kernel section, solver config, experiment)."""
    p = Path(path)
    if not p.is_file():
        raise CliError(f"config file not found: {p}")
    cp = configparser.ConfigParser()
    try:
        cp.read(p)
        grid = PhaseGrid(
            dim=cp.getint("grid", "N"),
            x_period=cp.getfloat("grid", "L"),
            n_x=cp.getint("grid", "n_x"),
            v_max=cp.getfloat("grid", "v_max"),
            n_v=cp.getint("grid", "n_v"),
        )
        ker = {
            "gamma": _rational(cp.get("kernel", "gamma")),
            "b0": cp.getfloat("kernel", "b0", fallback=1.0),
            "n_angular": cp.getint("kernel", "angular_nodes", fallback=16),
            "epsilon": cp.get("kernel", "epsilon", fallback="auto"),
        }
        triplet = ExponentTriplet(
            _exponent_reciprocal(cp.get("solver", "q")),
            _exponent_reciprocal(cp.get("solver", "r")),
            _exponent_reciprocal(cp.get("solver", "p")),
        )
        solver = SolverConfig(
            horizon=cp.getfloat("solver", "T"),
            dt=1.0 / cp.getfloat("solver", "inv_dt") if cp.has_option("solver", "inv_dt")
            else cp.getfloat("solver", "dt"),
            picard_tol=cp.getfloat("solver", "picard_tol"),
            max_iters=cp.getint("solver", "max_iters", fallback=40),
            triplet=triplet,
            inv_a=_exponent_reciprocal(cp.get("solver", "a")),
            interp=cp.get("solver", "interp", fallback="cubic"),
        )
        experiment = dict(cp.items("experiment")) if cp.has_section("experiment") else {}
    except (configparser.Error, ValueError) as exc:
        raise CliError(f"malformed config {p}: {exc}") from exc
    return grid, ker, solver, experiment


def _kernel_from_section(grid: PhaseGrid, ker: dict):
    eps = None if str(ker["epsilon"]).strip() == "auto" else float(ker["epsilon"])
    b0 = ker["b0"]
    b = None if b0 == 1.0 else (lambda mu: b0 * np.ones_like(mu))
    return build_kernel(grid, ker["gamma"], b=b, n_angular=ker["n_angular"], epsilon=eps)


def _write_json(payload: dict, out: Optional[str]) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _summary(out_dir: Path, grid: PhaseGrid, ker: dict, solver: SolverConfig,
             extra: dict) -> None:
    kernel_dict = dict(ker)
    kernel_dict["gamma"] = str(kernel_dict["gamma"])
    kernel_dict["epsilon"] = (
        "auto" if str(kernel_dict["epsilon"]).strip() == "auto" else float(kernel_dict["epsilon"])
    )
    payload = {
        "version": __version__,
        "grid": grid.to_dict(),
        "kernel": kernel_dict,
        "solver": solver.to_dict(),
        **extra,
    }
    (out_dir / "summary.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _cmd_admissible(args) -> int:
    triplet = ExponentTriplet(
        _exponent_reciprocal(args.q),
        _exponent_reciprocal(args.r),
        _exponent_reciprocal(args.p),
    )
    report = kt_admissible(triplet, args.N)
    _write_json(report.to_dict(), args.out)
    return EXIT_OK


def _cmd_region(args) -> int:
    region = feasibility_scan(_rational(args.gamma), args.N, args.mode,
                              denominator=args.denominator)
    rows = [
        {
            "inv_p": str(pt.inv_p),
            "inv_r": str(pt.inv_r),
            "inv_q": str(pt.inv_q),
            "a": exponent_of_reciprocal(pt.inv_a),
        }
        for pt in region.points
    ]
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(fh, fieldnames=["inv_p", "inv_r", "inv_q", "a"])
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.out:
            fh.close()
    return EXIT_OK


def _cmd_norm(args) -> int:
    f = load_snapshot(args.snapshot)
    inv_r = _exponent_reciprocal(args.r)
    inv_p = _exponent_reciprocal(args.p)
    payload = {
        "snapshot": str(args.snapshot),
        "r": args.r,
        "p": args.p,
        "norm_rp": mixed_norm_xv(f, inv_r, inv_p),
    }
    if args.q is not None:
        payload["q"] = args.q
        payload["note"] = "q applies to time traces; a single snapshot has none"
    _write_json(payload, args.out)
    return EXIT_OK


def _cmd_stream(args) -> int:
    f = load_snapshot(args.snapshot)
    g = free_stream(f, args.t, method=args.method)
    save_snapshot(g, args.out)
    return EXIT_OK


def _cmd_verify_bounds(args) -> int:
    resolutions = tuple(int(s) for s in args.resolutions.split(","))
    report = verify_bilinear_bound(
        args.which,
        _rational(args.pv),
        _rational(args.qv),
        _rational(args.rv),
        dim=args.N,
        gamma=_rational(args.gamma),
        resolutions=resolutions,
        v_max=args.v_max,
        samples=args.samples,
        seed=args.seed,
        n_angular=args.angular_nodes,
    )
    _write_json(report.to_dict(), args.out)
    return EXIT_OK


def _write_traces(out_dir: Path, traj) -> None:
    with open(out_dir / "traces.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "norm_a", "norm_rp"])
        for t, na, nrp in zip(traj.times, traj.norm_a_trace.values,
                              traj.norm_rp_trace.values):
            w.writerow([f"{t:.12g}", f"{na:.16e}", f"{nrp:.16e}"])


def _write_picard(out_dir: Path, deltas, ratios, name: str = "picard.csv") -> None:
    with open(out_dir / name, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iter", "delta", "ratio"])
        for i, d in enumerate(deltas, start=1):
            r = ratios[i - 2] if i >= 2 else ""
            w.writerow([i, f"{d:.16e}", f"{r:.16e}" if r != "" else ""])


def _cmd_simulate(args) -> int:
    grid, ker, solver, experiment = load_config(args.config)
    kernel = _kernel_from_section(grid, ker)
    f0 = parse_data_spec(args.data, grid)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = picard_solve(f0, kernel, solver)
    traj = result.trajectory
    for k, snap in enumerate(traj.snapshots):
        save_snapshot(snap, out_dir / f"snap_{k:04d}.bin")
    _write_traces(out_dir, traj)
    _write_picard(out_dir, result.deltas, result.contraction_ratios)
    _summary(out_dir, grid, ker, solver, {
        "command": "simulate",
        "data": args.data,
        "seed": args.seed,
        "converged": result.converged,
        "diverged": result.diverged,
        "iterations": result.iterations,
        "experiment": experiment,
    })
    return EXIT_OK if result.converged else EXIT_NONCONVERGED


def _cmd_scatter(args) -> int:
    grid, ker, solver, experiment = load_config(args.config)
    kernel = _kernel_from_section(grid, ker)
    f0 = parse_data_spec(args.data, grid)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    # adaptive truncation: extend the horizon until the tail of the
    # scattering integral over the last quarter drops below tolerance
    cfg = solver
    result = picard_solve(f0, kernel, cfg)
    extensions = 0
    while result.converged and extensions < args.max_extensions:
        partials = partial_scattering_integrals(result, kernel, cfg)
        k_last = len(partials) - 1
        k_q3 = (3 * k_last) // 4
        tail = lebesgue_norm_a(partials[k_last] - partials[k_q3], cfg.inv_a)
        scale = max(lebesgue_norm_a(f0 + partials[k_last], cfg.inv_a), 1e-300)
        if tail <= cfg.picard_tol * scale:
            break
        cfg = replace(cfg, horizon=2 * cfg.horizon)
        extensions += 1
        result = picard_solve(f0, kernel, cfg)
    if not result.converged:
        _summary(out_dir, grid, ker, cfg, {
            "command": "scatter", "data": args.data, "seed": args.seed,
            "converged": False, "diverged": result.diverged,
            "experiment": experiment,
        })
        return EXIT_NONCONVERGED

    f_plus = scattering_state(result, kernel, cfg)
    defect = scattering_defect(result, f_plus, cfg)
    save_snapshot(f_plus, out_dir / "f_plus.bin")
    with open(out_dir / "defect.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "defect"])
        for t, d in zip(defect.times, defect.values):
            w.writerow([f"{t:.12g}", f"{d:.16e}"])
    _write_traces(out_dir, result.trajectory)
    _summary(out_dir, grid, ker, cfg, {
        "command": "scatter",
        "data": args.data,
        "seed": args.seed,
        "converged": True,
        "t_infinity": cfg.horizon,
        "extensions": extensions,
        "experiment": experiment,
    })
    return EXIT_OK


def _cmd_wave(args) -> int:
    grid, ker, solver, experiment = load_config(args.config)
    kernel = _kernel_from_section(grid, ker)
    f_plus = load_snapshot(args.fplus)
    if f_plus.grid != grid:
        raise CliError("scattering-state snapshot grid does not match the config grid")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = wave_operator(f_plus, kernel, solver)
    save_snapshot(result.f0, out_dir / "f0.bin")
    _write_picard(out_dir, result.deltas, result.contraction_ratios, name="wave_picard.csv")
    _summary(out_dir, grid, ker, solver, {
        "command": "wave",
        "fplus": str(args.fplus),
        "seed": args.seed,
        "converged": result.converged,
        "diverged": result.diverged,
        "iterations": result.iterations,
        "experiment": experiment,
    })
    return EXIT_OK if result.converged else EXIT_NONCONVERGED


def build_parser() -> _Parser:
    parser = _Parser(prog="boltzlab", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--threads", type=int, default=None,
                        help="numba thread count (default: all available)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("admissible", help="check a (q, r, p) triplet; JSON report")
    p.add_argument("--N", type=int, required=True, choices=(1, 2, 3))
    p.add_argument("--q", required=True)
    p.add_argument("--r", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_admissible)

    p = sub.add_parser(
        "region",
        help="scan the feasible (1/p, 1/r) lattice; CSV columns inv_p,inv_r,inv_q,a")
    p.add_argument("--N", type=int, required=True, choices=(2, 3))
    p.add_argument("--gamma", required=True)
    p.add_argument("--mode", required=True, choices=("equality", "strict"))
    p.add_argument("--denominator", type=int, default=120)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_region)

    p = sub.add_parser("norm", help="mixed (r, p) norm of one snapshot; JSON")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--q", default=None)
    p.add_argument("--r", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_norm)

    p = sub.add_parser("stream", help="apply the streaming group to a snapshot")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--method", default="cubic", choices=("cubic", "linear", "clamped"))
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_stream)

    p = sub.add_parser("verify-bounds",
                       help="sample bilinear gain/loss norm ratios; JSON report")
    p.add_argument("--which", required=True, choices=("gain", "loss"))
    p.add_argument("--N", type=int, required=True, choices=(2, 3))
    p.add_argument("--gamma", required=True)
    p.add_argument("--pv", required=True)
    p.add_argument("--qv", required=True)
    p.add_argument("--rv", required=True)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--resolutions", default="12,16")
    p.add_argument("--v-max", type=float, default=4.0)
    p.add_argument("--angular-nodes", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_verify_bounds)

    common = dict(help_data="data spec, e.g. gaussian:amplitude=0.01,sigma_x=0.5,sigma_v=1")
    p = sub.add_parser(
        "simulate",
        help="Picard-solve the integral equation; writes snapshots, traces.csv "
             "(t,norm_a,norm_rp), picard.csv (iter,delta,ratio), summary.json")
    p.add_argument("--config", required=True)
    p.add_argument("--data", required=True, help=common["help_data"])
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser(
        "scatter",
        help="solve and emit the scattering state and defect.csv (t,defect); "
             "the horizon doubles until the integral tail is below tolerance")
    p.add_argument("--config", required=True)
    p.add_argument("--data", required=True, help=common["help_data"])
    p.add_argument("--out", required=True)
    p.add_argument("--max-extensions", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_scatter)

    p = sub.add_parser("wave", help="invert a scattering state to its initial datum")
    p.add_argument("--config", required=True)
    p.add_argument("--fplus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_wave)
    return parser


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.threads is not None:
            import numba

            numba.set_num_threads(args.threads)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
