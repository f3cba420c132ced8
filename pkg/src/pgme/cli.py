"""Command-line front end: solve, threshold, convergence, verify and physical subcommands.

Tables go to stdout as CSV unless ``--output`` is given; ``--format json`` emits a
single document with ``meta`` and ``data`` sections.  Option values are taken
from the command line first, then from the ``--config`` TOML file (top-level
keys, overridden by a table named after the subcommand), then built-in defaults.

Exit codes: 0 success, 2 bad arguments, 3 delta above threshold, 4 no
convergence, 5 violated estimate.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .analysis import BoundViolation, convergence_study, verify_lemma_bounds
from .core import ProblemSpec, QuadratureConfig
from .physical import PhysicalParams, physical_to_gamma
from .solver import THRESHOLD_KINDS, NoConvergence, SolverConfig, ThresholdViolation, picard_solve, threshold

EXIT_BAD_ARGS = 2
EXIT_THRESHOLD = 3
EXIT_NO_CONVERGENCE = 4
EXIT_BOUND = 5

DEFAULTS = {
    "bc": "robin",
    "p": 1.0,
    "delta": 0.0,
    "gamma": None,
    "gamma_star": None,
    "tol": 1e-12,
    "max_iter": 200,
    "x_max": None,
    "grid_points": 2001,
    "format": "csv",
    "output": None,
    "force": False,
    "init": "erf",
    "kind": "chat",
    "gammas": "10,20,40,80,160,320,640,1280",
    "trials": 100,
    "seed": 0,
    "which": "robin",
}

SOLVE_JSON_SCHEMA = {
    "type": "object",
    "required": ["meta", "data"],
    "properties": {
        "meta": {
            "type": "object",
            "required": [
                "bc", "p", "delta", "gamma", "gamma_star", "tol", "max_iter",
                "grid_points", "x_max", "iterations", "residual",
            ],
            "properties": {
                "bc": {"enum": ["robin", "dirichlet", "neumann"]},
                "p": {"type": "number", "minimum": 1},
                "delta": {"type": "number", "minimum": 0},
                "gamma": {"type": ["number", "null"]},
                "gamma_star": {"type": ["number", "null"]},
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "max_iter": {"type": "integer", "minimum": 1},
                "grid_points": {"type": "integer", "minimum": 3},
                "x_max": {"type": "number", "exclusiveMinimum": 0},
                "iterations": {"type": "integer", "minimum": 1},
                "residual": {"type": "number", "minimum": 0},
                "contraction_estimate": {"type": "number", "minimum": 0},
                "y0": {"type": "number"},
                "yprime0": {"type": "number"},
                "outside_theory": {"type": "boolean"},
            },
        },
        "data": {
            "type": "object",
            "required": ["x", "y", "dy"],
            "properties": {
                "x": {"type": "array", "items": {"type": "number"}},
                "y": {"type": "array", "items": {"type": "number"}},
                "dy": {"type": "array", "items": {"type": "number"}},
            },
        },
    },
}


class UsageError(Exception):
    pass


def fmt(v: float) -> str:
    return f"{v:.17g}"


def csv_table(columns: dict) -> str:
    names = list(columns)
    rows = [",".join(names)]
    for vals in zip(*columns.values()):
        rows.append(",".join(fmt(float(v)) for v in vals))
    return "\n".join(rows) + "\n"


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_doc(meta: dict, data: dict) -> str:
    data = {k: [float(v) for v in vals] for k, vals in data.items()}
    return json.dumps({"meta": meta, "data": data}, indent=1) + "\n"


# ============================================================================
# Option resolution
# ============================================================================


def _load_config(path: Optional[str], command: str) -> dict:
    if not path:
        return {}
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    flat = {k.replace("-", "_"): v for k, v in raw.items() if not isinstance(v, dict)}
    section = raw.get(command, {})
    flat.update({k.replace("-", "_"): v for k, v in section.items()})
    unknown = set(flat) - set(DEFAULTS)
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    return flat


def _resolve(args: argparse.Namespace) -> argparse.Namespace:
    cfg = _load_config(args.config, args.command)
    for key, default in DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, cfg.get(key, default))
    return args


def _quadrature(args) -> QuadratureConfig:
    return QuadratureConfig(n_points=int(args.grid_points), x_max=args.x_max)


def _solver(args) -> SolverConfig:
    return SolverConfig(
        tol_fixed_point=float(args.tol),
        max_iter=int(args.max_iter),
        initial_guess=args.init,
        enforce_threshold=not args.force,
    )


def _spec(args) -> ProblemSpec:
    p, delta = float(args.p), float(args.delta)
    if args.bc == "robin":
        if args.gamma is None:
            raise UsageError("--gamma is required for --bc robin")
        return ProblemSpec.robin(p, delta, float(args.gamma))
    if args.bc == "neumann":
        if args.gamma_star is None:
            raise UsageError("--gamma-star is required for --bc neumann")
        return ProblemSpec.neumann(p, delta, float(args.gamma_star))
    if args.bc == "dirichlet":
        return ProblemSpec.dirichlet(p, delta)
    raise UsageError(f"unknown --bc {args.bc!r}")


def _parse_gammas(text) -> list:
    if isinstance(text, (list, tuple)):
        return [float(g) for g in text]
    try:
        return [float(g) for g in str(text).split(",") if g.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --gammas list {text!r}") from exc


# ============================================================================
# Subcommands
# ============================================================================


def cmd_solve(args) -> int:
    spec = _spec(args)
    qcfg = _quadrature(args)
    res = picard_solve(spec, qcfg, _solver(args))
    columns = {"x": res.x, "y": res.y, "dy": res.derivative}
    if args.format == "json":
        meta = {
            "bc": spec.kind,
            "p": spec.p,
            "delta": spec.delta,
            "gamma": args.gamma if spec.kind == "robin" else None,
            "gamma_star": args.gamma_star if spec.kind == "neumann" else None,
            "tol": float(args.tol),
            "max_iter": int(args.max_iter),
            "grid_points": qcfg.n_points,
            "x_max": float(res.x[-1]),
            "iterations": res.iterations,
            "residual": res.residual,
            "contraction_estimate": res.contraction_estimate,
            "y0": res.y0,
            "yprime0": res.yprime0,
            "outside_theory": res.outside_theory,
        }
        for k in ("gamma", "gamma_star"):
            if meta[k] is not None:
                meta[k] = float(meta[k])
        _emit(_json_doc(meta, columns), args.output)
    else:
        _emit(csv_table(columns), args.output)
    return 0


def cmd_threshold(args) -> int:
    gamma = None if args.gamma is None else float(args.gamma)
    if args.kind == "robin" and gamma is None:
        raise UsageError("--gamma is required for --kind robin")
    res = threshold(args.kind, float(args.p), gamma)
    if args.format == "json":
        doc = {
            "kind": res.kind,
            "p": res.p,
            "gamma": res.gamma,
            "delta_root": res.delta_root,
            "bracket": list(res.bracket),
            "gap_value": res.gap_value,
        }
        _emit(json.dumps(doc, indent=1) + "\n", args.output)
    else:
        _emit(fmt(res.delta_root) + "\n", args.output)
    return 0


def cmd_convergence(args) -> int:
    gammas = _parse_gammas(args.gammas)
    rep = convergence_study(float(args.p), float(args.delta), gammas, _quadrature(args), _solver(args))
    columns = {"gamma": rep.gammas, "error": rep.errors, "bound": rep.bound_values}
    if args.format == "json":
        meta = {"p": rep.p, "delta": rep.delta, "fitted_order": rep.fitted_order, "within_bound": rep.within_bound}
        _emit(_json_doc(meta, columns), args.output)
    else:
        _emit(csv_table(columns), args.output)
    return 0


def cmd_verify(args) -> int:
    rep = verify_lemma_bounds(float(args.p), float(args.delta), int(args.trials), seed=int(args.seed), qcfg=_quadrature(args))
    if args.format == "json":
        doc = {"p": rep.p, "delta": rep.delta, "trials": rep.trials, "min_slack": rep.slacks}
        _emit(json.dumps(doc, indent=1) + "\n", args.output)
    else:
        lines = ["item,min_slack"] + [f"{k},{fmt(v)}" for k, v in rep.slacks.items()]
        _emit("\n".join(lines) + "\n", args.output)
    return 0


def cmd_physical(args) -> int:
    params = PhysicalParams(
        k0=args.k0, rho=args.rho, c=args.c, h_coef=args.h_coef, q0=args.q0, Tf=args.Tf, T0=args.T0
    )
    value = physical_to_gamma(params, args.which)
    name = "gamma" if args.which == "robin" else "gamma_star"
    if args.format == "json":
        _emit(json.dumps({name: value, "alpha0": params.diffusivity}) + "\n", args.output)
    else:
        _emit(fmt(value) + "\n", args.output)
    return 0


# ============================================================================
# Parser
# ============================================================================


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, help="TOML file with option defaults")
    p.add_argument("--format", choices=["csv", "json"], default=None)
    p.add_argument("--output", default=None, help="write to PATH instead of stdout")
    p.add_argument("-v", "--verbose", action="store_true")


def _numerics(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--x-max", type=float, default=None)
    p.add_argument("--grid-points", type=int, default=None)
    p.add_argument("--init", choices=["erf", "one"], default=None)
    p.add_argument("--force", action="store_const", const=True, default=None,
                   help="iterate even when delta is above the contraction threshold")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pgme", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve one boundary value problem")
    s.add_argument("--bc", choices=["robin", "dirichlet", "neumann"], default=None)
    s.add_argument("--gamma", type=float, default=None)
    s.add_argument("--gamma-star", type=float, default=None)
    _numerics(s)
    _common(s)

    t = sub.add_parser("threshold", help="delta threshold of a gap function")
    t.add_argument("--kind", choices=list(THRESHOLD_KINDS), default=None)
    t.add_argument("--p", type=float, default=None)
    t.add_argument("--gamma", type=float, default=None)
    _common(t)

    c = sub.add_parser("convergence", help="Robin -> Dirichlet distance over gamma")
    c.add_argument("--gammas", default=None, help="comma-separated increasing values")
    _numerics(c)
    _common(c)

    v = sub.add_parser("verify", help="check the kernel estimates on random candidates")
    v.add_argument("--trials", type=int, default=None)
    v.add_argument("--seed", type=int, default=None)
    _numerics(v)
    _common(v)

    ph = sub.add_parser("physical", help="boundary coefficient from physical data")
    ph.add_argument("--which", choices=["robin", "neumann"], default=None)
    ph.add_argument("--k0", type=float, required=True)
    ph.add_argument("--rho", type=float, required=True)
    ph.add_argument("--c", type=float, required=True)
    ph.add_argument("--h-coef", type=float, default=None)
    ph.add_argument("--q0", type=float, default=None)
    ph.add_argument("--Tf", type=float, default=None)
    ph.add_argument("--T0", type=float, default=None)
    _common(ph)
    return parser


_COMMANDS = {
    "solve": cmd_solve,
    "threshold": cmd_threshold,
    "convergence": cmd_convergence,
    "verify": cmd_verify,
    "physical": cmd_physical,
}


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on malformed input
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        _resolve(args)
        return _COMMANDS[args.command](args)
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0
    except (UsageError, tomllib.TOMLDecodeError, OSError) as exc:
        print(f"pgme: error: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS
    except ThresholdViolation as exc:
        print(f"pgme: {exc}", file=sys.stderr)
        return EXIT_THRESHOLD
    except NoConvergence as exc:
        print(f"pgme: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except BoundViolation as exc:
        print(f"pgme: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except ValueError as exc:
        print(f"pgme: error: {exc}", file=sys.stderr)
        return EXIT_BAD_ARGS


if __name__ == "__main__":
    sys.exit(main())
