"""Command-line front end: solves, convergence studies, stability, benchmarks.

Exit codes: 0 on success, 2 on configuration errors, 3 on solver failure.
Output lands in --out / the FRACTRAP_OUTDIR directory / the working
directory, with a metadata header sufficient to re-run the experiment.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .core import Grid, MethodKind, validate_order
from .problems import make_brusselator, make_linear
from .solver import (
    NewtonError,
    SolverConfig,
    convergence_study,
    grid_for,
    reference_solution,
    solve,
)
from .stability import boundary_csv_lines, boundary_locus, generating_function

try:
    from importlib.metadata import version as _version

    VERSION = _version("fractrap")
except Exception:  # pragma: no cover - source tree without install
    VERSION = "0.1.0"

METHOD_NAMES = [m.value for m in MethodKind]
PROBLEM_NAMES = ("linear", "brusselator")


class CliError(ValueError):
    """Configuration problem; maps to exit code 2."""


@dataclass
class RunSpec:
    """Everything needed to reproduce one CLI invocation."""

    subcommand: str
    problem: str = "linear"
    alpha: float = 0.5
    lam: float = -2.0
    a: float = 1.0
    mu: float = 4.0
    t0: float = 0.0
    T: float = 2.0
    y0: Optional[list] = None
    methods: list = field(default_factory=list)
    n_values: list = field(default_factory=list)
    alphas: list = field(default_factory=list)
    grading: Optional[float] = None
    n_theta: int = 1024
    output: Optional[str] = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunSpec":
        return cls(**json.loads(text))

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:12]


def _parse_methods(text: str) -> list:
    methods = []
    for name in text.split(","):
        name = name.strip()
        if name not in METHOD_NAMES:
            raise CliError(
                f"unknown method {name!r}; valid acronyms: {', '.join(METHOD_NAMES)}"
            )
        methods.append(name)
    return methods


def _parse_n_values(text: str) -> list:
    """Either a comma list '32,64,128' or a doubling range '32:2048'."""
    if ":" in text:
        lo, hi = (int(p) for p in text.split(":", 1))
        if lo < 1 or hi < lo:
            raise CliError(f"bad grid-size range {text!r}")
        out = []
        n = lo
        while n <= hi:
            out.append(n)
            n *= 2
        return out
    try:
        return [int(p) for p in text.split(",")]
    except ValueError as exc:
        raise CliError(f"bad grid-size list {text!r}") from exc


def _parse_floats(text: str) -> list:
    try:
        return [float(p) for p in text.split(",")]
    except ValueError as exc:
        raise CliError(f"bad float list {text!r}") from exc


def _build_problem(spec: RunSpec):
    validate_order(spec.alpha)
    if spec.problem == "linear":
        y0 = spec.y0 if spec.y0 is not None else [1.0, 0.0]
        m = int(spec.alpha) + 1
        return make_linear(spec.alpha, spec.lam, spec.t0, spec.T, y0[:m])
    if spec.problem == "brusselator":
        y0 = spec.y0 if spec.y0 is not None else [1.2, 2.8]
        return make_brusselator(spec.alpha, spec.a, spec.mu, y0, spec.t0, spec.T)
    raise CliError(
        f"unknown problem {spec.problem!r}; available: {', '.join(PROBLEM_NAMES)}"
    )


def _out_dir(spec: RunSpec) -> Path:
    base = spec.output or os.environ.get("FRACTRAP_OUTDIR") or "."
    path = Path(base)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _metadata_lines(spec: RunSpec, extra: dict) -> list:
    lines = [f"# fractrap={VERSION}", f"# config_hash={spec.config_hash}"]
    for key, val in extra.items():
        lines.append(f"# {key}={val}")
    lines.append(f"# spec={spec.to_json()}")
    return lines


def _fmt(x: float) -> str:
    return f"{x:.17g}"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_solve(spec: RunSpec) -> int:
    problem = _build_problem(spec)
    method = MethodKind(spec.methods[0])
    grid = grid_for(problem, method, spec.n_values[0], spec.grading)
    sol = solve(problem, method, grid)
    lines = _metadata_lines(
        spec,
        {
            "method": method.value,
            "alpha": spec.alpha,
            "grid": f"{grid.kind} N={grid.N} t0={grid.t0} T={grid.T}"
            + (f" r={grid.grading}" if grid.grading else ""),
        },
    )
    lines.append("t," + ",".join(f"y{i}" for i in range(problem.q)))
    for t, row in zip(sol.times, sol.values):
        lines.append(",".join([_fmt(t)] + [_fmt(v) for v in row]))
    path = _out_dir(spec) / f"solve_{method.value}_N{grid.N}.csv"
    path.write_text("\n".join(lines) + "\n")
    print(f"wrote {path}")
    return 0


def cmd_convergence(spec: RunSpec) -> int:
    problem = _build_problem(spec)
    study = convergence_study(
        problem,
        spec.methods,
        spec.n_values,
        grading=spec.grading,
        label=spec.problem,
    )
    header = ["N"]
    for m in spec.methods:
        header += [f"{m}_error", f"{m}_eoc"]
    lines = _metadata_lines(
        spec,
        {
            "problem": spec.problem,
            "alpha": spec.alpha,
            "reference": f"FT N={study.reference_n}",
        },
    )
    lines.append(",".join(header))
    for i, N in enumerate(spec.n_values):
        row = [str(N)]
        for m in spec.methods:
            res = study.results[MethodKind(m)]
            row.append(_fmt(res.errors[i]))
            row.append(_fmt(res.eocs[i - 1]) if i >= 1 else "")
        lines.append(",".join(row))
    path = _out_dir(spec) / f"convergence_{spec.problem}_alpha{spec.alpha}.csv"
    path.write_text("\n".join(lines) + "\n")

    # human-readable table, one row per N
    print(f"problem={spec.problem} alpha={spec.alpha} (errors at T={spec.T})")
    print("   N  " + "".join(f"{m:>12}{'EOC':>8}" for m in spec.methods))
    for i, N in enumerate(spec.n_values):
        cells = []
        for m in spec.methods:
            res = study.results[MethodKind(m)]
            cells.append(f"{res.errors[i]:>12.3e}")
            cells.append(f"{res.eocs[i - 1]:>8.3f}" if i >= 1 else f"{'':>8}")
        print(f"{N:>5} " + "".join(cells))
    print(f"wrote {path}")
    return 0


def cmd_stability(spec: RunSpec) -> int:
    out = _out_dir(spec)
    for alpha in spec.alphas:
        validate_order(alpha)
    for alpha in spec.alphas:
        for name in spec.methods:
            gf = generating_function(name, alpha)
            boundary = boundary_locus(gf, spec.n_theta)
            path = out / f"stability_{name}_alpha{alpha}.csv"
            path.write_text("\n".join(boundary_csv_lines(boundary)) + "\n")
            print(
                f"{name:>4} alpha={alpha}: sector_included="
                f"{str(boundary.sector_included).lower()}  ({path})"
            )
    return 0


def cmd_bench(spec: RunSpec) -> int:
    problem = _build_problem(spec)
    ref = reference_solution(problem, 8 * max(spec.n_values))
    path = _out_dir(spec) / f"bench_{spec.problem}_alpha{spec.alpha}.jsonl"
    records = []
    # serial on purpose: clean timings
    for name in spec.methods:
        method = MethodKind(name)
        for N in spec.n_values:
            grid = grid_for(problem, method, N, spec.grading)
            tic = time.perf_counter()
            sol = solve(problem, method, grid)
            seconds = time.perf_counter() - tic
            err = float(np.max(np.abs(sol.values[-1] - ref)))
            records.append(
                {
                    "method": name,
                    "N": N,
                    "alpha": spec.alpha,
                    "problem": spec.problem,
                    "error": err,
                    "seconds": seconds,
                    "config_hash": spec.config_hash,
                }
            )
            print(f"{name:>4} N={N:<6} error={err:.3e} seconds={seconds:.3f}")
    path.write_text("\n".join(json.dumps(r, sort_keys=True) for r in records) + "\n")
    print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_common(p):
    p.add_argument("--problem", default="linear", help="linear | brusselator")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--lambda", dest="lam", type=float, default=-2.0)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=4.0)
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--T", type=float, default=2.0)
    p.add_argument("--y0", default=None, help="comma-separated initial data")
    p.add_argument(
        "--grading", type=float, default=None, help="PIG exponent (default 2/alpha)"
    )
    p.add_argument("--out", default=None, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fractrap",
        description="Implicit second-order solvers for Caputo fractional IVPs",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("solve", help="integrate once and dump the trajectory")
    _add_common(p)
    p.add_argument("--method", default="FT")
    p.add_argument("--N", default="256")

    p = sub.add_parser("convergence", help="error/EOC table over a doubling ladder")
    _add_common(p)
    p.add_argument("--methods", default=",".join(METHOD_NAMES))
    p.add_argument("--N", default="32:2048")

    p = sub.add_parser("stability", help="boundary loci and stability verdicts")
    p.add_argument("--methods", default="PIU,FT,NG,FBDF")
    p.add_argument("--alphas", default="0.3,0.5,0.7,0.9")
    p.add_argument("--n-theta", type=int, default=1024)
    p.add_argument("--out", default=None)

    p = sub.add_parser("bench", help="error-versus-time records (JSON lines)")
    _add_common(p)
    p.add_argument("--methods", default=",".join(METHOD_NAMES))
    p.add_argument("--N", default="256,512,1024")
    return parser


def _spec_from_args(args) -> RunSpec:
    if args.subcommand == "stability":
        return RunSpec(
            subcommand="stability",
            methods=_parse_methods(args.methods),
            alphas=_parse_floats(args.alphas),
            n_theta=args.n_theta,
            output=args.out,
        )
    methods = (
        _parse_methods(args.method)
        if args.subcommand == "solve"
        else _parse_methods(args.methods)
    )
    return RunSpec(
        subcommand=args.subcommand,
        problem=args.problem,
        alpha=args.alpha,
        lam=args.lam,
        a=args.a,
        mu=args.mu,
        t0=args.t0,
        T=args.T,
        y0=_parse_floats(args.y0) if args.y0 else None,
        methods=methods,
        n_values=_parse_n_values(args.N),
        grading=args.grading,
        output=args.out,
    )


_COMMANDS = {
    "solve": cmd_solve,
    "convergence": cmd_convergence,
    "stability": cmd_stability,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        spec = _spec_from_args(args)
        return _COMMANDS[spec.subcommand](spec)
    except NewtonError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3
    except (CliError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:  # pragma: no cover - console script shim
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
