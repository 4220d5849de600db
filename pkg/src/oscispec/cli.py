"""Command-line interface.

Subcommands: solve, modes, sweep, verify, validate.  Problems come from a
built-in model name (--model, parameters via repeatable --param key=value)
or a JSON file (--problem).  Results go to CSV and/or JSON files that are
byte-identical across reruns of the same configuration.

Exit codes: 0 success (an empty spectrum is a valid answer), 1 configuration
error, 2 numerical failure, 3 verification deviation breach.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import models
from .errors import SolverError
from .oracle import (
    FDOracleConfig,
    closed_form_roots,
    fd_polynomial_eigenvalues,
    leading_frequencies,
)
from .problem import ProblemDefinition, validate
from .serialize import load_problem
from .spectrum import SolveOptions, mode_shape, resolve_step, solve_spectrum

#: default fixed integration step when neither --step nor --target-error given
DEFAULT_STEP = 1e-3
DEFAULT_TOL = 1e-10
VERIFY_MAX_DEV = 2e-3


class ConfigError(Exception):
    """Bad command-line configuration (exit code 1)."""


@dataclass
class RunConfig:
    """Everything one invocation needs: problem source, search window,
    integration control, tolerances, outputs and the optional sweep."""

    model: str | None = None
    params: dict = field(default_factory=dict)
    problem_file: str | None = None
    scan: tuple[float, float, int] | None = None
    rect: tuple[float, float, float, float, int, int] | None = None
    step: float | None = None
    target_error: float | None = None
    tol: float = DEFAULT_TOL
    path: str = "complex"
    out_dir: Path = Path(".")
    fmt: str = "both"
    sweep: tuple[str, float, float, int] | None = None
    indices: tuple[int, ...] = ()
    max_dev: float = VERIFY_MAX_DEV
    n_fd: int = 400


# ---------------------------------------------------------------------------
# number formatting (pinned so reruns are byte-identical)
# ---------------------------------------------------------------------------


def _json_num(x: float) -> str:
    return f"{x:.17g}"


def _csv_num(x: float) -> str:
    return f"{x:.10g}"


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _parse_param_value(text: str):
    if "," in text:
        return tuple(float(t) for t in text.split(",") if t != "")
    try:
        return float(text)
    except ValueError:
        return text


def _parse_colon_tuple(text: str, types, flag: str):
    parts = text.split(":")
    if len(parts) != len(types):
        raise ConfigError(f"{flag} expects {len(types)} colon-separated values, got {text!r}")
    try:
        return tuple(t(p) for t, p in zip(types, parts))
    except ValueError as exc:
        raise ConfigError(f"{flag}: {exc}") from None


def _add_source_args(sub):
    sub.add_argument("--model", help="built-in model name")
    sub.add_argument("--problem", help="JSON problem file")
    sub.add_argument(
        "--param",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="model parameter override (repeatable; comma lists allowed)",
    )


def _add_solve_args(sub):
    sub.add_argument("--scan", metavar="MIN:MAX:N", help="real-frequency scan window")
    sub.add_argument(
        "--rect",
        metavar="RE0:RE1:IM0:IM1:NR:NI",
        help="complex search rectangle of Newton seeds",
    )
    sub.add_argument("--step", type=float, help="fixed integration step")
    sub.add_argument("--target-error", type=float, help="derive the step from this local error")
    sub.add_argument("--tol", type=float, default=DEFAULT_TOL, help="root tolerance")
    sub.add_argument(
        "--path",
        choices=("complex", "real_split"),
        default="complex",
        help="reduction path",
    )
    sub.add_argument("--out", default=".", help="output directory")
    sub.add_argument("--format", choices=("csv", "json", "both"), default="both")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oscispec",
        description="Eigenvalues and mode shapes of piecewise 1-D oscillation systems",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_solve = subs.add_parser("solve", help="scan and refine the spectrum")
    _add_source_args(p_solve)
    _add_solve_args(p_solve)

    p_modes = subs.add_parser("modes", help="write mode-shape CSV files")
    _add_source_args(p_modes)
    _add_solve_args(p_modes)
    p_modes.add_argument(
        "--indices", default="1", metavar="I,J,...", help="1-based root indices"
    )

    p_sweep = subs.add_parser("sweep", help="solve across a parameter range")
    _add_source_args(p_sweep)
    _add_solve_args(p_sweep)
    p_sweep.add_argument(
        "--sweep", required=True, metavar="NAME:MIN:MAX:COUNT", help="sweep descriptor"
    )

    p_verify = subs.add_parser("verify", help="compare solver against its oracle")
    p_verify.add_argument("model", help="built-in model name")
    p_verify.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    p_verify.add_argument("--max-dev", type=float, default=VERIFY_MAX_DEV)
    p_verify.add_argument("--n-fd", type=int, default=400)

    p_val = subs.add_parser("validate", help="report model violations")
    _add_source_args(p_val)

    return parser


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "model", None) and getattr(args, "problem", None):
        raise ConfigError("give either --model or --problem, not both")
    cfg.model = getattr(args, "model", None)
    cfg.problem_file = getattr(args, "problem", None)
    if cfg.model is None and cfg.problem_file is None:
        raise ConfigError("a problem source is required: --model NAME or --problem FILE")
    for item in getattr(args, "param", []):
        if "=" not in item:
            raise ConfigError(f"--param expects KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        cfg.params[key] = _parse_param_value(value)
    if getattr(args, "scan", None):
        lo, hi, n = _parse_colon_tuple(args.scan, (float, float, int), "--scan")
        if not lo < hi or n < 2:
            raise ConfigError("--scan needs MIN < MAX and N >= 2")
        cfg.scan = (lo, hi, n)
    if getattr(args, "rect", None):
        cfg.rect = _parse_colon_tuple(
            args.rect, (float, float, float, float, int, int), "--rect"
        )
    cfg.step = getattr(args, "step", None)
    cfg.target_error = getattr(args, "target_error", None)
    if cfg.step is not None and cfg.target_error is not None:
        raise ConfigError("give --step or --target-error, not both")
    cfg.tol = getattr(args, "tol", DEFAULT_TOL)
    if cfg.tol <= 0:
        raise ConfigError("--tol must be positive")
    cfg.path = getattr(args, "path", "complex")
    cfg.out_dir = Path(getattr(args, "out", "."))
    cfg.fmt = getattr(args, "format", "both")
    if getattr(args, "sweep", None):
        name, lo, hi, count = _parse_colon_tuple(
            args.sweep, (str, float, float, int), "--sweep"
        )
        if count < 1:
            raise ConfigError("--sweep COUNT must be >= 1")
        cfg.sweep = (name, lo, hi, count)
    if getattr(args, "indices", None):
        try:
            cfg.indices = tuple(int(t) for t in args.indices.split(","))
        except ValueError:
            raise ConfigError(f"--indices expects integers, got {args.indices!r}") from None
    return cfg


# ---------------------------------------------------------------------------
# problem construction
# ---------------------------------------------------------------------------


def _load(cfg: RunConfig) -> ProblemDefinition:
    if cfg.problem_file is not None:
        if cfg.params:
            raise ConfigError("--param applies to built-in models only")
        try:
            problem = load_problem(cfg.problem_file)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot load problem file: {exc}") from None
    else:
        try:
            problem = models.build_model(cfg.model, **cfg.params)
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from None
    violations = validate(problem)
    if violations:
        raise ConfigError(
            "problem fails validation:\n  " + "\n  ".join(violations)
        )
    return problem


def _solve_options(cfg: RunConfig) -> SolveOptions:
    if cfg.scan is None and cfg.rect is None:
        raise ConfigError("nothing to search: give --scan and/or --rect")
    opts = SolveOptions(scan=cfg.scan, rect=cfg.rect, tol=cfg.tol, path=cfg.path)
    if cfg.step is not None:
        opts.step = cfg.step
    elif cfg.target_error is not None:
        opts.target_error = cfg.target_error
        opts.step = None
    else:
        opts.step = DEFAULT_STEP
    return opts


# ---------------------------------------------------------------------------
# output writers
# ---------------------------------------------------------------------------


def _write_spectrum(results, cfg: RunConfig) -> None:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    if cfg.fmt in ("json", "both"):
        lines = ["["]
        for i, r in enumerate(results):
            sep = "," if i < len(results) - 1 else ""
            lines.append(
                "  {"
                + f'"re": {_json_num(r.lam.real)}, "im": {_json_num(r.lam.imag)}, '
                + f'"residual": {_json_num(r.residual)}, "iterations": {r.iterations}'
                + "}" + sep
            )
        lines.append("]")
        (cfg.out_dir / "spectrum.json").write_text("\n".join(lines) + "\n")
    if cfg.fmt in ("csv", "both"):
        rows = ["re,im,residual"]
        for r in results:
            rows.append(
                f"{_csv_num(r.lam.real)},{_csv_num(r.lam.imag)},{_csv_num(r.residual)}"
            )
        (cfg.out_dir / "spectrum.csv").write_text("\n".join(rows) + "\n")


def _write_mode(shape, index: int, cfg: RunConfig) -> Path:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    dim = shape.values.shape[1]
    complex_cols = not np.isrealobj(shape.values) and bool(
        np.max(np.abs(shape.values.imag)) > 1e-12
    )
    header = ["y"] + [f"comp_{k + 1}" for k in range(dim)]
    if complex_cols:
        header += [f"im_comp_{k + 1}" for k in range(dim)]
    rows = [",".join(header)]
    for t in range(len(shape.ys)):
        cells = [_csv_num(float(shape.ys[t]))]
        cells += [_csv_num(float(np.real(shape.values[t, k]))) for k in range(dim)]
        if complex_cols:
            cells += [_csv_num(float(np.imag(shape.values[t, k]))) for k in range(dim)]
        rows.append(",".join(cells))
    path = cfg.out_dir / f"mode_{index:03d}.csv"
    path.write_text("\n".join(rows) + "\n")
    return path


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_solve(cfg: RunConfig) -> int:
    problem = _load(cfg)
    opts = _solve_options(cfg)
    results = solve_spectrum(problem, opts)
    _write_spectrum(results, cfg)
    print(f"{problem.name}: {len(results)} root(s) -> {cfg.out_dir}")
    return 0


def cmd_modes(cfg: RunConfig) -> int:
    problem = _load(cfg)
    opts = _solve_options(cfg)
    results = solve_spectrum(problem, opts)
    step = resolve_step(problem, opts)
    for index in cfg.indices:
        if not (1 <= index <= len(results)):
            print(
                f"mode index {index} out of range: {len(results)} root(s) found",
                file=sys.stderr,
            )
            return 1
    for index in cfg.indices:
        shape = mode_shape(problem, results[index - 1].lam, step, cfg.path)
        path = _write_mode(shape, index, cfg)
        print(f"mode {index} at lambda={results[index - 1].lam:.6g} -> {path}")
    return 0


def cmd_sweep(cfg: RunConfig) -> int:
    if cfg.model is None:
        raise ConfigError("sweep requires a built-in model (--model)")
    name, lo, hi, count = cfg.sweep
    defaults = models.model_defaults(cfg.model)
    if name not in defaults:
        raise ConfigError(
            f"model {cfg.model!r} has no parameter {name!r}; accepted: {sorted(defaults)}"
        )
    opts = _solve_options(cfg)
    values = np.linspace(lo, hi, count)
    rows = ["param_value,root_index,re,im,status"]
    for value in values:
        params = dict(cfg.params)
        params[name] = float(value)
        try:
            problem = models.build_model(cfg.model, **params)
            results = solve_spectrum(problem, opts)
        except (ValueError, SolverError) as exc:
            rows.append(f"{_csv_num(float(value))},,,,error: {exc}")
            continue
        if not results:
            rows.append(f"{_csv_num(float(value))},,,,empty")
        for i, r in enumerate(results):
            rows.append(
                f"{_csv_num(float(value))},{i + 1},"
                f"{_csv_num(r.lam.real)},{_csv_num(r.lam.imag)},ok"
            )
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.out_dir / "sweep.csv"
    path.write_text("\n".join(rows) + "\n")
    print(f"swept {cfg.model}.{name} over {count} value(s) -> {path}")
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.model not in models.ORACLE_ROUTES:
        raise ConfigError(f"model {cfg.model!r} has no oracle route")
    problem = models.build_model(cfg.model, **cfg.params)
    scan = models.SCAN_DEFAULTS[cfg.model]
    results = solve_spectrum(
        problem, SolveOptions(scan=scan, step=DEFAULT_STEP, tol=1e-12)
    )
    solver_lams = [r.lam for r in results[:3]]

    route = models.ORACLE_ROUTES[cfg.model]
    if route == "fd":
        eigs = fd_polynomial_eigenvalues(problem, FDOracleConfig(cfg.n_fd))
        oracle_lams = [complex(e) for e in leading_frequencies(np.asarray(eigs), 3)]
        route_name = f"finite differences (n_fd={cfg.n_fd})"
    else:
        params = problem.params
        roots = closed_form_roots(
            route,
            scan[0],
            scan[1],
            rho=params["rho"],
            tension=params["T"],
            length=params["l"],
            mass=params.get("m0", 1.0),
            position=params.get("position", 0.5),
        )
        oracle_lams = [1j * p for p in roots[:3]]
        route_name = "closed form"

    print(f"model {cfg.model}: solver vs {route_name}")
    print("mode  solver_re      solver_im      oracle_re      oracle_im      rel_dev    sign")
    ok = len(solver_lams) == 3 and len(oracle_lams) == 3
    for i in range(min(len(solver_lams), len(oracle_lams))):
        s, o = solver_lams[i], oracle_lams[i]
        dev = abs(abs(s) - abs(o)) / abs(o)
        sign_ok = _sign_agrees(s.real, o.real, abs(o))
        ok = ok and dev < cfg.max_dev and sign_ok
        print(
            f"{i + 1:4d}  {s.real:13.6e}  {s.imag:13.6e}  {o.real:13.6e}  "
            f"{o.imag:13.6e}  {dev:.3e}  {'ok' if sign_ok else 'MISMATCH'}"
        )
    if not ok:
        print(f"verification FAILED (max allowed deviation {cfg.max_dev:g})")
        return 3
    print(f"all deviations below {cfg.max_dev:g}")
    return 0


def _sign_agrees(a: float, b: float, scale: float) -> bool:
    neutral = 1e-9 * max(scale, 1.0)
    if abs(a) < neutral and abs(b) < neutral:
        return True
    return np.sign(a) == np.sign(b)


def cmd_validate(cfg: RunConfig) -> int:
    if cfg.problem_file is not None:
        try:
            problem = load_problem(cfg.problem_file)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot load problem file: {exc}") from None
    else:
        try:
            problem = models.build_model(cfg.model, **cfg.params)
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from None
    violations = validate(problem)
    if violations:
        print(f"{problem.name}: {len(violations)} violation(s)")
        for v in violations:
            print(f"  - {v}")
        return 1
    print(f"{problem.name}: valid")
    return 0


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            cfg = RunConfig(model=args.model, max_dev=args.max_dev, n_fd=args.n_fd)
            for item in args.param:
                key, _, value = item.partition("=")
                cfg.params[key] = _parse_param_value(value)
            return cmd_verify(cfg)
        cfg = _config_from_args(args)
        if args.command == "solve":
            return cmd_solve(cfg)
        if args.command == "modes":
            return cmd_modes(cfg)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        if args.command == "validate":
            return cmd_validate(cfg)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SolverError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
