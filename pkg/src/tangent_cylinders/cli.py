"""Command-line interface.

Exit codes: 0 success / certified, 1 honest negative result, 2 usage or
input error.  The last line printed by every subcommand is a one-line JSON
summary.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

from . import bounds as bounds_mod
from .algebra import DEFAULT_TOL, TangencyClass, classify_pair
from .config_io import ConfigFormatError, dumps, export_mesh, load, save, verify
from .geometry import dist_squared_rational, line_distance, oracle_distance
from .model import Cylinder, LineParam
from .solver import Gauge, SearchSpec, extend_configuration, multi_start_search

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse {text!r} as comma-separated reals") from exc


def _seeds(args) -> list[int]:
    if getattr(args, "seeds_file", None):
        try:
            lines = Path(args.seeds_file).read_text().split()
            return [int(v) for v in lines]
        except (OSError, ValueError) as exc:
            raise UsageError(f"bad seeds file: {exc}") from exc
    starts = getattr(args, "starts", 1)
    if starts < 1:
        raise UsageError("--starts must be >= 1")
    return list(range(args.seed, args.seed + starts))


def _out(args, *lines):
    if not args.quiet:
        for line in lines:
            print(line)


def _summary(payload: dict):
    print(json.dumps(payload, sort_keys=True, separators=(",", ":")))


def _config_digest(config) -> str:
    return hashlib.sha256(dumps(config).encode()).hexdigest()


# --- subcommands -----------------------------------------------------------------


def cmd_distance(args) -> int:
    if args.input:
        config = load(args.input)
        if len(config) != 2:
            raise UsageError(f"--in file must hold exactly 2 cylinders, found {len(config)}")
        w, v = config.cylinders
    else:
        if None in (args.a, args.b, args.c, args.d):
            raise UsageError("give --a --b --c --d, or --in FILE")
        w = Cylinder(LineParam(_floats(args.a), _floats(args.b)), args.r)
        v = Cylinder(LineParam(_floats(args.c), _floats(args.d)), args.s)
    x, y = w.line, v.line
    if x.a.size != y.a.size:
        raise UsageError("the two lines live in different dimensions")
    P, Q = dist_squared_rational(x, y)
    F = P - 4.0 * Q
    rs = w.radius + v.radius
    G = P - rs * rs * Q
    dist = line_distance(x, y)
    oracle = oracle_distance(x, y)
    cls = classify_pair(w, v, args.tol)
    _out(
        args,
        f"P = {P!r}",
        f"Q = {Q!r}",
        f"F = {F!r}",
        f"G = {G!r}",
        f"formula distance = {dist!r}",
        f"oracle distance  = {oracle!r}",
        f"gap = {dist - rs!r}",
        f"class = {cls}",
    )
    _summary(
        {
            "command": "distance",
            "P": P,
            "Q": Q,
            "F": F,
            "G": G,
            "distance": dist,
            "oracle_distance": oracle,
            "gap": dist - rs,
            "class": str(cls),
        }
    )
    return EXIT_OK if cls is TangencyClass.EXTERNALLY_TANGENT else EXIT_NEGATIVE


def cmd_verify(args) -> int:
    config = load(args.input)
    report = verify(config, args.tol)
    _out(args, report.format_table())
    if not report.certified:
        _out(args, "offending pairs: " + ", ".join(f"({p.i},{p.j})" for p in report.offending))
    if args.output:
        Path(args.output).write_text(json.dumps(report.as_dict(), indent=1) + "\n")
    _summary({"command": "verify", **report.summary()})
    return EXIT_OK if report.certified else EXIT_NEGATIVE


def _report_out(args, report, command: str) -> int:
    config = report.configuration
    check = verify(config, args.tol)
    _out(args, f"status: {report.status} (seed {report.seed}, {report.iterations} iterations)")
    if report.message:
        _out(args, f"note: {report.message}")
    _out(args, check.format_table())
    if args.output:
        save(config, args.output)
        Path(str(args.output) + ".report.json").write_text(json.dumps(check.as_dict(), indent=1) + "\n")
        _out(args, f"wrote {args.output}")
    _summary(
        {
            "command": command,
            "status": str(report.status),
            "seed": report.seed,
            "n": len(config),
            "dimension": config.dimension,
            "max_gap": report.max_gap,
            "iterations": report.iterations,
            "residual_norm": report.history[-1] if report.history else None,
            "config_sha256": _config_digest(config),
        }
    )
    return EXIT_OK if report.certified else EXIT_NEGATIVE


def _spec(args, dimension: int, count: int, unit: bool) -> SearchSpec:
    try:
        return SearchSpec(
            dimension=dimension,
            count=count,
            unit=unit,
            r_min=args.r_min,
            seeds=_seeds(args),
            max_iterations=args.max_iter,
            residual_tolerance=args.tol,
            init_scale=args.init_scale,
            gauge=Gauge(args.gauge),
            stop_on_certified=args.stop_on_certified,
            workers=args.workers,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_search(args) -> int:
    if args.n < 2:
        raise UsageError("--n must be >= 2")
    spec = _spec(args, args.d, args.n, args.unit)
    return _report_out(args, multi_start_search(spec), "search")


def cmd_extend(args) -> int:
    base = load(args.base)
    spec = _spec(args, base.dimension, len(base) + 1, base.unit)
    try:
        report = extend_configuration(base, spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return _report_out(args, report, "extend")


def cmd_bounds(args) -> int:
    try:
        table = bounds_mod.bounds_table(args.d)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    d = args.d
    rows = [
        (f"Milnor-Thom D(2D-1)^(k-1), D=4, k={2 * d - 2}", table.milnor_thom),
        ("components, unit: 4*7^(2d-3)", table.component_bound_unit),
        ("components, general: 20*7^(2d-2)", table.component_bound_general),
        ("touching unit cylinders <= 4d*7^(2d-3)", table.theorem_bound_unit),
        ("touching cylinders <= 20(d+1)*7^(2d-2)", table.theorem_bound_general),
        ("parameter-count prediction", table.parameter_count_prediction),
        ("parallel family, unit", table.parallel_family_unit),
        ("parallel family, general", table.parallel_family_general),
    ]
    width = max(len(label) for label, _ in rows)
    _out(args, f"bounds in R^{d}", *(f"  {label:<{width}}  {value}" for label, value in rows))
    _summary({"command": "bounds", **table.as_dict()})
    return EXIT_OK


def cmd_export(args) -> int:
    config = load(args.input)
    if not args.output:
        raise UsageError("export needs --out")
    try:
        export_mesh(config, args.half_length, args.segments, args.output)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _out(args, f"wrote {args.output}")
    _summary(
        {
            "command": "export",
            "cylinders": len(config),
            "vertices": 2 * args.segments * len(config),
            "path": str(args.output),
        }
    )
    return EXIT_OK


# --- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="tangency tolerance in distance units")
    common.add_argument("--seed", type=int, default=0, help="first seed; starts use seed, seed+1, ...")
    common.add_argument("--seeds-file", help="file with one integer seed per line (overrides --seed/--starts)")
    common.add_argument("--output", "--out", "-o", dest="output", help="output path")
    common.add_argument("--quiet", "-q", action="store_true", help="print only the JSON summary line")
    common.add_argument("--verbose", "-v", action="store_true", help="log one line per start to stderr")

    solver_opts = argparse.ArgumentParser(add_help=False)
    solver_opts.add_argument("--starts", type=int, default=1, help="number of random starts")
    solver_opts.add_argument("--max-iter", type=int, default=200)
    solver_opts.add_argument("--init-scale", type=float, default=None)
    solver_opts.add_argument("--gauge", choices=[g.value for g in Gauge], default=Gauge.FREE.value)
    solver_opts.add_argument("--r-min", type=float, default=1.0)
    solver_opts.add_argument("--workers", type=int, default=1)
    solver_opts.add_argument("--stop-on-certified", action="store_true", help="stop at the first certified seed")

    parser = argparse.ArgumentParser(prog="tangent-cylinders", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("distance", parents=[common], help="P, Q, F, G and distances for two lines")
    p.add_argument("--a", help="slope of the first line, comma separated")
    p.add_argument("--b", help="offset of the first line")
    p.add_argument("--c", help="slope of the second line")
    p.add_argument("--d", help="offset of the second line")
    p.add_argument("--r", type=float, default=1.0, help="radius of the first cylinder")
    p.add_argument("--s", type=float, default=1.0, help="radius of the second cylinder")
    p.add_argument("--in", dest="input", help="configuration file with two cylinders")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("verify", parents=[common], help="check a configuration file")
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", parents=[common, solver_opts], help="multi-start search")
    p.add_argument("--d", type=int, required=True, help="ambient dimension")
    p.add_argument("--n", type=int, required=True, help="number of cylinders")
    kind = p.add_mutually_exclusive_group()
    kind.add_argument("--unit", dest="unit", action="store_true", default=True)
    kind.add_argument("--general", dest="unit", action="store_false")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("extend", parents=[common, solver_opts], help="add one touching cylinder")
    p.add_argument("--base", required=True)
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("bounds", parents=[common], help="print the exact upper bounds")
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("export", parents=[common], help="write a 3D triangle mesh")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--half-length", type=float, default=5.0)
    p.add_argument("--segments", type=int, default=32)
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose and not args.quiet else logging.WARNING,
        format="%(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (UsageError, ConfigFormatError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
