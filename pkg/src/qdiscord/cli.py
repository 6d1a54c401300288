"""Command-line frontend.

Subcommands: compute, oracle, validate, dynamics, transition, surface.
Stdout is line-oriented `key: value`; numbers print with 12 significant
figures and CSV files with 17.  Exit codes: 0 success, 1 parse error,
2 domain/physicality error, 3 unsupported size, 4 I/O error.  Every
command is deterministic given its flags and seed.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .discord import (
    ORACLE_MAX_QUBITS,
    OracleConfig,
    closed_form_discord,
    oracle_discord,
)
from .dynamics import discord_trajectory, transition_point, write_trajectory_csv
from .errors import InvalidStateError, UnsupportedSizeError
from .states import FamilyCoefficients, random_physical, spectrum_closed_form
from .surface import export_mesh, extract_isosurface, sample_field

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_DOMAIN = 2
EXIT_SIZE = 3
EXIT_IO = 4

#: Largest acceptable oracle-vs-closed-form gap per register size.
VALIDATION_THRESHOLDS = {2: 5e-4, 3: 5e-4, 4: 1e-3, 5: 2e-3}


class _CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    """argparse that reports bad flags as exit code 1 instead of 2."""

    def error(self, message):
        raise _CliError(EXIT_PARSE, message)


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _parse_state(text: str) -> FamilyCoefficients:
    try:
        return FamilyCoefficients.parse(text)
    except ValueError as exc:
        raise _CliError(EXIT_PARSE, str(exc)) from exc


def _require_physical(fc: FamilyCoefficients):
    min_eig = spectrum_closed_form(fc).min_eigenvalue()
    if min_eig < -1e-12:
        raise _CliError(
            EXIT_DOMAIN, f"unphysical: min eigenvalue < 0 ({min_eig:.6g})"
        )


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0.0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _odd_resolution(text: str) -> int:
    value = int(text)
    if value < 3 or value % 2 == 0:
        raise argparse.ArgumentTypeError(f"resolution must be odd and >= 3, got {value}")
    return value


def cmd_compute(args) -> int:
    fc = _parse_state(args.state)
    _require_physical(fc)
    report = closed_form_discord(fc)
    print(f"state: {args.state}")
    print(f"category: {report.category.value}")
    print("physical: true")
    print(f"xi: {_fmt(report.xi)}")
    print(f"c_max: {_fmt(report.c_max)}")
    print(f"discord_bits: {_fmt(report.value_bits)}")
    return EXIT_OK


def _run_oracle(fc, restarts, seed, max_iters, tol):
    if fc.num_qubits > ORACLE_MAX_QUBITS:
        raise _CliError(
            EXIT_SIZE, f"oracle supports at most {ORACLE_MAX_QUBITS} qubits"
        )
    _require_physical(fc)
    config = OracleConfig(restarts=restarts, seed=seed, max_iters=max_iters, tol=tol)
    return oracle_discord(fc, config)


def cmd_oracle(args) -> int:
    fc = _parse_state(args.state)
    result = _run_oracle(fc, args.restarts, args.seed, args.max_iters, args.tol)
    closed = closed_form_discord(fc)
    print(f"state: {args.state}")
    print(f"closed_form_bits: {_fmt(closed.value_bits)}")
    print(f"oracle_bits: {_fmt(result.value_bits)}")
    print(f"gap_bits: {_fmt(result.gap_to_closed_form)}")
    print(f"restarts: {result.restart_count}")
    print(f"converged_restarts: {result.converged_count}")
    print(f"objective_evaluations: {result.objective_evaluations}")
    print(f"seed: {args.seed}")
    if args.out:
        try:
            with open(args.out, "w", newline="\n") as fh:
                fh.write(result.best_tree.to_json())
                fh.write("\n")
        except OSError as exc:
            raise _CliError(EXIT_IO, f"cannot write {args.out}: {exc}") from exc
        print(f"tree_out: {args.out}")
    return EXIT_OK


def cmd_validate(args) -> int:
    if args.n < 2:
        raise _CliError(EXIT_PARSE, f"--n must be >= 2, got {args.n}")
    if args.n > ORACLE_MAX_QUBITS:
        raise _CliError(EXIT_SIZE, f"oracle supports at most {ORACLE_MAX_QUBITS} qubits")
    threshold = VALIDATION_THRESHOLDS[args.n]
    rng = np.random.default_rng(args.seed)
    rows = []
    gaps = []
    for index in range(args.samples):
        fc = random_physical(args.n, rng)
        config = OracleConfig(restarts=args.restarts, seed=args.seed + index)
        result = oracle_discord(fc, config)
        closed = closed_form_discord(fc).value_bits
        gaps.append(result.gap_to_closed_form)
        rows.append((index, fc, closed, result.value_bits, result.gap_to_closed_form))
    max_gap = max(gaps)
    mean_gap = sum(gaps) / len(gaps)
    passed = max_gap <= threshold
    try:
        with open(args.out, "w", newline="\n") as fh:
            fh.write("index,c1,c2,c3,closed_form,oracle,gap\n")
            for index, fc, closed, value, gap in rows:
                fh.write(
                    f"{index},{fc.c1:.17g},{fc.c2:.17g},{fc.c3:.17g},"
                    f"{closed:.17g},{value:.17g},{gap:.17g}\n"
                )
    except OSError as exc:
        raise _CliError(EXIT_IO, f"cannot write {args.out}: {exc}") from exc
    print(f"n: {args.n}")
    print(f"samples: {args.samples}")
    print(f"seed: {args.seed}")
    print(f"restarts: {args.restarts}")
    print(f"max_gap_bits: {_fmt(max_gap)}")
    print(f"mean_gap_bits: {_fmt(mean_gap)}")
    print(f"threshold_bits: {_fmt(threshold)}")
    print(f"csv_out: {args.out}")
    print(f"result: {'pass' if passed else 'fail'}")
    return EXIT_OK if passed else EXIT_DOMAIN


def cmd_dynamics(args) -> int:
    fc = _parse_state(args.state)
    grid = np.linspace(0.0, 1.0, args.steps + 1)
    points = discord_trajectory(fc, grid)
    try:
        if args.out:
            with open(args.out, "w", newline="\n") as fh:
                write_trajectory_csv(points, fh)
            print(f"csv_out: {args.out}")
            print(f"rows: {len(points)}")
        else:
            write_trajectory_csv(points, sys.stdout)
    except OSError as exc:
        raise _CliError(EXIT_IO, f"cannot write {args.out}: {exc}") from exc
    return EXIT_OK


def cmd_transition(args) -> int:
    fc = _parse_state(args.state)
    try:
        analytic = transition_point(fc, method="analytic")
        bisected = transition_point(fc, method="bisection")
    except ValueError as exc:
        raise _CliError(EXIT_DOMAIN, str(exc)) from exc
    print(f"state: {args.state}")
    print(f"p_star_analytic: {_fmt(analytic)}")
    print(f"p_star_bisection: {_fmt(bisected)}")
    print(f"p_star: {analytic:.6f}")
    return EXIT_OK


def cmd_surface(args) -> int:
    field = sample_field(args.n, args.resolution)
    mesh = extract_isosurface(field, args.level)
    if mesh.is_empty:
        print("warning: level is outside the field range; writing an empty mesh")
    try:
        export_mesh(mesh, args.format, args.out)
    except OSError as exc:
        raise _CliError(EXIT_IO, f"cannot write {args.out}: {exc}") from exc
    print(f"n: {args.n}")
    print(f"level: {_fmt(args.level)}")
    print(f"resolution: {args.resolution}")
    print(f"vertices: {len(mesh.vertices)}")
    print(f"triangles: {len(mesh.triangles)}")
    print(f"out: {args.out}")
    return EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="qdiscord", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="closed-form discord of one state")
    p.add_argument("state", help="N:c1,c2,c3")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("oracle", help="brute-force minimization vs closed form")
    p.add_argument("state", help="N:c1,c2,c3 (N <= 5)")
    p.add_argument("--restarts", type=_positive_int, default=400)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=_positive_int, default=2000)
    p.add_argument("--tol", type=_positive_float, default=1e-10)
    p.add_argument("--out", help="write the argmin tree as JSON")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("validate", help="closed form vs oracle on random states")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=_positive_int, default=400)
    p.add_argument("--out", default="validate.csv")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("dynamics", help="phase-flip discord trajectory CSV")
    p.add_argument("state", help="N:c1,c2,c3")
    p.add_argument("--steps", type=_positive_int, default=200)
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_dynamics)

    p = sub.add_parser("transition", help="sudden transition point p*")
    p.add_argument("state", help="N:c1,c2,c3 with N = 0 (mod 4), c2 = c1*c3")
    p.set_defaults(func=cmd_transition)

    p = sub.add_parser("surface", help="extract a constant-discord mesh")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--level", type=_positive_float, required=True)
    p.add_argument("--resolution", type=_odd_resolution, default=61)
    p.add_argument("--format", choices=("obj", "csv"), default="obj")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_surface)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except InvalidStateError as exc:
        if exc.min_eigenvalue is not None:
            print(
                f"error: unphysical: min eigenvalue < 0 ({exc.min_eigenvalue:.6g})",
                file=sys.stderr,
            )
        else:
            print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except UnsupportedSizeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def entry():
    raise SystemExit(main())
