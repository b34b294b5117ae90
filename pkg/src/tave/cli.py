"""Command-line front end: ``tave solve | check | bench | gen``.

Exit codes: 0 success, 1 usage or input error, 2 solver did not converge.
JSON goes to stdout (or ``--out``); diagnostics go to stderr.  The JSON
shapes are described by the schemas in ``tave/schemas``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import analysis, bench
from .solver import SolverConfig, TaveProblem, solve
from .tensor_core import load_tensor, load_vector, save_tensor, save_vector

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NONCONVERGED = 2


class InputError(Exception):
    """Bad flags or bad input files; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for non-convergence here
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(f"{self.prog}: {message}")


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    try:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    except OSError as exc:
        raise InputError(f"cannot write {out}: {exc.strerror}") from exc


def _load_problem(args, need_rhs: bool):
    A = load_tensor(args.a)
    B = load_tensor(args.b_tensor)
    b = None
    if args.rhs is not None:
        b = load_vector(args.rhs)
    elif need_rhs:
        raise InputError("--rhs is required")
    return A, B, b


def cmd_solve(args) -> int:
    A, B, b = _load_problem(args, need_rhs=True)
    P = TaveProblem(A, B, b, symmetrize=not args.no_symmetrize)
    x0 = None
    if args.x0 != "ones":
        x0 = load_vector(args.x0)
        if x0.shape[0] != P.n:
            raise InputError(f"x0 has dimension {x0.shape[0]}, problem has n={P.n}")
    cfg = SolverConfig(tol=args.tol, max_iter=args.max_iter, x0=x0)
    report = solve(P, cfg)
    _emit(json.dumps(report.to_dict(), indent=2), args.out)
    if not report.converged:
        print(f"solve: {report.status.value} after {report.iterations} iterations, "
              f"Err={report.final_residual:.3e}", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_check(args) -> int:
    A, B, b = _load_problem(args, need_rhs=False)
    if not args.no_symmetrize:
        P = TaveProblem(A, B, b if b is not None else np.zeros(A.dim))
        A, B = P.A, P.B
    elif A.dim != B.dim:
        raise InputError(f"dimension mismatch: A has n={A.dim}, B has n={B.dim}")
    result = {}
    if args.property is None or args.report:
        result["condition"] = analysis.condition_report(
            A, B, b, sigma=args.sigma, budget=args.budget, seed=args.seed).to_dict()
    if args.property is not None:
        try:
            prop = analysis.Property.parse(args.property)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        verdict = analysis.falsify_structure(
            A, prop, samples=args.samples, seed=args.seed,
            B=B if prop is analysis.Property.PAIR_H_PLUS else None)
        result["falsifier"] = verdict.to_dict()
    _emit(json.dumps(result, indent=2), args.out)
    return EXIT_OK


def _bench_specs(args) -> list[bench.ScenarioSpec]:
    if args.spec is not None:
        try:
            with open(args.spec, encoding="utf-8") as fh:
                obj = json.load(fh)
        except OSError as exc:
            raise InputError(f"cannot read {args.spec}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"{args.spec}: not valid JSON ({exc.msg})") from exc
        entries = obj if isinstance(obj, list) else [obj]
        if not entries or not all(isinstance(e, dict) for e in entries):
            raise InputError(f"{args.spec}: expected an object or a list of objects")
        try:
            return [bench.ScenarioSpec.from_dict(e) for e in entries]
        except (ValueError, TypeError) as exc:
            raise InputError(f"{args.spec}: {exc}") from exc
    missing = [f"--{k}" for k in ("scenario", "p", "q", "n") if getattr(args, k) is None]
    if missing:
        raise InputError("bench needs --spec or " + ", ".join(missing))
    solver = SolverConfig(tol=args.tol, max_iter=args.max_iter)
    return [bench.ScenarioSpec(args.scenario, args.p, args.q, args.n, trials=args.trials,
                               epsilon=args.epsilon, seed=args.seed, solver=solver)]


def cmd_bench(args) -> int:
    specs = _bench_specs(args)
    grid = []
    for spec in specs:
        stats = bench.run_campaign(spec)
        print(f"bench: {spec.scenario} p={spec.p} q={spec.q} n={spec.n}: "
              f"SR={stats.success_rate:.2f}", file=sys.stderr)
        grid.append((spec, stats))
    _emit(bench.emit_table(grid, args.format), args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    spec = bench.ScenarioSpec(args.scenario, args.p, args.q, args.n, trials=1,
                              epsilon=args.epsilon, seed=args.seed)
    P, x_star = bench.generate_instance(spec, args.trial)
    try:
        os.makedirs(args.out_dir, exist_ok=True)
        save_tensor(P.A, os.path.join(args.out_dir, "a.json"))
        save_tensor(P.B, os.path.join(args.out_dir, "b_tensor.json"))
        save_vector(P.b, os.path.join(args.out_dir, "rhs.json"))
        save_vector(x_star, os.path.join(args.out_dir, "x_star.json"))
    except OSError as exc:
        raise InputError(f"cannot write to {args.out_dir}: {exc.strerror}") from exc
    print(json.dumps({"out_dir": args.out_dir, "spec": spec.to_dict(), "trial": args.trial,
                      "files": ["a.json", "b_tensor.json", "rhs.json", "x_star.json"]},
                     indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tave", description="Tensor absolute value equations: "
                     "A x^(p-1) + B |x|^(q-1) = b.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="solve one problem with the generalized Newton method")
    s.add_argument("--a", required=True, metavar="FILE")
    s.add_argument("--b-tensor", required=True, metavar="FILE")
    s.add_argument("--rhs", required=True, metavar="FILE")
    s.add_argument("--tol", type=float, default=1e-5)
    s.add_argument("--max-iter", type=int, default=2000)
    s.add_argument("--x0", default="ones", metavar="FILE|ones")
    s.add_argument("--out", metavar="FILE")
    s.add_argument("--no-symmetrize", action="store_true",
                   help="use the tensors exactly as stored")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("check", help="condition report and structured-tensor falsifiers")
    c.add_argument("--a", required=True, metavar="FILE")
    c.add_argument("--b-tensor", required=True, metavar="FILE")
    c.add_argument("--rhs", metavar="FILE")
    c.add_argument("--property", metavar="NAME",
                   help="one of " + ", ".join(p.value for p in analysis.Property))
    c.add_argument("--report", action="store_true",
                   help="also emit the condition report when --property is given")
    c.add_argument("--samples", type=int, default=200)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--budget", type=int, default=20, help="multistart budget for lambda")
    c.add_argument("--sigma", type=float, default=1e-5, help="residual level for the bounds")
    c.add_argument("--out", metavar="FILE")
    c.add_argument("--no-symmetrize", action="store_true")
    c.set_defaults(func=cmd_check)

    b = sub.add_parser("bench", help="run seeded benchmark campaigns")
    b.add_argument("--spec", metavar="FILE", help="campaign JSON (object or list)")
    b.add_argument("--scenario", choices=sorted(bench.SCENARIOS))
    b.add_argument("--p", type=int)
    b.add_argument("--q", type=int)
    b.add_argument("--n", type=int)
    b.add_argument("--trials", type=int, default=100)
    b.add_argument("--epsilon", type=float, default=0.1)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--tol", type=float, default=1e-5)
    b.add_argument("--max-iter", type=int, default=2000)
    b.add_argument("--format", choices=("tsv", "json", "markdown"), default="markdown")
    b.add_argument("--out", metavar="FILE")
    b.set_defaults(func=cmd_bench)

    g = sub.add_parser("gen", help="write one planted instance to a directory")
    g.add_argument("--scenario", required=True, choices=sorted(bench.SCENARIOS))
    g.add_argument("--p", type=int, required=True)
    g.add_argument("--q", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--trial", type=int, default=0, help="trial index within the seed")
    g.add_argument("--epsilon", type=float, default=0.1)
    g.add_argument("--out-dir", required=True, metavar="DIR")
    g.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, KeyError, TypeError, OSError) as exc:
        # load/validation errors already name the file, field or dims
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SystemExit as exc:
        # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
