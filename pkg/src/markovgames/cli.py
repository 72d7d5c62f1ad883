"""Command-line front door.

Subcommands:

    gen             write a game file (seeded random or named fixture)
    solve           run the solver on a game file; write the checkpoint CSV
                    and the averaged policy pair
    verify-weights  sweep every weight-schedule property and print a report
    sweep           run optimistic (and optionally baseline) arms over a
                    list of iteration budgets; fit empirical rates

Exit codes: 0 success, 1 check/validation failure, 2 usage error.  Every
command is deterministic given its flags and input files; output files are
written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import diagnostics, games, solver
from .weights import WeightSchedule

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (games.GameFormatError, games.InvalidGameError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="markovgames",
        description="Zero-sum Markov game solver and diagnostics harness")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a game file")
    gen.add_argument("--seed", type=int, help="seed for a random game")
    gen.add_argument("--H", type=int, default=None, help="horizon")
    gen.add_argument("--S", type=int, default=2, help="number of states")
    gen.add_argument("--A", type=int, default=2, help="max-player actions")
    gen.add_argument("--B", type=int, default=2, help="min-player actions")
    gen.add_argument("--fixture", help="named fixture instead of a random game")
    gen.add_argument("--out", required=True, help="output game file")
    gen.set_defaults(func=cmd_gen)

    solve = sub.add_parser("solve", help="run the solver on a game file")
    solve.add_argument("--game", required=True, help="input game file")
    solve.add_argument("--T", type=int, required=True, help="iterations")
    solve.add_argument("--c-eta", type=float, default=solver.C_ETA_MAX,
                       dest="c_eta", help="step-size constant (eta = c_eta/H^2)")
    solve.add_argument("--checkpoints", type=int, default=32,
                       help="number of log-spaced checkpoints")
    solve.add_argument("--no-optimism", action="store_true",
                       help="drop the predictor term (baseline arm)")
    solve.add_argument("--no-delta", action="store_true",
                       help="skip Q*-dependent metrics and checks")
    solve.add_argument("--strict", action="store_true",
                       help="exit 1 if any bound check fails")
    solve.add_argument("--out-dir", default=".", help="output directory")
    solve.set_defaults(func=cmd_solve)

    vw = sub.add_parser("verify-weights", help="sweep weight-schedule properties")
    vw.add_argument("--H-max", type=int, default=8, dest="h_max",
                    help="verify horizons 1..H-max")
    vw.add_argument("--t-max", type=int, default=2000, dest="t_max",
                    help="verify iterations 1..t-max")
    vw.set_defaults(func=cmd_verify_weights)

    sweep = sub.add_parser("sweep", help="multi-budget rate sweep")
    sweep.add_argument("--game", help="input game file")
    sweep.add_argument("--seed", type=int, nargs="+", help="seeds for random games")
    sweep.add_argument("--H", type=int, default=2)
    sweep.add_argument("--S", type=int, default=3)
    sweep.add_argument("--A", type=int, default=3)
    sweep.add_argument("--B", type=int, default=3)
    sweep.add_argument("--T", type=int, nargs="+", required=True,
                       help="ascending iteration budgets, one run each")
    sweep.add_argument("--c-eta", type=float, default=solver.C_ETA_MAX, dest="c_eta")
    sweep.add_argument("--checkpoints", type=int, default=32)
    sweep.add_argument("--no-optimism", action="store_true",
                       help="also run a non-optimistic baseline arm")
    sweep.add_argument("--no-delta", action="store_true")
    sweep.add_argument("--strict", action="store_true")
    sweep.add_argument("--out-dir", required=True)
    sweep.set_defaults(func=cmd_sweep)
    return parser


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cmd_gen(args) -> int:
    try:
        if args.fixture:
            game = games.make_fixture(args.fixture, horizon=args.H)
        elif args.seed is not None:
            horizon = 2 if args.H is None else args.H
            game = games.generate_random(args.seed, horizon, args.S, args.A, args.B)
        else:
            print("error: need --fixture or --seed", file=sys.stderr)
            return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    violations = games.validate(game)
    if violations:
        for v in violations:
            print(f"violation: {v}", file=sys.stderr)
        return EXIT_FAILURE
    _atomic_write(Path(args.out), games.dumps(game).encode("utf-8"))
    h, s, a, b = game.shape
    print(f"{args.out}: H={h} S={s} A={a} B={b}, valid")
    return EXIT_OK


def _run_one(game, args, optimistic: bool) -> solver.RunResult:
    config = solver.SolverConfig(
        iterations=args.T,
        c_eta=args.c_eta,
        checkpoints=solver.default_checkpoints(args.T, args.checkpoints),
        optimistic=optimistic,
        delta_metrics=not args.no_delta,
    )
    return solver.run(game, config)


def cmd_solve(args) -> int:
    game = games.load(args.game)
    optimistic = not args.no_optimism
    result = _run_one(game, args, optimistic)

    stem = Path(args.game).stem
    arm = "oftrl" if optimistic else "ftrl"
    out_dir = Path(args.out_dir)
    csv_path = out_dir / f"{stem}-{arm}-metrics.csv"
    policy_path = out_dir / f"{stem}-{arm}-policies.json"
    _atomic_write(csv_path, diagnostics.csv_rows(result).encode("utf-8"))
    doc = {"mu": result.avg_policies.mu.probs.tolist(),
           "nu": result.avg_policies.nu.probs.tolist()}
    if result.config.seed_note is not None:
        doc["note"] = result.config.seed_note
    _atomic_write(policy_path, (json.dumps(doc) + "\n").encode("utf-8"))

    failures = [(m.t, name) for m in result.checkpoints for name in m.failed_checks()]
    last = result.checkpoints[-1]
    print(f"{csv_path}: {len(result.checkpoints)} checkpoints, "
          f"final gap {last.ne_gap_avg:.6g}")
    print(f"{policy_path}: averaged policy pair")
    for t, name in failures:
        print(f"check failed at t={t}: {name}", file=sys.stderr)
    if failures and args.strict:
        return EXIT_FAILURE
    return EXIT_OK


def cmd_verify_weights(args) -> int:
    if args.h_max < 1 or args.t_max < 1:
        print("error: --H-max and --t-max must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    rows = []  # (name, description, min slack, worst H, worst t, passed)
    for name in ("P1", "P2", "P3", "P4", "P5", "P6", "Lemma4"):
        rows.append([name, None, math.inf, 0, 0, True])
    by_name = {row[0]: row for row in rows}
    for horizon in range(1, args.h_max + 1):
        schedule = WeightSchedule(horizon)
        checks = list(schedule.verify_lemma_a(args.t_max).checks)
        checks.append(schedule.verify_weighted_harmonic(args.t_max))
        for check in checks:
            row = by_name[check.name]
            row[1] = check.description
            if check.min_slack < row[2]:
                row[2:5] = [check.min_slack, horizon, check.argmin_t]
            row[5] = row[5] and check.passed
    all_passed = True
    print(f"weight-schedule checks for H in 1..{args.h_max}, t in 1..{args.t_max}")
    for name, description, slack, worst_h, worst_t, passed in rows:
        verdict = "pass" if passed else "FAIL"
        all_passed = all_passed and passed
        print(f"  {name:3s} {description:55s} {verdict}  "
              f"(min slack {slack:+.3e} at H={worst_h}, t={worst_t})")
    print("all checks passed" if all_passed else "CHECKS FAILED")
    return EXIT_OK if all_passed else EXIT_FAILURE


def cmd_sweep(args) -> int:
    sources = []
    if args.game:
        sources.append((Path(args.game).stem, games.load(args.game)))
    for seed in args.seed or []:
        sources.append((f"seed{seed}",
                        games.generate_random(seed, args.H, args.S, args.A, args.B)))
    if not sources:
        print("error: need --game or --seed", file=sys.stderr)
        return EXIT_USAGE
    budgets = list(args.T)
    if budgets != sorted(budgets) or len(set(budgets)) != len(budgets):
        print("error: --T values must be strictly ascending", file=sys.stderr)
        return EXIT_USAGE

    arms = [True, False] if args.no_optimism else [True]
    out_dir = Path(args.out_dir)
    summary_lines = ["arm,slope,r2,final_gap,thm1_pass"]
    any_failure = False

    for source_name, game in sources:
        for optimistic in arms:
            arm_name = f"{source_name}-{'optimistic' if optimistic else 'baseline'}"
            rows = []
            final_rows = []
            for budget in budgets:
                config = solver.SolverConfig(
                    iterations=budget, c_eta=args.c_eta,
                    checkpoints=solver.default_checkpoints(budget, args.checkpoints),
                    optimistic=optimistic, delta_metrics=not args.no_delta)
                result = solver.run(game, config)
                any_failure |= any(m.failed_checks() for m in result.checkpoints)
                table = diagnostics.csv_rows(result).splitlines()
                if not rows:
                    rows.append(table[0])       # header
                rows.append(table[-1])          # final checkpoint row (t = budget)
                final_rows.append(result.checkpoints[-1])
            _atomic_write(out_dir / f"{arm_name}.csv",
                          ("\n".join(rows) + "\n").encode("utf-8"))
            ts = [m.t for m in final_rows]
            gaps = [m.ne_gap_avg for m in final_rows]
            try:
                fit = diagnostics.fit_rate(ts, gaps)
                slope, r2 = fit.slope, fit.r_squared
            except ValueError:
                slope, r2 = float("nan"), float("nan")
            thm1_pass = all(
                m.bound_slacks["thm1_slack"] >= diagnostics.STRICT_THRESHOLDS["thm1_slack"]
                for m in final_rows)
            summary_lines.append(
                f"{arm_name},{slope!r},{r2!r},{gaps[-1]!r},{str(thm1_pass).lower()}")
            print(f"{arm_name}: slope={slope:.4f} r2={r2:.4f} final_gap={gaps[-1]:.6g}")

    _atomic_write(out_dir / "summary.csv",
                  ("\n".join(summary_lines) + "\n").encode("utf-8"))
    print(out_dir / "summary.csv")
    if any_failure and args.strict:
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
