"""Acceptance suite: every release criterion at its stated tolerance.

Each criterion prints one PASS/FAIL line (run with -s to see them live).
The desk-scale reference games are the seeded shapes (H=2,S=3,A=3,B=3) and
(H=3,S=4,A=3,B=3) for seeds {1, 7, 42}.
"""

import io
import math
import time

import numpy as np
import pytest

from markovgames import (SolverConfig, WeightSchedule, advance,
                         default_checkpoints, emit_csv, fit_rate,
                         generate_random, init, make_fixture,
                         matrix_game_solve, nash_q, ne_gap, q_error,
                         regret_tables, run)

from oracles import HistorySolver, grid_minimax

SEEDS = (1, 7, 42)
SHAPES = ((2, 3, 3, 3), (3, 4, 3, 3))
C_ETA = 0.125
T_BOUND = 2000


def _report(criterion: str, passed: bool, detail: str = ""):
    line = f"{'PASS' if passed else 'FAIL'} {criterion}"
    if detail:
        line += f": {detail}"
    print(line)


@pytest.fixture(scope="module")
def bound_runs():
    """One solver run per (seed, shape) at the criterion-1 configuration."""
    out = {}
    for seed in SEEDS:
        for shape in SHAPES:
            game = generate_random(seed, *shape)
            config = SolverConfig(iterations=T_BOUND, c_eta=C_ETA,
                                  checkpoints=default_checkpoints(T_BOUND))
            out[(seed, shape)] = (game, run(game, config))
    return out


def _csv_bytes(result) -> bytes:
    buf = io.StringIO()
    emit_csv(result, buf)
    return buf.getvalue().encode("utf-8")


def test_criterion1_gap_bound(bound_runs):
    worst = math.inf
    for (seed, shape), (game, result) in bound_runs.items():
        h = shape[0]
        bound_scale = 320 * 8 * h ** 5 * math.log(shape[2] * shape[3])
        for m in result.checkpoints:
            slack = bound_scale / m.t - m.ne_gap_avg
            worst = min(worst, slack)
            assert slack >= -1e-9, (seed, shape, m.t)
    _report("criterion 1 (averaged-policy gap bound, 6 runs, T=2000)", True,
            f"min slack {worst:.3e}")


@pytest.mark.parametrize("shape", SHAPES, ids=["H2", "H3"])
def test_criterion2_empirical_rate(shape):
    game = generate_random(7, *shape)
    cps = default_checkpoints(5000)
    fits = {}
    for optimistic in (True, False):
        config = SolverConfig(iterations=5000, c_eta=C_ETA, checkpoints=cps,
                              optimistic=optimistic)
        result = run(game, config)
        ts = np.array([m.t for m in result.checkpoints])
        gaps = np.array([m.ne_gap_avg for m in result.checkpoints])
        sel = (ts >= 200) & (ts <= 5000)
        fits[optimistic] = fit_rate(ts[sel], gaps[sel])
    base = fits[False]
    print(f"      baseline (no optimism) slope {base.slope:.4f} "
          f"r2 {base.r_squared:.4f} (recorded, no threshold)")
    fit = fits[True]
    ok = fit.slope <= -0.85 and fit.r_squared >= 0.9
    _report(f"criterion 2 (empirical rate, seed 7, shape {shape})", ok,
            f"slope {fit.slope:.4f} (<= -0.85), r2 {fit.r_squared:.4f} (>= 0.9)")
    assert fit.slope <= -0.85, fit
    assert fit.r_squared >= 0.9, fit


def test_criterion3_weighted_harmonic_sweep():
    start = time.monotonic()
    worst = math.inf
    for horizon in range(1, 9):
        check = WeightSchedule(horizon).verify_weighted_harmonic(5000, tol=1e-12)
        worst = min(worst, check.min_slack)
        assert check.passed, (horizon, check)
    elapsed = time.monotonic() - start
    _report("criterion 3 (weighted-harmonic bound, H<=8, t<=5000)", True,
            f"min slack {worst:.3e}, {elapsed:.2f}s")
    assert elapsed < 5.0


def test_criterion4_profile_property_sweep():
    worst = {}
    for horizon in range(1, 9):
        report = WeightSchedule(horizon).verify_lemma_a(2000, tol=1e-12)
        for check in report.checks:
            worst[check.name] = min(worst.get(check.name, math.inf),
                                    check.min_slack)
            assert check.passed, (horizon, check)
    _report("criterion 4 (profile properties P1-P6, H<=8, t<=2000)", True,
            ", ".join(f"{k} {v:.1e}" for k, v in sorted(worst.items())))


def test_criterion5_runtime_bound_checks(bound_runs):
    columns = ("lemma2_min_slack", "lemma3_min_slack", "lemma5_min_slack",
               "eq8_min_slack", "eq9_min_slack")
    worst = math.inf
    for (seed, shape), (game, result) in bound_runs.items():
        for m in result.checkpoints:
            for name in columns:
                slack = m.bound_slacks[name]
                if math.isnan(slack):  # eq8 has no pairs when H = 1
                    continue
                worst = min(worst, slack)
                assert slack >= -1e-8, (seed, shape, m.t, name)
    _report("criterion 5 (lemma 2/3/5, eq 8/9 slacks on all runs)", True,
            f"min slack {worst:.3e}")


@pytest.mark.parametrize("fixture", ["matching_pennies", "rps"])
def test_criterion6_single_stage_reduction(fixture):
    game = make_fixture(fixture)
    q_star, _ = nash_q(game)
    config = SolverConfig(iterations=5000, c_eta=C_ETA, checkpoints=(5000,))
    state = init(game, config)
    for _ in range(5000):
        advance(state, game, config)
        assert float(q_error(state.q, q_star.q)[0]) == 0.0  # exact, every t
    pair = state.averaged_policy_pair()
    gap = ne_gap(game, pair)
    a, b = game.num_actions_max, game.num_actions_min
    bound = 320 * 8 * math.log(a * b) / 5000
    assert gap <= bound
    assert gap <= 1e-2
    _report(f"criterion 6 (single-stage reduction, {fixture})", True,
            f"delta == 0 at all t, final gap {gap:.3e}")


def test_criterion7_oracle_equivalence():
    game = generate_random(7, 2, 2, 2, 2)
    q_star, _ = nash_q(game)
    config = SolverConfig(iterations=50, c_eta=C_ETA)
    state = init(game, config)
    reference = HistorySolver(game, c_eta=C_ETA, q_star=q_star.q)
    worst = 0.0
    for _ in range(50):
        advance(state, game, config)
        reference.step()
        worst = max(worst,
                    float(np.abs(state.mu - reference.mu_hist[-1]).max()),
                    float(np.abs(state.nu - reference.nu_hist[-1]).max()),
                    float(np.abs(state.q - reference.q).max()))
    mu_ref, nu_ref = reference.averaged_policies()
    reg1, reg2 = regret_tables(state.metrics)
    ref1, ref2 = reference.regrets()
    worst = max(worst,
                float(np.abs(state.avg_mu - mu_ref).max()),
                float(np.abs(state.avg_nu - nu_ref).max()),
                float(np.abs(reg1 - ref1).max()),
                float(np.abs(reg2 - ref2).max()),
                float(np.abs(state.metrics.avg_delta - reference.avg_delta()).max()))
    assert worst < 1e-10
    _report("criterion 7 (history-oracle equivalence, T=50)", True,
            f"max deviation {worst:.3e}")


def test_criterion8_matrix_game_solver():
    sol = matrix_game_solve([[1.0, 0.0], [0.0, 1.0]])
    assert abs(sol.value - 0.5) <= 1e-9
    np.testing.assert_allclose(sol.row_strategy, [0.5, 0.5], atol=1e-9)
    sol = matrix_game_solve(make_fixture("rps").rewards[0, 0])
    assert abs(sol.value - 0.5) <= 1e-9
    np.testing.assert_allclose(sol.row_strategy, [1 / 3] * 3, atol=1e-9)

    rng = np.random.default_rng(2024)
    worst_dual, worst_grid = 0.0, 0.0
    for _ in range(200):
        matrix = rng.random((4, 5))
        sol = matrix_game_solve(matrix)
        dual_gap = float((matrix @ sol.col_strategy).max()
                         - (matrix.T @ sol.row_strategy).min())
        worst_dual = max(worst_dual, dual_gap)
        assert dual_gap <= 2e-9
        grid_value = grid_minimax(matrix, step=1e-3)
        worst_grid = max(worst_grid, abs(grid_value - sol.value))
        assert abs(grid_value - sol.value) <= 2e-3
    _report("criterion 8 (matrix-game solver vs grid brute force, 200 x 4x5)",
            True, f"max duality gap {worst_dual:.2e}, "
                  f"max grid deviation {worst_grid:.2e}")


def test_criterion9_byte_identical_reruns(bound_runs):
    for (seed, shape), (game, result) in bound_runs.items():
        config = SolverConfig(iterations=T_BOUND, c_eta=C_ETA,
                              checkpoints=default_checkpoints(T_BOUND))
        again = run(game, config)
        assert _csv_bytes(again) == _csv_bytes(result), (seed, shape)
    _report("criterion 9 (byte-identical rerun CSVs, 6 configs)", True)
