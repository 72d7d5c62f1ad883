import numpy as np
import pytest

from markovgames import (SolverConfig, advance, default_checkpoints, emit_csv,
                         generate_random, init, make_fixture, nash_q, run,
                         uniform_policy_pair)
from markovgames.games import dumps
from markovgames.solver import value_update

from oracles import HistorySolver


def _loop(game, config, steps):
    state = init(game, config)
    for _ in range(steps):
        advance(state, game, config)
    return state


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(iterations=10, c_eta=0.2)
    with pytest.raises(ValueError):
        SolverConfig(iterations=10, c_eta=0.0)
    with pytest.raises(ValueError):
        SolverConfig(iterations=0)
    with pytest.raises(ValueError):
        SolverConfig(iterations=10, checkpoints=(5, 11))
    with pytest.raises(ValueError):
        SolverConfig(iterations=10, checkpoints=(5, 5))
    SolverConfig(iterations=10, checkpoints=(1, 10))  # fine


def test_default_checkpoints():
    cps = default_checkpoints(2000)
    assert cps[0] == 1 and cps[-1] == 2000
    assert all(b > a for a, b in zip(cps, cps[1:]))
    assert default_checkpoints(1) == (1,)


def test_init_state_is_blank():
    game = make_fixture("two_stage")
    state = init(game, SolverConfig(iterations=5))
    assert state.t == 0
    assert not state.q.any()
    assert not state.loss_max.any() and not state.loss_min.any()
    assert not state.avg_mu.any()
    assert not state.metrics.avg_realized.any()
    assert state.q_star is not None  # cached equilibrium tables


def test_first_iteration_is_uniform():
    game = generate_random(2, 2, 3, 3, 2)
    config = SolverConfig(iterations=5, delta_metrics=False)
    state = _loop(game, config, 1)
    np.testing.assert_allclose(state.mu, 1 / 3, atol=1e-15)
    np.testing.assert_allclose(state.nu, 0.5, atol=1e-15)
    # averaging weight alpha_1 = 1: averages equal the first iterate exactly
    np.testing.assert_array_equal(state.avg_mu, state.mu)
    np.testing.assert_array_equal(state.avg_nu, state.nu)


def test_single_entry_second_iterate_hand_value():
    # one-step game r = [[1,0],[0,0]], eta = 1/8: after a uniform first
    # iterate the max player's exponent gap is (1/8)*(w1/w2 + 1)*0.5 = 0.09375
    game = make_fixture("single_entry")
    config = SolverConfig(iterations=2, c_eta=0.125)
    state = _loop(game, config, 2)
    expected = 1.0 / (1.0 + np.exp(-0.09375))
    assert abs(state.mu[0, 0, 0] - expected) < 1e-12
    assert abs(expected - 0.523415) < 1e-5
    assert abs(state.nu[0, 0, 0] - 1.0 / (1.0 + np.exp(0.09375))) < 1e-12


def test_pennies_stays_uniform():
    game = make_fixture("matching_pennies")
    config = SolverConfig(iterations=40)
    state = init(game, config)
    for _ in range(40):
        advance(state, game, config)
        assert (state.mu == 0.5).all() and (state.nu == 0.5).all()
    assert (state.avg_mu == 0.5).all()


def test_single_stage_q_equals_rewards_forever():
    game = make_fixture("rps")
    config = SolverConfig(iterations=30, delta_metrics=False)
    state = init(game, config)
    for _ in range(30):
        advance(state, game, config)
        np.testing.assert_array_equal(state.q[0], game.rewards[0])


def test_constant_game_q_is_exact():
    game = make_fixture("constant(0.5)", horizon=2)
    config = SolverConfig(iterations=25, delta_metrics=False)
    state = init(game, config)
    for _ in range(25):
        advance(state, game, config)
        np.testing.assert_array_equal(state.q[1], np.full((2, 2, 2), 0.5))
        np.testing.assert_array_equal(state.q[0], np.full((2, 2, 2), 1.0))


def test_value_update_uses_fresh_downstream_values():
    # two_stage: the stage-1 backup must see the stage-2 Q updated in the
    # same iteration (t = 1 makes Q equal the full lookahead immediately)
    game = make_fixture("two_stage")
    config = SolverConfig(iterations=1, delta_metrics=False)
    state = init(game, config)
    state.t = 1
    state.mu[:] = 0.5
    state.nu[:] = 0.5
    value_update(state, game)
    np.testing.assert_allclose(state.q[1, 0], 1.0, atol=1e-15)
    # uniform value of the all-ones stage-2 state is 1, reached iff a == b
    np.testing.assert_allclose(state.q[0, 0], game.rewards[0, 0] + np.eye(2),
                               atol=1e-15)


def test_q_stays_in_stage_bounds():
    game = generate_random(11, 3, 3, 2, 3)
    config = SolverConfig(iterations=200, delta_metrics=False)
    state = init(game, config)
    for _ in range(200):
        advance(state, game, config)
        for h in range(3):
            assert state.q[h].min() >= 0.0
            assert state.q[h].max() <= 3 - h + 1e-12


def test_q_step_bound():
    # ||Q^t - Q^{t-1}||_inf <= alpha_t * H
    game = generate_random(5, 2, 3, 3, 3)
    config = SolverConfig(iterations=100, delta_metrics=False)
    state = init(game, config)
    prev = state.q.copy()
    for t in range(1, 101):
        advance(state, game, config)
        if t >= 2:
            step = np.abs(state.q - prev).max()
            assert step <= state.schedule.alpha(t) * game.horizon + 1e-12
        prev = state.q.copy()


def test_policy_rows_normalized():
    game = generate_random(13, 2, 4, 3, 2)
    config = SolverConfig(iterations=500, delta_metrics=False)
    state = _loop(game, config, 500)
    assert np.abs(state.mu.sum(axis=2) - 1).max() < 1e-12
    assert np.abs(state.nu.sum(axis=2) - 1).max() < 1e-12
    assert np.abs(state.avg_mu.sum(axis=2) - 1).max() < 1e-12


@pytest.mark.parametrize("optimistic", [True, False])
def test_matches_history_reference(optimistic):
    # accumulator solver == literal history-storing updates, every iterate
    game = generate_random(7, 2, 2, 2, 2)
    q_star, _ = nash_q(game)
    config = SolverConfig(iterations=50, optimistic=optimistic)
    state = init(game, config)
    reference = HistorySolver(game, c_eta=config.c_eta, optimistic=optimistic,
                              q_star=q_star.q)
    for t in range(1, 51):
        advance(state, game, config)
        reference.step()
        tol = 1e-12 if t <= 3 else 1e-10  # early iterates are near-exact
        assert np.abs(state.mu - reference.mu_hist[-1]).max() < tol
        assert np.abs(state.nu - reference.nu_hist[-1]).max() < tol
        assert np.abs(state.q - reference.q).max() < tol
    mu_ref, nu_ref = reference.averaged_policies()
    assert np.abs(state.avg_mu - mu_ref).max() < 1e-10
    assert np.abs(state.avg_nu - nu_ref).max() < 1e-10


def test_degenerate_single_action_sides():
    # one player having no choice is legal on both sides
    for shape in ((2, 2, 1, 3), (2, 2, 3, 1)):
        game = generate_random(2, *shape)
        result = run(game, SolverConfig(iterations=60, checkpoints=(60,)))
        side = result.avg_policies.mu if shape[2] == 1 else result.avg_policies.nu
        np.testing.assert_array_equal(side.probs, np.ones_like(side.probs))
        assert not result.checkpoints[-1].failed_checks()


def test_optimism_flag_changes_trajectory():
    game = generate_random(17, 2, 2, 3, 3)
    base = SolverConfig(iterations=60, delta_metrics=False)
    off = SolverConfig(iterations=60, optimistic=False, delta_metrics=False)
    s1 = _loop(game, base, 60)
    s2 = _loop(game, off, 60)
    assert np.abs(s1.mu - s2.mu).max() > 1e-6


def test_run_is_deterministic():
    game = generate_random(7, 2, 3, 3, 3)
    config = SolverConfig(iterations=120, checkpoints=default_checkpoints(120, 8))
    r1 = run(game, config)
    r2 = run(game, config)
    assert dumps_policies(r1) == dumps_policies(r2)
    assert _csv(r1) == _csv(r2)


def test_run_constant_game_gap_zero():
    game = make_fixture("constant(0.8)", horizon=2)
    result = run(game, SolverConfig(iterations=50, checkpoints=(1, 25, 50)))
    for m in result.checkpoints:
        assert m.ne_gap_avg <= 1e-12
        assert np.max(m.delta) <= 1e-12


def dumps_policies(result):
    return (dumps_array(result.avg_policies.mu.probs)
            + dumps_array(result.avg_policies.nu.probs))


def dumps_array(arr):
    return arr.tobytes()


def _csv(result):
    import io
    buf = io.StringIO()
    emit_csv(result, buf)
    return buf.getvalue()
