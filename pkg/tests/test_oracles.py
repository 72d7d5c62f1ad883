"""Sanity checks for the test-side reference implementations themselves."""

import numpy as np

from markovgames import make_fixture, matrix_game_solve

from oracles import (_grid_scan, _grid_scan_dense, alpha_profile_literal,
                     grid_minimax, monte_carlo_value)


def test_literal_profile_base_cases():
    np.testing.assert_allclose(alpha_profile_literal(1, 2), [1 / 3, 2 / 3])
    np.testing.assert_array_equal(alpha_profile_literal(4, 1), [1.0])
    assert abs(alpha_profile_literal(3, 40).sum() - 1.0) < 1e-12


def test_envelope_scan_equals_dense_scan():
    rng = np.random.default_rng(99)
    for _ in range(5):
        matrix = np.ascontiguousarray(rng.random((4, 5)))
        fast = _grid_scan(matrix, 150)
        dense = _grid_scan_dense(matrix, 150)
        assert abs(fast - dense) < 1e-12  # same grid, different fp grouping


def test_grid_minimax_known_value():
    # rows 3 and 4 dominated; effectively pennies on the first two rows
    matrix = np.array([[1.0, 0.0, 1.0, 0.0, 1.0],
                       [0.0, 1.0, 0.0, 1.0, 0.0],
                       [0.0, 0.0, 0.0, 0.0, 0.0],
                       [0.0, 0.0, 0.0, 0.0, 0.0]])
    value = grid_minimax(matrix, step=1e-2)
    assert abs(value - 0.5) < 1e-12


def test_grid_minimax_tracks_lp_value():
    rng = np.random.default_rng(123)
    matrix = rng.random((4, 5))
    assert abs(grid_minimax(matrix, step=1e-2)
               - matrix_game_solve(matrix).value) < 2e-2


def test_monte_carlo_on_known_game():
    game = make_fixture("constant(0.5)", horizon=2)
    mu = np.full((2, 2, 2), 0.5)
    nu = np.full((2, 2, 2), 0.5)
    estimate, se = monte_carlo_value(game, mu, nu, episodes=10_000, seed=1)
    assert estimate == 1.0 and se == 0.0  # rewards are constant
