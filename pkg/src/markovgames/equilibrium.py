"""Exact ground-truth machinery for zero-sum Markov games.

Four pure operations built on each other:

* ``matrix_game_solve`` - minimax value and optimal mixed strategies of a
  single payoff matrix, via a self-contained dense simplex method.
* ``policy_value`` - backward dynamic programming for the value of a fixed
  policy pair.
* ``best_response`` - the optimal deterministic reply to a fixed opponent,
  again by backward DP; combining two of these gives ``ne_gap``, the sum
  of both players' exploitabilities at the initial state.
* ``nash_q`` - minimax dynamic programming: solve one matrix game per
  state per stage, backward in the horizon, producing the (unique)
  equilibrium value tables Q*, V* and an equilibrium policy pair.

All functions are pure over immutable inputs.  Tolerances are centralized
below: one knob per numeric layer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .games import MarkovGame, Policy, PolicyPair, Side

LP_TOL = 1e-9        # feasibility / saddle slack allowed out of the simplex
DP_TOL = 1e-10       # comparisons between backward-DP quantities
GAP_CLAMP = 1e-9     # ne_gap this far below zero is rounding; lower is a bug
SIMPLEX_MAX_PIVOTS = 10_000
_PIVOT_EPS = 1e-12   # reduced costs / pivot elements below this count as zero


class NumericalError(RuntimeError):
    """An internal numeric consistency check failed."""


@dataclass(frozen=True)
class MatrixGameSolution:
    value: float
    row_strategy: np.ndarray
    col_strategy: np.ndarray


@dataclass(frozen=True)
class ValueTables:
    """v[h][s] and q[h][s][a][b] for one evaluation."""

    v: np.ndarray
    q: np.ndarray


def matrix_game_solve(matrix) -> MatrixGameSolution:
    """Minimax value max_x min_y x'My of a finite matrix game.

    The matrix is shifted by -min(M)+1 so every entry is positive, which
    turns the game into the standard-form LP

        maximize sum(z)  subject to  M'z <= 1, z >= 0,

    solved by dense primal simplex with Bland's anti-cycling rule (lowest
    eligible index enters; ratio ties leave by lowest basic index).  The
    column strategy is z normalized; the row strategy comes from the dual
    values read off the slack columns; the value is 1/sum(z) shifted back.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.size == 0:
        raise ValueError(f"need a nonempty 2-d matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError("matrix entries must be finite")
    n_rows, n_cols = m.shape
    shift = 1.0 - float(m.min())
    shifted = m + shift

    # tableau: columns [z_0..z_{B-1}, slack_0..slack_{A-1}, rhs]
    tab = np.zeros((n_rows, n_cols + n_rows + 1))
    tab[:, :n_cols] = shifted
    tab[:, n_cols:n_cols + n_rows] = np.eye(n_rows)
    tab[:, -1] = 1.0
    obj = np.zeros(n_cols + n_rows + 1)
    obj[:n_cols] = 1.0
    basis = list(range(n_cols, n_cols + n_rows))

    for _ in range(SIMPLEX_MAX_PIVOTS):
        eligible = np.nonzero(obj[:-1] > _PIVOT_EPS)[0]
        if eligible.size == 0:
            break
        col = int(eligible[0])  # Bland: lowest index enters
        positive = np.nonzero(tab[:, col] > _PIVOT_EPS)[0]
        if positive.size == 0:
            raise NumericalError("unbounded tableau; shifted matrix not positive?")
        ratios = tab[positive, -1] / tab[positive, col]
        best = ratios.min()
        tied = positive[ratios <= best + _PIVOT_EPS]
        row = int(min(tied, key=lambda r: basis[r]))  # Bland: lowest basic leaves
        pivot = tab[row, col]
        tab[row] /= pivot
        others = np.arange(n_rows) != row
        tab[others] -= np.outer(tab[others, col], tab[row])
        obj = obj - obj[col] * tab[row]
        basis[row] = col
    else:
        raise NumericalError(f"simplex exceeded {SIMPLEX_MAX_PIVOTS} pivots")

    z = np.zeros(n_cols)
    for r, var in enumerate(basis):
        if var < n_cols:
            z[var] = tab[r, -1]
    total = z.sum()
    if total <= 0:
        raise NumericalError("degenerate optimum: sum(z) <= 0")
    col_strategy = z / total

    duals = -obj[n_cols:n_cols + n_rows]
    duals = np.maximum(duals, 0.0)
    dual_total = duals.sum()
    if dual_total <= 0:
        raise NumericalError("degenerate optimum: no active dual rows")
    row_strategy = duals / dual_total

    value = 1.0 / total - shift
    return MatrixGameSolution(float(value), row_strategy, col_strategy)


def policy_value(game: MarkovGame, pair: PolicyPair) -> ValueTables:
    """Exact value of a fixed policy pair by backward DP (V after stage H is 0)."""
    h_len, n_s, n_a, n_b = game.shape
    _check_pair_shape(game, pair)
    v = np.zeros((h_len, n_s))
    q = np.zeros((h_len, n_s, n_a, n_b))
    v_next = np.zeros(n_s)
    for h in range(h_len - 1, -1, -1):
        q[h] = game.rewards[h] + np.einsum("sabn,n->sab", game.transitions[h], v_next)
        v[h] = np.einsum("sa,sab,sb->s", pair.mu.probs[h], q[h], pair.nu.probs[h])
        v_next = v[h]
    return ValueTables(_ro(v), _ro(q))


def best_response(game: MarkovGame, opponent: Policy) -> tuple[ValueTables, Policy]:
    """Optimal deterministic reply to a fixed opponent policy.

    Returns the responder-vs-opponent value tables and the (one-hot)
    responding policy; action ties break to the lowest index.  The
    responder maximizes when the opponent is the min-player and minimizes
    otherwise.
    """
    h_len, n_s, n_a, n_b = game.shape
    responder_is_max = opponent.side is Side.MIN
    v = np.zeros((h_len, n_s))
    q = np.zeros((h_len, n_s, n_a, n_b))
    n_own = n_a if responder_is_max else n_b
    probs = np.zeros((h_len, n_s, n_own))
    v_next = np.zeros(n_s)
    for h in range(h_len - 1, -1, -1):
        q[h] = game.rewards[h] + np.einsum("sabn,n->sab", game.transitions[h], v_next)
        if responder_is_max:
            marginal = np.einsum("sab,sb->sa", q[h], opponent.probs[h])
            choice = marginal.argmax(axis=1)
            v[h] = marginal[np.arange(n_s), choice]
        else:
            marginal = np.einsum("sab,sa->sb", q[h], opponent.probs[h])
            choice = marginal.argmin(axis=1)
            v[h] = marginal[np.arange(n_s), choice]
        probs[h, np.arange(n_s), choice] = 1.0
        v_next = v[h]
    side = Side.MAX if responder_is_max else Side.MIN
    return ValueTables(_ro(v), _ro(q)), Policy(side, probs)


def ne_gap(game: MarkovGame, pair: PolicyPair) -> float:
    """Sum of both players' exploitabilities at the initial state.

    Zero exactly at a Nash equilibrium.  Rounding may produce values down
    to -GAP_CLAMP (reported as 0); anything lower means the evaluator and
    the inputs disagree and raises.
    """
    vs_nu, _ = best_response(game, pair.nu)
    vs_mu, _ = best_response(game, pair.mu)
    gap = float(vs_nu.v[0, game.initial_state] - vs_mu.v[0, game.initial_state])
    if gap < -GAP_CLAMP:
        raise NumericalError(f"ne_gap {gap} below -{GAP_CLAMP}: inconsistent inputs")
    return max(gap, 0.0)


def nash_q(game: MarkovGame) -> tuple[ValueTables, PolicyPair]:
    """Equilibrium tables Q*, V* and an equilibrium policy pair.

    Backward over stages: Q*_h = r_h + P_h V*_{h+1}, then each state's
    matrix game Q*_h(s,:,:) is solved exactly.  The value tables are the
    unique equilibrium values (up to LP tolerance) even when the optimal
    policies are not unique.
    """
    h_len, n_s, n_a, n_b = game.shape
    v = np.zeros((h_len, n_s))
    q = np.zeros((h_len, n_s, n_a, n_b))
    mu = np.zeros((h_len, n_s, n_a))
    nu = np.zeros((h_len, n_s, n_b))
    v_next = np.zeros(n_s)
    for h in range(h_len - 1, -1, -1):
        q[h] = game.rewards[h] + np.einsum("sabn,n->sab", game.transitions[h], v_next)
        for s in range(n_s):
            sol = matrix_game_solve(q[h, s])
            v[h, s] = sol.value
            mu[h, s] = sol.row_strategy
            nu[h, s] = sol.col_strategy
        v_next = v[h]
    pair = PolicyPair(Policy(Side.MAX, mu), Policy(Side.MIN, nu))
    return ValueTables(_ro(v), _ro(q)), pair


def q_error(q_estimate: np.ndarray, q_star: np.ndarray) -> np.ndarray:
    """Per-stage sup-norm distance max_{s,a,b} |Q - Q*|, shape (H,)."""
    q_estimate = np.asarray(q_estimate)
    q_star = np.asarray(q_star)
    if q_estimate.shape != q_star.shape:
        raise ValueError(f"shape mismatch: {q_estimate.shape} vs {q_star.shape}")
    return np.abs(q_estimate - q_star).reshape(q_estimate.shape[0], -1).max(axis=1)


def _check_pair_shape(game: MarkovGame, pair: PolicyPair):
    h_len, n_s, n_a, n_b = game.shape
    if pair.mu.probs.shape != (h_len, n_s, n_a):
        raise ValueError(f"mu shape {pair.mu.probs.shape} != {(h_len, n_s, n_a)}")
    if pair.nu.probs.shape != (h_len, n_s, n_b):
        raise ValueError(f"nu shape {pair.nu.probs.shape} != {(h_len, n_s, n_b)}")


def _ro(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr
