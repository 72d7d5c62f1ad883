"""Optimistic exponential-weights self-play with smooth value updates.

One iteration does three things, for every stage h and state s at once:

1. Policy update.  Each player runs follow-the-regularized-leader over its
   accumulated loss vectors, weighted so that iterate i carries relative
   weight w_i (w_i / w_{i-1} = (H+i-1)/(i-1), growing like i**H), plus an
   optimistic predictor: the previous iteration's loss vector counted once
   more at full weight.  With entropy regularization this is a softmax of

       eta * [ (w_{t-1}/w_t) * L_{t-1} + x_{t-1} ]

   where L is the w-normalized loss sum and x the predictor; the sign
   flips for the minimizer.  eta = c_eta / H**2.

2. Value update.  Backward over stages, the Q table moves a step
   alpha_t = (H+1)/(H+t) toward the one-step lookahead target
   r_h + P_h <mu_{h+1}, Q_{h+1} nu_{h+1}> evaluated at the new policies.

3. Averaging.  Output policies are the alpha-profile-weighted averages of
   all iterates, maintained by the same O(1) recurrence as every other
   accumulator.

Raw weights w_i are never materialized; the solver stores the
w_t-normalized sum L_t = (w_{t-1}/w_t) L_{t-1} + x_t, whose entries stay
O(t * H).  All reductions run in fixed ascending index order, so a run is
bitwise reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import diagnostics
from .equilibrium import NumericalError, ValueTables, nash_q
from .games import MarkovGame, Policy, PolicyPair, Side, uniform_policy_pair
from .weights import WeightSchedule

C_ETA_MAX = 0.125


@dataclass(frozen=True)
class SolverConfig:
    """Run parameters.  c_eta sets the step size eta = c_eta / H**2."""

    iterations: int
    c_eta: float = C_ETA_MAX
    checkpoints: tuple[int, ...] = ()
    optimistic: bool = True
    seed_note: str | None = None
    delta_metrics: bool = True   # track Q* error (costs one nash_q per run)

    def __post_init__(self):
        if not 0.0 < self.c_eta <= C_ETA_MAX:
            raise ValueError(f"c_eta must lie in (0, {C_ETA_MAX}], got {self.c_eta}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        cps = tuple(int(c) for c in self.checkpoints)
        if any(b <= a for a, b in zip(cps, cps[1:])):
            raise ValueError("checkpoints must be strictly ascending")
        if cps and not (1 <= cps[0] and cps[-1] <= self.iterations):
            raise ValueError("checkpoints must lie in [1, iterations]")
        object.__setattr__(self, "checkpoints", cps)


def default_checkpoints(iterations: int, count: int = 32) -> tuple[int, ...]:
    """count log-spaced iteration indices in [1, T] plus T, deduplicated."""
    pts = np.geomspace(1.0, float(iterations), num=max(count, 1))
    pts = np.unique(np.rint(pts).astype(int))
    pts = pts[(pts >= 1) & (pts <= iterations)]
    return tuple(int(p) for p in np.unique(np.append(pts, iterations)))


class SolverState:
    """All running accumulators of one solve; owned by a single run."""

    def __init__(self, game: MarkovGame, config: SolverConfig):
        h_len, n_s, n_a, n_b = game.shape
        self.t = 0
        self.schedule = WeightSchedule(game.horizon)
        self.q = np.zeros((h_len, n_s, n_a, n_b))
        self.loss_max = np.zeros((h_len, n_s, n_a))   # w_t-normalized sums
        self.loss_min = np.zeros((h_len, n_s, n_b))
        self.last_loss_max = np.zeros((h_len, n_s, n_a))  # optimistic predictors
        self.last_loss_min = np.zeros((h_len, n_s, n_b))
        uniform = uniform_policy_pair(game)
        self.mu = uniform.mu.probs.copy()   # placeholder until the first update
        self.nu = uniform.nu.probs.copy()
        self.prev_mu = self.mu
        self.prev_nu = self.nu
        self.avg_mu = np.zeros_like(self.mu)  # weight mass 0 until t = 1
        self.avg_nu = np.zeros_like(self.nu)
        self.metrics = diagnostics.MetricAccumulators.zeros(
            h_len, n_s, n_a, n_b, config.delta_metrics)
        self.q_star: ValueTables | None = None

    def policy_pair(self) -> PolicyPair:
        return PolicyPair(Policy(Side.MAX, self.mu.copy()),
                          Policy(Side.MIN, self.nu.copy()))

    def averaged_policy_pair(self) -> PolicyPair:
        return PolicyPair(Policy(Side.MAX, self.avg_mu.copy()),
                          Policy(Side.MIN, self.avg_nu.copy()))


def init(game: MarkovGame, config: SolverConfig) -> SolverState:
    """Fresh state: Q = 0, empty accumulators, t = 0.

    When delta metrics are on, the equilibrium tables are computed once
    here and cached on the state.
    """
    state = SolverState(game, config)
    if config.delta_metrics:
        state.q_star, _ = nash_q(game)
    return state


def policy_update(state: SolverState, game: MarkovGame,
                  config: SolverConfig) -> tuple[np.ndarray, np.ndarray]:
    """Exponential-weights step for both players at iteration state.t."""
    t = state.t
    horizon = game.horizon
    eta = config.c_eta / horizon ** 2
    rho = (t - 1) / (horizon + t - 1)  # w_{t-1}/w_t; 0 at t = 1
    z_max = state.loss_max * rho
    z_min = state.loss_min * rho
    if config.optimistic:
        z_max = z_max + state.last_loss_max
        z_min = z_min + state.last_loss_min
    z_max = eta * z_max
    z_min = -eta * z_min
    if not (np.isfinite(z_max).all() and np.isfinite(z_min).all()):
        raise NumericalError("non-finite policy exponent: accumulator corruption")
    state.prev_mu = state.mu
    state.prev_nu = state.nu
    state.mu = _softmax(z_max)
    state.nu = _softmax(z_min)
    return state.mu, state.nu


def value_update(state: SolverState, game: MarkovGame) -> np.ndarray:
    """Move Q one alpha_t step toward the lookahead target, backward in h."""
    a_t = state.schedule.alpha(state.t)
    v_next = np.zeros(game.num_states)  # no continuation after the last stage
    for h in range(game.horizon - 1, -1, -1):
        target = game.rewards[h] + np.einsum(
            "sabn,n->sab", game.transitions[h], v_next)
        state.q[h] += a_t * (target - state.q[h])
        v_next = np.einsum("sa,sab,sb->s", state.mu[h], state.q[h], state.nu[h])
    return state.q


def advance(state: SolverState, game: MarkovGame, config: SolverConfig) -> SolverState:
    """One full iteration: policies, values, predictors, averages, metrics."""
    state.t += 1
    t = state.t
    policy_update(state, game, config)
    value_update(state, game)

    loss_max = np.einsum("hsab,hsb->hsa", state.q, state.nu)
    loss_min = np.einsum("hsab,hsa->hsb", state.q, state.mu)
    rho = (t - 1) / (game.horizon + t - 1)
    state.loss_max *= rho
    state.loss_max += loss_max
    state.loss_min *= rho
    state.loss_min += loss_min
    state.last_loss_max = loss_max
    state.last_loss_min = loss_min

    a_t = state.schedule.alpha(t)
    state.avg_mu += a_t * (state.mu - state.avg_mu)
    state.avg_nu += a_t * (state.nu - state.avg_nu)

    realized = np.einsum("hsa,hsa->hs", loss_max, state.mu)
    if t == 1:
        path = np.zeros_like(realized)
    else:
        path = (np.abs(state.mu - state.prev_mu).sum(axis=2) ** 2
                + np.abs(state.nu - state.prev_nu).sum(axis=2) ** 2)
    delta = None
    if state.q_star is not None:
        delta = np.abs(state.q - state.q_star.q).reshape(game.horizon, -1).max(axis=1)
    state.metrics.update(a_t, loss_max, loss_min, realized, path, delta)
    return state


@dataclass(frozen=True)
class RunResult:
    """Output of one complete run: averaged policies plus checkpoint metrics."""

    config: SolverConfig
    game_shape: tuple[int, int, int, int]
    avg_policies: PolicyPair
    checkpoints: tuple[diagnostics.IterationMetrics, ...]
    q_star: ValueTables | None = None

    @property
    def delta_metrics(self) -> bool:
        return self.config.delta_metrics

    @property
    def final_gap(self) -> float:
        return self.checkpoints[-1].ne_gap_avg if self.checkpoints else float("nan")


def run(game: MarkovGame, config: SolverConfig) -> RunResult:
    """Run the full loop; deterministic given (game, config)."""
    state = init(game, config)
    wanted = set(config.checkpoints)
    records = []
    for t in range(1, config.iterations + 1):
        advance(state, game, config)
        if t in wanted:
            records.append(diagnostics.collect_metrics(state, game, config))
    return RunResult(config=config, game_shape=game.shape,
                     avg_policies=state.averaged_policy_pair(),
                     checkpoints=tuple(records), q_star=state.q_star)


def _softmax(z: np.ndarray) -> np.ndarray:
    """Row softmax with max subtraction; exponents here grow linearly in t,
    so the shift is required, not cosmetic."""
    e = np.exp(z - z.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)
