"""Online run diagnostics: regrets, value-estimation error, bound slacks.

Everything the solver's convergence analysis tracks is reproducible from
O(1)-memory accumulators of the form

    xbar_t = (1 - alpha_t) * xbar_{t-1} + alpha_t * x_t,

which equals the profile-weighted sum over the whole history (the profile
obeys alpha_{t+1}^i = (1 - alpha_{t+1}) * alpha_t^i), so no per-iteration
history is stored.  From the accumulators this module derives:

* the state-wise weighted regrets of the two players (the best fixed
  action's weighted payoff minus the realized weighted payoff, and its
  mirror for the minimizer),
* the per-stage sup-norm error of the running Q estimate against the
  equilibrium tables Q*,
* slack values for every analytic bound the update scheme satisfies
  (named thm1, lemma2, lemma3, lemma5, eq8, eq9, lemma1 in the CSV
  contract); a check passes when its slack is above a small negative
  tolerance that absorbs stacked LP/DP rounding.

Checks that need Q* are skipped (reported as NaN, never as passed) when
delta metrics are disabled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .equilibrium import ne_gap, q_error
from .games import MarkovGame, Policy, PolicyPair, Side

CLOSED_FORM_TOL = -1e-9   # bounds that involve only run quantities
QSTAR_TOL = -1e-8         # bounds that pull in LP-accurate Q*

# minimum admissible slack per CSV column; NaN columns are "skipped"
STRICT_THRESHOLDS = {
    "thm1_slack": CLOSED_FORM_TOL,
    "lemma2_min_slack": QSTAR_TOL,
    "lemma3_min_slack": CLOSED_FORM_TOL,
    "lemma5_min_slack": QSTAR_TOL,
    "eq8_min_slack": QSTAR_TOL,
    "eq9_min_slack": QSTAR_TOL,
    "lemma1_slack": QSTAR_TOL,
}

CSV_COLUMNS = ("t", "ne_gap_avg", "ne_gap_last", "delta_max", "reg_sum_max",
               "reg_max", "thm1_slack", "lemma2_min_slack", "lemma3_min_slack",
               "lemma5_min_slack", "eq8_min_slack", "eq9_min_slack")


@dataclass
class MetricAccumulators:
    """Profile-weighted running sums, one solver run each (single writer).

    avg_loss_max[h,s,a]   weighted sum of the max-player loss vectors [Q nu]
    avg_loss_min[h,s,b]   weighted sum of the min-player loss vectors [Q' mu]
    avg_realized[h,s]     weighted sum of the realized payoffs <mu, Q nu>
    avg_path[h,s]         weighted sum of squared L1 policy steps; the
                          first-iteration term is defined to be zero
    avg_delta[h]          weighted sum of sup-norm Q errors (needs Q*)
    """

    avg_loss_max: np.ndarray
    avg_loss_min: np.ndarray
    avg_realized: np.ndarray
    avg_path: np.ndarray
    avg_delta: np.ndarray | None
    t: int = 0

    @classmethod
    def zeros(cls, horizon: int, num_states: int, num_actions_max: int,
              num_actions_min: int, track_delta: bool) -> "MetricAccumulators":
        return cls(
            avg_loss_max=np.zeros((horizon, num_states, num_actions_max)),
            avg_loss_min=np.zeros((horizon, num_states, num_actions_min)),
            avg_realized=np.zeros((horizon, num_states)),
            avg_path=np.zeros((horizon, num_states)),
            avg_delta=np.zeros(horizon) if track_delta else None,
        )

    def update(self, alpha_t: float, loss_max: np.ndarray, loss_min: np.ndarray,
               realized: np.ndarray, path: np.ndarray,
               delta: np.ndarray | None) -> None:
        self.t += 1
        self.avg_loss_max += alpha_t * (loss_max - self.avg_loss_max)
        self.avg_loss_min += alpha_t * (loss_min - self.avg_loss_min)
        self.avg_realized += alpha_t * (realized - self.avg_realized)
        self.avg_path += alpha_t * (path - self.avg_path)
        if self.avg_delta is not None:
            if delta is None:
                raise ValueError("delta tracking is on but no delta was supplied")
            self.avg_delta += alpha_t * (delta - self.avg_delta)


def regret_tables(acc: MetricAccumulators) -> tuple[np.ndarray, np.ndarray]:
    """State-wise weighted regrets of both players, each shaped (H, S).

    The best fixed comparator of a linear form over the simplex sits at a
    vertex, so the max over mixed comparators reduces to a max over actions.
    """
    reg1 = acc.avg_loss_max.max(axis=2) - acc.avg_realized
    reg2 = acc.avg_realized - acc.avg_loss_min.min(axis=2)
    return reg1, reg2


def regret_pair(acc: MetricAccumulators, h: int, s: int) -> tuple[float, float]:
    reg1, reg2 = regret_tables(acc)
    return float(reg1[h, s]), float(reg2[h, s])


# --- bound slacks -----------------------------------------------------------
# Convention: every check returns slack = bound - quantity; it passes when
# the slack is >= the column's threshold in STRICT_THRESHOLDS.

def check_theorem1(ne_gap_avg: float, t: int, horizon: int, num_actions_max: int,
                   num_actions_min: int, c_eta: float) -> float:
    """Slack of the averaged-policy guarantee 320 H^5 log(AB) / (c_eta t)."""
    bound = 320.0 * horizon ** 5 * math.log(num_actions_max * num_actions_min) / (c_eta * t)
    return bound - ne_gap_avg


def check_lemma2(reg_sum, path, t: int, horizon: int, num_actions_max: int,
                 num_actions_min: int, c_eta: float):
    """Slack of the per-state regret-sum bound with its negative path term."""
    eta = c_eta / horizon ** 2
    bound = 3.0 * horizon ** 3 * math.log(num_actions_max * num_actions_min) / (c_eta * t)
    return bound - 4.0 * eta * horizon ** 3 * np.asarray(path) - np.asarray(reg_sum)


def check_lemma3(delta_h, t: int, horizon: int, num_actions_max: int,
                 num_actions_min: int, c_eta: float):
    """Slack of the Q-error bound 5 e^2 H^4 log(AB) / (c_eta t)."""
    bound = (5.0 * math.e ** 2 * horizon ** 4
             * math.log(num_actions_max * num_actions_min) / (c_eta * t))
    return bound - np.asarray(delta_h)


def check_lemma5(reg_sum, avg_delta_h):
    """Slack of approximate non-negativity: reg1 + reg2 >= -2 sum_i a_t^i delta^i."""
    return np.asarray(reg_sum) + 2.0 * np.asarray(avg_delta_h)


def check_recursion8(delta_h, avg_delta_next, reg_next):
    """Slack of the stage recursion delta_h^t <= sum_i a_t^i delta_{h+1}^i + reg_{h+1}^t."""
    return np.asarray(avg_delta_next) + np.asarray(reg_next) - np.asarray(delta_h)


def check_eq9(reg_max_h, avg_delta_h, t: int, horizon: int, num_actions_max: int,
              num_actions_min: int, c_eta: float):
    """Slack of the maximal-regret bound 5 H^3 log(AB)/(c_eta t) + avg_delta/H."""
    bound = 5.0 * horizon ** 3 * math.log(num_actions_max * num_actions_min) / (c_eta * t)
    return bound + np.asarray(avg_delta_h) / horizon - np.asarray(reg_max_h)


def check_lemma1(max_reg_sum_h, avg_delta, ne_gap_avg: float) -> float:
    """Slack of the gap decomposition 2 sum_h (max_s reg-sum + 2 avg_delta)."""
    bound = 2.0 * float(np.sum(np.asarray(max_reg_sum_h) + 2.0 * np.asarray(avg_delta)))
    return bound - ne_gap_avg


@dataclass(frozen=True)
class IterationMetrics:
    """One checkpoint record."""

    t: int
    ne_gap_avg: float
    ne_gap_last: float
    delta: np.ndarray | None          # per-stage sup-norm Q error, or None
    reg1: np.ndarray                  # max over s of the max-player regret, per stage
    reg2: np.ndarray                  # max over s of the min-player regret, per stage
    reg_max: np.ndarray               # max over s and players, per stage
    reg_sum_max: float                # max over (h, s) of reg1 + reg2
    bound_slacks: dict[str, float] = field(default_factory=dict)

    def failed_checks(self) -> list[str]:
        out = []
        for name, slack in self.bound_slacks.items():
            if math.isnan(slack):
                continue  # skipped, never passed or failed
            if slack < STRICT_THRESHOLDS[name]:
                out.append(name)
        return out


def collect_metrics(state, game: MarkovGame, config) -> IterationMetrics:
    """Snapshot every tracked quantity and bound slack at the current t."""
    t = state.t
    h_len, _, n_a, n_b = game.shape
    c_eta = config.c_eta
    acc = state.metrics

    avg_pair = _pair(state.avg_mu, state.avg_nu)
    last_pair = _pair(state.mu, state.nu)
    gap_avg = ne_gap(game, avg_pair)
    gap_last = ne_gap(game, last_pair)

    reg1_hs, reg2_hs = regret_tables(acc)
    reg_sum_hs = reg1_hs + reg2_hs
    reg1_h = reg1_hs.max(axis=1)
    reg2_h = reg2_hs.max(axis=1)
    reg_max_h = np.maximum(reg1_hs, reg2_hs).max(axis=1)

    slacks = {
        "thm1_slack": check_theorem1(gap_avg, t, h_len, n_a, n_b, c_eta),
        "lemma2_min_slack": float(
            check_lemma2(reg_sum_hs, acc.avg_path, t, h_len, n_a, n_b, c_eta).min()),
    }
    if state.q_star is not None:
        delta_h = q_error(state.q, state.q_star.q)
        avg_delta = acc.avg_delta
        slacks["lemma3_min_slack"] = float(
            check_lemma3(delta_h, t, h_len, n_a, n_b, c_eta).min())
        slacks["lemma5_min_slack"] = float(
            check_lemma5(reg_sum_hs, avg_delta[:, None]).min())
        if h_len >= 2:
            slacks["eq8_min_slack"] = float(
                check_recursion8(delta_h[:-1], avg_delta[1:], reg_max_h[1:]).min())
        else:
            slacks["eq8_min_slack"] = float("nan")
        slacks["eq9_min_slack"] = float(
            check_eq9(reg_max_h, avg_delta, t, h_len, n_a, n_b, c_eta).min())
        slacks["lemma1_slack"] = check_lemma1(reg_sum_hs.max(axis=1), avg_delta, gap_avg)
    else:
        delta_h = None
        for name in ("lemma3_min_slack", "lemma5_min_slack", "eq8_min_slack",
                     "eq9_min_slack"):
            slacks[name] = float("nan")

    return IterationMetrics(
        t=t, ne_gap_avg=gap_avg, ne_gap_last=gap_last, delta=delta_h,
        reg1=reg1_h, reg2=reg2_h, reg_max=reg_max_h,
        reg_sum_max=float(reg_sum_hs.max()), bound_slacks=slacks)


def _pair(mu: np.ndarray, nu: np.ndarray) -> PolicyPair:
    return PolicyPair(Policy(Side.MAX, mu.copy()), Policy(Side.MIN, nu.copy()))


# --- CSV emission -----------------------------------------------------------

def csv_header(delta_metrics: bool) -> str:
    cols = list(CSV_COLUMNS)
    if delta_metrics:
        cols.append("lemma1_slack")
    return ",".join(cols)


def csv_rows(result) -> str:
    """Checkpoint table for a run result; shortest round-trip float encoding."""
    delta_on = result.delta_metrics
    lines = [csv_header(delta_on)]
    for m in result.checkpoints:
        delta_max = float("nan") if m.delta is None else float(np.max(m.delta))
        cells = [
            str(m.t), repr(m.ne_gap_avg), repr(m.ne_gap_last), repr(delta_max),
            repr(m.reg_sum_max), repr(float(np.max(m.reg_max))),
            repr(m.bound_slacks["thm1_slack"]),
            repr(m.bound_slacks["lemma2_min_slack"]),
            repr(m.bound_slacks["lemma3_min_slack"]),
            repr(m.bound_slacks["lemma5_min_slack"]),
            repr(m.bound_slacks["eq8_min_slack"]),
            repr(m.bound_slacks["eq9_min_slack"]),
        ]
        if delta_on:
            cells.append(repr(m.bound_slacks["lemma1_slack"]))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def emit_csv(result, sink) -> int:
    """Write the checkpoint table to a path or file object; returns bytes written."""
    text = csv_rows(result)
    if hasattr(sink, "write"):
        sink.write(text)
        return len(text.encode("utf-8"))
    from pathlib import Path
    data = text.encode("utf-8")
    Path(sink).write_bytes(data)
    return len(data)


# --- empirical rate ---------------------------------------------------------

GAP_FLOOR = 1e-13  # gaps at or below this are solved-to-precision, not data


@dataclass(frozen=True)
class RateFit:
    slope: float
    r_squared: float
    n_points: int


def fit_rate(ts, gaps) -> RateFit:
    """Least-squares slope of log(gap) against log(t).

    A clean power law gap = c * t^p fits slope p exactly; the solver's
    averaged-policy gap should fit close to -1.
    """
    ts = np.asarray(ts, dtype=np.float64)
    gaps = np.asarray(gaps, dtype=np.float64)
    if ts.shape != gaps.shape or ts.ndim != 1:
        raise ValueError("ts and gaps must be matching 1-d sequences")
    usable = gaps > GAP_FLOOR
    if usable.sum() < 3:
        raise ValueError(f"need >= 3 checkpoints with gap > {GAP_FLOOR}, "
                         f"got {int(usable.sum())}")
    x = np.log(ts[usable])
    y = np.log(gaps[usable])
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return RateFit(float(slope), r_squared, int(usable.sum()))
