"""Step-size and averaging weight schedule used by the smooth solver.

The whole algorithm is driven by one scalar sequence,

    alpha_t = (H + 1) / (H + t),    t = 1, 2, ...

where ``H`` is the game horizon.  Running the recurrence
``xbar_t = (1 - alpha_t) * xbar_{t-1} + alpha_t * x_t`` averages a sequence
with the induced profile weights

    alpha_t^i = alpha_i * prod_{j=i+1..t} (1 - alpha_j),

which sum to one, grow in ``i`` (recent iterates dominate), and obey a
family of algebraic inequalities that the solver's convergence rate rests
on.  This module exposes the schedule, the profile, the relative weights
``w_i = alpha_t^i / alpha_t^1`` (only as ratios: raw ``w_i`` grow like
``i**H`` and are never materialized), and sweep-style verifiers for every
inequality (properties P1-P6 plus the weighted-harmonic bound).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# absolute slack allowed when checking the exact algebraic identities
PROPERTY_TOL = 1e-12


@dataclass(frozen=True)
class PropertyCheck:
    """Outcome of sweeping one inequality over t = 1..t_max."""

    name: str
    description: str
    min_slack: float
    argmin_t: int
    passed: bool


@dataclass(frozen=True)
class LemmaReport:
    """All property checks for one horizon, plus the sweep bounds."""

    horizon: int
    t_max: int
    tolerance: float
    checks: tuple[PropertyCheck, ...] = field(default_factory=tuple)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[PropertyCheck]:
        return [c for c in self.checks if not c.passed]


@dataclass(frozen=True)
class WeightSchedule:
    """Weight sequences for a fixed horizon.

    Stateless: every operation is a pure function of (horizon, t), safe
    under unrestricted concurrent use.
    """

    horizon: int

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")

    def alpha(self, t: int) -> float:
        """Step size alpha_t = (H+1)/(H+t); alpha(1) = 1."""
        if t < 1:
            raise ValueError(f"iteration index must be >= 1, got {t}")
        return (self.horizon + 1) / (self.horizon + t)

    def decay_factor(self, t: int) -> float:
        """1 - alpha(t): the shrink applied to every existing profile weight
        when iteration t arrives.  decay_factor(1) = 0 (the first iterate
        wipes any history)."""
        if t < 1:
            raise ValueError(f"iteration index must be >= 1, got {t}")
        return (t - 1) / (self.horizon + t)

    def weight_ratio(self, i: int) -> float:
        """Relative weight growth w_i / w_{i-1} = (H+i-1)/(i-1), i >= 2.

        Always >= 1 and at most H+1 (the maximum is attained at i = 2).
        """
        if i < 2:
            raise ValueError(f"weight_ratio needs i >= 2, got {i}")
        return (self.horizon + i - 1) / (i - 1)

    def alpha_profile(self, t: int) -> np.ndarray:
        """Averaging weights (alpha_t^1, ..., alpha_t^t).

        Computed backward from alpha_t^t = alpha_t by dividing out the
        closed-form ratio alpha_t^i / alpha_t^{i-1} = (H+i-1)/(i-1),
        rather than by the forward product of (1 - alpha_j) terms; the
        backward form keeps relative rounding O(t*eps) and cannot be hurt
        by underflow of long products.
        """
        if t < 1:
            raise ValueError(f"iteration index must be >= 1, got {t}")
        if t == 1:
            return np.ones(1)
        i = np.arange(2.0, t + 1.0)
        step_down = (i - 1.0) / (self.horizon + i - 1.0)  # alpha_t^{i-1}/alpha_t^i
        profile = np.empty(t)
        profile[t - 1] = self.alpha(t)
        # suffix products: profile[i-1] = alpha_t * prod_{j=i+1..t} step_down[j]
        profile[: t - 1] = profile[t - 1] * np.cumprod(step_down[::-1])[::-1]
        return profile

    def weighted_harmonic(self, t: int) -> float:
        """sum_i alpha_t^i / i, bounded above by (1 + 1/H)/t."""
        profile = self.alpha_profile(t)
        return float(profile @ (1.0 / np.arange(1.0, t + 1.0)))

    def verify_lemma_a(self, t_max: int, tol: float = PROPERTY_TOL) -> LemmaReport:
        """Sweep properties P1-P6 of the profile weights over t <= t_max.

        P1  sum_i alpha_t^i = 1
        P2  alpha_t^i <= i/t
        P3  alpha_t^i / alpha_t^{i-1} matches the closed form (H+i-1)/(i-1)
        P4  the profile is nondecreasing in i
        P5  sum_i (alpha_t^i)^2 <= sum_{i<=t} alpha_i^2 <= H+2
        P6  for the nonincreasing probe b_i = 1/i,
            sum_i alpha_t^i b_i <= (1/t) sum_i b_i

        Slack convention: for "lhs <= rhs" the slack is rhs - lhs, for
        identities it is -|difference|; a property passes iff its minimum
        slack over the sweep is >= -tol.
        """
        if t_max < 1:
            raise ValueError(f"t_max must be >= 1, got {t_max}")
        h = float(self.horizon)
        idx = np.arange(1.0, t_max + 1.0)
        inv_idx = 1.0 / idx
        alpha_sq_prefix = np.cumsum(((h + 1.0) / (h + idx)) ** 2)
        harmonic_prefix = np.cumsum(inv_idx)

        worst = {name: (np.inf, 0) for name in ("P1", "P2", "P3", "P4", "P5", "P6")}

        def record(name, slack, t):
            if slack < worst[name][0]:
                worst[name] = (slack, t)

        for t in range(1, t_max + 1):
            profile = self.alpha_profile(t)
            record("P1", -abs(float(profile.sum()) - 1.0), t)
            record("P2", float((idx[:t] / t - profile).min()), t)
            if t >= 2:
                ratios = profile[1:] / profile[:-1]
                closed = (h + idx[: t - 1]) / idx[: t - 1]
                record("P3", -float(np.abs(ratios - closed).max()), t)
                record("P4", float(np.diff(profile).min()), t)
            else:
                record("P3", 0.0, t)
                record("P4", 0.0, t)
            sq = float(profile @ profile)
            record("P5", min(alpha_sq_prefix[t - 1] - sq,
                             h + 2.0 - alpha_sq_prefix[t - 1]), t)
            record("P6", harmonic_prefix[t - 1] / t - float(profile @ inv_idx[:t]), t)

        descriptions = {
            "P1": "profile weights sum to 1",
            "P2": "alpha_t^i <= i/t",
            "P3": "profile ratio matches closed form (H+i-1)/(i-1)",
            "P4": "profile nondecreasing in i",
            "P5": "sum of squared weights <= H+2",
            "P6": "nonincreasing probe: weighted avg <= plain avg",
        }
        checks = tuple(
            PropertyCheck(name, descriptions[name], worst[name][0], worst[name][1],
                          worst[name][0] >= -tol)
            for name in ("P1", "P2", "P3", "P4", "P5", "P6")
        )
        return LemmaReport(self.horizon, t_max, tol, checks)

    def verify_weighted_harmonic(self, t_max: int, tol: float = PROPERTY_TOL) -> PropertyCheck:
        """Sweep the bound sum_i alpha_t^i / i <= (1 + 1/H)/t over t <= t_max."""
        if t_max < 1:
            raise ValueError(f"t_max must be >= 1, got {t_max}")
        bound_scale = 1.0 + 1.0 / self.horizon
        min_slack, argmin_t = np.inf, 0
        for t in range(1, t_max + 1):
            slack = bound_scale / t - self.weighted_harmonic(t)
            if slack < min_slack:
                min_slack, argmin_t = slack, t
        return PropertyCheck("Lemma4", "weighted harmonic sum <= (1+1/H)/t",
                             float(min_slack), argmin_t, min_slack >= -tol)
