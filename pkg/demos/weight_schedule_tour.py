"""The step-size/averaging schedule and its verified algebra.

Everything the solver does is averaged with the profile weights induced
by alpha_t = (H+1)/(H+t).  This script shows what the profile looks like,
the closed-form ratio between adjacent weights, the O(1)-memory averaging
recurrence, and the sweep verifiers for the profile inequalities.

Run: python demos/weight_schedule_tour.py
"""

import numpy as np

from markovgames import WeightSchedule

schedule = WeightSchedule(horizon=3)

print("step sizes alpha_t = (H+1)/(H+t) for H=3:")
print("  ", [round(schedule.alpha(t), 4) for t in range(1, 9)])

print("\naveraging profile alpha_t^i at t=8 (recent iterates dominate):")
profile = schedule.alpha_profile(8)
print("  ", np.round(profile, 4).tolist(), " sum:", profile.sum())

print("\nadjacent-weight ratio w_i/w_{i-1} = (H+i-1)/(i-1):")
print("  ", [round(schedule.weight_ratio(i), 4) for i in range(2, 9)])
print("  profile reproduces it:",
      np.round(profile[1:] / profile[:-1], 4).tolist())

print("\nrunning-average recurrence == profile-weighted sum:")
rng = np.random.default_rng(0)
xs = rng.random(1000)
xbar = 0.0
for t in range(1, 1001):
    a = schedule.alpha(t)
    xbar = (1 - a) * xbar + a * xs[t - 1]
direct = schedule.alpha_profile(1000) @ xs
print(f"  recurrence {xbar:.15f}  direct {direct:.15f}")

print("\nweighted harmonic sum against its (1+1/H)/t cap:")
for t in (1, 10, 100, 1000):
    lhs = schedule.weighted_harmonic(t)
    cap = (1 + 1 / schedule.horizon) / t
    print(f"  t={t:5d}: sum={lhs:.6e}  cap={cap:.6e}  slack={cap - lhs:.2e}")

print("\nfull property sweep (P1-P6) for H=1..4, t<=1500:")
for horizon in range(1, 5):
    report = WeightSchedule(horizon).verify_lemma_a(1500)
    worst = min(c.min_slack for c in report.checks)
    print(f"  H={horizon}: all_passed={report.all_passed}  "
          f"worst slack {worst:.2e}")
print("\n(the CLI equivalent: markovgames verify-weights --H-max 8 --t-max 5000)")
