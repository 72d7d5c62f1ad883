"""Solvers, evaluators, and diagnostics for finite-horizon two-player
zero-sum Markov games.

The package has three layers:

* ``games``       tabular game/policy containers, validation, fixtures,
                  seeded generation, JSON round-tripping.
* ``equilibrium`` exact machinery: matrix-game LP solves, policy
                  evaluation, best responses, minimax DP (Q*), NE gap.
* ``weights`` / ``solver`` / ``diagnostics``
                  the optimistic exponential-weights self-play solver
                  with smooth value updates, its step-size algebra, and
                  online bound monitoring.

``markovgames.cli`` provides the command-line front door (``gen``,
``solve``, ``verify-weights``, ``sweep``).
"""

from .diagnostics import (IterationMetrics, MetricAccumulators, RateFit,
                          check_eq9, check_lemma1, check_lemma2, check_lemma3,
                          check_lemma5, check_recursion8, check_theorem1,
                          emit_csv, fit_rate, regret_pair, regret_tables)
from .equilibrium import (MatrixGameSolution, NumericalError, ValueTables,
                          best_response, matrix_game_solve, nash_q, ne_gap,
                          policy_value, q_error)
from .games import (GameFormatError, InvalidGameError, MarkovGame, Policy,
                    PolicyPair, Side, SplitMix64, Violation, generate_random,
                    load, load_policy_pair, make_fixture, save,
                    save_policy_pair, uniform_policy_pair, validate)
from .solver import (RunResult, SolverConfig, SolverState, advance,
                     default_checkpoints, init, policy_update, run,
                     value_update)
from .weights import LemmaReport, PropertyCheck, WeightSchedule

__version__ = "0.1.0"

__all__ = [
    "IterationMetrics", "MetricAccumulators", "RateFit", "check_eq9",
    "check_lemma1", "check_lemma2", "check_lemma3", "check_lemma5",
    "check_recursion8", "check_theorem1", "emit_csv", "fit_rate",
    "regret_pair", "regret_tables",
    "MatrixGameSolution", "NumericalError", "ValueTables", "best_response",
    "matrix_game_solve", "nash_q", "ne_gap", "policy_value", "q_error",
    "GameFormatError", "InvalidGameError", "MarkovGame", "Policy",
    "PolicyPair", "Side", "SplitMix64", "Violation", "generate_random",
    "load", "load_policy_pair", "make_fixture", "save", "save_policy_pair",
    "uniform_policy_pair", "validate",
    "RunResult", "SolverConfig", "SolverState", "advance",
    "default_checkpoints", "init", "policy_update", "run", "value_update",
    "LemmaReport", "PropertyCheck", "WeightSchedule",
]
