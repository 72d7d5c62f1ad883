"""Finite-horizon tabular two-player zero-sum Markov games.

A game is a dense description: horizon ``H``, ``S`` states, ``A`` actions
for the max-player, ``B`` for the min-player, a reward tensor
``r[h][s][a][b]`` with every entry in [0, 1] (payoff to the max-player,
loss to the min-player), a transition tensor ``P[h][s][a][b][s']`` whose
rows are probability vectors, and a fixed initial state.  Policies are
per-horizon, per-state action distributions.

Everything here is plumbing: validation, deterministic generation,
named test fixtures, and a JSON file format whose floating-point values
round-trip bit-exactly (shortest round-trip decimal encoding).
"""

from __future__ import annotations

import enum
import json
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

ROW_SUM_TOL = 1e-12
PROB_TOL = 1e-12

_MASK64 = (1 << 64) - 1


class GameFormatError(ValueError):
    """Raised when a game/policy document cannot be parsed."""


class InvalidGameError(ValueError):
    """Raised when a parsed game violates its invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid game: " + "; ".join(str(v) for v in self.violations))


@dataclass(frozen=True)
class Violation:
    """One invariant violation found by validate()."""

    field: str
    index: tuple
    magnitude: float
    message: str

    def __str__(self):
        return f"{self.field}{list(self.index)}: {self.message} (magnitude {self.magnitude:.3g})"


class Side(enum.Enum):
    MAX = "max"
    MIN = "min"


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class MarkovGame:
    """Immutable tabular game.  Safe to share across threads once built."""

    horizon: int
    num_states: int
    num_actions_max: int
    num_actions_min: int
    initial_state: int
    rewards: np.ndarray      # (H, S, A, B)
    transitions: np.ndarray  # (H, S, A, B, S)

    def __post_init__(self):
        object.__setattr__(self, "rewards", _freeze(self.rewards))
        object.__setattr__(self, "transitions", _freeze(self.transitions))

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return (self.horizon, self.num_states, self.num_actions_max, self.num_actions_min)


@dataclass(frozen=True)
class Policy:
    """Markov policy for one side: probs[h][s] is a distribution over actions."""

    side: Side
    probs: np.ndarray  # (H, S, A) for Side.MAX, (H, S, B) for Side.MIN

    def __post_init__(self):
        object.__setattr__(self, "probs", _freeze(self.probs))

    def row_sum_errors(self) -> np.ndarray:
        return np.abs(self.probs.sum(axis=-1) - 1.0)


@dataclass(frozen=True)
class PolicyPair:
    mu: Policy
    nu: Policy

    def __post_init__(self):
        if self.mu.side is not Side.MAX or self.nu.side is not Side.MIN:
            raise ValueError("PolicyPair needs (max-side mu, min-side nu)")
        if self.mu.probs.shape[:2] != self.nu.probs.shape[:2]:
            raise ValueError("mu and nu must cover the same (H, S) grid")


def validate(game: MarkovGame) -> list[Violation]:
    """Check every invariant; returns all violations (empty list = valid).

    Never raises: callers that must abort wrap the report themselves.
    """
    out = []
    h, s, a, b = game.shape
    if min(h, s, a, b) < 1:
        out.append(Violation("shape", game.shape, 0.0, "all extents must be >= 1"))
        return out
    expected_r = (h, s, a, b)
    expected_p = (h, s, a, b, s)
    if game.rewards.shape != expected_r:
        out.append(Violation("rewards", game.rewards.shape, 0.0,
                             f"shape {game.rewards.shape} != {expected_r}"))
        return out
    if game.transitions.shape != expected_p:
        out.append(Violation("transitions", game.transitions.shape, 0.0,
                             f"shape {game.transitions.shape} != {expected_p}"))
        return out
    if not (0 <= game.initial_state < s):
        out.append(Violation("initial_state", (game.initial_state,),
                             float(game.initial_state),
                             f"must lie in [0, {s})"))

    low = game.rewards < 0.0
    high = game.rewards > 1.0
    for idx in np.argwhere(low | high):
        val = float(game.rewards[tuple(idx)])
        out.append(Violation("rewards", tuple(int(i) for i in idx),
                             abs(val - np.clip(val, 0.0, 1.0)),
                             f"value {val!r} outside [0, 1]"))

    neg = game.transitions < 0.0
    for idx in np.argwhere(neg):
        val = float(game.transitions[tuple(idx)])
        out.append(Violation("transitions", tuple(int(i) for i in idx),
                             -val, f"negative probability {val!r}"))

    row_sums = game.transitions.sum(axis=-1)
    bad = np.abs(row_sums - 1.0) > ROW_SUM_TOL
    for idx in np.argwhere(bad):
        val = float(row_sums[tuple(idx)])
        out.append(Violation("transitions", tuple(int(i) for i in idx),
                             abs(val - 1.0), f"row sums to {val!r}, not 1"))
    return out


class SplitMix64:
    """splitmix64 stream; the documented PRNG for reproducible games.

    Uniform doubles are (next64 >> 11) * 2**-53, i.e. values in [0, 1).
    """

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_double(self) -> float:
        return (self.next_u64() >> 11) * 2.0 ** -53


def generate_random(seed: int, horizon: int, num_states: int,
                    num_actions_max: int, num_actions_min: int) -> MarkovGame:
    """Seeded random game, bit-reproducible across platforms.

    Draw order: all rewards in lexicographic (h, s, a, b) order, then the
    transition rows in the same order with s' ascending inside each row.
    Rewards are uniform on [0, 1); each transition row is a flat Dirichlet
    sample obtained by normalizing exponentials E = -ln(1 - u).
    """
    if min(horizon, num_states, num_actions_max, num_actions_min) < 1:
        raise ValueError("all extents must be >= 1")
    rng = SplitMix64(seed)
    n_rewards = horizon * num_states * num_actions_max * num_actions_min
    rewards = np.array([rng.next_double() for _ in range(n_rewards)])
    rewards = rewards.reshape(horizon, num_states, num_actions_max, num_actions_min)

    rows = np.empty((n_rewards, num_states))
    for r in range(n_rewards):
        draws = np.array([rng.next_double() for _ in range(num_states)])
        weights = -np.log(1.0 - draws)
        rows[r] = weights / weights.sum()
    transitions = rows.reshape(horizon, num_states, num_actions_max,
                               num_actions_min, num_states)
    return MarkovGame(horizon, num_states, num_actions_max, num_actions_min,
                      0, rewards, transitions)


_CONSTANT_RE = re.compile(r"^constant\((?P<c>[^)]+)\)$")

FIXTURE_NAMES = ("constant(c)", "matching_pennies", "rps", "single_entry", "two_stage")


def make_fixture(name: str, horizon: int | None = None) -> MarkovGame:
    """Small deterministic games used throughout the tests and demos.

    constant(c)       every reward is c; any horizon (default 2), 2 states
                      with uniform transitions.  All policies are equivalent.
    matching_pennies  one step, one state, payoff [[1,0],[0,1]].
    rps               one step, one state, shifted rock-paper-scissors
                      payoff with value 1/2.
    single_entry      one step, one state, payoff [[1,0],[0,0]].
    two_stage         two steps, two states; stage 1 pays [[1,0],[0,1]]
                      everywhere and moves to state 0 iff the players match,
                      stage 2 pays 1 in state 0 and 0 in state 1.
    """
    match = _CONSTANT_RE.match(name)
    if match:
        c = float(match.group("c"))
        if not 0.0 <= c <= 1.0:
            raise ValueError(f"constant fixture needs c in [0, 1], got {c}")
        h = 2 if horizon is None else horizon
        if h < 1:
            raise ValueError("horizon must be >= 1")
        rewards = np.full((h, 2, 2, 2), c)
        transitions = np.full((h, 2, 2, 2, 2), 0.5)
        return MarkovGame(h, 2, 2, 2, 0, rewards, transitions)
    if horizon is not None:
        raise ValueError(f"fixture {name!r} has a fixed horizon")
    if name == "matching_pennies":
        r = np.array([[1.0, 0.0], [0.0, 1.0]])
        return _one_shot(r)
    if name == "rps":
        r = np.array([[0.5, 1.0, 0.0], [0.0, 0.5, 1.0], [1.0, 0.0, 0.5]])
        return _one_shot(r)
    if name == "single_entry":
        r = np.array([[1.0, 0.0], [0.0, 0.0]])
        return _one_shot(r)
    if name == "two_stage":
        rewards = np.zeros((2, 2, 2, 2))
        rewards[0] = np.array([[1.0, 0.0], [0.0, 1.0]])  # both states
        rewards[1, 0] = 1.0
        rewards[1, 1] = 0.0
        transitions = np.zeros((2, 2, 2, 2, 2))
        for s in range(2):
            for a in range(2):
                for b in range(2):
                    transitions[0, s, a, b, 0 if a == b else 1] = 1.0
                    transitions[1, s, a, b, s] = 1.0  # terminal stage, self-loop
        return MarkovGame(2, 2, 2, 2, 0, rewards, transitions)
    raise ValueError(f"unknown fixture {name!r}; expected one of {FIXTURE_NAMES}")


def _one_shot(payoff: np.ndarray) -> MarkovGame:
    a, b = payoff.shape
    transitions = np.ones((1, 1, a, b, 1))
    return MarkovGame(1, 1, a, b, 0, payoff[None, None], transitions)


def uniform_policy_pair(game: MarkovGame) -> PolicyPair:
    h, s, a, b = game.shape
    mu = Policy(Side.MAX, np.full((h, s, a), 1.0 / a))
    nu = Policy(Side.MIN, np.full((h, s, b), 1.0 / b))
    return PolicyPair(mu, nu)


# --- file format -----------------------------------------------------------
#
# A game document is a single UTF-8 JSON object with keys "horizon",
# "num_states", "num_actions_max", "num_actions_min", "initial_state",
# "rewards" (nested [h][s][a][b]) and "transitions" ([h][s][a][b][s']).
# Numbers use Python's shortest round-trip float encoding, so
# load(save(g)) reproduces g bit-exactly and save∘load∘save is a byte
# fixed point.

_GAME_KEYS = ("horizon", "num_states", "num_actions_max", "num_actions_min",
              "initial_state", "rewards", "transitions")


def dumps(game: MarkovGame) -> str:
    """The game document as a string (deterministic key and value encoding)."""
    doc = {
        "horizon": game.horizon,
        "num_states": game.num_states,
        "num_actions_max": game.num_actions_max,
        "num_actions_min": game.num_actions_min,
        "initial_state": game.initial_state,
        "rewards": game.rewards.tolist(),
        "transitions": game.transitions.tolist(),
    }
    return json.dumps(doc) + "\n"


def save(game: MarkovGame, destination) -> int:
    """Write the game document; returns the number of bytes written."""
    data = dumps(game).encode("utf-8")
    Path(destination).write_bytes(data)
    return len(data)


def load(source) -> MarkovGame:
    """Parse and validate a game document; rejects invalid games."""
    text = Path(source).read_text(encoding="utf-8")
    return loads(text)


def loads(text: str) -> MarkovGame:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameFormatError(f"not a JSON document: {exc}") from exc
    if not isinstance(doc, dict):
        raise GameFormatError("top level must be an object")
    for key in _GAME_KEYS:
        if key not in doc:
            raise GameFormatError(f"missing key {key!r}")
    try:
        horizon = int(doc["horizon"])
        num_states = int(doc["num_states"])
        num_a = int(doc["num_actions_max"])
        num_b = int(doc["num_actions_min"])
        initial_state = int(doc["initial_state"])
    except (TypeError, ValueError) as exc:
        raise GameFormatError(f"non-integer header field: {exc}") from exc
    try:
        rewards = np.asarray(doc["rewards"], dtype=np.float64)
        transitions = np.asarray(doc["transitions"], dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise GameFormatError(f"malformed tensor: {exc}") from exc
    if rewards.shape != (horizon, num_states, num_a, num_b):
        raise GameFormatError(
            f"rewards shape {rewards.shape} does not match header "
            f"{(horizon, num_states, num_a, num_b)}")
    if transitions.shape != (horizon, num_states, num_a, num_b, num_states):
        raise GameFormatError(
            f"transitions shape {transitions.shape} does not match header "
            f"{(horizon, num_states, num_a, num_b, num_states)}")
    if not (np.isfinite(rewards).all() and np.isfinite(transitions).all()):
        raise GameFormatError("tensors must be finite")
    game = MarkovGame(horizon, num_states, num_a, num_b, initial_state,
                      rewards, transitions)
    violations = validate(game)
    if violations:
        raise InvalidGameError(violations)
    return game


# --- policy documents -------------------------------------------------------

def save_policy_pair(pair: PolicyPair, destination, note: str | None = None) -> int:
    """Write a policy pair in the same nested-array style as games."""
    doc = {"mu": pair.mu.probs.tolist(), "nu": pair.nu.probs.tolist()}
    if note is not None:
        doc["note"] = note
    data = (json.dumps(doc) + "\n").encode("utf-8")
    Path(destination).write_bytes(data)
    return len(data)


def load_policy_pair(source) -> PolicyPair:
    try:
        doc = json.loads(Path(source).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise GameFormatError(f"not a JSON document: {exc}") from exc
    for key in ("mu", "nu"):
        if key not in doc:
            raise GameFormatError(f"missing key {key!r}")
    mu = np.asarray(doc["mu"], dtype=np.float64)
    nu = np.asarray(doc["nu"], dtype=np.float64)
    if mu.ndim != 3 or nu.ndim != 3:
        raise GameFormatError("policies must be [h][s][action] arrays")
    pair = PolicyPair(Policy(Side.MAX, mu), Policy(Side.MIN, nu))
    for pol in (pair.mu, pair.nu):
        err = pol.row_sum_errors().max()
        if err > PROB_TOL or (pol.probs < 0).any():
            raise GameFormatError(f"{pol.side.value} policy rows are not distributions "
                                  f"(worst row-sum error {err:.3g})")
    return pair
