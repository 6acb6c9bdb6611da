"""Exact games with incomplete information, outcomes and decision rules.

Every scalar is a :class:`fractions.Fraction`. Joint action profiles are
indexed row-major over the per-player action lists, so joint index ``j``
of a game with action lists ``[[x, y], [l, m, r]]`` enumerates
``(x,l), (x,m), (x,r), (y,l), ...``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Mapping, Sequence

Rational = Fraction

DUMMY_ACTION = "-"


def to_rational(value) -> Fraction:
    """Parse an int, a finite decimal literal or a ``"num/den"`` string.

    A float is read through its shortest repr, so ``6.4`` becomes ``32/5``
    rather than the nearest binary fraction.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Decimal):
        if not value.is_finite():
            raise ValueError(f"non-finite number {value}")
        return Fraction(value)
    if isinstance(value, float):
        # json without parse_float=Decimal; go through repr to keep 6.4 == 32/5
        return Fraction(Decimal(repr(value)))
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty rational literal")
        try:
            if "/" in text:
                num, den = text.split("/")
                den_i = int(den)
                if den_i == 0:
                    raise ZeroDivisionError(f"zero denominator in {value!r}")
                return Fraction(int(num), den_i)
            return Fraction(Decimal(text))
        except (ArithmeticError, ValueError) as exc:
            if isinstance(exc, ZeroDivisionError):
                raise
            raise ValueError(f"not a rational literal: {value!r}") from exc
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def fmt(q: Fraction) -> str:
    """Serialize a rational as ``"num/den"`` (or ``"num"`` for integers)."""
    return str(Fraction(q))


def _is_distribution(row: Sequence[Fraction]) -> bool:
    return all(x >= 0 for x in row) and sum(row, Fraction(0)) == 1


@dataclass(frozen=True)
class Game:
    """A finite game with a common interior prior over states.

    ``payoffs[s][j]`` is the k-vector of payoffs at state index ``s`` and
    joint action index ``j``.
    """

    states: tuple[str, ...]
    prior: tuple[Fraction, ...]
    actions: tuple[tuple[str, ...], ...]
    payoffs: tuple[tuple[tuple[Fraction, ...], ...], ...]
    joint_actions: tuple[tuple[str, ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "prior", tuple(to_rational(x) for x in self.prior))
        object.__setattr__(self, "actions", tuple(tuple(a) for a in self.actions))
        k = len(self.actions)
        if k < 2:
            raise ValueError("a game needs at least two players")
        if any(len(a) == 0 for a in self.actions):
            raise ValueError("every player needs at least one action")
        if any(len(set(a)) != len(a) for a in self.actions):
            raise ValueError("duplicate action labels")
        if len(set(self.states)) != len(self.states) or not self.states:
            raise ValueError("states must be a non-empty list of distinct labels")
        if len(self.prior) != len(self.states):
            raise ValueError("prior length does not match the number of states")
        if any(x <= 0 for x in self.prior):
            raise ValueError("prior must be interior (all entries > 0)")
        if sum(self.prior) != 1:
            raise ValueError("prior must sum to exactly 1")
        joint = tuple(itertools.product(*self.actions))
        object.__setattr__(self, "joint_actions", joint)
        if len(self.payoffs) != len(self.states):
            raise ValueError("payoff tensor must have one block per state")
        rows = []
        for block in self.payoffs:
            if len(block) != len(joint):
                raise ValueError("payoff tensor is not total over joint actions")
            vecs = []
            for vec in block:
                if len(vec) != k:
                    raise ValueError(f"payoff vectors must have length {k}")
                vecs.append(tuple(to_rational(x) for x in vec))
            rows.append(tuple(vecs))
        object.__setattr__(self, "payoffs", tuple(rows))

    @property
    def k(self) -> int:
        return len(self.actions)

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_joint(self) -> int:
        return len(self.joint_actions)

    def state_index(self, state) -> int:
        if isinstance(state, int) and not isinstance(state, bool):
            if 0 <= state < self.n_states:
                return state
            raise KeyError(f"state index {state} out of range")
        try:
            return self.states.index(state)
        except ValueError:
            raise KeyError(f"unknown state {state!r}") from None

    def joint_index(self, profile) -> int:
        """Row-major index of a joint profile (tuple or comma string).

        Players with a single action may be omitted from the profile.
        """
        if isinstance(profile, int) and not isinstance(profile, bool):
            if 0 <= profile < self.n_joint:
                return profile
            raise KeyError(f"joint action index {profile} out of range")
        parts = profile.split(",") if isinstance(profile, str) else list(profile)
        parts = [p.strip() for p in parts]
        if len(parts) != self.k:
            free = [i for i, a in enumerate(self.actions) if len(a) > 1]
            if len(parts) != len(free):
                raise KeyError(f"joint action {profile!r} has wrong arity")
            full = [a[0] for a in self.actions]
            for i, part in zip(free, parts):
                full[i] = part
            parts = full
        index = 0
        for labels, part in zip(self.actions, parts):
            try:
                pos = labels.index(part)
            except ValueError:
                raise KeyError(f"unknown action {part!r} in {profile!r}") from None
            index = index * len(labels) + pos
        return index

    def joint_label(self, j: int) -> str:
        """Compact comma label of joint index ``j`` (single-action players omitted)."""
        profile = self.joint_actions[j]
        free = [p for p, a in zip(profile, self.actions) if len(a) > 1]
        return ",".join(free if free else profile)

    def payoff(self, state, profile) -> tuple[Fraction, ...]:
        return self.payoffs[self.state_index(state)][self.joint_index(profile)]

    def with_prior(self, prior: Sequence) -> "Game":
        return Game(self.states, tuple(prior), self.actions, self.payoffs)


@dataclass(frozen=True)
class Outcome:
    """Per-state distributions over joint actions, ``probs[s][j]``."""

    probs: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(to_rational(x) for x in row) for row in self.probs)
        if not rows:
            raise ValueError("an outcome needs at least one state")
        width = len(rows[0])
        for row in rows:
            if len(row) != width:
                raise ValueError("outcome rows have different lengths")
            if not _is_distribution(row):
                raise ValueError("every outcome row must be a probability vector")
        object.__setattr__(self, "probs", rows)

    @classmethod
    def pure(cls, game: Game, profiles: Sequence) -> "Outcome":
        """Deterministic outcome playing ``profiles[s]`` in state ``s``."""
        if len(profiles) != game.n_states:
            raise ValueError("one profile per state required")
        rows = []
        for prof in profiles:
            row = [Fraction(0)] * game.n_joint
            row[game.joint_index(prof)] = Fraction(1)
            rows.append(row)
        return cls(rows)

    @classmethod
    def from_mapping(cls, game: Game, mapping: Mapping) -> "Outcome":
        """Build from ``{state: {joint action: prob}}``; omitted entries are 0."""
        rows = [[Fraction(0)] * game.n_joint for _ in game.states]
        for state, dist in mapping.items():
            s = game.state_index(state)
            for prof, prob in dist.items():
                rows[s][game.joint_index(prof)] += to_rational(prob)
        missing = [st for st, row in zip(game.states, rows) if not any(row)]
        if missing:
            raise ValueError(f"outcome has no distribution for states {missing}")
        return cls(rows)

    def to_mapping(self, game: Game) -> dict:
        return {
            game.states[s]: {
                game.joint_label(j): fmt(x) for j, x in enumerate(row) if x != 0
            }
            for s, row in enumerate(self.probs)
        }

    def support(self, s: int) -> tuple[int, ...]:
        return tuple(j for j, x in enumerate(self.probs[s]) if x > 0)

    @property
    def is_pure(self) -> bool:
        return all(len(self.support(s)) == 1 for s in range(len(self.probs)))


def check_compatible(game: Game, outcome: Outcome) -> None:
    if len(outcome.probs) != game.n_states or len(outcome.probs[0]) != game.n_joint:
        raise ValueError(
            f"outcome shape {len(outcome.probs)}x{len(outcome.probs[0])} does not "
            f"match game shape {game.n_states}x{game.n_joint}"
        )


def _mix(weights: Sequence[Fraction], vectors: Sequence[Sequence[Fraction]], k: int):
    acc = [Fraction(0)] * k
    for w, vec in zip(weights, vectors):
        if w:
            for i in range(k):
                acc[i] += w * vec[i]
    return tuple(acc)


def state_payoff(game: Game, outcome: Outcome, state) -> tuple[Fraction, ...]:
    """Expected payoff vector in one state, ``sum_a mu(a|w) u(w, a)``."""
    check_compatible(game, outcome)
    s = game.state_index(state)
    return _mix(outcome.probs[s], game.payoffs[s], game.k)


def induced_payoff(game: Game, outcome: Outcome) -> tuple[Fraction, ...]:
    """Ex-ante payoff vector of ``outcome`` under the game's prior."""
    check_compatible(game, outcome)
    k = game.k
    total = [Fraction(0)] * k
    for s, p in enumerate(game.prior):
        vec = _mix(outcome.probs[s], game.payoffs[s], k)
        for i in range(k):
            total[i] += p * vec[i]
    return tuple(total)


def support_counts(outcome: Outcome) -> tuple[tuple[int, ...], int]:
    sizes = tuple(len(outcome.support(s)) for s in range(len(outcome.probs)))
    return sizes, sum(sizes)


@dataclass(frozen=True)
class DecisionRuleProfile:
    """Type-contingent pure decision rule.

    ``type_dist[s]`` maps joint type profiles (tuples, one type per player)
    to probabilities. Exactly one of ``joint_rule`` (``(types, state) ->
    joint action``) or ``player_rules`` (one ``type -> own action`` dict
    per player) is given.
    """

    type_sets: tuple[tuple[str, ...], ...]
    type_dist: tuple[Mapping[tuple, Fraction], ...]
    joint_rule: Mapping[tuple, tuple] | None = None
    player_rules: tuple[Mapping[str, str], ...] | None = None

    def __post_init__(self):
        if (self.joint_rule is None) == (self.player_rules is None):
            raise ValueError("give exactly one of joint_rule or player_rules")
        object.__setattr__(self, "type_sets", tuple(tuple(t) for t in self.type_sets))
        dists = []
        profiles = set(self.type_profiles())
        for dist in self.type_dist:
            clean = {tuple(t): to_rational(x) for t, x in dist.items()}
            if not set(clean) <= profiles:
                raise ValueError("type distribution references unknown types")
            if any(x < 0 for x in clean.values()) or sum(clean.values()) != 1:
                raise ValueError("each type distribution must be a probability vector")
            dists.append(clean)
        object.__setattr__(self, "type_dist", tuple(dists))

    def type_profiles(self) -> list[tuple]:
        return list(itertools.product(*self.type_sets))

    @property
    def full_support(self) -> bool:
        profiles = self.type_profiles()
        return all(dist.get(t, 0) > 0 for dist in self.type_dist for t in profiles)

    def action(self, types: tuple, s: int, state_label) -> tuple:
        if self.joint_rule is not None:
            key = (types, state_label)
            if key in self.joint_rule:
                return tuple(self.joint_rule[key])
            if (types, s) in self.joint_rule:
                return tuple(self.joint_rule[(types, s)])
            raise KeyError(f"joint rule undefined at types {types}, state {state_label!r}")
        out = []
        for i, (rule, t) in enumerate(zip(self.player_rules, types)):
            if t not in rule:
                raise KeyError(f"player {i} rule undefined for type {t!r}")
            out.append(rule[t])
        return tuple(out)


def outcome_from_rule(game: Game, profile: DecisionRuleProfile) -> Outcome:
    """Push the type distribution through the rule: ``mu(a|w) = pi(sigma^-1(a)|w)``."""
    if len(profile.type_dist) != game.n_states:
        raise ValueError("type distribution needs one entry per state")
    if len(profile.type_sets) != game.k:
        raise ValueError("type sets need one entry per player")
    rows = []
    for s, state in enumerate(game.states):
        row = [Fraction(0)] * game.n_joint
        for types, prob in profile.type_dist[s].items():
            if prob:
                row[game.joint_index(profile.action(types, s, state))] += prob
        rows.append(row)
    return Outcome(rows)


def sender_receiver_game(
    states: Sequence[str],
    prior: Sequence,
    actions: Sequence[str],
    u_sender: Sequence[Sequence],
    u_receiver: Sequence[Sequence],
) -> Game:
    """Encode a sender-receiver problem as a two-player game.

    The sender (payoff index 0) has the single dummy action ``"-"``; the
    receiver's actions are the joint actions. ``u_sender[s][a]`` and
    ``u_receiver[s][a]`` are indexed by state and receiver action.
    """
    payoffs = [
        [(u_sender[s][a], u_receiver[s][a]) for a in range(len(actions))]
        for s in range(len(states))
    ]
    return Game(tuple(states), tuple(prior), ((DUMMY_ACTION,), tuple(actions)), payoffs)
