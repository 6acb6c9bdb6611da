"""Cheap talk: equilibrium verification and efficiency predicates.

Strategies are supplied, not searched for. A profile is an equilibrium
when every message the sender uses is optimal among *all* messages given
the receiver's strategy, and every action the receiver uses after an
on-path message is a best response to the Bayes posterior. Beliefs after
unused messages are left unconstrained.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from . import lp
from .core import Game, Outcome, fmt, to_rational
from .efficiency import ex_ante_efficient_cone
from .persuasion import Piecewise1D, _prior, best_response_set, split_payoffs

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class CheapTalkProfile:
    """``sender[s][m]`` and ``receiver[m][a]`` are probabilities."""

    messages: tuple[str, ...]
    sender: tuple[tuple[Fraction, ...], ...]
    receiver: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "messages", tuple(self.messages))
        M = len(self.messages)
        if len(set(self.messages)) != M:
            raise ValueError("duplicate message labels")
        snd = tuple(tuple(to_rational(x) for x in row) for row in self.sender)
        rcv = tuple(tuple(to_rational(x) for x in row) for row in self.receiver)
        if any(len(row) != M for row in snd) or len(rcv) != M:
            raise ValueError("strategy shapes do not match the message set")
        for row in snd + rcv:
            if any(x < 0 for x in row) or sum(row) != 1:
                raise ValueError("every strategy row must be a probability vector")
        n_actions = len(rcv[0])
        if any(len(row) != n_actions for row in rcv):
            raise ValueError("receiver rows have different lengths")
        if M < max(n_actions, len(snd)):
            raise ValueError("need at least as many messages as actions and states")
        object.__setattr__(self, "sender", snd)
        object.__setattr__(self, "receiver", rcv)

    @classmethod
    def from_mapping(cls, game: Game, data: Mapping) -> "CheapTalkProfile":
        """Parse ``{"messages": [...], "sender": {state: {msg: p}},
        "receiver": {msg: {action: p}}}``; omitted entries are 0."""
        messages = list(data["messages"])
        actions = game.actions[1]
        sender = [[_ZERO] * len(messages) for _ in game.states]
        for state, dist in data["sender"].items():
            s = game.state_index(state)
            for m, x in dist.items():
                sender[s][messages.index(m)] += to_rational(x)
        receiver = [[_ZERO] * len(actions) for _ in messages]
        for m, dist in data["receiver"].items():
            for a, x in dist.items():
                receiver[messages.index(m)][actions.index(a)] += to_rational(x)
        return cls(tuple(messages), sender, receiver)

    def to_mapping(self, game: Game) -> dict:
        actions = game.actions[1]
        return {
            "messages": list(self.messages),
            "sender": {
                game.states[s]: {m: fmt(x) for m, x in zip(self.messages, row) if x}
                for s, row in enumerate(self.sender)
            },
            "receiver": {
                m: {a: fmt(x) for a, x in zip(actions, row) if x}
                for m, row in zip(self.messages, self.receiver)
            },
        }


def induced_outcome(profile: CheapTalkProfile) -> Outcome:
    """``mu(a|w) = sum_m sigma(m|w) tau(a|m)``."""
    n_actions = len(profile.receiver[0])
    rows = []
    for srow in profile.sender:
        rows.append(
            [
                sum((sm * profile.receiver[m][a] for m, sm in enumerate(srow) if sm), _ZERO)
                for a in range(n_actions)
            ]
        )
    return Outcome(rows)


@dataclass(frozen=True)
class PbeReport:
    is_equilibrium: bool
    sender_slacks: tuple[tuple[Fraction, ...], ...]
    posteriors: dict
    violations: tuple[str, ...]
    outcome: Outcome
    sender_payoff: Fraction

    def to_json(self, game: Game, profile: CheapTalkProfile) -> dict:
        return {
            "equilibrium": self.is_equilibrium,
            "violations": list(self.violations),
            "sender_payoff": fmt(self.sender_payoff),
            "posteriors": {
                profile.messages[m]: [fmt(x) for x in q] for m, q in sorted(self.posteriors.items())
            },
            "outcome": self.outcome.to_mapping(game),
        }


def verify_pbe(game: Game, profile: CheapTalkProfile, prior=None) -> PbeReport:
    u_s, u_r = split_payoffs(game)
    p = _prior(game, prior)
    S, J = game.n_states, game.n_joint
    M = len(profile.messages)
    if len(profile.sender) != S or len(profile.receiver[0]) != J:
        raise ValueError("profile does not match the game's states and actions")
    violations = []
    slacks = []
    for s in range(S):
        vals = [
            sum((profile.receiver[m][a] * u_s[s][a] for a in range(J)), _ZERO) for m in range(M)
        ]
        top = max(vals)
        slacks.append(tuple(top - v for v in vals))
        for m in range(M):
            if profile.sender[s][m] > 0 and vals[m] < top:
                violations.append(
                    f"sender in {game.states[s]} sends {profile.messages[m]} "
                    f"but another message pays {fmt(top - vals[m])} more"
                )
    posteriors = {}
    for m in range(M):
        mass = sum((p[s] * profile.sender[s][m] for s in range(S)), _ZERO)
        if not mass:
            continue
        q = tuple(p[s] * profile.sender[s][m] / mass for s in range(S))
        posteriors[m] = q
        best = set(best_response_set(u_r, q))
        for a in range(J):
            if profile.receiver[m][a] > 0 and a not in best:
                violations.append(
                    f"receiver plays {game.actions[1][a]} after {profile.messages[m]} "
                    "but it is not a best response"
                )
    outcome = induced_outcome(profile)
    payoff = sum(
        (p[s] * outcome.probs[s][a] * u_s[s][a] for s in range(S) for a in range(J)), _ZERO
    )
    return PbeReport(not violations, tuple(slacks), posteriors, tuple(violations), outcome, payoff)


def best_response_actions(game: Game, belief: Sequence) -> tuple[int, ...]:
    """Receiver's exact argmax set ``A*(p)``."""
    _, u_r = split_payoffs(game)
    q = tuple(to_rational(x) for x in belief)
    if len(q) != game.n_states or any(x < 0 for x in q) or sum(q) != 1:
        raise ValueError("belief must be a distribution over the states")
    return best_response_set(u_r, q)


def state_independent_sender(game: Game) -> tuple[Fraction, ...] | None:
    u_s, _ = split_payoffs(game)
    first = tuple(u_s[0])
    return first if all(tuple(row) == first for row in u_s) else None


def _rationalizable(u_r, a: int) -> bool:
    S, J = len(u_r), len(u_r[0])
    A = [[_ONE] * S]
    senses = [lp.EQ]
    b = [_ONE]
    for c in range(J):
        if c != a:
            A.append([u_r[s][a] - u_r[s][c] for s in range(S)])
            senses.append(lp.GE)
            b.append(_ZERO)
    return lp.feasible_point(A, senses, b).optimal


def sender_best_feasible_action(game: Game) -> tuple[tuple[int, ...], int]:
    """``A*`` (actions that are a best response to some belief) and ``a*``."""
    u_sender = state_independent_sender(game)
    if u_sender is None:
        raise ValueError("sender payoff depends on the state")
    if len(set(u_sender)) != len(u_sender):
        raise ValueError("sender payoffs must be distinct across actions")
    _, u_r = split_payoffs(game)
    feasible = tuple(a for a in range(game.n_joint) if _rationalizable(u_r, a))
    return feasible, max(feasible, key=lambda a: u_sender[a])


def quasiconcave_envelope_1d(V: Piecewise1D) -> Piecewise1D:
    """``min(sup_{q<=p} V(q), sup_{q>=p} V(q))`` for a step value function."""
    if not isinstance(V, Piecewise1D) or not V.is_step:
        raise ValueError("expected a piecewise-constant value function")
    n = len(V.lines)
    # items in left-to-right order: point 0, line 0, point 1, line 1, ...
    items = []
    for i in range(n):
        items.append(V.values[i])
        items.append(V.lines[i][0])
    items.append(V.values[n])
    left, right = [], []
    run = None
    for v in items:
        run = v if run is None else max(run, v)
        left.append(run)
    run = None
    for v in reversed(items):
        run = v if run is None else max(run, v)
        right.append(run)
    right.reverse()
    env = [min(a, b) for a, b in zip(left, right)]
    values = tuple(env[0::2])
    lines = tuple((y, y) for y in env[1::2])
    # label each piece by its value so segments() merges equal runs
    return Piecewise1D(V.xs, lines, values, tuple(env[1::2]), values)


@dataclass(frozen=True)
class EfficiencyPredicates:
    stochastic: bool
    generically_inefficient: bool
    a_star_verdict: str | None
    cone_verdict: str
    a_star: int | None

    @property
    def agree(self) -> bool:
        return self.a_star_verdict is None or self.a_star_verdict == self.cone_verdict

    def to_json(self, game: Game) -> dict:
        return {
            "stochastic": self.stochastic,
            "generically_inefficient": self.generically_inefficient,
            "a_star_verdict": self.a_star_verdict,
            "cone_verdict": self.cone_verdict,
            "a_star": None if self.a_star is None else game.actions[1][self.a_star],
            "agree": self.agree,
        }


def efficiency_predicates(
    game: Game, profile: CheapTalkProfile, prior=None, require_a_star: bool = False
) -> EfficiencyPredicates:
    """Stochastic-outcome flag, the state-independent-sender verdict, and
    the cone test on the induced outcome.

    The a* verdict is exact when a* is also the sender's favourite among
    all actions. Otherwise an action the receiver never best-responds with
    can dominate a* in some state, and ``agree`` comes out false.
    """
    report = verify_pbe(game, profile, prior)
    if not report.is_equilibrium:
        raise ValueError("profile is not an equilibrium: " + "; ".join(report.violations))
    outcome = report.outcome
    stochastic = not outcome.is_pure
    verdict = a_star = None
    if state_independent_sender(game) is not None:
        _, a_star = sender_best_feasible_action(game)
        certain = all(row[a_star] == 1 for row in outcome.probs)
        verdict = "efficient" if certain else "inefficient"
    elif require_a_star:
        raise ValueError("the a* criterion needs a state-independent sender payoff")
    g = game if prior is None else game.with_prior(_prior(game, prior))
    cone = ex_ante_efficient_cone(g, outcome).verdict
    return EfficiencyPredicates(stochastic, stochastic, verdict, cone, a_star)
