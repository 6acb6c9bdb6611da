"""Allocation of one good without transfers.

A principal allocates to one of ``n`` agents (or keeps the good) based on
reported types. Agents rank by *peer value*, the principal's expected
value of giving them the good conditional on everyone else's types, and
an agent is eligible only if their worst-case rank over their own reports is
good enough. Because eligibility and selection probability depend only
on the other agents' reports, truth-telling is dominant.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .core import Game, Outcome, fmt, to_rational
from .efficiency import counting_bound, ex_ante_efficient_cone

_ZERO = Fraction(0)
_ONE = Fraction(1)

UNIFORM, CAPPED = "uniform", "capped"


def _profile_label(profile: Sequence[str]) -> str:
    return ",".join(profile)


@dataclass(frozen=True)
class AllocationInstance:
    """Type sets per agent, a full-support prior over type profiles,
    principal values ``values[profile][i]`` in [-1, 1] and threshold t."""

    types: tuple[tuple[str, ...], ...]
    prior: dict
    values: dict
    t: Fraction
    profiles: tuple[tuple[str, ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        types = tuple(tuple(str(x) for x in ts) for ts in self.types)
        if len(types) < 2:
            raise ValueError("need at least two agents")
        for ts in types:
            if len(ts) < 2 or len(set(ts)) != len(ts):
                raise ValueError("each agent needs at least two distinct types")
        profiles = tuple(itertools.product(*types))
        prior = {tuple(k): to_rational(v) for k, v in self.prior.items()}
        values = {tuple(k): tuple(to_rational(x) for x in v) for k, v in self.values.items()}
        if set(prior) != set(profiles) or set(values) != set(profiles):
            raise ValueError("prior and values must cover every type profile")
        if any(x <= 0 for x in prior.values()) or sum(prior.values()) != 1:
            raise ValueError("prior must be interior and sum to 1")
        for v in values.values():
            if len(v) != len(types) or any(not -1 <= x <= 1 for x in v):
                raise ValueError("each profile needs one value in [-1, 1] per agent")
        t = to_rational(self.t)
        if not 0 < t <= 1:
            raise ValueError("threshold t must lie in (0, 1]")
        object.__setattr__(self, "types", types)
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "profiles", profiles)

    @property
    def n_agents(self) -> int:
        return len(self.types)

    @classmethod
    def from_mapping(cls, data: Mapping) -> "AllocationInstance":
        types = [list(ts) for ts in data["types"]]
        if "agents" in data and int(data["agents"]) != len(types):
            raise ValueError("'agents' disagrees with the number of type sets")

        def key(label):
            parts = tuple(p.strip() for p in str(label).split(","))
            if len(parts) != len(types):
                raise ValueError(f"bad type profile {label!r}")
            return parts

        prior = {key(k): v for k, v in data["prior"].items()}
        values = {key(k): v for k, v in data["values"].items()}
        return cls(types, prior, values, data["t"])

    def to_mapping(self) -> dict:
        return {
            "agents": self.n_agents,
            "types": [list(ts) for ts in self.types],
            "prior": {_profile_label(w): fmt(self.prior[w]) for w in self.profiles},
            "values": {
                _profile_label(w): [fmt(x) for x in self.values[w]] for w in self.profiles
            },
            "t": fmt(self.t),
        }

    def replace_type(self, profile: tuple, i: int, own: str) -> tuple:
        return profile[:i] + (own,) + profile[i + 1 :]

    def with_values(self, values: Mapping) -> "AllocationInstance":
        return AllocationInstance(self.types, self.prior, values, self.t)


def peer_values(inst: AllocationInstance) -> dict:
    """``{(i, profile): E[u_i | others' types]}`` keyed by full profiles."""
    out = {}
    for i in range(inst.n_agents):
        for w in inst.profiles:
            block = [inst.replace_type(w, i, own) for own in inst.types[i]]
            mass = sum((inst.prior[v] for v in block), _ZERO)
            out[i, w] = sum((inst.prior[v] * inst.values[v][i] for v in block), _ZERO) / mass
    return out


def ranks(inst: AllocationInstance, peers: Mapping | None = None) -> dict:
    """Normalized ranks ``{(i, profile): position/n}``, best is ``1/n``."""
    peers = peer_values(inst) if peers is None else peers
    n = inst.n_agents
    out = {}
    for w in inst.profiles:
        order = sorted(range(n), key=lambda i: (-peers[i, w], i))
        for pos, i in enumerate(order, start=1):
            out[i, w] = Fraction(pos, n)
    return out


def robust_ranks(inst: AllocationInstance, rank: Mapping | None = None) -> dict:
    """Worst rank over own reports; depends only on the others' types."""
    rank = ranks(inst) if rank is None else rank
    return {
        (i, w): max(rank[i, inst.replace_type(w, i, own)] for own in inst.types[i])
        for i in range(inst.n_agents)
        for w in inst.profiles
    }


def informational_size(inst: AllocationInstance, rank: Mapping | None = None) -> dict:
    rank = ranks(inst) if rank is None else rank
    out = {}
    for w in inst.profiles:
        out[w] = max(
            abs(rank[i, w] - rank[i, inst.replace_type(w, i, own)])
            for i in range(inst.n_agents)
            for own in inst.types[i]
        )
    return out


@dataclass(frozen=True)
class MechanismOutcome:
    """Allocation probabilities over ``a0`` (keep) and ``a1..an``."""

    outcome: Outcome
    peers: dict
    ranks: dict
    robust: dict
    eligible: dict
    delta: dict
    selected: dict
    variant: str

    def prob(self, inst: AllocationInstance, profile: tuple, action: int) -> Fraction:
        return self.outcome.probs[inst.profiles.index(profile)][action]


def action_labels(n: int) -> tuple[str, ...]:
    return tuple(f"a{i}" for i in range(n + 1))


def run_mechanism(inst: AllocationInstance, variant: str = UNIFORM) -> MechanismOutcome:
    """Select the top ``floor(t n)`` ranked agents; each selected agent
    gets the good with probability ``1/|S|`` (uniform) or ``1/(t n)``
    (capped) if eligible, the rest stays with the principal."""
    if variant not in (UNIFORM, CAPPED):
        raise ValueError(f"unknown selection variant {variant!r}")
    n = inst.n_agents
    peers = peer_values(inst)
    rank = ranks(inst, peers)
    robust = robust_ranks(inst, rank)
    delta = informational_size(inst, rank)
    size = math.floor(inst.t * n)
    share = _ZERO
    if size:
        share = Fraction(1, size) if variant == UNIFORM else 1 / (inst.t * n)
    rows, eligible, selected = [], {}, {}
    for w in inst.profiles:
        row = [_ZERO] * (n + 1)
        chosen = tuple(i for i in range(n) if rank[i, w] <= inst.t)
        selected[w] = chosen
        for i in range(n):
            eligible[i, w] = robust[i, w] <= inst.t and peers[i, w] >= 0
            if i in chosen and eligible[i, w]:
                row[i + 1] = share
        row[0] = 1 - sum(row[1:], _ZERO)
        rows.append(row)
    return MechanismOutcome(
        Outcome(rows), peers, rank, robust, eligible, delta, selected, variant
    )


@dataclass(frozen=True)
class DicViolation:
    agent: int
    truth: tuple
    report: str
    gain: Fraction

    def __str__(self):
        return (
            f"agent {self.agent + 1} at {_profile_label(self.truth)} gains "
            f"{fmt(self.gain)} by reporting {self.report}"
        )


def verify_dic(inst: AllocationInstance, probs) -> list[DicViolation]:
    """Exhaustive misreport check. ``probs`` is an Outcome, a
    MechanismOutcome, or a mapping profile -> allocation vector."""
    if isinstance(probs, MechanismOutcome):
        probs = probs.outcome
    if isinstance(probs, Outcome):
        table = {w: probs.probs[s] for s, w in enumerate(inst.profiles)}
    else:
        table = {tuple(w): tuple(to_rational(x) for x in row) for w, row in probs.items()}
    violations = []
    for i in range(inst.n_agents):
        for w in inst.profiles:
            honest = table[w][i + 1]
            for own in inst.types[i]:
                if own == w[i]:
                    continue
                lie = table[inst.replace_type(w, i, own)][i + 1]
                if lie > honest:
                    violations.append(DicViolation(i, w, own, lie - honest))
    return violations


def embed(inst: AllocationInstance, values: Mapping | None = None) -> Game:
    """Principal (player 0) picks a0..an; agents are single-action players
    who get 1 when the good goes to them."""
    values = inst.values if values is None else values
    n = inst.n_agents
    acts = action_labels(n)
    actions = [acts] + [("-",)] * n
    payoffs = []
    for w in inst.profiles:
        rows = []
        for a in range(n + 1):
            principal = _ZERO if a == 0 else to_rational(values[w][a - 1])
            rows.append((principal,) + tuple(_ONE if a == i + 1 else _ZERO for i in range(n)))
        payoffs.append(rows)
    states = [_profile_label(w) for w in inst.profiles]
    prior = [inst.prior[w] for w in inst.profiles]
    return Game(states, prior, actions, payoffs)


@dataclass(frozen=True)
class RankingVerdict:
    withheld: bool
    reasons: tuple[str, ...]
    sizes: tuple[int, ...] = ()
    total: int | None = None
    bound: int | None = None
    bound_fails: bool | None = None
    cone_verdict: str | None = None

    @property
    def inefficient(self) -> bool | None:
        if self.withheld:
            return None
        return self.cone_verdict == "inefficient"

    def to_json(self) -> dict:
        return {
            "withheld": self.withheld,
            "reasons": list(self.reasons),
            "support_sizes": list(self.sizes),
            "total_support": self.total,
            "bound": self.bound,
            "bound_violated": self.bound_fails,
            "cone_verdict": self.cone_verdict,
        }


def ranking_preconditions(inst: AllocationInstance, mech: MechanismOutcome) -> list[str]:
    n = inst.n_agents
    reasons = []
    for w in inst.profiles:
        need = max(Fraction(1, n) + mech.delta[w], Fraction(2, n))
        if inst.t < need:
            reasons.append(f"t = {fmt(inst.t)} < {fmt(need)} at {_profile_label(w)}")
        if all(mech.peers[i, w] < 0 for i in range(n)):
            reasons.append(f"no agent has a non-negative peer value at {_profile_label(w)}")
    return reasons


def ranking_verdict(
    inst: AllocationInstance, mech: MechanismOutcome | None = None, values: Mapping | None = None
) -> RankingVerdict:
    """Counting bound and cone test on the embedded game.

    ``values`` replaces the principal's payoffs in the embedding while
    keeping the allocation rule fixed.
    """
    mech = run_mechanism(inst) if mech is None else mech
    reasons = ranking_preconditions(inst, mech)
    if reasons:
        return RankingVerdict(True, tuple(reasons))
    game = embed(inst, values)
    cb = counting_bound(game, mech.outcome)
    cone = ex_ante_efficient_cone(game, mech.outcome).verdict
    return RankingVerdict(False, (), cb.sizes, cb.total, cb.bound, not cb.passes, cone)
