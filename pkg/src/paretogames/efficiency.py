"""Pareto efficiency of outcomes, with exact certificates.

Two independent ex-ante tests are provided and expected to agree:

* :func:`ex_ante_efficient_cone` looks for a nonnegative combination of
  payoff deviations that weakly improves everybody; failing that it
  solves for a common weight vector ``n >= 1`` with ``n.d <= 0`` for every
  deviation ``d``. Exactly one of the two systems is solvable.
* :func:`ex_ante_efficient_dominance` searches the feasible payoff set
  directly for a point dominating the outcome's payoff vector; the dual
  of that LP yields the supporting weights.

The counting bound is reported separately and never overrides the LP
verdicts: it is only a generic necessary condition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import lp
from .core import (
    DecisionRuleProfile,
    Game,
    Outcome,
    check_compatible,
    fmt,
    induced_payoff,
    outcome_from_rule,
    state_payoff,
    support_counts,
)

EFFICIENT, INEFFICIENT = "efficient", "inefficient"
CONE, DOMINANCE = "cone", "dominance"

_ZERO = Fraction(0)


class EfficiencyInternalError(RuntimeError):
    """The two sides of a theorem of the alternative disagreed."""


@dataclass(frozen=True)
class DeviationSet:
    """``vectors[(s, j)] = u(s, j) - u(mu | s)`` for every state and profile."""

    vectors: dict

    def __iter__(self):
        return iter(self.vectors.items())

    def __getitem__(self, key):
        return self.vectors[key]

    def __len__(self):
        return len(self.vectors)


@dataclass(frozen=True)
class CountingBound:
    sizes: tuple[int, ...]
    total: int
    bound: int
    state_violations: tuple[int, ...]

    @property
    def passes(self) -> bool:
        return self.total < self.bound

    def to_json(self) -> dict:
        return {"total": self.total, "bound": self.bound, "passes": self.passes}


@dataclass(frozen=True)
class EfficiencyReport:
    verdict: str
    method: str
    counting: CountingBound
    weights: tuple[Fraction, ...] | None = None
    lam: dict | None = None
    dominating_point: tuple[Fraction, ...] | None = None
    dominating_outcome: Outcome | None = None
    notes: tuple[str, ...] = field(default=())

    @property
    def efficient(self) -> bool:
        return self.verdict == EFFICIENT

    def to_json(self, game: Game) -> dict:
        out = {"verdict": self.verdict, "method": self.method}
        if self.weights is not None:
            out["weights"] = [fmt(x) for x in self.weights]
        if self.dominating_point is not None:
            witness = {"dominating_point": [fmt(x) for x in self.dominating_point]}
            if self.lam is not None:
                witness["lambda"] = {
                    f"{game.states[s]}|{game.joint_label(j)}": fmt(x)
                    for (s, j), x in sorted(self.lam.items())
                }
            if self.dominating_outcome is not None:
                witness["dominating_outcome"] = self.dominating_outcome.to_mapping(game)
            out["witness"] = witness
        out["counting"] = self.counting.to_json()
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def _dot(u, v) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), _ZERO)


def deviations(game: Game, outcome: Outcome) -> DeviationSet:
    check_compatible(game, outcome)
    vecs = {}
    for s in range(game.n_states):
        base = state_payoff(game, outcome, s)
        for j in range(game.n_joint):
            vecs[(s, j)] = _sub(game.payoffs[s][j], base)
    return DeviationSet(vecs)


def counting_bound(game: Game, outcome: Outcome) -> CountingBound:
    check_compatible(game, outcome)
    sizes, total = support_counts(outcome)
    over = tuple(s for s, n in enumerate(sizes) if n > game.k)
    return CountingBound(sizes, total, game.k + game.n_states, over)


def _best_mixture(points, floor):
    """LP over mixtures ``v`` of ``points`` maximizing ``sum(v - floor)`` with
    ``v >= floor``. Returns (gain, weights, dual weights on the floor rows)."""
    k = len(floor)
    m = len(points)
    A = [[Fraction(1)] * m]
    senses = [lp.EQ]
    b = [Fraction(1)]
    for i in range(k):
        A.append([pt[i] for pt in points])
        senses.append(lp.GE)
        b.append(floor[i])
    c = [sum(pt, _ZERO) for pt in points]
    sol = lp.solve(lp.LinearProgram(c, A, b, senses))
    if not sol.optimal:
        raise EfficiencyInternalError(f"mixture LP returned {sol.status}")
    return sol.value - sum(floor, _ZERO), sol.x, sol.y


def ex_post_efficient(game: Game, outcome: Outcome, state):
    """Is ``u(mu|state)`` undominated in the state's feasible set?

    Returns ``(efficient, dominating_point_or_None)``.
    """
    s = game.state_index(state)
    base = state_payoff(game, outcome, s)
    points = game.payoffs[s]
    gain, weights, _ = _best_mixture(points, base)
    if gain == 0:
        return True, None
    v = tuple(
        sum((w * pt[i] for w, pt in zip(weights, points) if w), _ZERO)
        for i in range(game.k)
    )
    return False, v


def _check_weights(game: Game, outcome: Outcome, n) -> None:
    if any(x < 1 for x in n):
        raise EfficiencyInternalError("certificate weights must be >= 1")
    for s in range(game.n_states):
        here = _dot(n, state_payoff(game, outcome, s))
        best = max(_dot(n, u) for u in game.payoffs[s])
        if here != best:
            raise EfficiencyInternalError(
                f"weights do not support the outcome in state {game.states[s]!r}"
            )


def _check_dominating(game: Game, outcome: Outcome, v, nu: Outcome) -> None:
    u = induced_payoff(game, outcome)
    if induced_payoff(game, nu) != tuple(v):
        raise EfficiencyInternalError("dominating point is not induced by its outcome")
    if any(a < b for a, b in zip(v, u)) or tuple(v) == u:
        raise EfficiencyInternalError("witness does not Pareto-dominate the outcome")


def common_normal(game: Game, outcome: Outcome, devs: DeviationSet | None = None):
    """Weights ``n >= 1`` with ``n.d <= 0`` for every deviation, or ``None``.

    Strict positivity is encoded as ``n >= 1``; the system is homogeneous
    in ``n`` so nothing is lost.
    """
    devs = devs or deviations(game, outcome)
    k = game.k
    A, senses, b = [], [], []
    seen = set()
    for _, d in devs:
        if any(d) and d not in seen:
            seen.add(d)
            A.append(list(d))
            senses.append(lp.LE)
            b.append(_ZERO)
    for i in range(k):
        row = [_ZERO] * k
        row[i] = Fraction(1)
        A.append(row)
        senses.append(lp.GE)
        b.append(Fraction(1))
    sol = lp.feasible_point(A, senses, b)
    return sol.x if sol.optimal else None


def _weakly_supported(devs: DeviationSet, k: int) -> bool:
    A = [list(d) for _, d in devs if any(d)]
    senses = [lp.LE] * len(A)
    b = [_ZERO] * len(A)
    A.append([Fraction(1)] * k)
    senses.append(lp.EQ)
    b.append(Fraction(1))
    return lp.feasible_point(A, senses, b).optimal


def ex_ante_efficient_cone(game: Game, outcome: Outcome) -> EfficiencyReport:
    """Deviation-cone test with a certificate on either side."""
    devs = deviations(game, outcome)
    counting = counting_bound(game, outcome)
    keys = [key for key, d in devs if any(d)]
    k = game.k
    n_vars = len(keys)
    gain = _ZERO
    lam = None
    if keys:
        A = []
        for i in range(k):
            A.append([devs[key][i] for key in keys])
        A.append([Fraction(1)] * n_vars)
        senses = [lp.GE] * k + [lp.LE]
        b = [_ZERO] * k + [Fraction(1)]
        c = [sum(devs[key], _ZERO) for key in keys]
        sol = lp.solve(lp.LinearProgram(c, A, b, senses))
        if not sol.optimal:
            raise EfficiencyInternalError(f"cone LP returned {sol.status}")
        gain = sol.value
        lam = {key: x for key, x in zip(keys, sol.x) if x}
    weights = common_normal(game, outcome, devs)

    if gain > 0 and weights is not None:
        raise EfficiencyInternalError("both alternatives of the cone test hold")
    if gain == 0 and weights is None:
        raise EfficiencyInternalError("neither alternative of the cone test holds")

    if weights is not None:
        _check_weights(game, outcome, weights)
        return EfficiencyReport(EFFICIENT, CONE, counting, weights=tuple(weights))

    combined = tuple(
        sum((x * devs[key][i] for key, x in lam.items()), _ZERO) for i in range(k)
    )
    if any(x < 0 for x in combined) or not any(combined):
        raise EfficiencyInternalError("cone witness is not a Pareto improvement")
    nu, v = _realize_improvement(game, outcome, lam)
    _check_dominating(game, outcome, v, nu)
    notes = ()
    if _weakly_supported(devs, k):
        notes = ("weakly efficient: supported only by weights with some zero component",)
    return EfficiencyReport(
        INEFFICIENT,
        CONE,
        counting,
        lam=lam,
        dominating_point=v,
        dominating_outcome=nu,
        notes=notes,
    )


def _realize_improvement(game: Game, outcome: Outcome, lam: dict):
    """Turn a deviation combination into a feasible dominating outcome.

    State ``s`` moves mass ``c * lam[s, j] / p(s)`` from ``mu(.|s)`` onto
    profile ``j``, with ``c`` as large as keeps every row a distribution.
    """
    mass = {}
    for (s, _), x in lam.items():
        mass[s] = mass.get(s, _ZERO) + x
    scale = min(game.prior[s] / m for s, m in mass.items() if m)
    rows = [list(r) for r in outcome.probs]
    for s in mass:
        shift = [scale * lam.get((s, j), _ZERO) / game.prior[s] for j in range(game.n_joint)]
        total = sum(shift, _ZERO)
        rows[s] = [(1 - total) * mu + sh for mu, sh in zip(rows[s], shift)]
    nu = Outcome(rows)
    return nu, induced_payoff(game, nu)


def ex_ante_efficient_dominance(game: Game, outcome: Outcome) -> EfficiencyReport:
    """Search the whole feasible set for a point dominating ``u(mu)``."""
    check_compatible(game, outcome)
    counting = counting_bound(game, outcome)
    k, S, J = game.k, game.n_states, game.n_joint
    target = induced_payoff(game, outcome)
    n_vars = S * J
    A, senses, b = [], [], []
    for s in range(S):
        row = [_ZERO] * n_vars
        row[s * J:(s + 1) * J] = [Fraction(1)] * J
        A.append(row)
        senses.append(lp.EQ)
        b.append(Fraction(1))
    for i in range(k):
        A.append([game.prior[s] * game.payoffs[s][j][i] for s in range(S) for j in range(J)])
        senses.append(lp.GE)
        b.append(target[i])
    c = [
        game.prior[s] * sum(game.payoffs[s][j], _ZERO) for s in range(S) for j in range(J)
    ]
    sol = lp.solve(lp.LinearProgram(c, A, b, senses))
    if not sol.optimal:
        raise EfficiencyInternalError(f"dominance LP returned {sol.status}")
    gain = sol.value - sum(target, _ZERO)
    if gain == 0:
        weights = tuple(1 - y for y in sol.y[S:])
        _check_weights(game, outcome, weights)
        return EfficiencyReport(EFFICIENT, DOMINANCE, counting, weights=weights)
    nu = Outcome([sol.x[s * J:(s + 1) * J] for s in range(S)])
    v = induced_payoff(game, nu)
    _check_dominating(game, outcome, v, nu)
    return EfficiencyReport(
        INEFFICIENT, DOMINANCE, counting, dominating_point=v, dominating_outcome=nu
    )


def check(game: Game, outcome: Outcome, method: str = "both") -> list[EfficiencyReport]:
    """Run the requested test(s); ``"both"`` raises on disagreement."""
    if method == CONE:
        return [ex_ante_efficient_cone(game, outcome)]
    if method == DOMINANCE:
        return [ex_ante_efficient_dominance(game, outcome)]
    if method != "both":
        raise ValueError(f"unknown method {method!r}")
    cone = ex_ante_efficient_cone(game, outcome)
    dom = ex_ante_efficient_dominance(game, outcome)
    if cone.verdict != dom.verdict:
        raise EfficiencyInternalError(
            f"cone test says {cone.verdict}, dominance test says {dom.verdict}"
        )
    return [cone, dom]


@dataclass(frozen=True)
class DecisionRuleReport:
    varying_states: int
    condition_i: bool
    q: int | None
    condition_ii: bool | None
    outcome: Outcome

    @property
    def generically_inefficient(self) -> bool:
        return self.condition_i or bool(self.condition_ii)


def decision_rule_check(profile: DecisionRuleProfile, game: Game) -> DecisionRuleReport:
    """Generic-inefficiency flags for pure type-contingent decision rules."""
    if not profile.full_support:
        raise ValueError("type distribution must have full support")
    types = profile.type_profiles()
    varying = 0
    for s, state in enumerate(game.states):
        acts = {profile.action(t, s, state) for t in types}
        if len(acts) > 1:
            varying += 1
    q = cond_ii = None
    if profile.player_rules is not None:
        q = sum(1 for rule in profile.player_rules if len(set(rule.values())) >= 2)
        cond_ii = q >= 1 and game.n_states * (2**q - 1) >= game.k
    return DecisionRuleReport(
        varying_states=varying,
        condition_i=varying >= game.k,
        q=q,
        condition_ii=cond_ii,
        outcome=outcome_from_rule(game, profile),
    )
