"""Bayesian persuasion: the obedience LP, a one-dimensional concavification
oracle, and the threshold environment with safe and risky actions.

Sender-receiver problems are two-player games in which the sender has a
single dummy action, so joint action ``j`` is receiver action ``j``.
For two-state problems beliefs are written as ``p = P(second state)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import lp
from .core import Game, Outcome, fmt, sender_receiver_game, support_counts, to_rational
from .efficiency import counting_bound, ex_ante_efficient_cone

_ZERO = Fraction(0)
_ONE = Fraction(1)


def split_payoffs(game: Game):
    """Return ``(u_S, u_R)`` as ``[state][receiver action]`` tables."""
    if game.k != 2 or len(game.actions[0]) != 1:
        raise ValueError("expected a sender-receiver game (sender has one dummy action)")
    u_s = [[vec[0] for vec in block] for block in game.payoffs]
    u_r = [[vec[1] for vec in block] for block in game.payoffs]
    return u_s, u_r


def _prior(game: Game, prior) -> tuple[Fraction, ...]:
    if prior is None:
        return game.prior
    p = tuple(to_rational(x) for x in prior)
    if len(p) != game.n_states or any(x <= 0 for x in p) or sum(p) != 1:
        raise ValueError("prior must be an interior distribution over the states")
    return p


@dataclass(frozen=True)
class BpSolution:
    outcome: Outcome
    value: Fraction
    prior: tuple[Fraction, ...]
    # action -> (recommendation probability, posterior over states)
    posteriors: dict
    active_obedience: tuple[tuple[int, int], ...]

    def to_json(self, game: Game) -> dict:
        labels = game.actions[1]
        return {
            "prior": [fmt(x) for x in self.prior],
            "value": fmt(self.value),
            "outcome": self.outcome.to_mapping(game),
            "posteriors": {
                labels[a]: {"prob": fmt(w), "belief": [fmt(x) for x in q]}
                for a, (w, q) in sorted(self.posteriors.items())
            },
            "active_obedience": [[labels[a], labels[b]] for a, b in self.active_obedience],
        }


def solve_bp(game: Game, prior=None) -> BpSolution:
    """Sender-optimal obedient direct recommendation policy (a vertex optimum)."""
    u_s, u_r = split_payoffs(game)
    p = _prior(game, prior)
    S, J = game.n_states, game.n_joint
    n_vars = S * J
    A, senses, b = [], [], []
    for s in range(S):
        row = [_ZERO] * n_vars
        row[s * J:(s + 1) * J] = [_ONE] * J
        A.append(row)
        senses.append(lp.EQ)
        b.append(_ONE)
    pairs = [(a, c) for a in range(J) for c in range(J) if a != c]
    for a, c in pairs:
        row = [_ZERO] * n_vars
        for s in range(S):
            row[s * J + a] = p[s] * (u_r[s][a] - u_r[s][c])
        A.append(row)
        senses.append(lp.GE)
        b.append(_ZERO)
    obj = [p[s] * u_s[s][j] for s in range(S) for j in range(J)]
    sol = lp.solve(lp.LinearProgram(obj, A, b, senses))
    if not sol.optimal:
        raise RuntimeError(f"persuasion LP returned {sol.status}")
    outcome = Outcome([sol.x[s * J:(s + 1) * J] for s in range(S)])
    return _package(game, outcome, sol.value, p)


def _package(game, outcome, value, p) -> BpSolution:
    u_s, u_r = split_payoffs(game)
    S, J = game.n_states, game.n_joint
    posteriors = {}
    for a in range(J):
        w = sum((p[s] * outcome.probs[s][a] for s in range(S)), _ZERO)
        if w:
            posteriors[a] = (w, tuple(p[s] * outcome.probs[s][a] / w for s in range(S)))
    active = []
    for a in posteriors:
        for c in range(J):
            if c != a:
                slack = sum(
                    (p[s] * outcome.probs[s][a] * (u_r[s][a] - u_r[s][c]) for s in range(S)),
                    _ZERO,
                )
                if slack == 0:
                    active.append((a, c))
    return BpSolution(outcome, value, p, posteriors, tuple(active))


def obedience_slacks(game: Game, outcome: Outcome, prior=None) -> dict:
    u_s, u_r = split_payoffs(game)
    p = _prior(game, prior)
    S, J = game.n_states, game.n_joint
    return {
        (a, c): sum(
            (p[s] * outcome.probs[s][a] * (u_r[s][a] - u_r[s][c]) for s in range(S)), _ZERO
        )
        for a in range(J)
        for c in range(J)
        if a != c
    }


# -- one-dimensional value functions -------------------------------------------


@dataclass(frozen=True)
class Piecewise1D:
    """Function on [0, 1] that is affine on each open interval between
    consecutive breakpoints and takes its own value at each breakpoint.

    ``lines[i] = (value at xs[i], value at xs[i+1])`` describes the open
    interval ``(xs[i], xs[i+1])``; ``values[i]`` is the value at ``xs[i]``.
    ``labels`` name the action used on each interval and at each point.
    """

    xs: tuple[Fraction, ...]
    lines: tuple[tuple[Fraction, Fraction], ...]
    values: tuple[Fraction, ...]
    line_labels: tuple = ()
    point_labels: tuple = ()

    def __post_init__(self):
        if len(self.xs) < 2 or self.xs[0] != 0 or self.xs[-1] != 1:
            raise ValueError("breakpoints must run from 0 to 1")
        if any(a >= b for a, b in zip(self.xs, self.xs[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if len(self.lines) != len(self.xs) - 1 or len(self.values) != len(self.xs):
            raise ValueError("malformed piecewise description")

    def __call__(self, p) -> Fraction:
        p = to_rational(p)
        if not 0 <= p <= 1:
            raise ValueError("belief outside [0, 1]")
        for i, x in enumerate(self.xs):
            if p == x:
                return self.values[i]
            if p < x:
                lo, hi = self.xs[i - 1], x
                y0, y1 = self.lines[i - 1]
                return y0 + (y1 - y0) * (p - lo) / (hi - lo)
        raise AssertionError("unreachable")

    @property
    def is_step(self) -> bool:
        return all(y0 == y1 for y0, y1 in self.lines)

    def segments(self) -> list[dict]:
        """Maximal runs sharing one label, with open/closed endpoints."""
        out: list[dict] = []
        n = len(self.lines)
        labels = self.line_labels or (None,) * n
        plabels = self.point_labels or (None,) * len(self.xs)
        for i in range(n):
            lab = labels[i]
            left_in = plabels[i] == lab and self.values[i] == self.lines[i][0]
            right_in = plabels[i + 1] == lab and self.values[i + 1] == self.lines[i][1]
            if out and out[-1]["label"] == lab and out[-1]["hi"] == self.xs[i] and out[-1][
                "hi_closed"
            ] and left_in:
                out[-1].update(hi=self.xs[i + 1], hi_closed=right_in, y_hi=self.lines[i][1])
                continue
            out.append(
                {
                    "label": lab,
                    "lo": self.xs[i],
                    "hi": self.xs[i + 1],
                    "lo_closed": left_in,
                    "hi_closed": right_in,
                    "y_lo": self.lines[i][0],
                    "y_hi": self.lines[i][1],
                }
            )
        return out


def _affine(u, a):
    # E_p u(., a) as (value at p=0, value at p=1)
    return (u[0][a], u[1][a])


def _at(line, p):
    return line[0] + (line[1] - line[0]) * p


def _cut(l1, l2):
    """Belief in (0, 1) where two affine functions cross, else None."""
    d0 = l1[0] - l2[0]
    d1 = l1[1] - l2[1]
    if d0 == d1:
        return None
    x = d0 / (d0 - d1)
    return x if 0 < x < 1 else None


def best_response_set(u_r, belief) -> tuple[int, ...]:
    vals = [
        sum((q * u_r[s][a] for s, q in enumerate(belief)), _ZERO) for a in range(len(u_r[0]))
    ]
    top = max(vals)
    return tuple(a for a, v in enumerate(vals) if v == top)


def _sender_pick(u_s, belief, candidates) -> tuple[int, Fraction]:
    best = None
    for a in candidates:
        v = sum((q * u_s[s][a] for s, q in enumerate(belief)), _ZERO)
        if best is None or v > best[1]:
            best = (a, v)
    return best


def value_function_1d(game: Game) -> Piecewise1D:
    """Sender's value ``V(p)`` with sender-preferred receiver tie-breaking."""
    if game.n_states != 2:
        raise ValueError("value_function_1d needs exactly two states")
    u_s, u_r = split_payoffs(game)
    J = game.n_joint
    r_lines = [_affine(u_r, a) for a in range(J)]
    s_lines = [_affine(u_s, a) for a in range(J)]
    cuts = {_ZERO, _ONE}
    for lines in (r_lines, s_lines):
        for a, b in itertools.combinations(range(J), 2):
            x = _cut(lines[a], lines[b])
            if x is not None:
                cuts.add(x)
    xs = sorted(cuts)
    values, plabels = [], []
    for x in xs:
        a, v = _sender_pick(u_s, (1 - x, x), best_response_set(u_r, (1 - x, x)))
        values.append(v)
        plabels.append(a)
    lines, llabels = [], []
    for lo, hi in zip(xs, xs[1:]):
        mid = (lo + hi) / 2
        a, _ = _sender_pick(u_s, (1 - mid, mid), best_response_set(u_r, (1 - mid, mid)))
        lines.append((_at(s_lines[a], lo), _at(s_lines[a], hi)))
        llabels.append(a)
    # drop breakpoints that change nothing
    keep = [0]
    for i in range(1, len(xs) - 1):
        same = (
            llabels[i - 1] == llabels[i] == plabels[i]
            and lines[i - 1][1] == values[i] == lines[i][0]
        )
        if not same:
            keep.append(i)
    keep.append(len(xs) - 1)
    new_lines, new_llabels = [], []
    for a, b in zip(keep, keep[1:]):
        new_lines.append((lines[a][0], lines[b - 1][1]))
        new_llabels.append(llabels[a])
    return Piecewise1D(
        tuple(xs[i] for i in keep),
        tuple(new_lines),
        tuple(values[i] for i in keep),
        tuple(new_llabels),
        tuple(plabels[i] for i in keep),
    )


@dataclass(frozen=True)
class ConcaveEnvelope:
    """Continuous concave piecewise-affine function on [0, 1]."""

    vertices: tuple[tuple[Fraction, Fraction], ...]

    def __call__(self, p) -> Fraction:
        p = to_rational(p)
        if not 0 <= p <= 1:
            raise ValueError("belief outside [0, 1]")
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            if x0 <= p <= x1:
                return y0 + (y1 - y0) * (p - x0) / (x1 - x0)
        raise AssertionError("unreachable")

    def segments(self) -> list[dict]:
        out = []
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            slope = (y1 - y0) / (x1 - x0)
            out.append({"lo": x0, "hi": x1, "slope": slope, "intercept": y0 - slope * x0})
        return out


def concavify_1d(V: Piecewise1D) -> ConcaveEnvelope:
    """Upper concave envelope of the closure of the graph of ``V``."""
    if not isinstance(V, Piecewise1D):
        raise TypeError("expected a Piecewise1D description")
    best: dict[Fraction, Fraction] = {}

    def add(x, y):
        if x not in best or y > best[x]:
            best[x] = y

    for x, y in zip(V.xs, V.values):
        add(x, y)
    for (lo, hi), (y0, y1) in zip(zip(V.xs, V.xs[1:]), V.lines):
        add(lo, y0)
        add(hi, y1)
    pts = sorted(best.items())
    upper: list[tuple[Fraction, Fraction]] = []
    for p in pts:
        while len(upper) >= 2:
            (ox, oy), (ax, ay) = upper[-2], upper[-1]
            if (ax - ox) * (p[1] - oy) - (ay - oy) * (p[0] - ox) >= 0:
                upper.pop()
            else:
                break
        upper.append(p)
    return ConcaveEnvelope(tuple(upper))


# -- threshold environment ------------------------------------------------------


@dataclass(frozen=True)
class ThresholdEnv:
    """Safe action ``a_0`` and risky actions ``a_1..a_n``; the receiver takes
    ``a_i`` exactly when ``p(w_i) >= T``.

    Beliefs are full vectors over ``(w_0, ..., w_n)``.
    """

    n: int
    T: Fraction
    sender_payoffs: tuple[Fraction, ...]
    game: Game = field(repr=False)

    @property
    def outer_points(self) -> list[tuple[Fraction, ...]]:
        pts = [self.vertex(i) for i in range(self.n + 1)]
        for i in range(1, self.n + 1):
            for j in range(self.n + 1):
                if j != i:
                    pts.append(self.o(i, j))
        return pts

    def vertex(self, i: int) -> tuple[Fraction, ...]:
        return tuple(_ONE if s == i else _ZERO for s in range(self.n + 1))

    def o(self, i: int, j: int) -> tuple[Fraction, ...]:
        """Extreme point of cell ``C_i`` on the segment from ``w_i`` to ``w_j``."""
        if i == 0 or i == j:
            raise ValueError("o(i, j) needs a risky i and j != i")
        return tuple(
            self.T if s == i else 1 - self.T if s == j else _ZERO for s in range(self.n + 1)
        )

    def cell(self, belief) -> int:
        """Index of the partition cell containing ``belief``."""
        for i in range(1, self.n + 1):
            if belief[i] >= self.T:
                return i
        return 0

    def hyperplane(self, i: int) -> tuple[tuple[Fraction, ...], Fraction]:
        """``H_i`` in coordinates ``(p(w_1), ..., p(w_n))``."""
        drop = lambda v: v[1:]  # noqa: E731
        if i == 0:
            pts = [drop(self.o(j, 0)) for j in range(1, self.n + 1)]
        else:
            pts = [drop(self.vertex(0))] + [
                drop(self.o(j, i)) for j in range(1, self.n + 1) if j != i
            ]
        return lp.affine_hyperplane_through(pts)


def build_threshold_env(n: int, T, sender_payoffs: Sequence | None = None, prior=None) -> ThresholdEnv:
    """Realize the threshold partition with ``E_p u_R(a_i) = p(w_i) - T``."""
    T = to_rational(T)
    if n < 2:
        raise ValueError("need at least two risky actions")
    if not Fraction(1, 2) < T < 1:
        raise ValueError("threshold T must lie in (1/2, 1)")
    if sender_payoffs is None:
        sender_payoffs = [Fraction(i) for i in range(1, n + 1)]
    us = tuple(to_rational(x) for x in sender_payoffs)
    if len(us) != n or any(x <= 0 for x in us):
        raise ValueError("need n positive sender payoffs for the risky actions")
    us = (_ZERO,) + us
    states = [f"w{i}" for i in range(n + 1)]
    actions = [f"a{i}" for i in range(n + 1)]
    u_r = [
        [_ZERO] + [(1 - T) if a == s else -T for a in range(1, n + 1)] for s in range(n + 1)
    ]
    u_s = [list(us) for _ in range(n + 1)]
    if prior is None:
        prior = [Fraction(1, n + 1)] * (n + 1)
    game = sender_receiver_game(states, prior, actions, u_s, u_r)
    env = ThresholdEnv(n, T, us, game)
    # each vertex sits strictly inside its own cell, risky cells are disjoint
    eps = (1 - T) / (2 * n)
    for i in range(n + 1):
        for j in range(n + 1):
            if j != i:
                near = tuple(
                    1 - eps if s == i else eps if s == j else _ZERO for s in range(n + 1)
                )
                if best_response_set(u_r, near) != (i,):
                    raise RuntimeError(f"vertex w{i} is not interior to its cell")
    return env


def _side(h, c, x) -> Fraction:
    return sum((a * b for a, b in zip(h, x)), _ZERO) - c


@dataclass(frozen=True)
class RegionReport:
    prior: tuple[Fraction, ...]
    in_region: dict  # i -> (closed membership, interior membership)
    in_r_star: bool
    in_r_star_interior: bool
    pair: tuple[int, int] | None
    q: tuple[Fraction, ...]
    T_p: Fraction
    top_two: tuple[int, int]

    def to_json(self) -> dict:
        return {
            "prior": [fmt(x) for x in self.prior],
            "R": {str(i): closed for i, (closed, _) in sorted(self.in_region.items())},
            "in_R_star": self.in_r_star,
            "in_R_star_interior": self.in_r_star_interior,
            "q": [fmt(x) for x in self.q],
            "T_p": fmt(self.T_p),
        }


def region_analysis(env: ThresholdEnv, prior) -> RegionReport:
    p = tuple(to_rational(x) for x in prior)
    if len(p) != env.n + 1 or any(x <= 0 for x in p) or sum(p) != 1:
        raise ValueError("prior must be interior")
    red = p[1:]
    membership = {}
    for i in range(env.n + 1):
        h, c = env.hyperplane(i)
        ref = env.vertex(i)[1:]
        ref_side = _side(h, c, ref)
        here = _side(h, c, red)
        membership[i] = (here * ref_side >= 0, here * ref_side > 0)
    pair = None
    closed_star = interior_star = False
    if membership[0][0]:
        for i, j in itertools.combinations(range(1, env.n + 1), 2):
            if membership[i][0] and membership[j][0]:
                closed_star = True
                if membership[0][1] and membership[i][1] and membership[j][1]:
                    interior_star = True
                    pair = (i, j)
                    break
                pair = pair or (i, j)
    rest = 1 - p[0]
    q = (_ZERO,) + tuple(x / rest for x in red)
    order = sorted(range(1, env.n + 1), key=lambda i: (-q[i], i))
    i_star, j_star = order[0], order[1]
    T_p = max(1 - p[0], 1 - q[i_star], 1 - q[j_star])
    return RegionReport(p, membership, closed_star, interior_star, pair, q, T_p, (i_star, j_star))


def belief_value(env_or_game, belief) -> Fraction:
    """Sender value at a belief with sender-preferred tie-breaking."""
    game = env_or_game.game if isinstance(env_or_game, ThresholdEnv) else env_or_game
    u_s, u_r = split_payoffs(game)
    return _sender_pick(u_s, belief, best_response_set(u_r, belief))[1]


def outer_point_value(env: ThresholdEnv, prior) -> Fraction:
    """Best Bayes-plausible distribution over the outer points only."""
    pts = env.outer_points
    p = tuple(to_rational(x) for x in prior)
    A = [[pt[s] for pt in pts] for s in range(env.n + 1)]
    c = [belief_value(env, pt) for pt in pts]
    sol = lp.solve(lp.LinearProgram(c, A, p, [lp.EQ] * (env.n + 1)))
    if not sol.optimal:
        raise RuntimeError(f"outer-point LP returned {sol.status}")
    return sol.value


@dataclass(frozen=True)
class InefficiencyCheck:
    applicable: bool
    region: RegionReport
    solution: BpSolution | None = None
    sizes: tuple[int, ...] | None = None
    bound_passes: bool | None = None
    cone_verdict: str | None = None
    case: str | None = None

    @property
    def inefficient(self) -> bool | None:
        if not self.applicable:
            return None
        return self.cone_verdict == "inefficient"

    @property
    def mixed(self) -> bool | None:
        if self.sizes is None:
            return None
        return sum(1 for x in self.sizes if x > 1) >= 2 or any(x > 2 for x in self.sizes)

    def to_json(self, game: Game) -> dict:
        out = {"applicable": self.applicable, "region": self.region.to_json()}
        if self.applicable:
            out.update(
                solution=self.solution.to_json(game),
                support_sizes=list(self.sizes),
                bound_passes=self.bound_passes,
                cone_verdict=self.cone_verdict,
                case=self.case,
            )
        return out


def verify_threshold_inefficiency(env: ThresholdEnv, prior) -> InefficiencyCheck:
    """Solve persuasion at a prior in the interior of ``R_*`` and confirm the
    outcome mixes and fails the exact efficiency test."""
    region = region_analysis(env, prior)
    if not region.in_r_star_interior:
        return InefficiencyCheck(False, region)
    game = env.game.with_prior(region.prior)
    sol = solve_bp(game)
    sizes, _ = support_counts(sol.outcome)
    bound = counting_bound(game, sol.outcome)
    verdict = ex_ante_efficient_cone(game, sol.outcome).verdict
    i, j = region.pair
    three_safe = sizes[0] >= 3
    both_mixed = sizes[i] >= 2 and sizes[j] >= 2
    case = "a+b" if three_safe and both_mixed else "a" if three_safe else "b" if both_mixed else None
    return InefficiencyCheck(True, region, sol, sizes, bound.passes, verdict, case)


def simplex_grid(dim: int, denom: int, interior: bool = True):
    """All beliefs over ``dim`` states with coordinates in ``(1/denom) Z``."""
    lo = 1 if interior else 0
    for combo in itertools.product(range(lo, denom + 1), repeat=dim - 1):
        last = denom - sum(combo)
        if last >= lo:
            yield tuple(Fraction(c, denom) for c in combo) + (Fraction(last, denom),)
