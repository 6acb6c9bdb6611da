"""Builders for verified cheap-talk equilibria on two-state games."""

from __future__ import annotations

import random
from fractions import Fraction

from paretogames.cheaptalk import CheapTalkProfile
from paretogames.persuasion import best_response_set, split_payoffs, value_function_1d

_ZERO = Fraction(0)


def _messages(game):
    return tuple(f"m{i}" for i in range(max(game.n_joint, game.n_states)))


def babbling(game, prior, mix=None) -> CheapTalkProfile:
    """Every state sends m0; every message gets the same receiver reply.

    ``mix`` (action -> weight) defaults to the sender-preferred best response.
    """
    u_s, u_r = split_payoffs(game)
    msgs = _messages(game)
    if mix is None:
        best = best_response_set(u_r, prior)
        a = max(best, key=lambda x: sum(q * u_s[s][x] for s, q in enumerate(prior)))
        mix = {a: Fraction(1)}
    reply = [mix.get(a, _ZERO) for a in range(game.n_joint)]
    sender = [[Fraction(1)] + [_ZERO] * (len(msgs) - 1) for _ in game.states]
    return CheapTalkProfile(msgs, sender, [reply] * len(msgs))


def indifference_prior(rng: random.Random, game):
    """A breakpoint belief where the receiver has two or more best replies."""
    _, u_r = split_payoffs(game)
    V = value_function_1d(game)
    points = [x for x in V.xs[1:-1] if len(best_response_set(u_r, (1 - x, x))) >= 2]
    if not points:
        return None, ()
    x = rng.choice(points)
    return x, best_response_set(u_r, (1 - x, x))


def informative(rng: random.Random, game, prior_p):
    """Two on-path messages with posteriors on either side of the prior and
    receiver mixing chosen so the state-independent sender is indifferent.

    Returns ``None`` if the random choice of posteriors admits no such play.
    """
    u_s, u_r = split_payoffs(game)
    us = u_s[0]
    V = value_function_1d(game)
    cands = sorted(set(V.xs) | {Fraction(rng.randint(1, 99), 100) for _ in range(3)})
    left = [x for x in cands if x < prior_p]
    right = [x for x in cands if x > prior_p]
    if not left or not right:
        return None
    q1, q2 = rng.choice(left), rng.choice(right)

    def span(q):
        br = best_response_set(u_r, (1 - q, q))
        return br, min(us[a] for a in br), max(us[a] for a in br)

    br1, lo1, hi1 = span(q1)
    br2, lo2, hi2 = span(q2)
    lo, hi = max(lo1, lo2), min(hi1, hi2)
    if lo > hi:
        return None
    c = lo if lo == hi else lo + (hi - lo) * Fraction(rng.randint(0, 4), 4)

    def mix_for(br):
        # two actions bracketing c, weights solving w*u_a + (1-w)*u_b = c
        below = [a for a in br if us[a] <= c]
        above = [a for a in br if us[a] >= c]
        a = max(below, key=lambda x: us[x])
        b = min(above, key=lambda x: us[x])
        if us[a] == us[b]:
            return {a: Fraction(1)}
        w = (us[b] - c) / (us[b] - us[a])
        return {a: w, b: 1 - w}

    lam = (q2 - prior_p) / (q2 - q1)  # weight on posterior q1
    msgs = _messages(game)
    sender = []
    for s, pr in enumerate((1 - prior_p, prior_p)):
        q1s = q1 if s == 1 else 1 - q1
        m1 = lam * q1s / pr
        row = [m1, 1 - m1] + [_ZERO] * (len(msgs) - 2)
        sender.append(row)
    low_action = min(range(game.n_joint), key=lambda a: us[a])
    off = [Fraction(1) if a == low_action else _ZERO for a in range(game.n_joint)]
    receiver = []
    for i in range(len(msgs)):
        if i < 2:
            mix = mix_for(br1 if i == 0 else br2)
            receiver.append([mix.get(a, _ZERO) for a in range(game.n_joint)])
        else:
            receiver.append(off)
    return CheapTalkProfile(msgs, sender, receiver)
