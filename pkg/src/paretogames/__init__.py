"""Exact tools for Pareto efficiency of Bayes-correlated outcomes."""

from .core import DecisionRuleProfile, Game, Outcome, sender_receiver_game, to_rational
from .efficiency import check, counting_bound, ex_ante_efficient_cone, ex_ante_efficient_dominance

__all__ = [
    "DecisionRuleProfile",
    "Game",
    "Outcome",
    "check",
    "counting_bound",
    "ex_ante_efficient_cone",
    "ex_ante_efficient_dominance",
    "sender_receiver_game",
    "to_rational",
]

__version__ = "0.1.0"
