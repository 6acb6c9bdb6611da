"""JSON readers and writers. Decimals in input are read exactly;
rationals are always written as ``"num/den"`` strings."""

from __future__ import annotations

import json
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import Mapping

from .core import Game, Outcome, fmt, to_rational


def loads(text: str):
    return json.loads(text, parse_float=Decimal)


def load(path) -> object:
    return loads(Path(path).read_text())


def dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=False) + "\n"


def game_from_mapping(data: Mapping) -> Game:
    """``{"players", "states", "prior", "actions", "payoffs"}``."""
    states = [str(s) for s in data["states"]]
    actions = [[str(a) for a in acts] for acts in data["actions"]]
    if "players" in data and int(data["players"]) != len(actions):
        raise ValueError("'players' disagrees with the number of action lists")
    prior = [to_rational(x) for x in data["prior"]]
    # a skeleton with a placeholder prior resolves state and joint labels
    n_joint = 1
    for acts in actions:
        n_joint *= len(acts)
    zero = (0,) * len(actions)
    placeholder = [Fraction(1, len(states))] * len(states) if states else []
    skeleton = Game(states, placeholder, actions, [[zero] * n_joint for _ in states])
    table = [[None] * n_joint for _ in states]
    for state, block in data["payoffs"].items():
        s = skeleton.state_index(state)
        for label, vec in block.items():
            j = skeleton.joint_index(label)
            if table[s][j] is not None:
                raise ValueError(f"payoff for {label!r} in {state!r} given twice")
            table[s][j] = [to_rational(x) for x in vec]
    for s, row in enumerate(table):
        missing = [skeleton.joint_label(j) for j, v in enumerate(row) if v is None]
        if missing:
            raise ValueError(f"payoffs missing in state {states[s]!r}: {', '.join(missing)}")
    return Game(states, prior, actions, table)


def game_to_mapping(game: Game) -> dict:
    return {
        "players": game.k,
        "states": list(game.states),
        "prior": [fmt(x) for x in game.prior],
        "actions": [list(a) for a in game.actions],
        "payoffs": {
            state: {
                game.joint_label(j): [fmt(x) for x in vec] for j, vec in enumerate(block)
            }
            for state, block in zip(game.states, game.payoffs)
        },
    }


def outcome_from_data(game: Game, data: Mapping) -> tuple[Outcome, list | None]:
    """Plain ``{state: {joint: prob}}`` or ``{"prior": [...], "outcome": {...}}``.

    Returns the outcome and the optional prior override.
    """
    if "outcome" in data and isinstance(data.get("outcome"), Mapping):
        prior = data.get("prior")
        return Outcome.from_mapping(game, data["outcome"]), prior
    return Outcome.from_mapping(game, data), None
