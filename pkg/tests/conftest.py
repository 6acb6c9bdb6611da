from fractions import Fraction
from pathlib import Path

import pytest

from paretogames import jsonio
from paretogames.core import Outcome

DATA = Path(__file__).resolve().parents[1] / "src" / "paretogames" / "data"


def load_example1():
    return jsonio.game_from_mapping(jsonio.load(DATA / "example1_game.json"))


def load_case(tag):
    """Bundled example game at the case prior and the case outcome."""
    game = load_example1()
    outcome, prior = jsonio.outcome_from_data(game, jsonio.load(DATA / f"example1_outcome_{tag}.json"))
    return game.with_prior([Fraction(x) for x in prior]), outcome


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def example1():
    return load_example1()


@pytest.fixture(params=["a", "b", "c"])
def case(request):
    return (request.param,) + load_case(request.param)


def pure(game, *labels):
    return Outcome.pure(game, labels)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
