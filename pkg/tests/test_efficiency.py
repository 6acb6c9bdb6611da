import random
from fractions import Fraction as F

import pytest

from conftest import load_case
from gen import bound_violating_outcome, interior_prior, random_game, random_outcome, welfare_outcome
from paretogames import efficiency as E
from paretogames.core import DecisionRuleProfile, Game, Outcome, induced_payoff, state_payoff


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


class TestDeviations:
    def test_case_a_entries(self):
        game, mu = load_case("a")
        devs = E.deviations(game, mu)
        j = game.joint_index
        assert devs[(1, j("a3"))] == (-7, 4)
        assert devs[(0, j("a1"))] == (F(40, 9), F(-5, 9))
        assert devs[(1, j("a1"))] == (0, 0)
        assert len(devs) == 10

    def test_mixture_averages_to_zero(self):
        rng = random.Random(2)
        for _ in range(50):
            g = random_game(rng)
            mu = random_outcome(rng, g)
            devs = E.deviations(g, mu)
            for s in range(g.n_states):
                avg = [
                    sum(mu.probs[s][j] * devs[(s, j)][i] for j in range(g.n_joint))
                    for i in range(g.k)
                ]
                assert all(x == 0 for x in avg)

    def test_hand_witness_combination(self):
        game, mu = load_case("a")
        devs = E.deviations(game, mu)
        j = game.joint_index
        combo = tuple(a + F(1, 4) * b for a, b in zip(devs[(0, j("a1"))], devs[(1, j("a3"))]))
        assert combo == (F(97, 36), F(4, 9))


class TestExPost:
    def test_case_c_state_w1(self):
        game, mu = load_case("c")
        ok, v = E.ex_post_efficient(game, mu, "w1")
        assert not ok
        base = state_payoff(game, mu, "w1")
        assert all(a >= b for a, b in zip(v, base)) and v != base

    def test_case_a_both_states(self):
        game, mu = load_case("a")
        assert E.ex_post_efficient(game, mu, "w0") == (True, None)
        assert E.ex_post_efficient(game, mu, "w1") == (True, None)

    def test_single_state_best_profile(self):
        g = Game(["s"], [1], [["x", "y"], ["-"]], [[[1, 1], [3, 2]]])
        assert E.ex_post_efficient(g, Outcome.pure(g, ["y"]), "s")[0]
        assert not E.ex_post_efficient(g, Outcome.pure(g, ["x"]), "s")[0]

    def test_unknown_state(self, example1):
        with pytest.raises(KeyError):
            E.ex_post_efficient(example1, Outcome.pure(example1, ["a1", "a1"]), "zz")


class TestExAnte:
    @pytest.mark.parametrize("tag,verdict", [("a", "inefficient"), ("b", "efficient"), ("c", "inefficient")])
    def test_cases_both_methods(self, tag, verdict):
        game, mu = load_case(tag)
        reports = E.check(game, mu, "both")
        assert [r.verdict for r in reports] == [verdict, verdict]
        assert [r.method for r in reports] == ["cone", "dominance"]

    def test_case_a_witness(self):
        game, mu = load_case("a")
        rep = E.ex_ante_efficient_cone(game, mu)
        devs = E.deviations(game, mu)
        combined = [sum(x * devs[key][i] for key, x in rep.lam.items()) for i in range(2)]
        assert all(c >= 0 for c in combined) and any(combined)
        assert rep.dominating_point == (F(91, 10), F(81, 10))

    def test_case_a_dominance_point(self):
        game, mu = load_case("a")
        v = E.ex_ante_efficient_dominance(game, mu).dominating_point
        assert v[0] >= 6 and v[1] >= F(81, 10) and v != (6, F(81, 10))

    def test_case_b_weights(self):
        game, mu = load_case("b")
        for rep in E.check(game, mu):
            n = rep.weights
            assert all(x >= 1 for x in n)
            for s in range(2):
                here = _dot(n, state_payoff(game, mu, s))
                assert all(here >= _dot(n, u) for u in game.payoffs[s])

    def test_common_normal_case_b(self):
        game, mu = load_case("b")
        assert E.common_normal(game, mu) is not None
        game, mu = load_case("a")
        assert E.common_normal(game, mu) is None

    def test_unknown_method(self, example1):
        with pytest.raises(ValueError):
            E.check(example1, Outcome.pure(example1, ["a1", "a1"]), "magic")

    def test_weak_efficiency_note(self):
        # both profiles give player 2 the same payoff; y dominates x only weakly
        g = Game(["s"], [1], [["x", "y"], ["-"]], [[[1, 5], [2, 5]]])
        rep = E.ex_ante_efficient_cone(g, Outcome.pure(g, ["x"]))
        assert rep.verdict == "inefficient" and rep.notes

    def test_report_json(self):
        game, mu = load_case("a")
        data = E.ex_ante_efficient_cone(game, mu).to_json(game)
        assert data["verdict"] == "inefficient"
        assert data["witness"]["dominating_point"] == ["91/10", "81/10"]
        assert data["counting"] == {"total": 3, "bound": 4, "passes": True}


class TestProperties:
    def test_agreement_and_certificates(self):
        rng = random.Random(17)
        for i in range(200):
            g = random_game(rng)
            mu = welfare_outcome(rng, g) if i % 3 == 0 else random_outcome(rng, g)
            cone, dom = E.check(g, mu)
            if cone.efficient:
                for s in g.states:
                    assert E.ex_post_efficient(g, mu, s)[0]
            else:
                u = induced_payoff(g, mu)
                v = dom.dominating_point
                assert all(a >= b for a, b in zip(v, u)) and v != u

    def test_prior_independence(self):
        rng = random.Random(23)
        for _ in range(20):
            g = random_game(rng, n_states=rng.randint(2, 3))
            mu = welfare_outcome(rng, g) if rng.random() < 0.5 else random_outcome(rng, g, 2)
            verdict = E.ex_ante_efficient_cone(g, mu).verdict
            for _ in range(10):
                other = g.with_prior(interior_prior(rng, g.n_states, 37))
                assert E.ex_ante_efficient_cone(other, mu).verdict == verdict

    def test_counting_bound_generic(self):
        rng = random.Random(29)
        done = 0
        while done < 200:
            g = random_game(rng)
            mu = bound_violating_outcome(rng, g)
            if mu is None:
                continue
            done += 1
            assert not E.counting_bound(g, mu).passes
            assert E.ex_ante_efficient_cone(g, mu).verdict == "inefficient"


class TestCountingBound:
    def test_case_a(self):
        game, mu = load_case("a")
        cb = E.counting_bound(game, mu)
        assert (cb.total, cb.bound, cb.passes) == (3, 4, True)

    def test_two_per_state(self):
        g = Game(["s", "t"], [F(1, 2)] * 2, [["x", "y"], ["-"]], [[[0, 0], [1, 1]]] * 2)
        mu = Outcome([[F(1, 2), F(1, 2)]] * 2)
        cb = E.counting_bound(g, mu)
        assert (cb.total, cb.bound, cb.passes) == (4, 4, False)

    def test_state_violation(self):
        g = Game(["s"], [1], [["x", "y", "z"], ["-"]], [[[0, 0], [1, 1], [2, 0]]])
        cb = E.counting_bound(g, Outcome([[F(1, 3)] * 3]))
        assert cb.state_violations == (0,)


class TestDecisionRules:
    types = (("t1", "t2"), ("u1", "u2"))
    uniform = {(a, b): F(1, 4) for a in ("t1", "t2") for b in ("u1", "u2")}

    def game(self, k=2):
        acts = [["x", "y"], ["l", "r"]] + [["-"]] * (k - 2)
        n = 4
        return Game(["s", "t"], [F(1, 2)] * 2, acts, [[[0] * k] * n] * 2)

    def test_constant_joint_rule(self):
        g = self.game()
        rule = {(t, s): ("x", "l") for t in self.uniform for s in g.states}
        prof = DecisionRuleProfile(self.types, [self.uniform] * 2, joint_rule=rule)
        rep = E.decision_rule_check(prof, g)
        assert rep.varying_states == 0 and not rep.generically_inefficient

    def test_condition_ii_flag(self):
        g = self.game()
        rules = ({"t1": "x", "t2": "y"}, {"u1": "l", "u2": "l"})
        rep = E.decision_rule_check(DecisionRuleProfile(self.types, [self.uniform] * 2, player_rules=rules), g)
        assert rep.q == 1 and rep.condition_ii

    def test_three_players_no_flag(self):
        g = self.game(3)
        types = self.types + (("v",),)
        dist = {t + ("v",): p for t, p in self.uniform.items()}
        rules = ({"t1": "x", "t2": "y"}, {"u1": "l", "u2": "l"}, {"v": "-"})
        rep = E.decision_rule_check(DecisionRuleProfile(types, [dist] * 2, player_rules=rules), g)
        assert rep.q == 1 and not rep.condition_ii and not rep.condition_i

    def test_requires_full_support(self):
        g = self.game()
        dist = {("t1", "u1"): F(1)}
        rules = ({"t1": "x", "t2": "y"}, {"u1": "l", "u2": "l"})
        with pytest.raises(ValueError):
            E.decision_rule_check(DecisionRuleProfile(self.types, [dist] * 2, player_rules=rules), g)
