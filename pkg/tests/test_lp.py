import itertools
import random
from fractions import Fraction as F

import pytest

from paretogames import lp
from paretogames.lp import EQ, GE, LE, LinearProgram, affine_hyperplane_through, feasible_point, solve


def test_single_bound():
    sol = solve(LinearProgram([1], [[1]], [1], [LE]))
    assert sol.optimal and sol.value == 1 and sol.x == (1,)


def test_simplex_face_dual():
    sol = solve(LinearProgram([1, 1], [[1, 1]], [1], [LE]))
    assert sol.value == 1 and sol.y == (1,)


def test_infeasible():
    assert solve(LinearProgram([0], [[1]], [-1], [LE])).status == lp.INFEASIBLE


def test_unbounded():
    assert solve(LinearProgram([1, 0], [[1, -1]], [1], [LE])).status == lp.UNBOUNDED


def test_free_variable():
    sol = solve(LinearProgram([-1], [[1]], [-3], [GE], free=[True]))
    assert sol.value == 3 and sol.x == (-3,)


def test_equality_and_ge():
    # max x + 2y  s.t. x + y = 4, y >= 1, y <= 3
    sol = solve(LinearProgram([1, 2], [[1, 1], [0, 1], [0, 1]], [4, 1, 3], [EQ, GE, LE]))
    assert sol.value == 7 and sol.x == (1, 3)


def test_feasible_point():
    sol = feasible_point([[1], [1]], [GE, LE], [1, 2])
    assert sol.optimal and 1 <= sol.x[0] <= 2
    assert not feasible_point([[1], [1]], [GE, LE], [1, 0]).optimal


def test_dimension_errors():
    with pytest.raises(ValueError):
        LinearProgram([1, 2], [[1]], [1], [LE])
    with pytest.raises(ValueError):
        LinearProgram([1], [[1]], [1, 2], [LE])
    with pytest.raises(ValueError):
        LinearProgram([1], [[1]], [1], ["<"])


def test_degenerate_cycling_example():
    # Beale's example cycles under the textbook rule; Bland's rule terminates
    c = [F(3, 4), -150, F(1, 50), -6]
    A = [[F(1, 4), -60, F(-1, 25), 9], [F(1, 2), -90, F(-1, 50), 3], [0, 0, 1, 0]]
    sol = solve(LinearProgram(c, A, [0, 0, 1], [LE] * 3))
    assert sol.value == F(1, 20)


def _rand(rng, den=10):
    return F(rng.randint(-5 * den, 5 * den), den)


def test_random_lps_certified():
    rng = random.Random(5)
    seen = set()
    for _ in range(150):
        m, n = rng.randint(1, 12), rng.randint(1, 12)
        A = [[_rand(rng) for _ in range(n)] for _ in range(m)]
        b = [_rand(rng) for _ in range(m)]
        senses = [rng.choice([LE, LE, GE, EQ]) for _ in range(m)]
        free = [rng.random() < 0.2 for _ in range(n)]
        c = [_rand(rng) for _ in range(n)]
        prob = LinearProgram(c, A, b, senses, free)
        sol = solve(prob)  # optimal solutions are verified internally
        seen.add(sol.status)
        if sol.optimal:
            lp.verify(prob, sol)
    assert seen == {lp.OPTIMAL, lp.INFEASIBLE, lp.UNBOUNDED}


def test_box_brute_force():
    rng = random.Random(9)
    for _ in range(100):
        n = rng.randint(1, 4)
        lo = [F(rng.randint(-10, 5)) for _ in range(n)]
        hi = [l + F(rng.randint(0, 10), rng.randint(1, 4)) for l in lo]
        c = [_rand(rng) for _ in range(n)]
        A, b, senses = [], [], []
        for j in range(n):
            row = [F(0)] * n
            row[j] = F(1)
            A += [row, row]
            b += [lo[j], hi[j]]
            senses += [GE, LE]
        sol = solve(LinearProgram(c, A, b, senses, [True] * n))
        best = max(
            sum(ci * xi for ci, xi in zip(c, corner)) for corner in itertools.product(*zip(lo, hi))
        )
        assert sol.value == best


def test_verify_rejects_bad_certificate():
    prob = LinearProgram([1], [[1]], [1], [LE])
    with pytest.raises(lp.LpInternalError):
        lp.verify(prob, lp.LpSolution(lp.OPTIMAL, F(1), (F(1),), (F(2),)))
    with pytest.raises(lp.LpInternalError):
        lp.verify(prob, lp.LpSolution(lp.OPTIMAL, F(2), (F(2),), (F(2),)))


class TestHyperplane:
    def test_line(self):
        assert affine_hyperplane_through([(1, 0), (0, 1)]) == ((1, 1), 1)

    def test_threshold_h0_reduced(self):
        # o_10 and o_20 for T = 7/10 with the first coordinate dropped
        h, c = affine_hyperplane_through([(F(7, 10), 0), (0, F(7, 10))])
        assert (h, c) == ((1, 1), F(7, 10))

    def test_threshold_h1_reduced(self):
        h, c = affine_hyperplane_through([(0, 0), (F(3, 10), F(7, 10))])
        assert (h, c) == ((1, F(-3, 7)), 0)

    def test_dependent(self):
        with pytest.raises(ValueError):
            affine_hyperplane_through([(1, 1), (2, 2)][:1] * 2)
        with pytest.raises(ValueError):
            affine_hyperplane_through([(0, 0, 0), (1, 1, 1), (2, 2, 2)])

    def test_random(self):
        rng = random.Random(3)
        for _ in range(50):
            d = rng.randint(1, 4)
            pts = [[_rand(rng) for _ in range(d)] for _ in range(d)]
            try:
                h, c = affine_hyperplane_through(pts)
            except ValueError:
                continue
            assert any(h)
            assert next(x for x in h if x) == 1
            for p in pts:
                assert sum(a * b for a, b in zip(h, p)) == c
