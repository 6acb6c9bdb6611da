"""Exact rational linear programming.

A dense two-phase simplex tableau over :class:`fractions.Fraction` with
Bland's rule. Every optimal solution is returned together with a dual
vector, and primal feasibility, dual feasibility and strong duality are
re-verified exactly before returning.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import to_rational

LE, EQ, GE = "<=", "=", ">="
OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"

_ZERO = Fraction(0)


class LpInternalError(RuntimeError):
    """Raised when a returned certificate fails exact re-verification."""


@dataclass(frozen=True)
class LinearProgram:
    """``max c.x`` subject to ``A x (senses) b``.

    Variables are non-negative unless flagged in ``free``.
    """

    c: tuple[Fraction, ...]
    A: tuple[tuple[Fraction, ...], ...]
    b: tuple[Fraction, ...]
    senses: tuple[str, ...]
    free: tuple[bool, ...] = ()

    def __post_init__(self):
        n = len(self.c)
        object.__setattr__(self, "c", tuple(to_rational(x) for x in self.c))
        object.__setattr__(
            self, "A", tuple(tuple(to_rational(x) for x in row) for row in self.A)
        )
        object.__setattr__(self, "b", tuple(to_rational(x) for x in self.b))
        object.__setattr__(self, "senses", tuple(self.senses))
        free = tuple(self.free) if self.free else (False,) * n
        object.__setattr__(self, "free", free)
        if len(self.b) != len(self.A) or len(self.senses) != len(self.A):
            raise ValueError("A, b and senses must have the same number of rows")
        if any(len(row) != n for row in self.A):
            raise ValueError(f"every constraint row must have {n} coefficients")
        if len(free) != n:
            raise ValueError("free flags must match the number of variables")
        bad = set(self.senses) - {LE, EQ, GE}
        if bad:
            raise ValueError(f"unknown constraint senses {bad}")

    @property
    def n_vars(self) -> int:
        return len(self.c)


@dataclass(frozen=True)
class LpSolution:
    status: str
    value: Fraction | None = None
    x: tuple[Fraction, ...] | None = None
    y: tuple[Fraction, ...] | None = None

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    def __init__(self, rows, rhs, basis):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis

    def pivot(self, r, col, obj, obj_rhs):
        rows, rhs = self.rows, self.rhs
        prow = rows[r]
        piv = prow[col]
        if piv != 1:
            inv = 1 / piv
            prow[:] = [v * inv if v else v for v in prow]
            rhs[r] *= inv
        nz = [(j, v) for j, v in enumerate(prow) if v]
        for i, row in enumerate(rows):
            if i != r:
                f = row[col]
                if f:
                    for j, v in nz:
                        row[j] -= f * v
                    rhs[i] -= f * rhs[r]
        f = obj[col]
        if f:
            for j, v in nz:
                obj[j] -= f * v
            obj_rhs -= f * rhs[r]
        self.basis[r] = col
        return obj_rhs

    def run(self, obj, obj_rhs, allowed):
        """Maximize with Bland's rule. ``obj`` holds reduced costs; returns
        (status, obj_rhs) where obj_rhs is minus the objective value."""
        while True:
            col = next((j for j in allowed if obj[j] > 0), None)
            if col is None:
                return OPTIMAL, obj_rhs
            best = None
            for i, row in enumerate(self.rows):
                a = row[col]
                if a > 0:
                    ratio = self.rhs[i] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED, obj_rhs
            obj_rhs = self.pivot(best[1], col, obj, obj_rhs)


def solve(lp: LinearProgram) -> LpSolution:
    """Solve ``lp`` exactly; certificates are verified before returning."""
    m = len(lp.A)
    # standard-form columns: (original var, sign)
    cols: list[tuple[int, int]] = []
    for j, is_free in enumerate(lp.free):
        cols.append((j, 1))
        if is_free:
            cols.append((j, -1))
    n_struct = len(cols)
    slack_of = {}
    for i, sense in enumerate(lp.senses):
        if sense != EQ:
            slack_of[i] = len(cols)
            cols.append((-1, 1 if sense == LE else -1))
    n_real = len(cols)
    width = n_real + m

    rows, rhs, flipped = [], [], []
    for i in range(m):
        row = [_ZERO] * width
        for col, (j, sgn) in enumerate(cols[:n_struct]):
            a = lp.A[i][j]
            if a:
                row[col] = a if sgn > 0 else -a
        if i in slack_of:
            row[slack_of[i]] = Fraction(cols[slack_of[i]][1])
        row[n_real + i] = Fraction(1)
        b = lp.b[i]
        flip = b < 0
        if flip:
            row = [-v for v in row]
            row[n_real + i] = Fraction(1)
            b = -b
        rows.append(row)
        rhs.append(b)
        flipped.append(flip)
    tab = _Tableau(rows, rhs, [n_real + i for i in range(m)])

    # phase 1: maximize -sum(artificials)
    obj = [_ZERO] * width
    for row in rows:
        for j in range(n_real):
            if row[j]:
                obj[j] += row[j]
    obj_rhs = sum(rhs, _ZERO)
    _, obj_rhs = tab.run(obj, obj_rhs, range(n_real))
    if obj_rhs != 0:
        return LpSolution(INFEASIBLE)

    # drive zero-level artificials out of the basis where possible
    for r in range(m):
        if tab.basis[r] >= n_real:
            col = next((j for j in range(n_real) if tab.rows[r][j] != 0), None)
            if col is not None:
                tab.pivot(r, col, [_ZERO] * width, _ZERO)

    cost = [_ZERO] * width
    for col, (j, sgn) in enumerate(cols[:n_struct]):
        cost[col] = lp.c[j] if sgn > 0 else -lp.c[j]
    obj = cost[:]
    obj_rhs = _ZERO
    for r, bcol in enumerate(tab.basis):
        cb = cost[bcol]
        if cb:
            row = tab.rows[r]
            for j in range(width):
                if row[j]:
                    obj[j] -= cb * row[j]
            obj_rhs -= cb * tab.rhs[r]
    status, obj_rhs = tab.run(obj, obj_rhs, range(n_real))
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED)

    std = [_ZERO] * width
    for r, bcol in enumerate(tab.basis):
        std[bcol] = tab.rhs[r]
    x = [_ZERO] * lp.n_vars
    for col, (j, sgn) in enumerate(cols[:n_struct]):
        if std[col]:
            x[j] += std[col] if sgn > 0 else -std[col]
    y = []
    for i in range(m):
        yi = -obj[n_real + i]
        y.append(-yi if flipped[i] else yi)
    sol = LpSolution(OPTIMAL, -obj_rhs, tuple(x), tuple(y))
    verify(lp, sol)
    return sol


def _dot(u, v) -> Fraction:
    return sum((a * b for a, b in zip(u, v) if a and b), _ZERO)


def verify(lp: LinearProgram, sol: LpSolution) -> None:
    """Re-check primal/dual feasibility and strong duality exactly."""
    x, y = sol.x, sol.y
    for j, is_free in enumerate(lp.free):
        if not is_free and x[j] < 0:
            raise LpInternalError(f"primal variable {j} negative")
    for i, (row, sense, b) in enumerate(zip(lp.A, lp.senses, lp.b)):
        lhs = _dot(row, x)
        ok = lhs <= b if sense == LE else lhs >= b if sense == GE else lhs == b
        if not ok:
            raise LpInternalError(f"primal constraint {i} violated")
        yi = y[i]
        if (sense == LE and yi < 0) or (sense == GE and yi > 0):
            raise LpInternalError(f"dual sign of row {i} wrong")
    for j in range(lp.n_vars):
        col_dot = sum((lp.A[i][j] * y[i] for i in range(len(y)) if y[i]), _ZERO)
        if lp.free[j]:
            if col_dot != lp.c[j]:
                raise LpInternalError(f"dual equality for free variable {j} fails")
        elif col_dot < lp.c[j]:
            raise LpInternalError(f"dual constraint {j} violated")
    if _dot(lp.c, x) != sol.value or _dot(lp.b, y) != sol.value:
        raise LpInternalError("strong duality fails")


def feasible_point(
    A: Sequence[Sequence], senses: Sequence[str], b: Sequence, free: Sequence[bool] = ()
) -> LpSolution:
    """Phase-1 only: any point satisfying the constraints."""
    n = len(A[0]) if A else len(free)
    return solve(LinearProgram((0,) * n, A, b, senses, free))


def _rref(matrix: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    mat = [row[:] for row in matrix]
    pivots = []
    r = 0
    ncols = len(mat[0]) if mat else 0
    for col in range(ncols):
        pr = next((i for i in range(r, len(mat)) if mat[i][col] != 0), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        inv = 1 / mat[r][col]
        mat[r] = [v * inv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col] != 0:
                f = mat[i][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
        if r == len(mat):
            break
    return mat, pivots


def affine_hyperplane_through(points: Sequence[Sequence]) -> tuple[tuple[Fraction, ...], Fraction]:
    """Hyperplane ``h.x = c`` through ``d`` affinely independent points of R^d.

    The first nonzero coefficient of ``h`` is normalized to 1.
    """
    pts = [tuple(to_rational(v) for v in p) for p in points]
    if not pts:
        raise ValueError("need at least one point")
    d = len(pts[0])
    if len(pts) != d or any(len(p) != d for p in pts):
        raise ValueError(f"need exactly {d} points in R^{d}")
    mat = [list(p) + [Fraction(-1)] for p in pts]
    red, pivots = _rref(mat)
    if len(pivots) != d:
        raise ValueError("points are affinely dependent")
    free_col = next(j for j in range(d + 1) if j not in pivots)
    vec = [_ZERO] * (d + 1)
    vec[free_col] = Fraction(1)
    for row, pc in zip(red, pivots):
        vec[pc] = -row[free_col]
    h, c = vec[:d], vec[d]
    lead = next(v for v in h if v != 0)
    h = tuple(v / lead for v in h)
    c = c / lead
    return h, c
