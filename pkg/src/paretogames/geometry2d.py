"""Exact planar payoff geometry for two-player games.

Polygons are stored as counterclockwise vertex tuples starting at the
lowest (then leftmost) vertex, with collinear points dropped. A segment
is two vertices and a point is one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import Game, Outcome, fmt, induced_payoff, state_payoff, to_rational

Point = tuple[Fraction, Fraction]

_ZERO = Fraction(0)


def _pt(p) -> Point:
    return (to_rational(p[0]), to_rational(p[1]))


def cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _cross2(u, v) -> Fraction:
    return u[0] * v[1] - u[1] * v[0]


def _dot(u, v) -> Fraction:
    return u[0] * v[0] + u[1] * v[1]


def _outer_normal(edge) -> Point:
    # clockwise rotation of a CCW edge points outward
    return (edge[1], -edge[0])


def _canonical_start(verts: list[Point]) -> tuple[Point, ...]:
    start = min(range(len(verts)), key=lambda i: (verts[i][1], verts[i][0]))
    return tuple(verts[start:] + verts[:start])


@dataclass(frozen=True)
class Polygon:
    vertices: tuple[Point, ...]

    def __len__(self):
        return len(self.vertices)

    def edges(self) -> list[tuple[Point, Point]]:
        v = self.vertices
        if len(v) == 1:
            return []
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]

    def contains(self, point) -> bool:
        p = _pt(point)
        v = self.vertices
        if len(v) == 1:
            return p == v[0]
        if len(v) == 2:
            return cross(v[0], v[1], p) == 0 and _on_segment(v[0], v[1], p)
        return all(cross(a, b, p) >= 0 for a, b in self.edges())

    def on_boundary(self, point) -> bool:
        p = _pt(point)
        if len(self.vertices) <= 2:
            return self.contains(p)
        return self.contains(p) and any(
            cross(a, b, p) == 0 and _on_segment(a, b, p) for a, b in self.edges()
        )

    def support_value(self, n) -> Fraction:
        return max(_dot(n, v) for v in self.vertices)

    def scaled(self, w) -> "Polygon":
        w = to_rational(w)
        return Polygon(tuple((w * x, w * y) for x, y in self.vertices))

    def to_json(self) -> list:
        return [[fmt(x), fmt(y)] for x, y in self.vertices]


def _on_segment(a, b, p) -> bool:
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(
        a[1], b[1]
    )


def hull(points: Iterable) -> Polygon:
    """Exact convex hull (Andrew's monotone chain), minimal CCW vertex list."""
    pts = sorted({_pt(p) for p in points})
    if not pts:
        raise ValueError("hull of an empty point set")
    if len(pts) <= 2:
        return Polygon(_canonical_start(pts) if len(pts) == 2 else tuple(pts))
    lower: list[Point] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    chain = lower[:-1] + upper[:-1]
    return Polygon(_canonical_start(chain))


def _half(v) -> int:
    # 0 for angles in [0, pi), 1 for [pi, 2pi)
    return 0 if v[1] > 0 or (v[1] == 0 and v[0] > 0) else 1


def _angle_key(v):
    from functools import cmp_to_key

    return cmp_to_key(_angle_cmp)(v)


def _angle_cmp(u, v) -> int:
    hu, hv = _half(u), _half(v)
    if hu != hv:
        return hu - hv
    c = _cross2(u, v)
    return -1 if c > 0 else 1 if c < 0 else 0


def minkowski_sum(polygons: Sequence[Polygon], weights: Sequence | None = None) -> Polygon:
    """Weighted Minkowski sum ``sum_i w_i P_i`` by merging CCW edge sequences."""
    if not polygons:
        raise ValueError("need at least one polygon")
    if weights is None:
        weights = [Fraction(1)] * len(polygons)
    weights = [to_rational(w) for w in weights]
    if len(weights) != len(polygons):
        raise ValueError("one weight per polygon")
    if any(w <= 0 for w in weights):
        raise ValueError("Minkowski weights must be positive")
    scaled = [P.scaled(w) for P, w in zip(polygons, weights)]
    start = [_ZERO, _ZERO]
    edges: list[Point] = []
    for P in scaled:
        v0 = P.vertices[0]
        start[0] += v0[0]
        start[1] += v0[1]
        for a, b in P.edges():
            edges.append((b[0] - a[0], b[1] - a[1]))
    edges.sort(key=_angle_key)
    merged: list[Point] = []
    for e in edges:
        if merged and _cross2(merged[-1], e) == 0 and _dot(merged[-1], e) > 0:
            merged[-1] = (merged[-1][0] + e[0], merged[-1][1] + e[1])
        else:
            merged.append(e)
    verts = [tuple(start)]
    for e in merged[:-1]:
        last = verts[-1]
        verts.append((last[0] + e[0], last[1] + e[1]))
    if len(merged) == 2 and _cross2(merged[0], merged[1]) == 0:
        verts = verts[:2]
    return Polygon(_canonical_start(verts))


def support_set(P: Polygon, n) -> tuple[Point, ...]:
    """Face of ``P`` maximizing ``n.x``: one vertex or the two ends of an edge."""
    n = _pt(n)
    if n == (0, 0):
        raise ValueError("zero direction")
    best = P.support_value(n)
    return tuple(v for v in P.vertices if _dot(n, v) == best)


def face_sum(faces: Sequence[Sequence[Point]], weights: Sequence) -> tuple[Point, ...]:
    """Weighted Minkowski sum of faces (points or segments), as sorted vertices."""
    polys = [hull(f) for f in faces]
    return tuple(sorted(minkowski_sum(polys, weights).vertices))


RAY, SECTOR, HALFPLANE, LINE, PLANE = "ray", "sector", "halfplane", "line", "plane"


@dataclass(frozen=True)
class NormalCone:
    """Outer normal cone. ``first`` and ``second`` bound a CCW sweep.

    ``ray`` uses ``first`` only; ``line`` is ``+-first``; ``halfplane``
    sweeps from ``first`` to ``-first``; ``plane`` is everything.
    """

    kind: str
    first: Point | None = None
    second: Point | None = None

    def contains(self, v) -> bool:
        v = _pt(v)
        if v == (0, 0):
            return False
        if self.kind == PLANE:
            return True
        f = self.first
        if self.kind == RAY:
            return _cross2(f, v) == 0 and _dot(f, v) > 0
        if self.kind == LINE:
            return _cross2(f, v) == 0
        if self.kind == HALFPLANE:
            return _cross2(f, v) >= 0
        return _cross2(f, v) >= 0 and _cross2(v, self.second) >= 0

    def _extremes(self) -> list[Point]:
        if self.kind == PLANE:
            return []
        if self.kind in (RAY, SECTOR):
            return [self.first] + ([self.second] if self.kind == SECTOR else [])
        return [self.first, (-self.first[0], -self.first[1])]

    def clip_nonnegative(self) -> "NormalCone | None":
        """Intersection with the closed nonnegative quadrant (``None`` if only 0)."""
        candidates = [
            d
            for d in self._extremes() + [(Fraction(1), _ZERO), (_ZERO, Fraction(1))]
            if d[0] >= 0 and d[1] >= 0 and self.contains(d)
        ]
        if not candidates:
            return None
        # within the quadrant, angular order is cross-product order
        lo = candidates[0]
        hi = candidates[0]
        for d in candidates[1:]:
            if _cross2(d, lo) > 0:
                lo = d
            if _cross2(hi, d) > 0:
                hi = d
        if _cross2(lo, hi) == 0:
            return NormalCone(RAY, lo)
        return NormalCone(SECTOR, lo, hi)

    def meets_open_positive_quadrant(self) -> bool:
        clipped = self.clip_nonnegative()
        if clipped is None:
            return False
        if clipped.kind == SECTOR:
            return True
        return clipped.first[0] > 0 and clipped.first[1] > 0

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.first is not None:
            out["first"] = [fmt(x) for x in self.first]
        if self.second is not None:
            out["second"] = [fmt(x) for x in self.second]
        return out


def normal_cone_at(P: Polygon, point) -> NormalCone:
    """Outer normal cone of ``P`` at a boundary ``point``."""
    p = _pt(point)
    v = P.vertices
    if len(v) == 1:
        if p != v[0]:
            raise ValueError("point is not on the boundary")
        return NormalCone(PLANE)
    if len(v) == 2:
        a, b = v
        d = (b[0] - a[0], b[1] - a[1])
        if p == a or p == b:
            out = (-d[0], -d[1]) if p == a else d
            # directions with a nonnegative component along ``out``
            return NormalCone(HALFPLANE, (out[1], -out[0]))
        if not P.contains(p):
            raise ValueError("point is not on the boundary")
        return NormalCone(LINE, _outer_normal(d))
    n = len(v)
    for i in range(n):
        if v[i] == p:
            prev_e = (v[i][0] - v[i - 1][0], v[i][1] - v[i - 1][1])
            nxt = v[(i + 1) % n]
            next_e = (nxt[0] - v[i][0], nxt[1] - v[i][1])
            return NormalCone(SECTOR, _outer_normal(prev_e), _outer_normal(next_e))
    for a, b in P.edges():
        if cross(a, b, p) == 0 and _on_segment(a, b, p):
            return NormalCone(RAY, _outer_normal((b[0] - a[0], b[1] - a[1])))
    raise ValueError("point is not on the boundary")


def state_polygons(game: Game) -> list[Polygon]:
    if game.k != 2:
        raise ValueError("planar geometry needs a two-player game")
    return [hull(block) for block in game.payoffs]


def feasible_polygon(game: Game) -> Polygon:
    return minkowski_sum(state_polygons(game), game.prior)


def _common_positive_normal(cones: Sequence[NormalCone]) -> bool:
    lo = (Fraction(1), _ZERO)
    hi = (_ZERO, Fraction(1))
    for cone in cones:
        clipped = cone.clip_nonnegative()
        if clipped is None:
            return False
        c_lo = clipped.first
        c_hi = clipped.second if clipped.kind == SECTOR else clipped.first
        if _cross2(lo, c_lo) > 0:
            lo = c_lo
        if _cross2(c_hi, hi) > 0:
            hi = c_hi
    c = _cross2(lo, hi)
    if c < 0:
        return False
    if c == 0:
        return lo[0] > 0 and lo[1] > 0
    return True


def figure_data(game: Game, outcome: Outcome) -> dict:
    """Hulls, outcome points and normal cones for plotting (k = 2 only)."""
    if game.k != 2:
        raise ValueError("figure data needs a two-player game")
    polys = state_polygons(game)
    total = minkowski_sum(polys, game.prior)
    states = []
    cones = []
    for s, (label, P) in enumerate(zip(game.states, polys)):
        point = state_payoff(game, outcome, s)
        entry = {"state": label, "polygon": P.to_json(), "point": [fmt(x) for x in point]}
        if P.on_boundary(point):
            cone = normal_cone_at(P, point)
            cones.append(cone)
            entry["normal_cone"] = cone.to_json()
            clipped = cone.clip_nonnegative()
            entry["normal_cone_nonnegative"] = clipped.to_json() if clipped else None
        else:
            cones.append(None)
            entry["normal_cone"] = None
            entry["normal_cone_nonnegative"] = None
        states.append(entry)
    ex_ante = induced_payoff(game, outcome)
    ante = {
        "polygon": total.to_json(),
        "point": [fmt(x) for x in ex_ante],
        "on_boundary": total.on_boundary(ex_ante),
    }
    if ante["on_boundary"]:
        ante["normal_cone"] = normal_cone_at(total, ex_ante).to_json()
    return {
        "prior": [fmt(x) for x in game.prior],
        "states": states,
        "ex_ante": ante,
        "common_positive_normal": all(c is not None for c in cones)
        and _common_positive_normal(cones),
    }
