"""Convex polygons in the rate plane."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EPS = 1e-12


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points, tol: float = EPS) -> np.ndarray:
    """Andrew's monotone chain; CCW, collinear points dropped."""
    pts = np.unique(np.round(np.asarray(points, dtype=float).reshape(-1, 2), 15), axis=0)
    if len(pts) <= 2:
        return pts
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))].tolist()

    def chain(seq):
        out: list = []
        for p in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= tol:
                out.pop()
            out.append(p)
        return out

    lower = chain(pts)
    upper = chain(reversed(pts))
    hull = np.array(lower[:-1] + upper[:-1])
    if len(hull) < 2:
        # all points collinear and coincident after tolerance
        return np.array([pts[0], pts[-1]])
    return hull


@dataclass(frozen=True, eq=False)
class Polygon:
    """Convex polygon with CCW vertices; one or two vertices encode a point or segment."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float).reshape(-1, 2)
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @classmethod
    def hull(cls, points) -> "Polygon":
        return cls(convex_hull(points))

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        return f"Polygon({np.round(self.vertices, 6).tolist()})"

    def scaled(self, k: float) -> "Polygon":
        return Polygon(self.vertices * k)

    @property
    def area(self) -> float:
        v = self.vertices
        if len(v) < 3:
            return 0.0
        x, y = v[:, 0], v[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    def is_convex(self, tol: float = EPS) -> bool:
        v = self.vertices
        k = len(v)
        if k < 3:
            return True
        return all(_cross(v[i], v[(i + 1) % k], v[(i + 2) % k]) >= -tol for i in range(k))

    def edges(self):
        v = self.vertices
        k = len(v)
        if k == 1:
            return []
        if k == 2:
            return [(v[0], v[1])]
        return [(v[i], v[(i + 1) % k]) for i in range(k)]

    def contains(self, p, tol: float = 1e-9) -> bool:
        return self.distance(p) <= tol

    def distance(self, p) -> float:
        """Euclidean distance from ``p`` to the polygon (0 inside)."""
        p = np.asarray(p, dtype=float)
        v = self.vertices
        if len(v) >= 3 and all(_cross(a, b, p) >= 0 for a, b in self.edges()):
            return 0.0
        if len(v) == 1:
            return float(np.hypot(*(p - v[0])))
        return min(_segment_distance(p, a, b) for a, b in self.edges())

    def ray_radius(self, theta: float) -> float:
        """Largest ``t >= 0`` with ``t*(cos theta, sin theta)`` in the polygon (origin assumed inside)."""
        u = np.array([np.cos(theta), np.sin(theta)])
        best = 0.0
        for a, b in self.edges() or [(self.vertices[0], self.vertices[0])]:
            e = b - a
            den = u[0] * e[1] - u[1] * e[0]
            if abs(den) < 1e-15:
                if abs(u[0] * a[1] - u[1] * a[0]) < 1e-12:
                    best = max(best, float(a @ u), float(b @ u))
                continue
            t = (a[0] * e[1] - a[1] * e[0]) / den
            s = (a[0] * u[1] - a[1] * u[0]) / den
            if -1e-12 <= s <= 1 + 1e-12:
                best = max(best, t)
        return best


def _segment_distance(p, a, b) -> float:
    ab = b - a
    denom = float(ab @ ab)
    s = 0.0 if denom == 0 else min(1.0, max(0.0, float((p - a) @ ab) / denom))
    d = p - (a + s * ab)
    return float(np.hypot(d[0], d[1]))


def hausdorff(a: Polygon, b: Polygon) -> float:
    """Hausdorff distance; for convex sets the maximum is attained at a vertex."""
    da = max(b.distance(v) for v in a.vertices)
    db = max(a.distance(v) for v in b.vertices)
    return max(da, db)


def _start_lowest(v: np.ndarray) -> np.ndarray:
    i = int(np.lexsort((v[:, 0], v[:, 1]))[0])
    return np.roll(v, -i, axis=0)


def minkowski_sum(a: Polygon, b: Polygon) -> Polygon:
    """Minkowski sum of two convex CCW polygons by merging edges in angular order."""
    if len(a) == 1:
        return Polygon(b.vertices + a.vertices[0])
    if len(b) == 1:
        return Polygon(a.vertices + b.vertices[0])
    p = _start_lowest(a.vertices)
    q = _start_lowest(b.vertices)
    na, nb = len(p), len(q)
    p = np.vstack([p, p[:2]])
    q = np.vstack([q, q[:2]])
    out = []
    i = j = 0
    while i < na or j < nb:
        out.append(p[i] + q[j])
        if i == na:
            j += 1
            continue
        if j == nb:
            i += 1
            continue
        ep, eq = p[i + 1] - p[i], q[j + 1] - q[j]
        cr = ep[0] * eq[1] - ep[1] * eq[0]
        if cr >= 0:
            i += 1
        if cr <= 0:
            j += 1
    return Polygon(_clean(np.array(out)))


def _clean(v: np.ndarray, tol: float = 1e-13) -> np.ndarray:
    """Drop repeated and collinear vertices from a CCW cycle."""
    pts = [v[0]]
    for x in v[1:]:
        if np.max(np.abs(x - pts[-1])) > tol:
            pts.append(x)
    if len(pts) > 1 and np.max(np.abs(pts[0] - pts[-1])) <= tol:
        pts.pop()
    changed = True
    while changed and len(pts) >= 3:
        changed = False
        k = len(pts)
        for i in range(k):
            if abs(_cross(pts[i - 1], pts[i], pts[(i + 1) % k])) <= tol:
                del pts[i]
                changed = True
                break
    return np.array(pts)
