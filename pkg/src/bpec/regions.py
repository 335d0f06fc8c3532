"""Feedback capacity-region bounds for the two-receiver erasure broadcast channel.

Both bounds are projections onto the rate plane of the polytope in
``(R1, R2, x_s, y_s)`` cut out by

    0 <= x_s, y_s <= 1
    R1 <= sum_s pi_s (1 - e1(s)) x_s
    R1 <= sum_s pi_s (1 - e12(s)) (1 - y_s)
    R2 <= sum_s pi_s (1 - e2(s)) y_s
    R2 <= sum_s pi_s (1 - e12(s)) (1 - x_s)

and the inner bound additionally requires ``x_s + y_s >= 1`` for each state.
Every question about them (membership, radius along a ray, support point)
is a small LP solved with :mod:`bpec.lp`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import lp
from .channel import ChannelModel, ErasureProfile, erasure_profile, long_run_erasure, stationary_distribution
from .geometry import Polygon, convex_hull, minkowski_sum

MEMBERSHIP_RELAX = 1e-9
DEFAULT_DIRECTIONS = 181


class Region(str, enum.Enum):
    OUTER = "outer"
    INNER = "inner"
    MEMORYLESS_FB = "memoryless_fb"
    MEMORYLESS_NOFB = "memoryless_nofb"
    MINKOWSKI = "minkowski"


class RegionError(ArithmeticError):
    """An LP behind a region query did not return an optimum."""


@dataclass(frozen=True)
class RatePair:
    r1: float
    r2: float

    def __post_init__(self):
        if self.r1 < 0 or self.r2 < 0:
            raise ValueError(f"rates must be nonnegative, got ({self.r1}, {self.r2})")

    def __iter__(self):
        return iter((self.r1, self.r2))


@dataclass(frozen=True)
class RayPoint:
    theta: float
    radius: float
    x: np.ndarray | None = None
    y: np.ndarray | None = None

    @property
    def point(self) -> np.ndarray:
        return self.radius * np.array([np.cos(self.theta), np.sin(self.theta)])


def sweep_angles(num_directions: int = DEFAULT_DIRECTIONS) -> np.ndarray:
    """``num_directions`` angles from 0 to 90 degrees inclusive, in radians."""
    if num_directions < 2:
        raise ValueError("num_directions must be at least 2")
    return np.deg2rad(np.linspace(0.0, 90.0, num_directions))


class BoundLP:
    """LP encoding of the inner (``inner=True``) or outer bound for one erasure profile.

    ``balanced`` adds, per user, the row that keeps the overheard buffer's
    worst-case inflow ``sum pi p1 e10`` below its coded drain
    ``sum pi p3 (1 - e1)``.  Overheard packets are always moved, never held
    back, so a probabilistic policy needs this to be stable.  The projection
    onto rates is unchanged: raising ``y_s`` cuts the q1 slack and the
    imbalance by the same amount, and their difference is the slack of the
    ``R1 <= sum pi (1 - e1) x`` row.
    """

    def __init__(self, profile: ErasureProfile, pi: np.ndarray, inner: bool, balanced: bool = False):
        if balanced and not inner:
            raise ValueError("balanced rows only apply to the inner bound")
        pi = np.asarray(pi, dtype=float)
        k = profile.num_states
        if pi.shape != (k,):
            raise ValueError(f"pi has shape {pi.shape}, profile has {k} states")
        self.profile, self.pi, self.inner, self.k = profile, pi, inner, k
        a1 = pi * (1 - profile.e1)
        a2 = pi * (1 - profile.e2)
        c = pi * (1 - profile.e11)
        z = np.zeros(k)
        # columns: R1, R2, x_1..x_k, y_1..y_k
        rows = [
            np.concatenate([[1, 0], -a1, z]),
            np.concatenate([[1, 0], z, c]),
            np.concatenate([[0, 1], z, -a2]),
            np.concatenate([[0, 1], c, z]),
        ]
        rhs = [0.0, c.sum(), 0.0, c.sum()]
        if inner:
            for s in range(k):
                row = np.zeros(2 + 2 * k)
                row[2 + s] = row[2 + k + s] = -1.0
                rows.append(row)
                rhs.append(-1.0)
        if balanced:
            rows.append(np.concatenate([[0, 0], -a1, -c]))
            rows.append(np.concatenate([[0, 0], -c, -a2]))
            rhs += [-c.sum(), -c.sum()]
        self.G = np.array(rows)
        self.h = np.array(rhs)

    def contains(self, r, relax: float = MEMBERSHIP_RELAX) -> bool:
        r = np.asarray(tuple(r), dtype=float)
        h = self.h - self.G[:, :2] @ r
        h[:4] += relax
        prog = lp.LinearProgram(np.zeros(2 * self.k), self.G[:, 2:], h, 0.0, 1.0)
        return lp.feasible(prog)

    def witness(self, r) -> tuple[np.ndarray, np.ndarray] | None:
        """Some feasible ``(x, y)`` for rate pair ``r``, or None."""
        r = np.asarray(tuple(r), dtype=float)
        h = self.h - self.G[:, :2] @ r
        h[:4] += MEMBERSHIP_RELAX
        out = lp.solve(lp.LinearProgram(np.zeros(2 * self.k), self.G[:, 2:], h, 0.0, 1.0))
        if not out.optimal:
            return None
        return out.point[: self.k], out.point[self.k:]

    def ray(self, theta: float) -> RayPoint:
        """Farthest point of the region along direction ``theta`` (radians)."""
        u = np.array([np.cos(theta), np.sin(theta)])
        col = self.G[:, :2] @ u
        A = np.column_stack([col, self.G[:, 2:]])
        c = np.zeros(1 + 2 * self.k)
        c[0] = 1.0
        upper = np.concatenate([[np.inf], np.ones(2 * self.k)])
        out = lp.solve(lp.LinearProgram(c, A, self.h, 0.0, upper))
        if not out.optimal:
            raise RegionError(f"ray LP at theta={theta:.6f} returned {out.status.value}")
        v = out.point
        return RayPoint(theta, float(v[0]), v[1:1 + self.k], v[1 + self.k:])

    def support(self, u) -> np.ndarray:
        """A rate pair maximising ``u . R`` over the region."""
        c = np.concatenate([np.asarray(u, dtype=float), np.zeros(2 * self.k)])
        upper = np.concatenate([[np.inf, np.inf], np.ones(2 * self.k)])
        out = lp.solve(lp.LinearProgram(c, self.G, self.h, 0.0, upper))
        if not out.optimal:
            raise RegionError(f"support LP returned {out.status.value}")
        return out.point[:2]

    def polygon(self, num_directions: int = DEFAULT_DIRECTIONS, tol: float = 1e-12) -> Polygon:
        """Exact projection of the region.

        Ray points over ``num_directions`` angles and both axis intercepts
        are refined by support queries along each hull edge's outward normal
        until no edge can be pushed out by more than ``tol``.
        """
        pts = [self.ray(th).point for th in sweep_angles(num_directions)]
        frontier = [pts[0], pts[-1]]
        # frontier runs from the R1 intercept to the R2 intercept
        stack = [(frontier[0], frontier[1])]
        found = []
        budget = 64 + 8 * self.k
        while stack and budget > 0:
            p, q = stack.pop()
            n = np.array([q[1] - p[1], p[0] - q[0]])
            norm = np.hypot(*n)
            if norm < 1e-14:
                continue
            n /= norm
            s = self.support(n)
            budget -= 1
            if n @ s > n @ p + tol:
                found.append(s)
                stack.extend([(s, q), (p, s)])
        return Polygon(convex_hull(np.vstack([[0.0, 0.0], *pts, *found])))


def in_outer(profile: ErasureProfile, pi, r) -> bool:
    return BoundLP(profile, pi, inner=False).contains(r)


def in_inner(profile: ErasureProfile, pi, r) -> bool:
    return BoundLP(profile, pi, inner=True).contains(r)


def _check_erasures(e1: float, e2: float, e12: float) -> None:
    t = 1e-12
    if not (-t <= e12 <= min(e1, e2) + t and max(e1, e2) <= 1 + t and e1 + e2 - e12 <= 1 + t):
        raise ValueError(f"inconsistent erasure probabilities e1={e1}, e2={e2}, e12={e12}")


def _clip(poly: list, a: float, b: float, c: float) -> list:
    """Sutherland-Hodgman clip of a convex vertex list against ``a*x + b*y <= c``."""
    out = []
    k = len(poly)
    for i in range(k):
        p, q = poly[i], poly[(i + 1) % k]
        fp = a * p[0] + b * p[1] - c
        fq = a * q[0] + b * q[1] - c
        if fp <= 0:
            out.append(p)
        if (fp < 0 < fq) or (fq < 0 < fp):
            t = fp / (fp - fq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def memoryless_fb_region(e1: float, e2: float, e12: float) -> Polygon:
    """Feedback capacity region of a memoryless erasure broadcast channel.

    ``R1/(1-e1) + R2/(1-e12) <= 1`` and ``R1/(1-e12) + R2/(1-e2) <= 1``,
    written in multiplied-out form so that ``e1 = 1`` or ``e2 = 1`` yields a
    segment instead of dividing by zero.
    """
    _check_erasures(e1, e2, e12)
    poly = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
    poly = _clip(poly, 1 - e12, 1 - e1, (1 - e1) * (1 - e12))
    poly = _clip(poly, 1 - e2, 1 - e12, (1 - e12) * (1 - e2))
    return Polygon(convex_hull(poly))


def memoryless_nofb_region(e1: float, e2: float) -> Polygon:
    """Time-sharing triangle ``(0,0), (1-e1,0), (0,1-e2)``."""
    if not (0 <= e1 <= 1 and 0 <= e2 <= 1):
        raise ValueError(f"erasure probabilities out of range: e1={e1}, e2={e2}")
    return Polygon(convex_hull([(0.0, 0.0), (1 - e1, 0.0), (0.0, 1 - e2)]))


def minkowski_region(model: ChannelModel, delay: int = 1) -> Polygon:
    """Stationary-weighted Minkowski sum of the per-state memoryless regions."""
    prof = erasure_profile(model, delay)
    pi = stationary_distribution(model)
    acc = Polygon(np.zeros((1, 2)))
    for s in range(model.num_states):
        if pi[s] == 0:
            continue
        reg = memoryless_fb_region(prof.e1[s], prof.e2[s], prof.e11[s])
        acc = minkowski_sum(acc, reg.scaled(pi[s]))
    return acc


def bound_lp(model: ChannelModel, inner: bool, delay: int = 1, balanced: bool = False) -> BoundLP:
    return BoundLP(erasure_profile(model, delay), stationary_distribution(model), inner, balanced)


def _as_region(kind) -> Region:
    try:
        return Region(kind)
    except ValueError:
        raise ValueError(f"unknown region kind {kind!r}") from None


def boundary(
    kind: Region | str, model: ChannelModel, num_directions: int = DEFAULT_DIRECTIONS, delay: int = 1
) -> Polygon:
    """Rate region ``kind`` of ``model`` as a convex polygon.

    ``delay`` only affects the kinds that depend on the conditional erasure
    profile (inner, outer, minkowski); the memoryless comparison regions use
    long-run averages.
    """
    kind = _as_region(kind)
    if kind in (Region.INNER, Region.OUTER):
        return bound_lp(model, kind is Region.INNER, delay).polygon(num_directions)
    if kind is Region.MINKOWSKI:
        return minkowski_region(model, delay)
    e1, e2, e12 = long_run_erasure(model)
    if kind is Region.MEMORYLESS_FB:
        return memoryless_fb_region(e1, e2, e12)
    return memoryless_nofb_region(e1, e2)


def sweep(
    kind: Region | str, model: ChannelModel, num_directions: int = DEFAULT_DIRECTIONS, delay: int = 1
) -> list[RayPoint]:
    """Per-ray radii in ascending angle; LP-backed for the inner and outer bounds."""
    kind = _as_region(kind)
    angles = sweep_angles(num_directions)
    if kind in (Region.INNER, Region.OUTER):
        prob = bound_lp(model, kind is Region.INNER, delay)
        return [prob.ray(th) for th in angles]
    poly = boundary(kind, model, num_directions, delay)
    return [RayPoint(float(th), poly.ray_radius(th)) for th in angles]


def symmetric_point(kind: Region | str, model: ChannelModel, delay: int = 1) -> RayPoint:
    """Boundary point of ``kind`` on the ``R1 = R2`` ray."""
    kind = _as_region(kind)
    theta = np.pi / 4
    if kind in (Region.INNER, Region.OUTER):
        return bound_lp(model, kind is Region.INNER, delay).ray(theta)
    return RayPoint(theta, boundary(kind, model, delay=delay).ray_radius(theta))
