"""Dense two-phase tableau simplex.

Solves ``max c.v  s.t.  A v <= b,  lower <= v <= upper``.  Problems in this
package have at most a few dozen variables, so the tableau is dense and
bounds are turned into explicit rows.  Bland's rule (lowest index enters,
lowest basic index leaves on ratio ties) rules out cycling.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-9


class LpError(ArithmeticError):
    pass


class DimensionError(LpError, ValueError):
    pass


class IterationLimitError(LpError):
    pass


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass
class LinearProgram:
    c: np.ndarray
    A: np.ndarray | None = None
    b: np.ndarray | None = None
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):
        self.c = np.atleast_1d(np.asarray(self.c, dtype=float))
        n = self.c.size
        if self.A is None or np.size(self.A) == 0:
            self.A = np.zeros((0, n))
            self.b = np.zeros(0) if self.b is None or np.size(self.b) == 0 else self.b
        self.A = np.asarray(self.A, dtype=float)
        if self.A.ndim == 1:
            self.A = self.A.reshape(1, -1)
        self.b = np.atleast_1d(np.asarray(self.b, dtype=float))
        self.lower = np.zeros(n) if self.lower is None else np.broadcast_to(
            np.asarray(self.lower, dtype=float), (n,)).copy()
        self.upper = np.full(n, np.inf) if self.upper is None else np.broadcast_to(
            np.asarray(self.upper, dtype=float), (n,)).copy()
        if self.A.shape[1] != n:
            raise DimensionError(f"A has {self.A.shape[1]} columns, c has {n} entries")
        if self.b.shape != (self.A.shape[0],):
            raise DimensionError(f"b has shape {self.b.shape}, A has {self.A.shape[0]} rows")
        if np.any(self.lower > self.upper):
            raise DimensionError("lower bound exceeds upper bound")
        if np.any(np.isinf(self.lower) & (self.lower > 0)) or np.any(np.isnan(self.lower)):
            raise DimensionError("lower bounds must be finite or -inf")

    @property
    def n(self) -> int:
        return self.c.size


@dataclass
class LpOutcome:
    status: LpStatus
    value: float | None = None
    point: np.ndarray | None = field(default=None, repr=False)
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    colv = T[:, col].copy()
    colv[row] = 0.0
    T -= np.outer(colv, T[row])


def _run_simplex(T: np.ndarray, basis: list[int], ncols: int, max_pivots: int) -> tuple[bool, int]:
    """Maximise the objective held in the last row (stored as negated reduced costs).

    Only the first ``ncols`` columns may enter.  Returns (bounded, pivots).
    """
    m = T.shape[0] - 1
    pivots = 0
    while True:
        obj = T[-1, :ncols]
        cand = np.flatnonzero(obj < -PIVOT_TOL)
        if cand.size == 0:
            return True, pivots
        col = int(cand[0])
        colv = T[:m, col]
        pos = np.flatnonzero(colv > PIVOT_TOL)
        if pos.size == 0:
            return False, pivots
        ratios = T[pos, -1] / colv[pos]
        best = ratios.min()
        ties = pos[ratios <= best + PIVOT_TOL * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basis[r]))
        _pivot(T, row, col)
        basis[row] = col
        pivots += 1
        if pivots > max_pivots:
            raise IterationLimitError(f"simplex exceeded {max_pivots} pivots")


def _standard_form(lp: LinearProgram):
    """Rewrite as ``max c'.w, A' w <= b', w >= 0`` plus the map back to ``v``."""
    n = lp.n
    lo, up = lp.lower, lp.upper
    free = np.isinf(lo)
    shift = np.where(free, 0.0, lo)
    # v = shift + w_plus - w_minus (w_minus only for free variables)
    cols = [np.eye(n)]
    free_idx = np.flatnonzero(free)
    if free_idx.size:
        cols.append(-np.eye(n)[:, free_idx])
    M = np.hstack(cols)  # v = shift + M w
    A = lp.A @ M
    b = lp.b - lp.A @ shift
    rows = [A]
    rhs = [b]
    bounded = np.flatnonzero(np.isfinite(up))
    if bounded.size:
        rows.append(np.eye(n)[bounded] @ M)
        rhs.append(up[bounded] - shift[bounded])
    return np.vstack(rows), np.concatenate(rhs), lp.c @ M, M, shift


def _phase_one(A: np.ndarray, b: np.ndarray, max_pivots: int):
    """Tableau with a feasible basis, or None if infeasible."""
    m, nw = A.shape
    neg = b < 0
    nart = int(neg.sum())
    # columns: w (nw) | slacks (m) | artificials (nart) | rhs
    T = np.zeros((m + 1, nw + m + nart + 1))
    sign = np.where(neg, -1.0, 1.0)
    T[:m, :nw] = A * sign[:, None]
    T[:m, nw:nw + m] = np.diag(sign)
    T[:m, -1] = b * sign
    basis = []
    a = 0
    for i in range(m):
        if neg[i]:
            T[i, nw + m + a] = 1.0
            basis.append(nw + m + a)
            a += 1
        else:
            basis.append(nw + i)
    pivots = 0
    if nart:
        # maximise -sum(artificials)
        T[-1, nw + m:nw + m + nart] = 1.0
        for i in np.flatnonzero(neg):
            T[-1] -= T[i]
        _, pivots = _run_simplex(T, basis, nw + m + nart, max_pivots)
        if -T[-1, -1] > FEAS_TOL * max(1.0, np.abs(b).max(initial=0.0)):
            return None, pivots
        # drive zero-level artificials out of the basis
        for i, bv in enumerate(basis):
            if bv >= nw + m:
                nz = np.flatnonzero(np.abs(T[i, :nw + m]) > PIVOT_TOL)
                if nz.size:
                    _pivot(T, i, int(nz[0]))
                    basis[i] = int(nz[0])
                    pivots += 1
        keep = [i for i, bv in enumerate(basis) if bv < nw + m]
        T = np.vstack([T[keep], T[-1:]])
        basis = [basis[i] for i in keep]
        T = np.hstack([T[:, :nw + m], T[:, -1:]])
    return (T, basis), pivots


def solve(lp: LinearProgram, max_pivots: int | None = None) -> LpOutcome:
    """Maximise ``lp.c . v``; deterministic for identical input."""
    A, b, c, M, shift = _standard_form(lp)
    m, nw = A.shape
    if max_pivots is None:
        max_pivots = 50 * (nw + m + 1)
    start, pivots = _phase_one(A, b, max_pivots)
    if start is None:
        return LpOutcome(LpStatus.INFEASIBLE, pivots=pivots)
    T, basis = start
    T[-1, :] = 0.0
    T[-1, :nw] = -c
    for i, bv in enumerate(basis):
        if bv < nw and c[bv] != 0.0:
            T[-1] += c[bv] * T[i]
    bounded, p2 = _run_simplex(T, basis, T.shape[1] - 1, max_pivots)
    pivots += p2
    if not bounded:
        return LpOutcome(LpStatus.UNBOUNDED, pivots=pivots)
    w = np.zeros(T.shape[1] - 1)
    for i, bv in enumerate(basis):
        w[bv] = T[i, -1]
    v = shift + M @ w[:nw]
    return LpOutcome(LpStatus.OPTIMAL, float(lp.c @ v), v, pivots)


def feasible(lp: LinearProgram) -> bool:
    A, b, _, _, _ = _standard_form(lp)
    start, _ = _phase_one(A, b, 50 * (A.shape[0] + A.shape[1] + 1))
    return start is not None
