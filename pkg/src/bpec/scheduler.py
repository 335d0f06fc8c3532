"""Transmitter queues and the coding/scheduling policies.

Packets for user ``j`` wait in ``q1_uj`` until first sent.  A packet that
only the *other* receiver got moves to ``q2_uj``; once both ``q2`` buffers
hold packets their XOR is useful to both receivers at once.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class Action(enum.IntEnum):
    DIRECT1 = 1
    DIRECT2 = 2
    CODED = 3


class QueueState(NamedTuple):
    q1_u1: int = 0
    q2_u1: int = 0
    q1_u2: int = 0
    q2_u2: int = 0

    @property
    def total(self) -> int:
        return self.q1_u1 + self.q2_u1 + self.q1_u2 + self.q2_u2


class FlowOutcome(NamedTuple):
    f12_u1: int = 0
    f13_u1: int = 0
    f23_u1: int = 0
    f12_u2: int = 0
    f13_u2: int = 0
    f23_u2: int = 0


class PolicyKind(str, enum.Enum):
    MAX_WEIGHT = "maxweight"
    PROBABILISTIC = "probabilistic"
    UNCODED = "uncoded"


@dataclass(frozen=True, eq=False)
class PolicySpec:
    """``table`` is the per-state action distribution (columns Direct1, Direct2, Coded)
    and is only set for the probabilistic policy."""

    kind: PolicyKind
    table: np.ndarray | None = None

    def __post_init__(self):
        kind = PolicyKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is PolicyKind.PROBABILISTIC:
            t = np.array(self.table, dtype=float)
            if t.ndim != 2 or t.shape[1] != 3:
                raise ValueError("probabilistic table must have shape (num_states, 3)")
            if np.any(t < 0) or np.any(np.abs(t.sum(axis=1) - 1) > 1e-12):
                raise ValueError("probabilistic rows must be nonnegative and sum to 1")
            t = t / t.sum(axis=1, keepdims=True)
            t.setflags(write=False)
            object.__setattr__(self, "table", t)
        elif self.table is not None:
            raise ValueError(f"{kind.value} policy takes no action table")

    @classmethod
    def max_weight(cls) -> "PolicySpec":
        return cls(PolicyKind.MAX_WEIGHT)

    @classmethod
    def uncoded(cls) -> "PolicySpec":
        return cls(PolicyKind.UNCODED)

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind.value}
        if self.table is not None:
            out["table"] = self.table.tolist()
        return out


def max_weight_weights(q: QueueState, e1: float, e2: float, e10: float, e01: float) -> tuple[float, float, float]:
    w1 = (1 - e1) * q[0] + e10 * (q[0] - q[1])
    w2 = (1 - e2) * q[2] + e01 * (q[2] - q[3])
    w3 = (1 - e1) * q[1] + (1 - e2) * q[3]
    return w1, w2, w3


def max_weight_decide(q: QueueState, e1: float, e2: float, e10: float, e01: float) -> Action:
    """Action with the largest queue-weighted expected service; ties go to the lower index.

    ``e10``/``e01`` are the probabilities that only user 1 / only user 2 is
    erased, conditioned on the state the policy observes.
    """
    w = max_weight_weights(q, e1, e2, e10, e01)
    best = 0
    for i in (1, 2):
        if w[i] > w[best]:
            best = i
    return Action(best + 1)


def probabilistic_from_region_point(x, y) -> PolicySpec:
    """S-only policy ``(1 - y_s, 1 - x_s, x_s + y_s - 1)`` realising an inner-bound point."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != y.shape:
        raise ValueError("x and y must have one entry per state")
    tol = 1e-9
    if np.any(x < -tol) or np.any(x > 1 + tol) or np.any(y < -tol) or np.any(y > 1 + tol):
        raise ValueError("x_s and y_s must lie in [0, 1]")
    if np.any(x + y < 1 - tol):
        s = int(np.flatnonzero(x + y < 1 - tol)[0])
        raise ValueError(f"x_s + y_s = {x[s] + y[s]:.6g} < 1 at state {s}; coded probability would be negative")
    table = np.column_stack([1 - y, 1 - x, x + y - 1])
    table = np.clip(table, 0.0, None)
    table /= table.sum(axis=1, keepdims=True)
    return PolicySpec(PolicyKind.PROBABILISTIC, table)


def apply_action(q: QueueState, a: Action, z1: int, z2: int) -> tuple[QueueState, FlowOutcome, int, int]:
    """One transmission against erasures ``(z1, z2)``; empty source buffers make it a no-op.

    Returns the new queues, the realised flows and per-user deliveries.
    """
    q11, q21, q12, q22 = q
    f = [0, 0, 0, 0, 0, 0]
    d1 = d2 = 0
    if a == Action.DIRECT1:
        if q11 > 0:
            if not z1:
                q11 -= 1
                f[1] = d1 = 1
            elif not z2:
                q11 -= 1
                q21 += 1
                f[0] = 1
    elif a == Action.DIRECT2:
        if q12 > 0:
            if not z2:
                q12 -= 1
                f[4] = d2 = 1
            elif not z1:
                q12 -= 1
                q22 += 1
                f[3] = 1
    else:
        if q21 > 0 and not z1:
            q21 -= 1
            f[2] = d1 = 1
        if q22 > 0 and not z2:
            q22 -= 1
            f[5] = d2 = 1
    return QueueState(q11, q21, q12, q22), FlowOutcome(*f), d1, d2
