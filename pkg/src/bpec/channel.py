"""Finite-state Markov broadcast erasure channel.

A channel is a Markov chain over opaque state labels plus, for every state,
the joint law of the two erasure indicators ``(z1, z2)``.  Erasure pmfs are
stored column-wise in the order ``e00, e01, e10, e11`` where ``eab`` is
``P(Z1=a, Z2=b)``; the column index of an outcome is therefore ``2*z1 + z2``.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from math import gcd
from typing import Sequence

import numpy as np

PROB_TOL = 1e-12
PMF_KEYS = ("e00", "e01", "e10", "e11")
GE_STATES = ("GG", "GB", "BG", "BB")


class ChannelError(ValueError):
    """Raised when a channel description violates a model invariant."""


class SingularSystemError(ArithmeticError):
    """Balance equations are numerically rank deficient."""


def _check_stochastic(rows: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(rows)):
        raise ChannelError(f"{what}: entries must be finite")
    if np.any(rows < -PROB_TOL) or np.any(rows > 1 + PROB_TOL):
        raise ChannelError(f"{what}: entries must lie in [0, 1]")
    sums = rows.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > PROB_TOL)
    if bad.size:
        raise ChannelError(f"{what}: row {int(bad[0])} sums to {sums[bad[0]]!r}, not 1")
    rows = np.clip(rows, 0.0, 1.0)
    return rows / rows.sum(axis=1, keepdims=True)


def _reachability(adj: np.ndarray) -> np.ndarray:
    reach = adj | np.eye(len(adj), dtype=bool)
    while True:
        nxt = reach | ((reach.astype(np.int64) @ reach.astype(np.int64)) > 0)
        if np.array_equal(nxt, reach):
            return reach
        reach = nxt


def _period(adj: np.ndarray) -> int:
    """Period of a strongly connected digraph via BFS levels."""
    n = len(adj)
    level = np.full(n, -1)
    level[0] = 0
    frontier = [0]
    g = 0
    while frontier:
        nxt = []
        for i in frontier:
            for j in np.flatnonzero(adj[i]):
                if level[j] < 0:
                    level[j] = level[i] + 1
                    nxt.append(int(j))
                else:
                    g = gcd(g, int(level[i] + 1 - level[j]))
        frontier = nxt
    return g


def recurrent_class(transition: np.ndarray) -> np.ndarray:
    """Indices of the unique closed communicating class.

    Raises ChannelError when the chain has more than one closed class or the
    closed class is periodic; either would leave the long-run behaviour of
    the channel ill-defined.
    """
    adj = transition > 0
    reach = _reachability(adj)
    mutual = reach & reach.T
    n = len(adj)
    closed = []
    seen = np.zeros(n, dtype=bool)
    for i in range(n):
        if seen[i]:
            continue
        cls = np.flatnonzero(mutual[i])
        seen[cls] = True
        outside = np.setdiff1d(np.arange(n), cls)
        if not adj[np.ix_(cls, outside)].any():
            closed.append(cls)
    if len(closed) != 1:
        raise ChannelError(
            f"irreducibility: chain has {len(closed)} closed classes, expected exactly one"
        )
    cls = closed[0]
    sub = adj[np.ix_(cls, cls)]
    # P^{m^2} > 0 on the class is equivalent to aperiodicity (Wielandt bound).
    m = len(cls)
    power = sub.copy()
    for _ in range(m * m - 1):
        power = (power.astype(np.int64) @ sub.astype(np.int64)) > 0
    if not power.all():
        raise ChannelError(f"aperiodicity: recurrent class has period {_period(sub)}")
    return cls


@dataclass(frozen=True, eq=False)
class ChannelModel:
    states: tuple[str, ...]
    transition: np.ndarray
    erasure_pmf: np.ndarray

    def __post_init__(self):
        states = tuple(str(s) for s in self.states)
        if not states:
            raise ChannelError("states: at least one state is required")
        if len(set(states)) != len(states):
            raise ChannelError("states: labels must be unique")
        n = len(states)
        trans = np.array(self.transition, dtype=float)
        pmf = np.array(self.erasure_pmf, dtype=float)
        if trans.shape != (n, n):
            raise ChannelError(f"transition: expected shape {(n, n)}, got {trans.shape}")
        if pmf.shape != (n, 4):
            raise ChannelError(f"erasure: expected shape {(n, 4)}, got {pmf.shape}")
        trans = _check_stochastic(trans, "transition")
        pmf = _check_stochastic(pmf, "erasure")
        recurrent_class(trans)
        trans.setflags(write=False)
        pmf.setflags(write=False)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "transition", trans)
        object.__setattr__(self, "erasure_pmf", pmf)

    @property
    def num_states(self) -> int:
        return len(self.states)

    def index(self, state: str | int) -> int:
        if isinstance(state, (int, np.integer)):
            if not 0 <= state < self.num_states:
                raise IndexError(f"state index {state} out of range")
            return int(state)
        return self.states.index(state)

    @classmethod
    def from_dict(cls, states: Sequence[str], transition, erasure: dict) -> "ChannelModel":
        """Build a model from per-state ``{"e00":..,"e01":..,"e10":..,"e11":..}`` maps."""
        missing = [s for s in states if s not in erasure]
        if missing:
            raise ChannelError(f"erasure: no pmf for state {missing[0]!r}")
        rows = []
        for s in states:
            entry = erasure[s]
            try:
                rows.append([float(entry[k]) for k in PMF_KEYS])
            except KeyError as exc:
                raise ChannelError(f"erasure: state {s!r} lacks key {exc.args[0]!r}") from None
        return cls(tuple(states), np.asarray(transition, dtype=float), np.asarray(rows))

    def to_dict(self) -> dict:
        return {
            "states": list(self.states),
            "transition": self.transition.tolist(),
            "erasure": {
                s: dict(zip(PMF_KEYS, row.tolist())) for s, row in zip(self.states, self.erasure_pmf)
            },
        }


@dataclass(frozen=True)
class GilbertElliottParams:
    """Per-user good->bad (``b``) and bad->good (``g``) transition probabilities."""

    b1: float
    g1: float
    b2: float
    g2: float

    def __post_init__(self):
        for name in ("b1", "g1", "b2", "g2"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ChannelError(f"gilbert_elliott: {name}={v!r} outside [0, 1]")
        for j in (1, 2):
            if getattr(self, f"b{j}") == 0 and getattr(self, f"g{j}") == 0:
                raise ChannelError(f"irreducibility: user {j} chain has b{j}=g{j}=0")

    @classmethod
    def from_average(cls, eps1: float, g1: float, eps2: float, g2: float) -> "GilbertElliottParams":
        """Parameters with long-run erasure ``eps_j`` and recovery probability ``g_j``.

        Inverts ``eps = b / (g + b)``.
        """
        for name, e in (("eps1", eps1), ("eps2", eps2)):
            if not (0.0 <= e < 1.0):
                raise ChannelError(f"gilbert_elliott: {name}={e!r} outside [0, 1)")
        return cls(b1=eps1 * g1 / (1 - eps1), g1=g1, b2=eps2 * g2 / (1 - eps2), g2=g2)


def _two_state(b: float, g: float) -> np.ndarray:
    return np.array([[1 - b, b], [g, 1 - g]])


def from_gilbert_elliott(params: GilbertElliottParams) -> ChannelModel:
    """Four-state product chain ordered GG, GB, BG, BB with deterministic erasures.

    The first letter is user 1's state; a user is erased exactly when it is in B.
    """
    trans = np.kron(_two_state(params.b1, params.g1), _two_state(params.b2, params.g2))
    pmf = np.eye(4)  # GG->(0,0), GB->(0,1), BG->(1,0), BB->(1,1)
    return ChannelModel(GE_STATES, trans, pmf)


def single_state(e00: float, e01: float, e10: float, e11: float, label: str = "S") -> ChannelModel:
    """Memoryless channel with one state."""
    return ChannelModel((label,), np.ones((1, 1)), np.array([[e00, e01, e10, e11]]))


def memoryless(e1: float, e2: float, e12: float, label: str = "S") -> ChannelModel:
    """Memoryless channel from marginal and joint erasure probabilities."""
    return single_state(1 - e1 - e2 + e12, e2 - e12, e1 - e12, e12, label=label)


def stationary_distribution(model: ChannelModel) -> np.ndarray:
    """Solve ``pi P = pi`` with one balance equation replaced by normalisation."""
    n = model.num_states
    a = model.transition.T - np.eye(n)
    a[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    if np.linalg.cond(a) > 1e12:
        raise SingularSystemError("balance equations are rank deficient")
    pi = np.linalg.solve(a, rhs)
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    resid = np.max(np.abs(pi @ model.transition - pi))
    if resid > 1e-10:
        raise SingularSystemError(f"stationary residual {resid:.3e} exceeds 1e-10")
    return pi


@dataclass(frozen=True, eq=False)
class ErasureProfile:
    """Joint erasure law of ``Z_t`` given the state ``delay`` slots earlier.

    Arrays are indexed by the conditioning state.
    """

    e11: np.ndarray
    e10: np.ndarray
    e01: np.ndarray
    e00: np.ndarray
    delay: int = 1

    @property
    def e1(self) -> np.ndarray:
        return self.e11 + self.e10

    @property
    def e2(self) -> np.ndarray:
        return self.e11 + self.e01

    @property
    def num_states(self) -> int:
        return len(self.e11)

    def as_matrix(self) -> np.ndarray:
        """Columns ``e00, e01, e10, e11``."""
        return np.column_stack([self.e00, self.e01, self.e10, self.e11])

    @classmethod
    def from_matrix(cls, m: np.ndarray, delay: int = 1) -> "ErasureProfile":
        m = np.asarray(m, dtype=float)
        cols = [m[:, i].copy() for i in range(4)]
        for c in cols:
            c.setflags(write=False)
        return cls(e11=cols[3], e10=cols[2], e01=cols[1], e00=cols[0], delay=delay)


def erasure_profile(model: ChannelModel, d: int = 1) -> ErasureProfile:
    """Law of ``(Z1_t, Z2_t)`` given ``S_{t-d}``: ``P^d`` applied to the per-state pmfs."""
    if int(d) != d or d < 1:
        raise ValueError(f"delay must be a positive integer, got {d!r}")
    m = np.linalg.matrix_power(model.transition, int(d)) @ model.erasure_pmf
    m = np.clip(m, 0.0, None)
    m /= m.sum(axis=1, keepdims=True)
    return ErasureProfile.from_matrix(m, delay=int(d))


def long_run_erasure(model: ChannelModel) -> tuple[float, float, float]:
    """Stationary ``(eps1, eps2, eps12)``."""
    avg = stationary_distribution(model) @ model.erasure_pmf
    return float(avg[2] + avg[3]), float(avg[1] + avg[3]), float(avg[3])


def sample_step(model: ChannelModel, s: int, rng: np.random.Generator) -> tuple[int, int, int]:
    """Draw the next state from row ``s`` and then its erasure pair."""
    nxt = int(rng.choice(model.num_states, p=model.transition[s]))
    k = int(rng.choice(4, p=model.erasure_pmf[nxt]))
    return nxt, k >> 1, k & 1


def sample_path(
    model: ChannelModel, n: int, rng: np.random.Generator, start: int | None = None
) -> np.ndarray:
    """State trajectory ``S_0..S_n``; ``S_0`` drawn from the stationary law if ``start`` is None."""
    pi = stationary_distribution(model)
    u = rng.random(n + 1)
    cum = np.cumsum(model.transition, axis=1)
    cum[:, -1] = 1.0
    cum_rows = [row.tolist() for row in cum]
    out = np.empty(n + 1, dtype=np.int64)
    if start is None:
        c0 = np.cumsum(pi)
        c0[-1] = 1.0
        s = int(np.searchsorted(c0, u[0], side="right"))
    else:
        s = int(start)
    out[0] = s
    if model.num_states == 1:
        out[:] = 0
        return out
    u_list = u.tolist()
    for t in range(1, n + 1):
        s = bisect_right(cum_rows[s], u_list[t])
        out[t] = s
    return out


def sample_erasures(model: ChannelModel, states: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Outcome index ``2*z1 + z2`` for each state in ``states``."""
    cum = np.cumsum(model.erasure_pmf, axis=1)
    cum[:, -1] = 1.0
    u = rng.random(len(states))
    return (u[:, None] >= cum[states][:, :3]).sum(axis=1).astype(np.int8)
