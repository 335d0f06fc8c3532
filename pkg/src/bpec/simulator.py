"""Slot-level simulation of the four-queue transmitter.

Within a slot: Bernoulli arrivals join the ``q1`` buffers, the policy picks
an action from its lagged view (channel state ``d`` slots old, queues as
known from feedback received so far), the packet meets the true erasure
draw, and the true queues are updated.  Feedback about slot ``t`` reaches
the transmitter's view at slot ``t + d``.

Randomness comes from independent substreams keyed by a fixed label, so two
runs with the same seed and different policies see the same channel,
erasures and arrivals.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelModel, erasure_profile, sample_erasures, sample_path
from .scheduler import Action, PolicyKind, PolicySpec, QueueState

log = logging.getLogger(__name__)

NUM_WINDOWS = 20
SLOPE_THRESHOLD = 0.005

_STREAM_LABELS = {"arrivals_u1": 0, "arrivals_u2": 1, "channel": 2, "erasures": 3, "policy": 4}


class SimConfigError(ValueError):
    pass


def substream(seed: int, label: str) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(_STREAM_LABELS[label],))))


@dataclass(frozen=True, eq=False)
class SimConfig:
    channel: ChannelModel
    policy: PolicySpec
    arrival_r1: float
    arrival_r2: float
    horizon: int
    delay: int = 1
    seed: int = 0
    num_windows: int = NUM_WINDOWS

    def __post_init__(self):
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise SimConfigError(f"horizon must be a positive integer, got {self.horizon!r}")
        if int(self.delay) != self.delay or self.delay < 1:
            raise SimConfigError(f"delay must be an integer >= 1, got {self.delay!r}")
        for name in ("arrival_r1", "arrival_r2"):
            r = getattr(self, name)
            if not (0.0 <= r <= 1.0):
                raise SimConfigError(f"{name}={r!r} outside [0, 1]")
        if not (0 <= int(self.seed) < 2**64):
            raise SimConfigError("seed must be an unsigned 64-bit integer")
        if self.num_windows < 1:
            raise SimConfigError("num_windows must be positive")
        t = self.policy.table
        if t is not None and t.shape[0] != self.channel.num_states:
            raise SimConfigError(
                f"policy table has {t.shape[0]} rows, channel has {self.channel.num_states} states"
            )

    def echo(self) -> dict:
        return {
            "channel": self.channel.to_dict(),
            "policy": self.policy.to_dict(),
            "arrival_r1": self.arrival_r1,
            "arrival_r2": self.arrival_r2,
            "horizon": int(self.horizon),
            "delay": int(self.delay),
            "seed": int(self.seed),
            "num_windows": self.num_windows,
        }


@dataclass
class SimStats:
    delivered: tuple[int, int]
    arrivals: tuple[int, int]
    actions: dict[int, int]
    window_avg_queue: list[float]
    window_length: int
    final_queues: QueueState
    empirical_erasures: dict[str, list[float] | None]
    seed: int
    config_echo: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "delivered": list(self.delivered),
            "arrivals": list(self.arrivals),
            "actions": {str(k): v for k, v in sorted(self.actions.items())},
            "window_avg_queue": list(self.window_avg_queue),
            "window_length": self.window_length,
            "final_queues": list(self.final_queues),
            "empirical_erasures": self.empirical_erasures,
            "seed": self.seed,
            "config_echo": self.config_echo,
        }


def _policy_tables(config: SimConfig):
    prof = erasure_profile(config.channel, config.delay)
    return (
        (1 - prof.e1).tolist(),
        prof.e10.tolist(),
        (1 - prof.e2).tolist(),
        prof.e01.tolist(),
    )


def _probabilistic_actions(config: SimConfig, observed: np.ndarray) -> list[int]:
    cum = np.cumsum(config.policy.table, axis=1)
    cum[:, -1] = 1.0
    u = substream(config.seed, "policy").random(len(observed))
    return ((u[:, None] >= cum[observed][:, :2]).sum(axis=1) + 1).tolist()


def run(config: SimConfig, check: bool = False) -> SimStats:
    """Simulate ``config.horizon`` slots; ``check`` asserts packet conservation every slot."""
    n, d = int(config.horizon), int(config.delay)
    model = config.channel
    seed = int(config.seed)

    # path[k] is the state in slot k + 1 - d, so slot t observes path[t-1] and
    # its erasures are drawn in state path[t + d - 1].
    path = sample_path(model, n + d - 1, substream(seed, "channel"))
    z = sample_erasures(model, path[d:], substream(seed, "erasures"))
    arr1 = (substream(seed, "arrivals_u1").random(n) < config.arrival_r1).tolist()
    arr2 = (substream(seed, "arrivals_u2").random(n) < config.arrival_r2).tolist()
    observed = path[:n]

    kind = config.policy.kind
    if kind is PolicyKind.PROBABILISTIC:
        drawn = _probabilistic_actions(config, observed)
    else:
        s1, p10, s2, p01 = _policy_tables(config)
        obs_list = observed.tolist()
    coded_ok = kind is not PolicyKind.UNCODED
    z_list = z.tolist()

    win_len = max(n // config.num_windows, 1)
    num_windows = min(config.num_windows, n)
    windows: list[float] = []
    acc = 0
    q11 = q21 = q12 = q22 = 0
    a1 = a2 = d1 = d2 = 0
    counts = [0, 0, 0, 0]
    lagged = d > 1
    if lagged:
        pending: deque = deque()
        p11 = p21 = p12 = p22 = 0

    for t in range(n):
        if arr1[t]:
            q11 += 1
            a1 += 1
        if arr2[t]:
            q12 += 1
            a2 += 1

        if lagged:
            v11, v21, v12, v22 = q11 - p11, q21 - p21, q12 - p12, q22 - p22
        else:
            v11, v21, v12, v22 = q11, q21, q12, q22

        if kind is PolicyKind.PROBABILISTIC:
            act = drawn[t]
        else:
            s = obs_list[t]
            if coded_ok:
                w1 = s1[s] * v11 + p10[s] * (v11 - v21)
                w2 = s2[s] * v12 + p01[s] * (v12 - v22)
                w3 = s1[s] * v21 + s2[s] * v22
            else:
                w1 = s1[s] * v11
                w2 = s2[s] * v12
                w3 = float("-inf")
            act = 1
            best = w1
            if w2 > best:
                act, best = 2, w2
            if w3 > best:
                act = 3
        counts[act] += 1

        zz = z_list[t]
        e1 = zz >> 1
        e2 = zz & 1
        b11, b21, b12, b22 = q11, q21, q12, q22
        if act == 1:
            if q11:
                if not e1:
                    q11 -= 1
                    d1 += 1
                elif not e2 and coded_ok:
                    q11 -= 1
                    q21 += 1
        elif act == 2:
            if q12:
                if not e2:
                    q12 -= 1
                    d2 += 1
                elif not e1 and coded_ok:
                    q12 -= 1
                    q22 += 1
        else:
            if q21 and not e1:
                q21 -= 1
                d1 += 1
            if q22 and not e2:
                q22 -= 1
                d2 += 1

        if lagged:
            delta = (q11 - b11, q21 - b21, q12 - b12, q22 - b22)
            pending.append(delta)
            p11 += delta[0]
            p21 += delta[1]
            p12 += delta[2]
            p22 += delta[3]
            if len(pending) >= d:
                old = pending.popleft()
                p11 -= old[0]
                p21 -= old[1]
                p12 -= old[2]
                p22 -= old[3]

        if check:
            assert a1 == d1 + q11 + q21 and a2 == d2 + q12 + q22, f"conservation violated at slot {t + 1}"

        acc += q11 + q21 + q12 + q22
        if (t + 1) % win_len == 0 and len(windows) < num_windows:
            windows.append(acc / win_len)
            acc = 0

    k = model.num_states
    prev = path[d - 1 : n + d - 1]
    tally = np.bincount(prev * 4 + z, minlength=4 * k).reshape(k, 4)
    emp: dict[str, list[float] | None] = {}
    for i, label in enumerate(model.states):
        tot = tally[i].sum()
        emp[label] = (tally[i] / tot).tolist() if tot else None

    log.debug("run seed=%d done: delivered=(%d,%d) arrivals=(%d,%d)", seed, d1, d2, a1, a2)
    return SimStats(
        delivered=(d1, d2),
        arrivals=(a1, a2),
        actions={int(Action.DIRECT1): counts[1], int(Action.DIRECT2): counts[2], int(Action.CODED): counts[3]},
        window_avg_queue=windows,
        window_length=win_len,
        final_queues=QueueState(q11, q21, q12, q22),
        empirical_erasures=emp,
        seed=seed,
        config_echo=config.echo(),
    )


class InsufficientDataError(ValueError):
    pass


def stability_verdict(stats: SimStats, threshold: float = SLOPE_THRESHOLD) -> tuple[float, bool]:
    """Least-squares growth of windowed total queue, in packets per slot."""
    w = np.asarray(stats.window_avg_queue, dtype=float)
    if len(w) < 10:
        raise InsufficientDataError(f"need at least 10 windows, got {len(w)}")
    idx = np.arange(len(w), dtype=float)
    slope = np.polyfit(idx, w, 1)[0] / stats.window_length
    slope = float(slope)
    return slope, slope <= threshold


def throughput_check(stats: SimStats, config: SimConfig) -> tuple[float, float]:
    """Delivered packets relative to the nominal offered load, per user (1.0 for zero load)."""
    out = []
    for j, rate in enumerate((config.arrival_r1, config.arrival_r2)):
        offered = rate * config.horizon
        out.append(1.0 if offered == 0 else stats.delivered[j] / offered)
    return out[0], out[1]
