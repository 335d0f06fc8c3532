"""Glue between regions and simulation: picking rate pairs and tuned policies."""

from __future__ import annotations

import csv
import io
import re

import numpy as np

from .channel import ChannelModel
from .regions import DEFAULT_DIRECTIONS, Region, bound_lp, sweep, symmetric_point
from .scheduler import PolicyKind, PolicySpec, probabilistic_from_region_point
from .simulator import SimConfig, run, stability_verdict, throughput_check

_FRAC_RE = re.compile(r"^\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*(?:-of-([a-z_]+))?\s*$")


def parse_rate_frac(text: str, default_region: str = "inner") -> tuple[float, Region]:
    """``"0.95"`` or ``"1.05-of-outer"``."""
    m = _FRAC_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse rate fraction {text!r}")
    return float(m.group(1)), Region(m.group(2) or default_region)


def rate_at_fraction(model: ChannelModel, frac: float, region: Region | str = Region.INNER, delay: int = 1):
    """``frac`` times the boundary point of ``region`` on the symmetric ray."""
    p = symmetric_point(region, model, delay).point
    r = frac * p
    return float(r[0]), float(r[1])


def policy_for_rate(model: ChannelModel, kind: PolicyKind | str, r=(0.0, 0.0), delay: int = 1) -> PolicySpec:
    """Policy of ``kind``; the probabilistic one is tuned to the inner-bound point on ``r``'s ray,
    using a witness whose overheard buffers drain at least as fast as they can fill."""
    kind = PolicyKind(kind)
    if kind is PolicyKind.MAX_WEIGHT:
        return PolicySpec.max_weight()
    if kind is PolicyKind.UNCODED:
        return PolicySpec.uncoded()
    r = np.asarray(r, dtype=float)
    if not np.any(r > 0):
        k = model.num_states
        return probabilistic_from_region_point(np.ones(k), np.ones(k))
    ray = bound_lp(model, inner=True, delay=delay, balanced=True).ray(float(np.arctan2(r[1], r[0])))
    return probabilistic_from_region_point(ray.x, ray.y)


def boundary_csv(model: ChannelModel, kinds, delays, num_directions: int = DEFAULT_DIRECTIONS) -> str:
    """Boundary rows ``region,direction_deg,R1,R2`` for every kind (and delay, where it matters)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["region", "direction_deg", "R1", "R2"])
    angles = np.linspace(0.0, 90.0, num_directions)
    for kind in kinds:
        kind = Region(kind)
        delay_dep = kind in (Region.INNER, Region.OUTER, Region.MINKOWSKI)
        for d in delays if delay_dep else [1]:
            label = f"{kind.value}_d{d}" if delay_dep else kind.value
            for deg, ray in zip(angles, sweep(kind, model, num_directions, d)):
                p = ray.point
                w.writerow([label, repr(float(deg)), repr(max(float(p[0]), 0.0)), repr(max(float(p[1]), 0.0))])
    return buf.getvalue()


def simulate_point(model, policy_kind, r, horizon, seed, delay=1, threshold=None, num_windows=20):
    policy = policy_for_rate(model, policy_kind, r, delay)
    cfg = SimConfig(model, policy, r[0], r[1], horizon, delay, seed, num_windows)
    stats = run(cfg)
    if threshold is None:
        slope, stable = stability_verdict(stats)
    else:
        slope, stable = stability_verdict(stats, threshold)
    return cfg, stats, slope, stable, throughput_check(stats, cfg)
