"""Acceptance criteria, one test each; every test records a PASS/FAIL line in the summary."""

import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from bpec.channel import erasure_profile, long_run_erasure, memoryless, stationary_distribution
from bpec.geometry import Polygon, hausdorff
from bpec.regions import BoundLP, Region, boundary, memoryless_fb_region, minkowski_region, sweep
from bpec.simulator import SimConfig, run, stability_verdict, throughput_check
from bpec.workflows import policy_for_rate, rate_at_fraction

from conftest import random_ge, random_two_state, record_acceptance
from oracles import grid_member

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
SEEDS = (0, 1, 2)
HORIZON = 10**6


def boundary_distance(poly: Polygon, p) -> float:
    """Euclidean distance from ``p`` to the polygon's boundary (inside or outside)."""
    p = np.asarray(p, dtype=float)
    v = poly.vertices
    best = np.inf
    for a, b in zip(v, np.roll(v, -1, axis=0)):
        ab = b - a
        t = np.clip((p - a) @ ab / max(ab @ ab, 1e-300), 0.0, 1.0)
        best = min(best, float(np.hypot(*(p - a - t * ab))))
    return best


def test_1_one_state_collapse():
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(50):
        e1, e2 = rng.uniform(0, 0.95, size=2)
        e12 = rng.uniform(max(0.0, e1 + e2 - 1), min(e1, e2))
        m = memoryless(e1, e2, e12)
        ref = memoryless_fb_region(e1, e2, e12)
        for kind in (Region.INNER, Region.OUTER):
            worst = max(worst, hausdorff(boundary(kind, m, 181), ref))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed < 10
    record_acceptance(1, "one-state collapse", ok, f"max Hausdorff {worst:.2e}, {elapsed:.1f} s")
    assert ok


def test_2_sandwich():
    rng = np.random.default_rng(202)
    start = time.perf_counter()
    violations = inner_hits = 0
    for _ in range(50):
        m = random_ge(rng)
        prof, pi = erasure_profile(m), stationary_distribution(m)
        inner, outer = BoundLP(prof, pi, True), BoundLP(prof, pi, False)
        for r in rng.uniform(0, 0.8, size=(200, 2)):
            if inner.contains(r):
                inner_hits += 1
                violations += not outer.contains(r)
    elapsed = time.perf_counter() - start
    ok = violations == 0 and elapsed < 30 and inner_hits > 0
    record_acceptance(2, "sandwich", ok, f"{violations} violations over {inner_hits} inner points, {elapsed:.1f} s")
    assert ok


def test_3_lp_matches_grid_oracle():
    rng = np.random.default_rng(303)
    start = time.perf_counter()
    checked = mismatches = 0
    for _ in range(10):
        m = random_two_state(rng)
        prof, pi = erasure_profile(m), stationary_distribution(m)
        for inner in (True, False):
            kind = Region.INNER if inner else Region.OUTER
            poly = boundary(kind, m)
            lp_ = BoundLP(prof, pi, inner)
            for r in rng.uniform(0, 0.7, size=(50, 2)):
                if boundary_distance(poly, r) <= 0.02:
                    continue
                checked += 1
                mismatches += lp_.contains(r) != grid_member(prof, pi, r, inner)
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and checked > 200 and elapsed < 60
    record_acceptance(3, "LP vs grid oracle", ok, f"{mismatches} mismatches over {checked} samples, {elapsed:.1f} s")
    assert ok


def test_4_minkowski_strictness(ge_asym):
    inner = np.array([r.radius for r in sweep(Region.INNER, ge_asym)])
    mink = np.array([r.radius for r in sweep(Region.MINKOWSKI, ge_asym)])
    gap = inner - mink
    ok = gap.min() >= -1e-9 and gap.max() > 1e-3
    record_acceptance(4, "Minkowski strictness", ok, f"min gap {gap.min():.2e}, max gap {gap.max():.4f}")
    assert ok


def test_5_delay_nesting_and_convergence(ge_sticky):
    radii = [np.array([r.radius for r in sweep(Region.INNER, ge_sticky, delay=d)]) for d in (1, 2, 5, 10)]
    growth = max(float(np.max(b - a)) for a, b in zip(radii, radii[1:]))
    e1, e2, e12 = long_run_erasure(ge_sticky)
    dist = hausdorff(boundary(Region.INNER, ge_sticky, delay=50), memoryless_fb_region(e1, e2, e12))
    ok = growth <= 1e-9 and dist <= 5e-3
    record_acceptance(5, "delay nesting and convergence", ok, f"max growth {growth:.1e}, d=50 Hausdorff {dist:.2e}")
    assert ok


def run_seeds(model, policy, r):
    out = []
    for seed in SEEDS:
        start = time.perf_counter()
        cfg = SimConfig(model, policy, r[0], r[1], HORIZON, seed=seed)
        stats = run(cfg)
        slope, stable = stability_verdict(stats)
        out.append((slope, stable, throughput_check(stats, cfg), time.perf_counter() - start))
    return out


@pytest.mark.slow
def test_6_max_weight_stability(ge_sym):
    r = rate_at_fraction(ge_sym, 0.95, Region.INNER)
    res = run_seeds(ge_sym, policy_for_rate(ge_sym, "maxweight"), r)
    ok = all(stable and min(thpt) >= 0.99 and secs < 60 for _, stable, thpt, secs in res)
    detail = ", ".join(f"slope {s:.1e} thpt {min(t):.4f} {secs:.1f}s" for s, _, t, secs in res)
    record_acceptance(6, "max-weight stability at 0.95x inner", ok, detail)
    assert ok


@pytest.mark.slow
def test_7_converse_instability(ge_sym):
    r = rate_at_fraction(ge_sym, 1.05, Region.OUTER)
    res = run_seeds(ge_sym, policy_for_rate(ge_sym, "maxweight"), r)
    ok = all(slope >= 0.01 and not stable for slope, stable, _, _ in res)
    record_acceptance(7, "instability at 1.05x outer", ok, ", ".join(f"slope {s:.4f}" for s, *_ in res))
    assert ok


@pytest.mark.slow
def test_8_probabilistic_achievability(ge_sym):
    r = rate_at_fraction(ge_sym, 0.9, Region.INNER)
    res = run_seeds(ge_sym, policy_for_rate(ge_sym, "probabilistic", r), r)
    ok = all(stable for _, stable, _, _ in res)
    record_acceptance(8, "probabilistic policy at 0.9x inner", ok, ", ".join(f"slope {s:.1e}" for s, *_ in res))
    assert ok


CLI_CASES = {
    "region": ["region", "--channel", "ge_sticky.json", "--delays", "1,2,5,10", "--num-directions", "31"],
    "simulate": ["simulate", "--channel", "ge_sym.json", "--rate-frac", "0.95", "--horizon", "100000", "--seed", "7"],
    "simulate-prob": ["simulate", "--channel", "ge_asym.json", "--rate-frac", "0.9", "--policy", "probabilistic",
                      "--horizon", "100000", "--delay", "2"],
    "sweep": ["sweep", "--channel", "ge_sym.json", "--fracs", "0.9,1.05", "--seeds", "1,2", "--horizon", "50000",
              "--jobs", "2"],
    "validate": ["validate", "--channel", "two_state.json"],
}


def test_9_cli_determinism(tmp_path):
    differing = []
    for name, argv in CLI_CASES.items():
        argv = [str(CONFIGS / a) if a.endswith(".json") else a for a in argv]
        outputs = []
        for rep in range(2):
            out = tmp_path / f"{name}-{rep}.out"
            proc = subprocess.run([sys.executable, "-m", "bpec", *argv, "--out", str(out)],
                                  capture_output=True, check=False)
            assert proc.returncode == 0, proc.stderr.decode()
            outputs.append(out.read_bytes() if out.exists() else proc.stdout)
        if outputs[0] != outputs[1] or not outputs[0]:
            differing.append(name)
    ok = not differing
    record_acceptance(9, "CLI determinism", ok, f"{len(CLI_CASES)} commands" + (f", differ: {differing}" if differing else ""))
    assert ok
