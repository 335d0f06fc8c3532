"""Command line front end.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .channel import ChannelError, SingularSystemError
from .config import ConfigError, load_channel
from .lp import LpError
from .regions import DEFAULT_DIRECTIONS, Region, RegionError
from .scheduler import PolicyKind
from .simulator import SLOPE_THRESHOLD, SimConfigError
from .workflows import boundary_csv, parse_rate_frac, rate_at_fraction, simulate_point

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3

log = logging.getLogger("bpec")


class UsageError(Exception):
    pass


def _csv_list(cast):
    def parse(text: str):
        items = [s for s in text.split(",") if s.strip()]
        try:
            return [cast(s.strip()) for s in items]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None

    return parse


def _write(out: str | None, text: str) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _channel(args):
    if not args.channel:
        raise UsageError("--channel is required")
    return load_channel(args.channel)


def _rate_pair(args, model):
    if args.rate_frac is not None:
        frac, region = parse_rate_frac(args.rate_frac, args.rate_region)
        return rate_at_fraction(model, frac, region, args.delay)
    return (args.r1, args.r2)


def cmd_region(args) -> int:
    model = _channel(args)
    delays = args.delays or [args.delay]
    if any(d < 1 for d in delays):
        raise UsageError("delays must be >= 1")
    if args.num_directions < 2:
        raise UsageError("--num-directions must be at least 2")
    _write(args.out, boundary_csv(model, args.kinds, delays, args.num_directions))
    return EXIT_OK


def cmd_simulate(args) -> int:
    model = _channel(args)
    r = _rate_pair(args, model)
    cfg, stats, slope, stable, thpt = simulate_point(
        model, args.policy, r, args.horizon, args.seed, args.delay, args.threshold, args.windows
    )
    doc = stats.to_dict()
    doc["verdict"] = {"slope": slope, "stable": stable, "threshold": args.threshold}
    doc["throughput_ratio"] = list(thpt)
    _write(args.out, json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def _sweep_job(job):
    channel_path, policy, r, horizon, seed, delay, threshold = job
    model = load_channel(channel_path)
    _, _, slope, stable, thpt = simulate_point(model, policy, r, horizon, seed, delay, threshold)
    return slope, stable, thpt


def cmd_sweep(args) -> int:
    model = _channel(args)
    if not args.seeds:
        raise UsageError("--seeds must list at least one seed")
    if args.rates:
        points = args.rates
    elif args.fracs:
        points = [rate_at_fraction(model, f, args.rate_region, args.delay) for f in args.fracs]
    else:
        raise UsageError("give --rates or --fracs")
    jobs = [
        (args.channel, args.policy, r, args.horizon, seed, args.delay, args.threshold)
        for r in points
        for seed in args.seeds
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            results = list(ex.map(_sweep_job, jobs))
    else:
        results = [_sweep_job(j) for j in jobs]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["R1", "R2", "seed", "policy", "slope", "stable", "thpt1", "thpt2"])
    for job, (slope, stable, thpt) in zip(jobs, results):
        r, seed = job[2], job[4]
        w.writerow([repr(float(r[0])), repr(float(r[1])), seed, args.policy, repr(slope), str(stable).lower(),
                    repr(float(thpt[0])), repr(float(thpt[1]))])
    _write(args.out, buf.getvalue())
    return EXIT_OK


def cmd_validate(args) -> int:
    model = _channel(args)
    print(f"ok: {model.num_states} states")
    return EXIT_OK


def _rate_point(text: str):
    try:
        a, b = text.split(":")
        r = (float(a), float(b))
    except ValueError:
        raise argparse.ArgumentTypeError(f"rate point must look like R1:R2, got {text!r}") from None
    if min(r) < 0 or max(r) > 1:
        raise argparse.ArgumentTypeError(f"rates must lie in [0, 1], got {text!r}")
    return r


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--channel", help="channel config JSON")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--seed", type=int, default=0, help="master seed (unsigned 64-bit)")
    common.add_argument("--delay", type=int, default=1, help="feedback delay in slots")
    common.add_argument("-v", "--verbose", action="store_true")

    sim = argparse.ArgumentParser(add_help=False)
    sim.add_argument("--policy", choices=[p.value for p in PolicyKind], default="maxweight")
    sim.add_argument("--rate-region", choices=["inner", "outer", "memoryless_fb", "memoryless_nofb", "minkowski"],
                     default="inner", help="region used by rate fractions")
    sim.add_argument("--horizon", type=int, default=10**6)
    sim.add_argument("--threshold", type=float, default=SLOPE_THRESHOLD, help="stability slope threshold")

    p = argparse.ArgumentParser(prog="bpec", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("region", parents=[common], help="export region boundaries as CSV")
    r.add_argument("--kinds", type=_csv_list(Region), default=[Region.INNER, Region.OUTER,
                   Region.MEMORYLESS_FB, Region.MEMORYLESS_NOFB])
    r.add_argument("--delays", type=_csv_list(int), help="comma list of feedback delays (default: --delay)")
    r.add_argument("--num-directions", type=int, default=DEFAULT_DIRECTIONS)
    r.set_defaults(func=cmd_region)

    s = sub.add_parser("simulate", parents=[common, sim], help="run one simulation, write stats JSON")
    s.add_argument("--rate-frac", help='fraction of the symmetric boundary point, e.g. "0.95" or "1.05-of-outer"')
    s.add_argument("--r1", type=float, default=0.0)
    s.add_argument("--r2", type=float, default=0.0)
    s.add_argument("--windows", type=int, default=20)
    s.set_defaults(func=cmd_simulate)

    w = sub.add_parser("sweep", parents=[common, sim], help="simulate rate points x seeds, write CSV")
    w.add_argument("--rates", type=_csv_list(_rate_point), help="comma list of R1:R2 points")
    w.add_argument("--fracs", type=_csv_list(float), help="comma list of symmetric-boundary fractions")
    w.add_argument("--seeds", type=_csv_list(int), default=[0])
    w.add_argument("--jobs", type=int, default=1)
    w.set_defaults(func=cmd_sweep)

    v = sub.add_parser("validate", parents=[common], help="check a channel config")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.delay < 1:
            raise UsageError("--delay must be >= 1")
        if not 0 <= args.seed < 2**64:
            raise UsageError("--seed must be an unsigned 64-bit integer")
        return args.func(args)
    except (UsageError, ConfigError, ChannelError, SimConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (LpError, RegionError, SingularSystemError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
