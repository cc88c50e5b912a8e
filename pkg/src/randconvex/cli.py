"""Command line entry point: ``randconvex <scenario> [options]``."""

from __future__ import annotations

import argparse
import json
import platform
import sys
import time

from . import __version__
from .l0core import L0Error
from .report import jsonable
from .scenarios import SCENARIOS, ScenarioConfig, ScenarioResult, run

SCHEMA = "randconvex-report/1"


def build_report(cfg: ScenarioConfig, res: ScenarioResult, seconds: float | None = None) -> dict:
    checks = []
    for name, c in res.checks():
        d = c.to_dict()
        d["name"] = name
        d["ok"] = c.ok
        checks.append(d)
    report = {
        "schema": SCHEMA,
        "scenario": cfg.scenario,
        "parameters": cfg.parameters(),
        "ok": res.ok,
        "checks": checks,
        "versions": {"randconvex": __version__, "python": ".".join(platform.python_version_tuple()[:2])},
    }
    if seconds is not None:
        report["timing"] = {"seconds": {"display-only": f"{seconds:.3f}"}}
    return report


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="randconvex", description="Exact checks for conditional convex analysis.")
    p.add_argument("scenario", choices=SCENARIOS)
    p.add_argument("--blocks", type=int, default=None, help="realised dyadic blocks")
    p.add_argument("--fine-depth", type=int, default=1, help="fine cells per block: 2**depth")
    p.add_argument("--max-n", type=int, default=None)
    p.add_argument("--epsilon", default="dyadic", help="dyadic or const:p/q")
    p.add_argument("--delta-sweep", type=int, default=10)
    p.add_argument("--battery-depth", type=int, default=4)
    p.add_argument("--battery-size", type=int, default=10)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="write the JSON report here")
    return p


DEFAULT_BLOCKS = {"example2-cc-fix": 6}


def main(argv=None) -> int:
    args = parser().parse_args(argv)
    blocks = args.blocks if args.blocks is not None else DEFAULT_BLOCKS.get(args.scenario, 4)
    try:
        cfg = ScenarioConfig(args.scenario, blocks, args.fine_depth, args.max_n, args.epsilon,
                             args.delta_sweep, args.battery_depth, args.battery_size, args.trials,
                             args.seed, args.out)
    except (L0Error, ValueError, ZeroDivisionError) as exc:
        print(f"randconvex: error: {exc}", file=sys.stderr)
        return 2
    start = time.perf_counter()
    res = run(cfg)
    report = build_report(cfg, res, time.perf_counter() - start)
    text = dumps(jsonable(report))
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    for name, c in res.checks():
        mark = "ok " if c.ok else "BAD"
        note = "" if c.expected == "pass" else f" (expected {c.expected})"
        print(f"{mark} {c.status:<14} {name}{note}")
    print(f"{cfg.scenario}: {'all checks ok' if res.ok else 'some checks failed'}")
    if not cfg.out:
        sys.stdout.write(text)
    return 0 if res.ok else 1


if __name__ == "__main__":
    sys.exit(main())
