"""Run every scenario and write one JSON report per scenario."""

import argparse
import pathlib
import time

from randconvex.cli import DEFAULT_BLOCKS, build_report, dumps
from randconvex.report import jsonable
from randconvex.scenarios import SCENARIOS, ScenarioConfig, run


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="results")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    failed = []
    for name in SCENARIOS:
        cfg = ScenarioConfig(name, blocks=DEFAULT_BLOCKS.get(name, 4), seed=args.seed)
        start = time.perf_counter()
        res = run(cfg)
        secs = time.perf_counter() - start
        (out / f"{name}.json").write_text(dumps(jsonable(build_report(cfg, res, secs))))
        print(f"{'ok ' if res.ok else 'BAD'} {name:<20} {secs:6.2f} s")
        if not res.ok:
            failed.append(name)
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
