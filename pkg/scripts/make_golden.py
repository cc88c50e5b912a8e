"""Regenerate the pinned reports under tests/golden (timing excluded)."""

import pathlib

from randconvex.cli import build_report, dumps
from randconvex.report import jsonable
from randconvex.scenarios import ScenarioConfig, run

GOLDEN = {
    "example1": ScenarioConfig("example1"),
    "example2-hull-gap": ScenarioConfig("example2-hull-gap"),
    "example2-cc-fix": ScenarioConfig("example2-cc-fix", blocks=6),
}

if __name__ == "__main__":
    out = pathlib.Path(__file__).resolve().parent.parent / "tests" / "golden"
    out.mkdir(exist_ok=True)
    for name, cfg in GOLDEN.items():
        (out / f"{name}.json").write_text(dumps(jsonable(build_report(cfg, run(cfg)))))
        print("wrote", name)
