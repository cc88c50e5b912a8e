import json
import pathlib

import pytest

from randconvex.cli import SCHEMA, main
from randconvex.scenarios import SCENARIOS

GOLDEN = pathlib.Path(__file__).parent / "golden"


def report(tmp_path, *argv):
    out = tmp_path / "r.json"
    code = main([*argv, "--out", str(out)])
    data = json.loads(out.read_text())
    data.pop("timing", None)
    return code, data


def pinned(data):
    return {k: v for k, v in data.items() if k != "versions"}


@pytest.mark.parametrize("name", sorted(p.stem for p in GOLDEN.glob("*.json")))
def test_golden_reports(tmp_path, name):
    code, data = report(tmp_path, name)
    assert code == 0
    assert pinned(data) == pinned(json.loads((GOLDEN / f"{name}.json").read_text()))


@pytest.mark.parametrize("scenario", SCENARIOS)
def test_every_scenario_passes(tmp_path, scenario):
    code, data = report(tmp_path, scenario, "--trials", "10")
    assert code == 0 and data["ok"] and data["schema"] == SCHEMA
    assert all(c["ok"] for c in data["checks"])


def test_deterministic_bytes(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    for path in (a, b):
        main(["prop2-selection", "--seed", "7", "--out", str(path)])
    strip = lambda p: {k: v for k, v in json.loads(p.read_text()).items() if k != "timing"}
    assert json.dumps(strip(a)) == json.dumps(strip(b))


def test_bad_config_exit_code(capsys):
    assert main(["example1", "--blocks", "0"]) == 2
    assert main(["example2-weak", "--epsilon", "const:0"]) == 2
    assert "error" in capsys.readouterr().err


def test_unknown_scenario():
    with pytest.raises(SystemExit):
        main(["nope"])


def test_stdout_json(capsys):
    assert main(["example2-weak", "--max-n", "3"]) == 0
    out = capsys.readouterr().out
    assert json.loads(out[out.index("{"):])["scenario"] == "example2-weak"
