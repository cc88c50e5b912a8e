"""Acceptance criteria 1-9: one PASS/FAIL line each, with wall-clock limits."""

import json
import time
from fractions import Fraction

from randconvex.cli import build_report, dumps
from randconvex.mazur import dyadic_epsilon, plain_hull_lower_bound
from randconvex.report import jsonable
from randconvex.scenarios import (
    SCENARIOS,
    ScenarioConfig,
    cc_fix,
    example2_weak,
    plain_infeasibility,
    run,
)


def timed(fn):
    start = time.perf_counter()
    ok, info = fn()
    return ok, info, time.perf_counter() - start


def verdict(capsys, number, title, ok, info, seconds, limit=None):
    in_time = limit is None or seconds < limit
    good = ok and in_time
    budget = f" (< {limit} s)" if limit else ""
    with capsys.disabled():
        print(f"\n[{'PASS' if good else 'FAIL'}] criterion {number}: {title}; {info}; "
              f"{seconds:.2f} s{budget}")
    assert ok, info
    assert in_time, f"took {seconds:.2f} s, limit {limit} s"


def statuses(res, prefix=""):
    return {n: c for n, c in res.checks() if n.startswith(prefix)}


def test_criterion_1_hull_gap(capsys):
    def go():
        bad = []
        families = {
            "constant": None,
            "shifted": lambda N: [tuple(i + k for k in range(4)) for i in range(1, N + 1)],
        }
        weak = example2_weak(4, 10, 4, range(1, 9), 0)
        for N in range(1, 5):
            for label, make in families.items():
                f = plain_hull_lower_bound(N, make(N) if make else None, blocks=4, step=Fraction(1, 8))
                if not f.ok:
                    bad.append((N, label))
            if not plain_infeasibility(N, 4, dyadic_epsilon, weak).ok:
                bad.append((N, "search"))
        return not bad, f"N=1..4, grid step 1/8, failures={bad}"
    verdict(capsys, 1, "plain hull floor 2^-(N-1) and infeasibility for k >= N", *timed(go), limit=10)


def test_criterion_2_cc_fix(capsys):
    def go():
        c = cc_fix(6)
        return c.ok, "residual^2 per block = " + ", ".join(map(str, c.details["search"].residual_sq.values))
    verdict(capsys, 2, "cc residual exactly 2^-(k+1) for k <= 6", *timed(go), limit=30)


def test_criterion_3_weak_convergence(capsys):
    def go():
        results = []
        for depth in (3, 4, 6):
            f = example2_weak(6, 10, depth, range(1, 9), seed=depth)
            results.append(f.status("exact-vanishing-law") == "pass" and f.ok)
        return all(results), "battery of 10, depths 3/4/6, N=1..8"
    verdict(capsys, 3, "exact-vanishing law", *timed(go), limit=10)


def test_criterion_4_degenerate_gauge(capsys):
    def go():
        res = run(ScenarioConfig("example1", delta_sweep=10))
        c = statuses(res)
        ok = res.ok and len(c) == 12 and all(v.status == "pass" for v in c.values())
        return ok, f"{len(c) // 3} variables, deltas 2^0..2^-10"
    verdict(capsys, 4, "p_U(X) <= delta certificates, X not in U", *timed(go), limit=5)


def test_criterion_5_selection(capsys):
    def go():
        res = run(ScenarioConfig("prop2-selection", trials=50))
        return res.ok, "50 seeded instances against the first-hit oracle"
    verdict(capsys, 5, "eps-optimal selection", *timed(go))


def test_criterion_6_gauge_and_sublevel(capsys):
    def go():
        res = run(ScenarioConfig("prop3-sublevel", trials=100))
        c = statuses(res)
        strict = c["prop3-sublevel/U/strict-inclusion"].status == "pass"
        return res.ok and strict, "100 polytopes; rcc sets closure == {p <= 1}; U strict"
    verdict(capsys, 6, "gauge oracle and sublevel/closure", *timed(go))


def test_criterion_7_axioms(capsys):
    def go():
        res = run(ScenarioConfig("property-suite", trials=200))
        c = statuses(res, "property/")
        fails = c["property/abs-cond-mean/definiteness"]
        gauge = c["property/gauge-x<=1/homogeneity"]
        witnesses = fails.details.get("witness") is not None and gauge.details.get("witness") is not None
        ok = res.ok and fails.status == "fail" and gauge.status == "fail" and witnesses
        return ok, "200 norm identities; expected failures carry witnesses"
    verdict(capsys, 7, "seminorm axiom suites", *timed(go))


def test_criterion_8_corollaries(capsys):
    def go():
        a = run(ScenarioConfig("cor33-closure"))
        b = run(ScenarioConfig("cor35-lsc"))
        ca, cb = statuses(a), statuses(b)
        gap = ca["cor33-closure/example2-plain/closures-coincide"]
        local = cb["cor35-lsc/global-sup/local-property"]
        ok = (a.ok and b.ok and gap.status == "fail" and gap.expected == "fail"
              and local.status == "fail" and local.details["witness"] is not None)
        return ok, "balls/polytopes coincide, plain-hull gap reported, non-local witness found"
    verdict(capsys, 8, "closure equivalence and lsc", *timed(go))


def test_criterion_9_determinism(capsys):
    def go():
        same = []
        for name in SCENARIOS:
            cfg = ScenarioConfig(name, trials=20)
            a = dumps(jsonable(build_report(cfg, run(cfg))))
            b = dumps(jsonable(build_report(cfg, run(cfg))))
            same.append(a == b and json.loads(a)["ok"])
        return all(same), f"{len(SCENARIOS)} scenarios run twice"
    verdict(capsys, 9, "byte-identical reports modulo timing", *timed(go))
