"""Exit criteria for the package, one test per criterion.

Each test appends a PASS/FAIL line that the conftest prints in the
terminal summary.
"""

import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, quadratic_problem, random_spd
from mbfgs.bench import (PAPER_GUESSES, PAPER_ITERATIONS, TABLE_RULES, BenchmarkCase,
                         SuiteConfig, emit_table, paper_cases, parse_csv, parse_jsonl, run_suite)
from mbfgs.linesearch import LineSearchSpec, check_conditions
from mbfgs.numerics import is_spd
from mbfgs.objectives import PROBLEMS, eval_grad, fd_gradient, make_problem
from mbfgs.solver import (SolverConfig, compute_C, direct_update, inverse_update, minimize)


def report(number, title, ok, detail=""):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}"
                            + (f" -- {detail}" if detail else ""))
    assert ok, detail


def _suite_runs():
    """Run the 72 reference cases with default settings, collecting per-step data."""
    runs = []
    for pid, guesses in PAPER_GUESSES.items():
        p = make_problem(pid)
        for i, x0 in enumerate(guesses):
            for j, rule in enumerate(TABLE_RULES):
                steps = []
                cfg = SolverConfig(linesearch=LineSearchSpec(rule))
                result = minimize(p, x0, cfg, monitor=lambda **kw: steps.append(kw))
                runs.append(dict(problem=pid, x0=x0, rule=rule, result=result, steps=steps,
                                 spec=cfg.linesearch, paper=PAPER_ITERATIONS[pid][i][j]))
    return runs


@pytest.fixture(scope="module")
def suite_runs():
    start = time.perf_counter()
    runs = _suite_runs()
    return runs, time.perf_counter() - start


def test_criterion_1_gradients():
    start = time.perf_counter()
    rng = np.random.default_rng(1)
    worst = 0.0
    for p in PROBLEMS.values():
        for _ in range(100):
            x = p.x_star + rng.uniform(-2.0, 2.0, p.dim)
            g = eval_grad(p, x)
            err = np.linalg.norm(g - fd_gradient(p, x, 1e-6)) / max(np.linalg.norm(g), 1.0)
            worst = max(worst, err)
    elapsed = time.perf_counter() - start
    report(1, "analytic vs central-difference gradients", worst <= 1e-5 and elapsed < 1.0,
           f"max rel err {worst:.2e} (<= 1e-5), {elapsed:.2f} s (< 1 s)")


def test_criterion_2_linesearch_soundness(suite_runs):
    runs, _ = suite_runs
    start = time.perf_counter()
    violations = []
    fallbacks = 0
    for run in runs:
        for st in run["steps"]:
            rec, sr = st["record"], st["step_result"]
            flags = check_conditions(run["rule"], st["f_old"], st["g_old"], st["direction"],
                                     rec.step, rec.f, sr.g_new, run["spec"])
            if run["rule"] == "wolfe" and rec.fallback == "wolfe_armijo_only":
                fallbacks += 1
                flags = flags[:1]
            if not all(flags):
                violations.append(f"{run['problem']}{run['x0']}/{run['rule']} k={rec.k}"
                                  f" {rec.fallback or 'no fallback'}")
    elapsed = time.perf_counter() - start
    by_kind = {}
    for v in violations:
        kind = v.rsplit(" ", 1)[-1]
        by_kind[kind] = by_kind.get(kind, 0) + 1
    report(2, "every accepted step satisfies its rule", not violations and elapsed < 10.0,
           f"{len(violations)} violating steps {by_kind}; "
           f"{fallbacks} recorded Wolfe fallbacks; {elapsed:.2f} s")


def test_criterion_3_update_oracle():
    rng = np.random.default_rng(3)
    worst_inv = worst_sec_m = worst_sec_b = 0.0
    count = 0
    while count < 1000:
        n = int(rng.choice([2, 4]))
        M = random_spd(rng, n)
        d = rng.normal(size=n)
        y = random_spd(rng, n) @ d
        if d @ y <= 1e-6:
            continue
        Mp = inverse_update(M, d, y)
        Bp = direct_update(np.linalg.inv(M), d, y)
        worst_inv = max(worst_inv, np.linalg.norm(Mp - np.linalg.inv(Bp)) / np.linalg.norm(Mp))
        worst_sec_m = max(worst_sec_m, np.linalg.norm(Mp @ y - d) / np.linalg.norm(d))
        worst_sec_b = max(worst_sec_b, np.linalg.norm(Bp @ d - y) / np.linalg.norm(y))
        count += 1
    ok = worst_inv <= 1e-8 and worst_sec_m <= 1e-10 and worst_sec_b <= 1e-10
    report(3, "inverse update equals inverse of direct update", ok,
           f"inverse mismatch {worst_inv:.1e} (<= 1e-8), secant {worst_sec_m:.1e}/"
           f"{worst_sec_b:.1e} (<= 1e-10) over {count} instances")


def test_criterion_4_branch_identity():
    rng = np.random.default_rng(4)
    max_c = 0.0
    mismatches = 0
    runs = 0
    for n in (2, 4, 8):
        for _ in range(20):
            p = quadratic_problem(random_spd(rng, n, 0.1, 10.0), rng.normal(size=n) * 3)
            x0 = rng.normal(size=n) * 5
            for rule in TABLE_RULES:
                ls = LineSearchSpec(rule)
                m = minimize(p, x0, SolverConfig(update="mbfgs", linesearch=ls))
                b = minimize(p, x0, SolverConfig(update="bfgs", linesearch=ls))
                max_c = max(max_c, max(abs(r.C) for r in m.trace))
                same = len(m.trace) == len(b.trace) and all(
                    np.array_equal(u.x, v.x) for u, v in zip(m.trace, b.trace))
                mismatches += not same
                runs += 1
    quartic_c = compute_C(0.0, 1.0, [0.0], [4.0], [1.0])
    ok = max_c <= 1e-10 and mismatches == 0 and quartic_c == 2.0
    report(4, "MBFGS reduces to BFGS on quadratics", ok,
           f"max |C| {max_c:.1e} (<= 1e-10), {mismatches}/{runs} differing runs, "
           f"x^4 hand case C = {quartic_c}")


def test_criterion_5_invariants(suite_runs):
    runs, _ = suite_runs
    not_spd = not_descent = not_decreasing = applied = 0
    for run in runs:
        for st in run["steps"]:
            rec = st["record"]
            if st["g_old"] @ st["direction"] >= 0:
                not_descent += 1
            if rec.f >= st["f_old"]:
                not_decreasing += 1
            if rec.update_applied != "skipped":
                applied += 1
                if not is_spd(st["M"], 1e-12):
                    not_spd += 1
    ok = not (not_spd or not_descent or not_decreasing)
    report(5, "SPD, descent and monotone decrease on the reference suite", ok,
           f"{applied} updates: {not_spd} not SPD, {not_descent} non-descent directions, "
           f"{not_decreasing} non-decreasing steps")


def test_criterion_6_convergence_reproduction(suite_runs):
    runs, elapsed = suite_runs
    not_converged = [f"{r['problem']}{r['x0']}/{r['rule']}" for r in runs
                     if not r["result"].converged]
    diffs = [r["result"].iterations - r["paper"] for r in runs]
    within10 = sum(abs(d) <= 10 for d in diffs)
    beyond20 = [f"{r['problem']}{r['x0']}/{r['rule']}: {r['result'].iterations} vs {r['paper']}"
                for r, d in zip(runs, diffs) if abs(d) > 20]
    anchors = {("rosenbrock", (2.0, 2.0)): 20, ("powell_quartic", (3.0, -1.0, 1.0, 1.0)): 22,
               ("wood", (1.2, 1.2, 1.2, 1.2)): 12, ("schumer_steiglitz", (0.8, 0.8)): 18,
               ("schwefel_variant", (5.0, 6.0)): 14}
    anchor_text = ", ".join(
        f"{pid}{x0}: " + "/".join(str(r["result"].iterations) for r in runs
                                  if r["problem"] == pid and r["x0"] == x0) + f" (reference {n})"
        for (pid, x0), n in anchors.items())
    ok = (not not_converged and within10 >= 0.8 * len(runs) and not beyond20
          and elapsed < 5.0)
    report(6, "iteration counts reproduce the published tables", ok,
           f"{len(runs) - len(not_converged)}/{len(runs)} converged; "
           f"{within10}/{len(runs)} within +-10 (need >= {int(np.ceil(0.8 * len(runs)))}); "
           f"beyond +-20: {beyond20 or 'none'}; {elapsed:.2f} s; anchors {anchor_text}")


def test_criterion_7_timing_tables():
    cases = paper_cases(repetitions=3)
    rows = run_suite(SuiteConfig(cases))
    slowest = max(r.mean_wall_time_seconds for r in rows)
    md = emit_table(rows, "markdown")
    shaped = all(f"(Avg Time) {rule.capitalize()}" in md for rule in TABLE_RULES)
    blocks = md.count("average time in seconds")
    ok = shaped and blocks == 5 and slowest < 1.0
    report(7, "timing tables emitted in the published shape", ok,
           f"{blocks} timing blocks, slowest mean run {slowest * 1e3:.2f} ms (< 1 s)")


def test_criterion_8_format_round_trip():
    cases = [BenchmarkCase(pid, x0, rule, repetitions=1)
             for pid in ("wood", "schwefel_variant")
             for x0 in PAPER_GUESSES[pid]
             for rule in TABLE_RULES]
    cases.append(BenchmarkCase("rosenbrock", (2.0, 2.0), "armijo", repetitions=1, max_iters=2))
    rows = run_suite(SuiteConfig(cases))
    from_json = parse_jsonl(emit_table(rows, "jsonl"))
    from_csv = parse_csv(emit_table(rows, "csv"))
    md = emit_table(rows, "markdown")
    md_ok = all(f"{r.r:.3f}" in md and f"{r.mean_wall_time_seconds:.7f}" in md for r in rows)
    ok = from_json == rows and from_csv == rows and md_ok
    report(8, "jsonl round-trip and cross-format equality", ok,
           f"{len(rows)} rows; jsonl equal: {from_json == rows}, csv equal: {from_csv == rows}, "
           f"markdown numbers present: {md_ok}")
