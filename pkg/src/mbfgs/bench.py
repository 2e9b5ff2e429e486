"""Benchmark harness: run (problem, x0, rule) grids and render tables and traces."""

import csv
import io
import json
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import List, Optional, Sequence

from .linesearch import RULES, LineSearchSpec
from .objectives import CLI_NAMES, distance_r, make_problem
from .solver import SolverConfig, SolverResult, minimize

# Initial guesses of the reference benchmark, in table order.
PAPER_GUESSES = {
    "rosenbrock": [(2.2, 2.0), (2.0, 2.0), (1.2, 1.8), (0.75, 1.0), (0.0, 1.8), (1.8, 2.0)],
    "powell_quartic": [(4.0, -1.0, 0.0, 1.0), (3.0, -1.0, 1.0, 1.0), (3.0, -1.0, 0.0, 1.0),
                       (3.0, -1.5, 0.0, 1.5)],
    "wood": [(1.0, 1.2, 1.3, 1.4), (1.3, 1.2, 1.3, 1.4), (1.2, 1.2, 1.2, 1.2),
             (1.1, 1.2, 1.3, 1.4)],
    "schumer_steiglitz": [(0.2, 0.2), (0.4, 0.4), (0.8, 0.8), (-0.4, 0.8), (-0.4, 0.6)],
    "schwefel_variant": [(4.0, 8.0), (5.0, 6.0), (6.0, 6.0), (3.0, 3.0), (8.0, 6.0)],
}

# Reference iteration counts (armijo, goldstein, wolfe) per initial guess.
PAPER_ITERATIONS = {
    "rosenbrock": [(26, 26, 26), (20, 20, 20), (18, 18, 18), (17, 17, 17), (31, 31, 31),
                   (18, 21, 18)],
    "powell_quartic": [(24, 24, 24), (22, 22, 22), (24, 24, 24), (27, 27, 27)],
    "wood": [(14, 14, 14), (20, 20, 20), (12, 12, 12), (14, 14, 14)],
    "schumer_steiglitz": [(12, 12, 12), (12, 12, 12), (18, 18, 18), (20, 20, 20), (20, 20, 20)],
    "schwefel_variant": [(18, 18, 18), (14, 14, 14), (14, 14, 14), (16, 16, 16), (18, 18, 18)],
}

TABLE_RULES = ("armijo", "goldstein", "wolfe")
FORMATS = ("markdown", "csv", "jsonl")
_FORMAT_ALIASES = {"md": "markdown", "markdown": "markdown", "csv": "csv",
                   "jsonl": "jsonl", "json-lines": "jsonl"}


@dataclass(frozen=True)
class BenchmarkCase:
    problem: str
    x0: tuple
    rule: str = "armijo"
    update: str = "mbfgs"
    repetitions: int = 10
    grad_tol: float = 1e-6
    max_iters: int = 2000
    c1: Optional[float] = None

    def __post_init__(self):
        p = make_problem(self.problem)
        object.__setattr__(self, "problem", p.id)
        object.__setattr__(self, "x0", tuple(float(v) for v in self.x0))
        if len(self.x0) != p.dim:
            raise ValueError(f"{p.id} needs a {p.dim}-dimensional x0, got {len(self.x0)}")
        if self.rule not in RULES:
            raise ValueError(f"unknown line search rule {self.rule!r}")
        if self.repetitions < 1:
            raise ValueError("repetitions must be positive")
        self.solver_config()  # validates update, tolerances and c1

    def solver_config(self, record_trace=True) -> SolverConfig:
        return SolverConfig(update=self.update, grad_tol=self.grad_tol,
                            max_iters=self.max_iters,
                            linesearch=LineSearchSpec(rule=self.rule, c1=self.c1),
                            record_trace=record_trace)


@dataclass
class BenchmarkRow:
    case: BenchmarkCase
    r: float
    iterations: int
    mean_wall_time_seconds: float
    termination: str
    total_f_evals: int
    total_g_evals: int
    error: Optional[str] = None


@dataclass
class SuiteConfig:
    cases: List[BenchmarkCase]
    format: str = "markdown"
    trace_dir: Optional[str] = None
    repetitions: int = 10
    parallel: int = 1

    def __post_init__(self):
        if not self.cases:
            raise ValueError("a suite needs at least one case")
        self.format = _FORMAT_ALIASES.get(self.format, self.format)
        if self.format not in FORMATS:
            raise ValueError(f"unknown format {self.format!r}")


def paper_cases(repetitions=10, update="mbfgs", rules=TABLE_RULES, grad_tol=1e-6,
                c1=None) -> List[BenchmarkCase]:
    """All 24 reference initial guesses crossed with each rule."""
    return [BenchmarkCase(pid, x0, rule, update, repetitions, grad_tol, c1=c1)
            for pid, guesses in PAPER_GUESSES.items()
            for x0 in guesses
            for rule in rules]


def parse_case_line(line: str, repetitions=10, grad_tol=1e-6, c1=None) -> BenchmarkCase:
    """Parse ``function;x0;rule;update``, e.g. ``wood;1.2,1.2,1.2,1.2;armijo;mbfgs``."""
    parts = [s.strip() for s in line.split(";")]
    if len(parts) != 4:
        raise ValueError(f"expected 'function;x0;rule;update', got {line!r}")
    fn, x0, rule, update = parts
    return BenchmarkCase(fn, tuple(float(v) for v in x0.split(",")), rule, update, repetitions,
                         grad_tol, c1=c1)


def read_cases(path, repetitions=10, grad_tol=1e-6, c1=None) -> List[BenchmarkCase]:
    cases = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            cases.append(parse_case_line(line, repetitions, grad_tol, c1))
    return cases


def run_case_full(case: BenchmarkCase):
    """Run one case; return ``(row, traced_result)``.

    The traced run supplies iterations and the trace; ``case.repetitions``
    further untraced runs supply the mean wall time.
    """
    problem = make_problem(case.problem)
    r = distance_r(case.x0, problem.x_star)
    try:
        result = minimize(problem, case.x0, case.solver_config(record_trace=True))
        times = [minimize(problem, case.x0, case.solver_config(record_trace=False)).wall_time_seconds
                 for _ in range(case.repetitions)]
    except Exception as exc:  # recorded in the row, never fatal to a suite
        row = BenchmarkRow(case, r, 0, math.nan, "error", 0, 0, f"{type(exc).__name__}: {exc}")
        return row, None
    row = BenchmarkRow(case, r, result.iterations, statistics.fmean(times), result.termination,
                       result.total_f_evals, result.total_g_evals,
                       result.message or None)
    return row, result


def run_case(case: BenchmarkCase) -> BenchmarkRow:
    return run_case_full(case)[0]


def _trace_name(case: BenchmarkCase) -> str:
    x0 = "_".join(repr(v) for v in case.x0)
    return f"{CLI_NAMES[case.problem]}_{case.update}_{case.rule}_{x0}.csv"


def _run_and_trace(args):
    case, trace_dir = args
    row, result = run_case_full(case)
    if trace_dir is not None and result is not None:
        emit_trace(result, Path(trace_dir) / _trace_name(case))
    return row


def run_suite(cfg: SuiteConfig) -> List[BenchmarkRow]:
    """Run every case in order. Failures are recorded per row."""
    if cfg.trace_dir is not None:
        Path(cfg.trace_dir).mkdir(parents=True, exist_ok=True)
    jobs = [(case, cfg.trace_dir) for case in cfg.cases]
    if cfg.parallel > 1:
        with ProcessPoolExecutor(max_workers=cfg.parallel) as pool:
            return list(pool.map(_run_and_trace, jobs))
    return [_run_and_trace(job) for job in jobs]


# -- rendering ---------------------------------------------------------------

ROW_FIELDS = ("problem", "x0", "rule", "update", "repetitions", "grad_tol", "max_iters",
              "c1", "r", "iterations", "mean_wall_time_seconds", "termination",
              "total_f_evals", "total_g_evals", "error")


def row_to_dict(row: BenchmarkRow) -> dict:
    d = asdict(row.case)
    d["x0"] = list(row.case.x0)
    d.update({k: v for k, v in asdict(row).items() if k != "case"})
    return {k: d[k] for k in ROW_FIELDS}


def row_from_dict(d: dict) -> BenchmarkRow:
    case = BenchmarkCase(d["problem"], tuple(d["x0"]), d["rule"], d["update"],
                         int(d["repetitions"]), float(d["grad_tol"]), int(d["max_iters"]),
                         float(d["c1"]) if d["c1"] not in (None, "") else None)
    return BenchmarkRow(case, float(d["r"]), int(d["iterations"]),
                        float(d["mean_wall_time_seconds"]), d["termination"],
                        int(d["total_f_evals"]), int(d["total_g_evals"]), d["error"] or None)


def _fmt_x0(x0) -> str:
    return "(" + ",".join(f"{v:g}" for v in x0) + ")"


def _pivot(rows):
    """Group rows by (problem, update) then x0, keyed by rule.

    Raises ValueError if some initial guess lacks a rule that other guesses
    of the same group have.
    """
    groups = {}
    for row in rows:
        key = (row.case.problem, row.case.update)
        groups.setdefault(key, {}).setdefault(row.case.x0, {})[row.case.rule] = row
    out = []
    for (pid, update), by_x0 in groups.items():
        rules = [r for r in TABLE_RULES if any(r in cell for cell in by_x0.values())]
        for x0, cell in by_x0.items():
            missing = [r for r in rules if r not in cell]
            if missing:
                raise ValueError(f"case grid hole: {pid}/{update} x0={_fmt_x0(x0)} "
                                 f"has no row for rule(s) {', '.join(missing)}")
        out.append((pid, update, rules, by_x0))
    return out


def _markdown(rows) -> str:
    blocks = []
    for pid, update, rules, by_x0 in _pivot(rows):
        name = make_problem(pid).name
        names = [r.capitalize() for r in rules]
        lines = [f"### {name} ({update.upper()}): iteration counter", "",
                 "| initial guess | value of r | "
                 + " | ".join(f"Iteration in {n}" for n in names) + " |",
                 "|---" * (2 + len(rules)) + "|"]
        for x0, cell in by_x0.items():
            r = next(iter(cell.values())).r
            counts = []
            for rule in rules:
                row = cell[rule]
                flag = "" if row.termination == "converged" else f" ({row.termination})"
                counts.append(f"{row.iterations}{flag}")
            lines.append(f"| {_fmt_x0(x0)} | {r:.3f} | " + " | ".join(counts) + " |")
        lines += ["", f"### {name} ({update.upper()}): average time in seconds", "",
                  "| initial guess | value of r | "
                  + " | ".join(f"(Avg Time) {n}" for n in names) + " |",
                  "|---" * (2 + len(rules)) + "|"]
        for x0, cell in by_x0.items():
            r = next(iter(cell.values())).r
            times = [f"{cell[rule].mean_wall_time_seconds:.7f}" for rule in rules]
            lines.append(f"| {_fmt_x0(x0)} | {r:.3f} | " + " | ".join(times) + " |")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def _csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ROW_FIELDS)
    for row in rows:
        d = row_to_dict(row)
        d["x0"] = ",".join(repr(v) for v in d["x0"])
        d["error"] = d["error"] or ""
        d["c1"] = "" if d["c1"] is None else d["c1"]
        writer.writerow([repr(v) if isinstance(v, float) else v for v in d.values()])
    return buf.getvalue()


def parse_csv(text: str) -> List[BenchmarkRow]:
    rows = []
    for d in csv.DictReader(io.StringIO(text)):
        d["x0"] = [float(v) for v in d["x0"].split(",")]
        rows.append(row_from_dict(d))
    return rows


def _jsonl(rows) -> str:
    return "".join(json.dumps(row_to_dict(row)) + "\n" for row in rows)


def parse_jsonl(text: str) -> List[BenchmarkRow]:
    return [row_from_dict(json.loads(line)) for line in text.splitlines() if line.strip()]


def emit_table(rows: Sequence[BenchmarkRow], format: str = "markdown") -> str:
    """Render rows as a markdown table pair per problem, flat csv, or json lines."""
    if not rows:
        raise ValueError("no rows to render")
    format = _FORMAT_ALIASES.get(format, format)
    if format == "markdown":
        return _markdown(rows)
    if format == "csv":
        return _csv(rows)
    if format == "jsonl":
        return _jsonl(rows)
    raise ValueError(f"unknown format {format!r}")


TRACE_FIELDS = ("iter", "f", "grad_norm", "step", "backtracks", "C", "update_applied",
                "fallback", "f_evals", "g_evals")


def emit_trace(result: SolverResult, path) -> Path:
    """Write a per-iteration CSV trace; ``f_evals``/``g_evals`` are cumulative."""
    if not result.trace:
        raise ValueError("result has no trace; run with record_trace=True")
    path = Path(path)
    n = result.trace[0].x.size
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_FIELDS + tuple(f"x{i + 1}" for i in range(n)))
        fe = ge = 0
        for rec in result.trace:
            fe += rec.f_evals
            ge += rec.g_evals
            writer.writerow([rec.k, repr(rec.f), repr(rec.grad_norm), repr(rec.step),
                             rec.backtracks, repr(rec.C), rec.update_applied, rec.fallback,
                             fe, ge] + [repr(float(v)) for v in rec.x])
    return path


def read_trace(path) -> List[dict]:
    """Parse a trace file written by :func:`emit_trace`."""
    out = []
    with Path(path).open() as fh:
        for d in csv.DictReader(fh):
            rec = {"iter": int(d["iter"]), "update_applied": d["update_applied"],
                   "fallback": d["fallback"], "backtracks": int(d["backtracks"]),
                   "f_evals": int(d["f_evals"]), "g_evals": int(d["g_evals"])}
            for k in ("f", "grad_norm", "step", "C"):
                rec[k] = float(d[k])
            rec["x"] = [float(v) for k, v in d.items() if k.startswith("x")]
            out.append(rec)
    return out
