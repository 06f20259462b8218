"""Benchmark harness: budgeted runs, pass@k accounting, report files.

A run executes every corpus task under a per-repetition policy-sample
budget, verifies each claimed proof with the independent checker, and
writes a deterministic report (JSON record plus a text table), per-task
trace logs, and optional figures.  Volatile run metadata (wall time,
versions) lives in a separate ``meta.json`` so the report and traces are
byte-identical across runs with identical seeds and local backends.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from .mcts import Outcome, SearchConfig, search
from .policies import PolicySpec
from .propcalc import CorpusError, PropCalcEnv, Task, check_proof, read_corpus
from .propcalc.corpus import task_from_record, task_to_record


class BackendError(RuntimeError):
    """A policy backend failed for a whole task."""


class CorpusMismatchError(ValueError):
    """Two reports cover different task sets and cannot be compared."""


@dataclass(frozen=True)
class RunConfig:
    corpus_path: str | Path = ""
    search: SearchConfig = field(default_factory=SearchConfig)
    policy: PolicySpec = field(default_factory=PolicySpec)
    sample_budget: int = 512
    repetitions: int = 1
    workers: int | None = None  # None: one per CPU
    output_dir: str | Path | None = None
    seed: int = 0
    dedup_goals: bool = True
    figures: bool = True

    def __post_init__(self) -> None:
        if self.sample_budget < 1:
            raise ValueError("sample_budget must be at least 1")
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")


@dataclass
class TaskResult:
    task_id: str
    outcome: str  # Proved | BudgetExhausted | Errored
    iterations: int
    samples_used: int
    proof_length: int | None
    distinct_correct_proofs: int
    proofs: list[list[str]] = field(default_factory=list)
    oracle_depth: int | None = None
    error: str | None = None
    trace_lines: list[str] = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "task_id": self.task_id,
            "outcome": self.outcome,
            "iterations": self.iterations,
            "samples_used": self.samples_used,
            "proof_length": self.proof_length,
            "distinct_correct_proofs": self.distinct_correct_proofs,
        }


@dataclass
class BenchReport:
    results: list[TaskResult]
    solved_count: int
    total_count: int
    pass_at_k: str
    sample_budget: int
    wall_time: float = 0.0

    def to_record(self) -> dict:
        """Deterministic report body; wall time is kept out on purpose."""
        return {
            "aggregate": {
                "solved_count": self.solved_count,
                "total_count": self.total_count,
                "pass_at_k": self.pass_at_k,
                "sample_budget": self.sample_budget,
            },
            "tasks": [r.to_record() for r in self.results],
        }


def pass_at_k_string(solved: int, total: int) -> str:
    return f"{solved}/{total}"


def derive_seed(global_seed: int, task_id: str, repetition: int) -> int:
    """Stable 63-bit per-(task, repetition) seed."""
    digest = hashlib.sha256(f"{global_seed}:{task_id}:{repetition}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def normalize_proof(actions: Sequence[str]) -> tuple[str, ...]:
    return tuple(" ".join(a.split()) for a in actions)


def count_distinct_proofs(task: Task, sequences: Iterable[Sequence[str]]) -> int:
    """Number of distinct checker-verified scripts (whitespace-normalised)."""
    distinct: set[tuple[str, ...]] = set()
    for actions in sequences:
        normalized = normalize_proof(actions)
        if normalized in distinct:
            continue
        if check_proof(task, list(normalized)):
            distinct.add(normalized)
    return len(distinct)


def run_task(task: Task, config: RunConfig) -> TaskResult:
    """All repetitions of one task under the per-repetition sample budget."""
    env = PropCalcEnv(dedup_goals=config.dedup_goals)
    try:
        policy = config.policy.build(env)
    except Exception as exc:
        return TaskResult(
            task_id=task.id, outcome="Errored", iterations=0, samples_used=0,
            proof_length=None, distinct_correct_proofs=0,
            oracle_depth=task.oracle_depth, error=f"backend: {exc}",
        )

    proofs: list[list[str]] = []
    trace_lines: list[str] = []
    first_proof: list[str] | None = None
    solve_samples: int | None = None
    max_samples = 0
    iterations = 0
    error: str | None = None
    for repetition in range(config.repetitions):
        seed = derive_seed(config.seed, task.id, repetition)
        search_config = replace(config.search, seed=seed)
        try:
            result = search(
                task, policy, env, search_config, sample_budget=config.sample_budget
            )
        except Exception as exc:
            error = f"search: {exc}"
            break
        for record in result.trace:
            line = {"task_id": task.id, "rep": repetition, **record}
            trace_lines.append(json.dumps(line, ensure_ascii=False, separators=(",", ":")))
        max_samples = max(max_samples, result.policy_samples_used)
        iterations = max(iterations, result.iterations_used)
        if result.outcome is Outcome.PROVED:
            proofs.append(result.proof)
            if first_proof is None:
                first_proof = result.proof
                solve_samples = result.policy_samples_used

    if error is not None:
        return TaskResult(
            task_id=task.id, outcome="Errored", iterations=iterations,
            samples_used=max_samples, proof_length=None, distinct_correct_proofs=0,
            oracle_depth=task.oracle_depth, error=error, trace_lines=trace_lines,
        )

    # verification gate: no proof enters the report unless the independent
    # checker accepts it again here
    for proof in proofs:
        if not check_proof(task, proof):
            raise RuntimeError(f"verification gate failed for task {task.id}: {proof}")

    proved = first_proof is not None
    return TaskResult(
        task_id=task.id,
        outcome="Proved" if proved else "BudgetExhausted",
        iterations=iterations,
        samples_used=solve_samples if proved else max_samples,
        proof_length=len(first_proof) if proved else None,
        distinct_correct_proofs=count_distinct_proofs(task, proofs),
        proofs=proofs,
        oracle_depth=task.oracle_depth,
        trace_lines=trace_lines,
    )


def _run_task_record(args: tuple[dict, RunConfig]) -> TaskResult:
    record, config = args
    return run_task(task_from_record(record), config)


def run_benchmark(config: RunConfig, tasks: list[Task] | None = None) -> BenchReport:
    """Run every task, aggregate pass@k, and write report artifacts."""
    started = time.monotonic()
    if tasks is None:
        tasks = read_corpus(config.corpus_path)

    workers = config.workers if config.workers is not None else (os.cpu_count() or 1)
    if workers <= 1 or len(tasks) <= 1:
        results = [run_task(task, config) for task in tasks]
    else:
        payload = [(task_to_record(task), config) for task in tasks]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_task_record, payload))

    solved = sum(1 for r in results if r.outcome == "Proved")
    report = BenchReport(
        results=results,
        solved_count=solved,
        total_count=len(results),
        pass_at_k=pass_at_k_string(solved, len(results)),
        sample_budget=config.sample_budget,
        wall_time=time.monotonic() - started,
    )
    if config.output_dir is not None:
        write_report(report, config)
    return report


def write_report(report: BenchReport, config: RunConfig) -> Path:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(
        json.dumps(report.to_record(), ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
    (out / "report.txt").write_text(render_table(report), encoding="utf-8")
    (out / "meta.json").write_text(
        json.dumps({"wall_time_seconds": report.wall_time}, indent=2) + "\n",
        encoding="utf-8",
    )
    traces = out / "traces"
    traces.mkdir(exist_ok=True)
    for result in report.results:
        path = traces / f"{result.task_id}.jsonl"
        path.write_text(
            "".join(line + "\n" for line in result.trace_lines), encoding="utf-8"
        )
    if config.figures:
        from . import figures

        figures.render_run_figures(report, out / "figures")
    return out / "report.json"


def render_table(report: BenchReport) -> str:
    headers = ("task", "outcome", "iters", "samples", "proof_len", "distinct")
    rows = [
        (
            r.task_id,
            r.outcome,
            str(r.iterations),
            str(r.samples_used),
            "-" if r.proof_length is None else str(r.proof_length),
            str(r.distinct_correct_proofs),
        )
        for r in report.results
    ]
    widths = [
        max(len(headers[i]), *(len(row[i]) for row in rows)) if rows else len(headers[i])
        for i in range(len(headers))
    ]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)),
        "  ".join("-" * w for w in widths),
    ]
    lines.extend(
        "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)) for row in rows
    )
    lines.append("")
    lines.append(
        f"solved {report.pass_at_k} at pass@{report.sample_budget}"
    )
    return "\n".join(lines) + "\n"


@dataclass
class CompareSummary:
    solved_a: int
    solved_b: int
    total: int
    delta: int
    only_a: list[str]
    only_b: list[str]
    per_task: list[dict]

    def to_record(self) -> dict:
        return {
            "solved_a": self.solved_a,
            "solved_b": self.solved_b,
            "total": self.total,
            "delta": self.delta,
            "delta_rendered": f"{self.delta:+d}",
            "only_a": self.only_a,
            "only_b": self.only_b,
            "per_task": self.per_task,
        }


def compare_runs(report_a: dict | BenchReport, report_b: dict | BenchReport) -> CompareSummary:
    """Per-task solved/unsolved diff of two runs over the same corpus."""
    a = report_a.to_record() if isinstance(report_a, BenchReport) else report_a
    b = report_b.to_record() if isinstance(report_b, BenchReport) else report_b
    tasks_a = {t["task_id"]: t for t in a["tasks"]}
    tasks_b = {t["task_id"]: t for t in b["tasks"]}
    if set(tasks_a) != set(tasks_b):
        raise CorpusMismatchError("reports cover different task sets")
    per_task = []
    only_a: list[str] = []
    only_b: list[str] = []
    for task_id in tasks_a:
        pa = tasks_a[task_id]["outcome"] == "Proved"
        pb = tasks_b[task_id]["outcome"] == "Proved"
        if pa != pb:
            (only_a if pa else only_b).append(task_id)
            per_task.append({"task_id": task_id, "a": pa, "b": pb})
    solved_a = sum(1 for t in tasks_a.values() if t["outcome"] == "Proved")
    solved_b = sum(1 for t in tasks_b.values() if t["outcome"] == "Proved")
    only_a.sort()
    only_b.sort()
    per_task.sort(key=lambda entry: entry["task_id"])
    return CompareSummary(
        solved_a=solved_a,
        solved_b=solved_b,
        total=len(tasks_a),
        delta=solved_b - solved_a,
        only_a=only_a,
        only_b=only_b,
        per_task=per_task,
    )


def load_report(path: str | Path) -> dict:
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"report file not found: {path}")
    return json.loads(path.read_text(encoding="utf-8"))
