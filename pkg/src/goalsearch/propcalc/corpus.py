"""Task corpora: record format, stratified generation, curated families.

Corpus files are line-delimited JSON records::

    {"id": ..., "hypotheses": ["h: (A ∧ B)", ...], "target": "(B ∧ A)",
     "oracle_depth": 4}

Every generated task ships with an oracle certificate: its recorded
depth is the measured length of a shortest primitive-only proof.
"""

from __future__ import annotations

import json
import random
from pathlib import Path
from typing import Iterable

from .env import Task
from .formulas import And, Atom, Formula, Imp, Not, Or, format_formula, parse_formula
from .oracle import oracle_solve


class CorpusError(ValueError):
    """Corpus file missing, malformed, or unsatisfiable generation profile."""


# ---------------------------------------------------------------- records


def task_to_record(task: Task) -> dict:
    return {
        "id": task.id,
        "hypotheses": [f"{label}: {format_formula(f)}" for label, f in task.hypotheses],
        "target": format_formula(task.target),
        "oracle_depth": task.oracle_depth,
    }


def task_from_record(record: dict) -> Task:
    try:
        hyps = []
        for entry in record["hypotheses"]:
            label, _, text = entry.partition(":")
            hyps.append((label.strip(), parse_formula(text)))
        return Task(
            id=str(record["id"]),
            hypotheses=tuple(hyps),
            target=parse_formula(record["target"]),
            oracle_depth=record.get("oracle_depth"),
        )
    except Exception as exc:
        raise CorpusError(f"bad task record {record!r}: {exc}") from exc


def write_corpus(tasks: Iterable[Task], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for task in tasks:
            fh.write(json.dumps(task_to_record(task), ensure_ascii=False) + "\n")


def read_corpus(path: str | Path) -> list[Task]:
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"corpus file not found: {path}")
    tasks = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{line_no}: not a JSON record") from exc
            tasks.append(task_from_record(record))
    return tasks


# ---------------------------------------------------------------- templates

_LABELS = ("h", "k", "p", "q", "r", "s")


def _atoms(rng: random.Random, n: int) -> list[Formula]:
    names = rng.sample("ABCDEFGHIJKLMNOPQRSTUVWXYZ", n)
    return [Atom(name) for name in names]


def _small_formula(rng: random.Random, atoms: list[Formula], depth: int) -> Formula:
    if depth <= 0 or rng.random() < 0.4:
        return rng.choice(atoms)
    kind = rng.choice((And, Or, Imp, Not))
    if kind is Not:
        return Not(_small_formula(rng, atoms, depth - 1))
    return kind(
        _small_formula(rng, atoms, depth - 1), _small_formula(rng, atoms, depth - 1)
    )


def _template_pool(rng: random.Random) -> list[tuple[tuple[tuple[str, Formula], ...], Formula]]:
    """A batch of candidate tasks; depths are measured, not assumed."""
    a, b, c, d = _atoms(rng, 4)
    h, k = rng.sample(_LABELS, 2)
    f = _small_formula(rng, [a, b], 2)
    pool = [
        # direct hits and short eliminations
        (((h, f),), f),
        ((), Imp(f, f)),
        (((h, a),), Or(a, b)),
        (((h, And(a, b)),), a),
        (((h, And(a, b)),), And(b, a)),
        (((h, a), (k, Imp(a, b))), b),
        ((), Imp(a, Imp(b, a))),
        ((), Imp(And(a, b), And(b, a))),
        (((h, a),), And(a, a)),
        (((h, Or(a, a)),), a),
        (((h, Or(a, b)), (k, Imp(b, a))), a),
        ((), Imp(Imp(a, b), Imp(a, b))),
        (((h, And(And(a, b), c)),), And(a, And(b, c))),
        ((), Imp(a, Imp(b, And(a, b)))),
        (((h, Not(a)),), Or(b, Not(a))),
    ]
    # implication chains of assorted length
    for n in (1, 2, 3, 4, 5):
        atoms = _atoms(rng, n + 1)
        hyps = [(_LABELS[0], atoms[0])]
        for i in range(n):
            hyps.append((f"f{i + 1}", Imp(atoms[i], atoms[i + 1])))
        pool.append((tuple(hyps), atoms[n]))
    # chain ending in a duplicated conjunction
    atoms = _atoms(rng, 3)
    hyps = [(_LABELS[0], atoms[0])]
    for i in range(2):
        hyps.append((f"f{i + 1}", Imp(atoms[i], atoms[i + 1])))
    pool.append((tuple(hyps), And(atoms[2], atoms[2])))
    rng.shuffle(pool)
    return pool


def generate_corpus(
    seed: int,
    count: int,
    min_depth: int = 1,
    max_depth: int = 6,
    counts: dict[int, int] | None = None,
    max_attempts_factor: int = 400,
) -> list[Task]:
    """Sample ``count`` oracle-certified tasks stratified by proof depth.

    ``counts`` fixes the number of tasks per depth; otherwise ``count``
    is spread as evenly as possible over ``min_depth..max_depth``.
    Deterministic per seed.
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    if counts is None:
        depths = list(range(min_depth, max_depth + 1))
        base, extra = divmod(count, len(depths))
        counts = {d: base + (1 if i < extra else 0) for i, d in enumerate(depths)}
    else:
        counts = dict(counts)
        count = sum(counts.values())

    rng = random.Random(seed)
    bound = min(max(counts, default=1) + 1, 8)
    need = {d: n for d, n in counts.items() if n > 0}
    tasks: list[Task] = []
    seen: set[str] = set()
    attempts = 0
    max_attempts = max(1, count) * max_attempts_factor
    while need and attempts < max_attempts:
        for hyps, target in _template_pool(rng):
            attempts += 1
            if not need:
                break
            fingerprint = Task("", hyps, target).render()
            if fingerprint in seen:
                continue
            proof = oracle_solve(Task("probe", hyps, target), bound)
            if proof is None:
                continue
            depth = len(proof)
            if need.get(depth, 0) <= 0:
                continue
            seen.add(fingerprint)
            need[depth] -= 1
            if need[depth] == 0:
                del need[depth]
            tasks.append(
                Task(f"t{len(tasks):03d}", hyps, target, oracle_depth=depth)
            )
    if need:
        raise CorpusError(f"could not fill difficulty profile, still need {need}")
    tasks.sort(key=lambda t: (t.oracle_depth, t.id))
    return [
        Task(f"t{i:03d}", t.hypotheses, t.target, t.oracle_depth)
        for i, t in enumerate(tasks)
    ]


def generate_conjecture_gap_tasks(seed: int, count: int = 20) -> list[Task]:
    """Tasks where one good conjecture splits a long proof into short halves.

    Each task is a two-step implication chain feeding a duplicated
    conjunction: the shortest primitive-only proof has 7 steps (> 5),
    while conjecturing the chain's endpoint leaves two pieces of at
    most 3 steps each.  Certified by the oracle at generation time.
    """
    rng = random.Random(seed)
    tasks: list[Task] = []
    seen: set[str] = set()
    while len(tasks) < count:
        a, b, c, spare = _atoms(rng, 4)
        base, l1, l2 = rng.sample(_LABELS, 3)
        hyps: list[tuple[str, Formula]] = [
            (base, a),
            (l1, Imp(a, b)),
            (l2, Imp(b, c)),
        ]
        if rng.random() < 0.5:
            hyps.append((f"{base}x", _small_formula(rng, [spare], 1)))
        rng.shuffle(hyps)
        target = And(c, c)
        task = Task(f"g{len(tasks):03d}", tuple(hyps), target)
        if task.render() in seen:
            continue
        direct = oracle_solve(task, 8)
        if direct is None or len(direct) <= 5:
            continue
        # certify both pieces of the decomposition at depth <= 3
        piece = oracle_solve(Task("probe", task.hypotheses, c), 3)
        remainder = oracle_solve(
            Task("probe", task.hypotheses + (("c", c),), target), 3
        )
        if piece is None or remainder is None:
            continue
        seen.add(task.render())
        tasks.append(
            Task(task.id, task.hypotheses, task.target, oracle_depth=len(direct))
        )
    return tasks
