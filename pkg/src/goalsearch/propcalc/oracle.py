"""Exhaustive breadth-first prover used as ground truth.

Searches over primitive tactics only (no conjecture proposals) up to a
depth bound, returning a shortest proof script or ``None``.  Built on
the checker's replay semantics so that corpus certificates come from a
code path independent of the search engine.
"""

from __future__ import annotations

from collections import deque

from .checker import _Frame, _step, initial_frames
from .formulas import And, Imp, Or, format_formula

MAX_DEPTH_BOUND = 8  # tractability guard


class OracleBudgetError(RuntimeError):
    """Requested depth bound exceeds the tractability guard."""


def applicable_moves(frames: list[_Frame]) -> list[str]:
    """All primitive tactic texts valid on the top frame, canonical order."""
    if not frames:
        return []
    frame = frames[-1]
    labels = sorted(frame.hyps)
    out: list[str] = []
    for label in labels:
        if frame.hyps[label] == frame.target:
            out.append(f"exact {label}")
    if isinstance(frame.target, Imp):
        base, i = "h", 1
        fresh = base
        while fresh in frame.hyps:
            fresh = f"{base}{i}"
            i += 1
        out.append(f"intro {fresh}")
    for label in labels:
        hyp = frame.hyps[label]
        if isinstance(hyp, Imp) and hyp.right == frame.target:
            out.append(f"apply {label}")
    if isinstance(frame.target, And):
        out.append("split")
    if isinstance(frame.target, Or):
        out.append("left")
        out.append("right")
    for label in labels:
        if isinstance(frame.hyps[label], (And, Or)):
            out.append(f"cases {label}")
    return out


def _copy(frames: list[_Frame]) -> list[_Frame]:
    return [_Frame(dict(f.hyps), f.target, f.bind) for f in frames]


def _key(frames: list[_Frame]) -> tuple:
    # Labels are irrelevant to provability; key on formula sets per frame.
    return tuple(
        (frozenset(format_formula(f) for f in frame.hyps.values()), format_formula(frame.target))
        for frame in frames
    )


def oracle_solve(task, depth_bound: int) -> list[str] | None:
    """Shortest primitive-only proof of ``task`` within ``depth_bound`` steps.

    Breadth-first, so the returned script has minimal length; ``None``
    means no proof exists within the bound.
    """
    if depth_bound > MAX_DEPTH_BOUND:
        raise OracleBudgetError(
            f"depth bound {depth_bound} exceeds tractability guard {MAX_DEPTH_BOUND}"
        )
    start = initial_frames(task)
    queue: deque[tuple[list[_Frame], tuple[str, ...]]] = deque([(start, ())])
    seen = {_key(start)}
    while queue:
        frames, script = queue.popleft()
        if len(script) >= depth_bound:
            continue
        for move in applicable_moves(frames):
            nxt = _copy(frames)
            if not _step(nxt, move):
                continue
            if not nxt:
                return list(script) + [move]
            key = _key(nxt)
            if key in seen:
                continue
            seen.add(key)
            queue.append((nxt, script + (move,)))
    return None
