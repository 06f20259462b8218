"""Stand-alone proof script verifier.

Replays a tactic sequence from the initial task and reports whether it
closes every obligation.  This is a deliberate re-implementation of the
replay semantics — it shares only the formula AST with the engine in
:mod:`.env`, so search bookkeeping bugs cannot vouch for themselves.
"""

from __future__ import annotations

from dataclasses import dataclass

from .formulas import And, Formula, Imp, Or, ParseError, parse_formula


@dataclass
class _Frame:
    hyps: dict[str, Formula]
    target: Formula
    bind: tuple[str, Formula] | None


def _parse(text: str) -> tuple[str, str | None, Formula | None] | None:
    words = text.split()
    if not words:
        return None
    head = words[0]
    if head in ("split", "left", "right") and len(words) == 1:
        return head, None, None
    if head in ("exact", "intro", "apply", "cases") and len(words) == 2:
        label = words[1]
        if label.isidentifier() and not label[0].isupper():
            return head, label, None
    if head == "have":
        rest = text.split(None, 1)[1] if len(words) > 1 else ""
        label, sep, formula_text = rest.partition(":")
        label = label.strip()
        if not sep or not label.isidentifier() or label[0].isupper():
            return None
        try:
            return head, label, parse_formula(formula_text)
        except ParseError:
            return None
    return None


def _fresh(base: str, used: set[str]) -> str:
    if base not in used:
        return base
    i = 1
    while f"{base}{i}" in used:
        i += 1
    return f"{base}{i}"


def _step(frames: list[_Frame], text: str) -> bool:
    """Apply one tactic to the last frame in place; False if invalid."""
    parsed = _parse(text)
    if parsed is None or not frames:
        return False
    kind, label, formula = parsed
    frame = frames[-1]

    if kind == "exact":
        if frame.hyps.get(label) != frame.target:
            return False
        frames.pop()
        if frame.bind is not None and frames:
            name, proved = frame.bind
            if name in frames[-1].hyps:
                return False
            frames[-1].hyps[name] = proved
        return True

    if kind == "intro":
        if not isinstance(frame.target, Imp) or label in frame.hyps:
            return False
        frame.hyps[label] = frame.target.left
        frame.target = frame.target.right
        return True

    if kind == "apply":
        hyp = frame.hyps.get(label)
        if not isinstance(hyp, Imp) or hyp.right != frame.target:
            return False
        frame.target = hyp.left
        return True

    if kind == "split":
        if not isinstance(frame.target, And):
            return False
        first, second = frame.target.left, frame.target.right
        frame.target = second
        frames.append(_Frame(dict(frame.hyps), first, None))
        return True

    if kind in ("left", "right"):
        if not isinstance(frame.target, Or):
            return False
        frame.target = frame.target.left if kind == "left" else frame.target.right
        return True

    if kind == "cases":
        hyp = frame.hyps.get(label)
        if isinstance(hyp, And):
            used = set(frame.hyps) - {label}
            del frame.hyps[label]
            l1 = _fresh(label + "1", used)
            frame.hyps[l1] = hyp.left
            frame.hyps[_fresh(label + "2", used | {l1})] = hyp.right
            return True
        if isinstance(hyp, Or):
            second = dict(frame.hyps)
            second[label] = hyp.right
            first = dict(frame.hyps)
            first[label] = hyp.left
            frame.hyps = second
            frames.append(_Frame(first, frame.target, None))
            return True
        return False

    if kind == "have":
        if label in frame.hyps:
            return False
        frames.append(_Frame(dict(frame.hyps), formula, (label, formula)))
        return True

    return False


def initial_frames(task) -> list[_Frame]:
    return [_Frame(dict(task.hypotheses), task.target, None)]


def check_proof(task, actions) -> bool:
    """True iff every tactic is valid in turn and no obligation remains."""
    frames = initial_frames(task)
    for text in actions:
        if not frames or not _step(frames, text):
            return False
    return not frames
