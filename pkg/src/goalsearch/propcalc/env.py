"""Natural-deduction proof environment over propositional formulas.

States hold labelled hypotheses and a stack of open sequents aligned
one-to-one with the goal stack.  Tactics are plain text::

    exact <label> | intro <label> | apply <label> | split | left | right
    | cases <label> | have <label> : <formula>

``have`` is the unique goal proposal; every other form is a primitive
candidate.  All values are immutable and every operation is pure.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

from ..core import ActionClass, Goal, GoalStack
from .formulas import (
    And,
    Atom,
    Formula,
    Imp,
    Not,
    Or,
    ParseError,
    atoms_of,
    format_formula,
    parse_formula,
    subformulas,
)


class InvalidTacticError(ValueError):
    """Tactic text does not denote a valid move in the current state."""


_LABEL_RE = re.compile(r"[a-z][a-z0-9_]*$")
_HAVE_RE = re.compile(r"have\s+([a-z][a-z0-9_]*)\s*:\s*(.+)$")

PRIMITIVE_KINDS = ("exact", "intro", "apply", "split", "left", "right", "cases")


@dataclass(frozen=True)
class Tactic:
    kind: str
    label: str | None = None
    formula: Formula | None = None

    def render(self) -> str:
        if self.kind == "have":
            return f"have {self.label} : {format_formula(self.formula)}"
        if self.label is not None:
            return f"{self.kind} {self.label}"
        return self.kind


def parse_tactic(text: str) -> Tactic | None:
    """Parse tactic text; returns None for anything malformed."""
    words = text.split()
    if not words:
        return None
    head = words[0]
    if head in ("split", "left", "right"):
        return Tactic(head) if len(words) == 1 else None
    if head in ("exact", "intro", "apply", "cases"):
        if len(words) == 2 and _LABEL_RE.fullmatch(words[1]):
            return Tactic(head, label=words[1])
        return None
    if head == "have":
        m = _HAVE_RE.fullmatch(" ".join(words))
        if not m:
            return None
        try:
            formula = parse_formula(m.group(2))
        except ParseError:
            return None
        return Tactic("have", label=m.group(1), formula=formula)
    return None


@dataclass(frozen=True)
class Sequent:
    """One open proof obligation.

    ``proposition`` is the obligation the slot was created for; the
    working ``target`` may drift below it as tactics decompose the goal.
    ``bind_label`` names the hypothesis granted to the sequent below
    once this slot closes (set for conjecture slots only).
    """

    goal: Goal
    hyps: tuple[tuple[str, Formula], ...]
    target: Formula
    proposition: Formula
    bind_label: str | None = None

    def labels(self) -> frozenset[str]:
        return frozenset(label for label, _ in self.hyps)

    def lookup(self, label: str) -> Formula | None:
        for name, f in self.hyps:
            if name == label:
                return f
        return None

    def render(self) -> str:
        hyps = ", ".join(f"{label}: {format_formula(f)}" for label, f in self.hyps)
        left = hyps + " " if hyps else ""
        return f"{left}⊢ {format_formula(self.target)}"


@dataclass(frozen=True)
class Task:
    """One theorem-proving problem, serialisable to a corpus record."""

    id: str
    hypotheses: tuple[tuple[str, Formula], ...]
    target: Formula
    oracle_depth: int | None = None

    def render(self) -> str:
        hyps = ", ".join(f"{label}: {format_formula(f)}" for label, f in self.hypotheses)
        left = hyps + " " if hyps else ""
        return f"{left}⊢ {format_formula(self.target)}"


@dataclass(frozen=True)
class ProofState:
    """Immutable proof context: ambient hypotheses, open sequents (last
    element is the top of the goal stack), the append-only history of
    accepted tactic texts, and the goals discharged so far."""

    hypotheses: tuple[tuple[str, Formula], ...]
    open_sequents: tuple[Sequent, ...]
    history: tuple[str, ...]
    solved: tuple[Goal, ...]
    next_serial: int
    alphabet: frozenset[str]

    @property
    def is_complete(self) -> bool:
        return not self.open_sequents

    def top(self) -> Sequent:
        if not self.open_sequents:
            raise InvalidTacticError("no open sequents")
        return self.open_sequents[-1]


def _fresh_label(base: str, used: frozenset[str]) -> str:
    if base not in used:
        return base
    i = 1
    while f"{base}{i}" in used:
        i += 1
    return f"{base}{i}"


def _applicable(seq: Sequent, tactic: Tactic) -> bool:
    """Whether a primitive tactic is valid on this sequent."""
    kind = tactic.kind
    if kind == "exact":
        return seq.lookup(tactic.label) == seq.target
    if kind == "intro":
        return isinstance(seq.target, Imp) and tactic.label not in seq.labels()
    if kind == "apply":
        f = seq.lookup(tactic.label)
        return isinstance(f, Imp) and f.right == seq.target
    if kind == "split":
        return isinstance(seq.target, And)
    if kind in ("left", "right"):
        return isinstance(seq.target, Or)
    if kind == "cases":
        return isinstance(seq.lookup(tactic.label), (And, Or))
    return False


def apply_tactic(state: ProofState, tactic: Tactic | str, dedup_goals: bool = True) -> ProofState:
    """Apply one tactic to the top sequent; raises InvalidTacticError.

    Semantics: ``exact h`` closes the top sequent when hypothesis ``h``
    matches the target (releasing any conjecture binding to the sequent
    below); ``intro h`` moves an implication antecedent into the
    hypotheses; ``apply h`` with ``h : X → Y`` and target ``Y`` leaves
    ``X`` to prove; ``split`` keeps the second conjunct in place and
    pushes the first as a new obligation; ``left``/``right`` pick a
    disjunct; ``cases h`` splits a disjunctive hypothesis into two
    branch obligations (second branch in place, first pushed) or
    unpacks a conjunctive one in place; ``have c : F`` pushes ``F`` as
    a new obligation that will bind ``c : F`` below once proven.
    """
    if isinstance(tactic, str):
        parsed = parse_tactic(tactic)
        if parsed is None:
            raise InvalidTacticError(f"malformed tactic: {tactic!r}")
        tactic = parsed
    if not state.open_sequents:
        raise InvalidTacticError("no open sequents")

    seq = state.open_sequents[-1]
    rest = state.open_sequents[:-1]
    kind = tactic.kind
    text = tactic.render()

    if kind == "have":
        _require_valid_proposal(state, tactic, dedup=dedup_goals)
        pushed = Sequent(
            goal=Goal(format_formula(tactic.formula)),
            hyps=seq.hyps,
            target=tactic.formula,
            proposition=tactic.formula,
            bind_label=tactic.label,
        )
        return replace(
            state,
            open_sequents=state.open_sequents + (pushed,),
            history=state.history + (text,),
        )

    if not _applicable(seq, tactic):
        raise InvalidTacticError(f"{text!r} is not valid on {seq.render()!r}")

    if kind == "exact":
        if seq.bind_label is not None and rest:
            below = rest[-1]
            below = replace(below, hyps=below.hyps + ((seq.bind_label, seq.proposition),))
            rest = rest[:-1] + (below,)
        return replace(
            state,
            open_sequents=rest,
            history=state.history + (text,),
            solved=state.solved + (seq.goal,),
        )

    if kind == "intro":
        seq2 = replace(
            seq, hyps=seq.hyps + ((tactic.label, seq.target.left),), target=seq.target.right
        )
        return replace(state, open_sequents=rest + (seq2,), history=state.history + (text,))

    if kind == "apply":
        hyp = seq.lookup(tactic.label)
        seq2 = replace(seq, target=hyp.left)
        return replace(state, open_sequents=rest + (seq2,), history=state.history + (text,))

    if kind == "split":
        first, second = seq.target.left, seq.target.right
        kept = replace(seq, target=second)
        pushed = Sequent(
            goal=Goal(format_formula(first), serial=state.next_serial),
            hyps=seq.hyps,
            target=first,
            proposition=first,
        )
        return replace(
            state,
            open_sequents=rest + (kept, pushed),
            history=state.history + (text,),
            next_serial=state.next_serial + 1,
        )

    if kind in ("left", "right"):
        picked = seq.target.left if kind == "left" else seq.target.right
        seq2 = replace(seq, target=picked)
        return replace(state, open_sequents=rest + (seq2,), history=state.history + (text,))

    # cases
    hyp = seq.lookup(tactic.label)
    if isinstance(hyp, And):
        used = seq.labels() - {tactic.label}
        l1 = _fresh_label(tactic.label + "1", used)
        l2 = _fresh_label(tactic.label + "2", used | {l1})
        hyps = tuple((n, f) for n, f in seq.hyps if n != tactic.label)
        seq2 = replace(seq, hyps=hyps + ((l1, hyp.left), (l2, hyp.right)))
        return replace(state, open_sequents=rest + (seq2,), history=state.history + (text,))
    # disjunction: second branch stays in the slot, first branch is pushed
    def branch_hyps(case: Formula) -> tuple[tuple[str, Formula], ...]:
        return tuple((n, case if n == tactic.label else g) for n, g in seq.hyps)

    kept = replace(seq, hyps=branch_hyps(hyp.right))
    pushed = Sequent(
        goal=Goal(format_formula(seq.target), serial=state.next_serial),
        hyps=branch_hyps(hyp.left),
        target=seq.target,
        proposition=seq.target,
    )
    return replace(
        state,
        open_sequents=rest + (kept, pushed),
        history=state.history + (text,),
        next_serial=state.next_serial + 1,
    )


def _require_valid_proposal(state: ProofState, tactic: Tactic, dedup: bool = True) -> None:
    seq = state.top()
    if tactic.label in seq.labels():
        raise InvalidTacticError(f"label {tactic.label!r} already bound")
    if not atoms_of(tactic.formula) <= state.alphabet:
        raise InvalidTacticError("conjecture uses atoms outside the task alphabet")
    if dedup:
        text = format_formula(tactic.formula)
        if any(s.goal.text == text for s in state.open_sequents):
            raise InvalidTacticError(f"conjecture {text!r} is already an open goal")


def replay(
    task: Task, history: tuple[str, ...] | list[str], env: "PropCalcEnv | None" = None
) -> ProofState:
    """Rebuild a state by replaying accepted tactics from the initial task."""
    env = env or PropCalcEnv()
    state, _ = env.initial_state(task)
    for text in history:
        state = apply_tactic(state, text, dedup_goals=env.dedup_goals)
    return state


class PropCalcEnv:
    """Environment adapter exposing the calculus to the goal-stack MDP.

    ``dedup_goals`` (default on) rejects conjecture proposals that are
    syntactically identical to an already-open goal.
    """

    def __init__(self, dedup_goals: bool = True):
        self.dedup_goals = dedup_goals

    # ------------------------------------------------------------- MDP surface

    def classify(self, state: ProofState, action: str) -> ActionClass:
        tactic = parse_tactic(action)
        if tactic is None or not state.open_sequents:
            return ActionClass.INVALID
        if tactic.kind == "have":
            try:
                _require_valid_proposal(state, tactic, dedup=self.dedup_goals)
            except InvalidTacticError:
                return ActionClass.INVALID
            return ActionClass.GOAL_PROPOSAL
        if _applicable(state.open_sequents[-1], tactic):
            return ActionClass.PRIMITIVE
        return ActionClass.INVALID

    def to_goal(self, action: str) -> Goal:
        tactic = parse_tactic(action)
        if tactic is None or tactic.kind != "have":
            raise ValueError(f"not a goal proposal: {action!r}")
        return Goal(format_formula(tactic.formula))

    def apply(self, state: ProofState, action: str, goal: Goal) -> ProofState:
        if state.open_sequents and state.open_sequents[-1].goal != goal:
            raise InvalidTacticError("tactics act on the top goal only")
        return apply_tactic(state, action, dedup_goals=self.dedup_goals)

    def solves(self, state: ProofState, action: str, goal: Goal) -> bool:
        tactic = parse_tactic(action)
        if tactic is None or tactic.kind != "exact" or not state.open_sequents:
            return False
        return _applicable(state.open_sequents[-1], tactic)

    def goal_solved(self, state: ProofState, goal: Goal) -> bool:
        """Discharged goals count as solved; an open goal counts once its
        obligation is immediately closable (target among the hypotheses)."""
        for seq in reversed(state.open_sequents):
            if seq.goal == goal:
                return any(f == seq.target for _, f in seq.hyps)
        return goal in state.solved

    def open_goals(self, state: ProofState) -> tuple[Goal, ...]:
        return tuple(seq.goal for seq in state.open_sequents)

    def initial_state(self, task: Task) -> tuple[ProofState, GoalStack]:
        alphabet = set(atoms_of(task.target))
        for _, f in task.hypotheses:
            alphabet |= atoms_of(f)
        root = Goal(format_formula(task.target), serial=0)
        sequent = Sequent(
            goal=root, hyps=task.hypotheses, target=task.target, proposition=task.target
        )
        state = ProofState(
            hypotheses=task.hypotheses,
            open_sequents=(sequent,),
            history=(),
            solved=(),
            next_serial=1,
            alphabet=frozenset(alphabet),
        )
        return state, GoalStack((root,))

    def check_proof(self, task: Task, actions) -> bool:
        from . import checker

        return checker.check_proof(task, actions)

    def render_state(self, state: ProofState) -> str:
        sequents = "; ".join(s.render() for s in state.open_sequents)
        goals = ", ".join(s.goal.render() for s in state.open_sequents)
        solved = ", ".join(g.render() for g in state.solved)
        history = "; ".join(state.history)
        return f"sequents[{sequents}] goals[{goals}] solved[{solved}] history[{history}]"

    # -------------------------------------------------- local policy support

    def applicable_actions(self, state: ProofState) -> list[str]:
        """Every valid action in canonical order: exacts, intro, applies,
        split, left, right, cases (labels sorted), then conjecture
        proposals drawn from the target (capped at 8)."""
        if not state.open_sequents:
            return []
        seq = state.open_sequents[-1]
        labels = sorted(seq.labels())
        out: list[str] = []
        for label in labels:
            if seq.lookup(label) == seq.target:
                out.append(f"exact {label}")
        if isinstance(seq.target, Imp):
            out.append(f"intro {_fresh_label('h', seq.labels())}")
        for label in labels:
            f = seq.lookup(label)
            if isinstance(f, Imp) and f.right == seq.target:
                out.append(f"apply {label}")
        if isinstance(seq.target, And):
            out.append("split")
        if isinstance(seq.target, Or):
            out.append("left")
            out.append("right")
        for label in labels:
            if isinstance(seq.lookup(label), (And, Or)):
                out.append(f"cases {label}")
        out.extend(self._proposals(state, seq))
        return out

    def _proposals(self, state: ProofState, seq: Sequent) -> list[str]:
        candidates: list[Formula] = []
        seen: set[str] = set()
        for sub in subformulas(seq.target)[1:]:
            text = format_formula(sub)
            if text not in seen:
                seen.add(text)
                candidates.append(sub)
        if isinstance(seq.target, (And, Or)):
            swapped = type(seq.target)(seq.target.right, seq.target.left)
            text = format_formula(swapped)
            if text not in seen:
                seen.add(text)
                candidates.append(swapped)
        label = _fresh_label("c", seq.labels())
        out = []
        for f in candidates[:8]:
            action = f"have {label} : {format_formula(f)}"
            if self.classify(state, action) is ActionClass.GOAL_PROPOSAL:
                out.append(action)
        return out
