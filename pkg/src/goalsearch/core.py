"""Goal-stack MDP primitives.

Defines goal stacks, the three-way action classification, the four-case
transition rule over (state, goal stack) pairs, and the shaped reward,
all generic over an :class:`Environment` that owns state, action, and
goal semantics.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Protocol, Sequence, runtime_checkable

Action = str
"""Actions are plain text; the environment decides what the text means."""


class EmptyGoalStackError(RuntimeError):
    """A transition was attempted on a terminal (empty) goal stack."""


class EnvironmentContractError(RuntimeError):
    """The environment's goal alignment contradicts the transition rule."""


@dataclass(frozen=True)
class Goal:
    """Opaque goal identifier, owned by the environment.

    ``text`` is the obligation as originally proposed.  ``serial``
    disambiguates goals minted internally by the environment (``None``
    for goals derived directly from action text, so that converting the
    same proposal twice yields equal values).
    """

    text: str
    serial: int | None = None

    def render(self) -> str:
        return self.text if self.serial is None else f"{self.text}#{self.serial}"


@dataclass(frozen=True)
class GoalStack:
    """Ordered stack of open goals; the bottom element is the root goal.

    The stack is never empty until the root goal is solved; once the
    root is popped the episode is terminal.  Only the top element is
    ever consumed by policies and environment operations.
    """

    goals: tuple[Goal, ...]

    @property
    def is_empty(self) -> bool:
        return not self.goals

    def __len__(self) -> int:
        return len(self.goals)

    def top(self) -> Goal:
        if not self.goals:
            raise EmptyGoalStackError("goal stack is empty")
        return self.goals[-1]

    def bottom(self) -> Goal:
        if not self.goals:
            raise EmptyGoalStackError("goal stack is empty")
        return self.goals[0]

    def push(self, goal: Goal) -> "GoalStack":
        return GoalStack(self.goals + (goal,))

    def remove_last(self) -> "GoalStack":
        """Same stack minus its last element; other elements untouched."""
        if not self.goals:
            raise EmptyGoalStackError("goal stack is empty")
        return GoalStack(self.goals[:-1])

    def render(self) -> str:
        return "[" + ", ".join(g.render() for g in self.goals) + "]"


class ActionClass(Enum):
    """Mutually exclusive classification of a candidate action."""

    PRIMITIVE = "Primitive"
    GOAL_PROPOSAL = "GoalProposal"
    INVALID = "Invalid"


class CaseTag(Enum):
    """Which transition case fired; fixes the stack delta (0/+1/-1/0)."""

    NO_OP = "NoOp"
    GOAL_PUSHED = "GoalPushed"
    GOAL_SOLVED = "GoalSolved"
    PROGRESSED = "Progressed"


@dataclass(frozen=True)
class TransitionOutcome:
    next_state: Any
    next_goals: GoalStack
    case_tag: CaseTag
    solved_root: bool
    action_text: str


class EstimationRecipe(Enum):
    """How fresh search nodes are valued from verified outcomes."""

    ROOT_ONLY = "RootOnly"
    SOLVED_CONJECTURES = "SolvedConjectureCount"
    DEPTH_WEIGHTED = "DepthWeighted"
    COMBINED = "Combined"


@dataclass(frozen=True)
class RewardSpec:
    """Reward shaping knobs.

    ``subgoal_weight`` trades off credit for the root goal against credit
    for the current top-of-stack goal; ``discount`` applies only to
    trajectory returns, never inside tree backups.
    """

    subgoal_weight: float = 0.5
    discount: float = 1.0
    recipe: EstimationRecipe = EstimationRecipe.COMBINED
    conjecture_weight: float = 0.1
    depth_weight: float = 0.01

    def __post_init__(self) -> None:
        if self.subgoal_weight < 0:
            raise ValueError("subgoal_weight must be non-negative")
        if not (0.0 < self.discount <= 1.0):
            raise ValueError("discount must be in (0, 1]")
        for name in ("conjecture_weight", "depth_weight"):
            value = getattr(self, name)
            if not (value >= 0.0 and value == value and value not in (float("inf"),)):
                raise ValueError(f"{name} must be finite and non-negative")


@runtime_checkable
class Environment(Protocol):
    """Deterministic proof environment behind the goal-stack MDP.

    Implementations must be pure: identical inputs yield identical
    outputs.  All stochasticity lives in policies.
    """

    def classify(self, state: Any, action: Action) -> ActionClass: ...

    def to_goal(self, action: Action) -> Goal: ...

    def apply(self, state: Any, action: Action, goal: Goal) -> Any: ...

    def solves(self, state: Any, action: Action, goal: Goal) -> bool: ...

    def goal_solved(self, state: Any, goal: Goal) -> bool: ...

    def open_goals(self, state: Any) -> tuple[Goal, ...]: ...

    def initial_state(self, task: Any) -> tuple[Any, GoalStack]: ...

    def check_proof(self, task: Any, actions: Sequence[Action]) -> bool: ...

    def render_state(self, state: Any) -> str: ...


def classify_action(env: Environment, state: Any, action: Action) -> ActionClass:
    """Classify an action; environment failures map to Invalid."""
    try:
        return env.classify(state, action)
    except Exception:
        return ActionClass.INVALID


def step(env: Environment, state: Any, goals: GoalStack, action: Action) -> TransitionOutcome:
    """Apply one action to a (state, goal stack) pair.

    Exactly one of four cases fires:

    * Invalid action: nothing changes (``NoOp``).
    * Goal proposal: the proposed goal becomes the new top (``GoalPushed``);
      existing obligations are untouched.
    * Primitive that solves the top goal: the state advances and the top
      goal is popped (``GoalSolved``).
    * Primitive that merely progresses: the state advances and the stack
      is unchanged (``Progressed``) -- unless the environment reports one
      extra open goal, in which case the tactic forked the obligation and
      the transition is booked as a ``GoalPushed`` with the new goal on top.
    """
    if goals.is_empty:
        raise EmptyGoalStackError("episode is already terminal")

    cls = classify_action(env, state, action)
    if cls is ActionClass.INVALID:
        return TransitionOutcome(state, goals, CaseTag.NO_OP, False, action)

    top = goals.top()
    if cls is ActionClass.GOAL_PROPOSAL:
        next_state = env.apply(state, action, top)
        next_goals = goals.push(env.to_goal(action))
        _expect_alignment(env, next_state, next_goals)
        return TransitionOutcome(next_state, next_goals, CaseTag.GOAL_PUSHED, False, action)

    solved = env.solves(state, action, top)
    next_state = env.apply(state, action, top)
    aligned = env.open_goals(next_state)

    if solved:
        next_goals = goals.remove_last()
        _expect_alignment(env, next_state, next_goals)
        return TransitionOutcome(
            next_state, next_goals, CaseTag.GOAL_SOLVED, len(goals) == 1, action
        )

    if len(aligned) == len(goals) + 1 and aligned[:-1] == goals.goals:
        next_goals = goals.push(aligned[-1])
        return TransitionOutcome(next_state, next_goals, CaseTag.GOAL_PUSHED, False, action)

    if aligned != goals.goals:
        raise EnvironmentContractError(
            f"progressing action {action!r} changed the goal alignment: "
            f"{goals.render()} -> {GoalStack(aligned).render()}"
        )
    return TransitionOutcome(next_state, goals, CaseTag.PROGRESSED, False, action)


def _expect_alignment(env: Environment, state: Any, goals: GoalStack) -> None:
    aligned = env.open_goals(state)
    if aligned != goals.goals:
        raise EnvironmentContractError(
            f"environment alignment {GoalStack(aligned).render()} "
            f"does not match stack {goals.render()}"
        )


def shaped_reward(
    env: Environment, state: Any, goals: GoalStack, root: Goal, spec: RewardSpec
) -> float:
    """Root credit plus weighted top-of-stack credit.

    ``root`` must be the bottom element of the original episode stack.
    On an empty stack the top-of-stack term inherits the root term, so a
    finished episode earns the full ``1 + subgoal_weight``.
    """
    r0 = 1.0 if env.goal_solved(state, root) else 0.0
    if goals.is_empty:
        rt = r0
    else:
        rt = 1.0 if env.goal_solved(state, goals.top()) else 0.0
    return r0 + spec.subgoal_weight * rt


def discounted_return(rewards: Sequence[float], gamma: float) -> float:
    """Sum of ``gamma**t * rewards[t]`` over a finite episode."""
    if not (0.0 < gamma <= 1.0):
        raise ValueError("gamma must be in (0, 1]")
    total = 0.0
    factor = 1.0
    for r in rewards:
        total += factor * r
        factor *= gamma
    return total


def transition_record(env: Environment, outcome: TransitionOutcome) -> dict:
    """One line-delimited trace record per transition, stable field order."""
    return {
        "case": outcome.case_tag.value,
        "state": env.render_state(outcome.next_state),
        "goals": [g.render() for g in outcome.next_goals.goals],
        "solved_root": outcome.solved_root,
    }
