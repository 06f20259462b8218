"""Monte Carlo tree search over the goal-stack transition semantics.

Selection walks the tree by UCB score and stops at the first node still
open for expansion; expansion consumes policy candidates until one
validates; fresh nodes are valued from verified outcomes only (no
rollouts, no learned critic); backups add the estimate to every node on
the path.  Nodes whose expansion attempts all failed, or that already
hold the maximum number of children, are never selected again as
expansion targets, although full nodes are still traversed through.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .core import (
    CaseTag,
    Environment,
    EstimationRecipe,
    Goal,
    GoalStack,
    RewardSpec,
    shaped_reward,
    step,
)
from .policies import Policy, PolicyFailure


class DomainError(ValueError):
    """UCB score requested for an unvisited node."""


class NoSelectableNodeError(RuntimeError):
    """Every node in the tree is closed to expansion."""


class NotTerminalError(RuntimeError):
    """Proof extraction attempted on a node with open goals."""


class UcbVariant(Enum):
    PARENT_VISITS = "ParentVisits"
    PAPER_LITERAL = "PaperLiteral"


class NodeStatus(Enum):
    OPEN = "Open"
    EXPANSION_EXHAUSTED = "ExpansionExhausted"
    CHILDREN_FULL = "ChildrenFull"
    TERMINAL = "Terminal"


class Outcome(Enum):
    PROVED = "Proved"
    BUDGET_EXHAUSTED = "BudgetExhausted"


@dataclass(frozen=True)
class SearchConfig:
    exploration_c: float = 1.0
    max_expansion_trials: int = 10
    max_children: int = 10
    max_iterations: int = 512
    ucb_variant: UcbVariant = UcbVariant.PARENT_VISITS
    seed: int = 0
    reward: RewardSpec = field(default_factory=RewardSpec)

    def __post_init__(self) -> None:
        if self.exploration_c < 0:
            raise ValueError("exploration_c must be non-negative")
        if self.max_expansion_trials < 1:
            raise ValueError("max_expansion_trials must be at least 1")
        if self.max_children < 1:
            raise ValueError("max_children must be at least 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass
class SearchNode:
    """One (state, goal stack) vertex of the search tree."""

    node_id: int
    state: Any
    goals: GoalStack
    parent: "SearchNode | None" = None
    action: str | None = None
    edge_case: CaseTag | None = None
    depth: int = 0
    solved_conjectures: int = 0
    visit_count: int = 0
    value_sum: float = 0.0
    failed_trials: int = 0
    children: list["SearchNode"] = field(default_factory=list)
    status: NodeStatus = NodeStatus.OPEN
    live: bool = True

    @property
    def mean_value(self) -> float:
        if self.visit_count < 1:
            raise DomainError("mean value of an unvisited node")
        return self.value_sum / self.visit_count

    def set_status(self, status: NodeStatus) -> None:
        self.status = status
        _refresh_live(self)


def _refresh_live(node: SearchNode | None) -> None:
    while node is not None:
        live = node.status is NodeStatus.OPEN or any(c.live for c in node.children)
        if live == node.live:
            return
        node.live = live
        node = node.parent


def ucb_score(
    mean_value: float,
    node_visits: int,
    parent_visits: int,
    exploration_c: float,
    variant: UcbVariant = UcbVariant.PARENT_VISITS,
) -> float:
    """Exploitation plus exploration bonus (natural log throughout).

    ``PARENT_VISITS`` is standard UCT; ``PAPER_LITERAL`` draws the bonus
    from the node's own visit count in both numerator and denominator.
    """
    if node_visits < 1:
        raise DomainError("ucb_score requires node_visits >= 1")
    if variant is UcbVariant.PARENT_VISITS:
        if parent_visits < 1:
            raise DomainError("ucb_score requires parent_visits >= 1")
        bonus = math.sqrt(math.log(parent_visits) / node_visits)
    else:
        bonus = math.sqrt(math.log(node_visits) / node_visits)
    return mean_value + exploration_c * bonus


def select(root: SearchNode, config: SearchConfig) -> list[SearchNode]:
    """Path from the root to the next expansion target.

    Descends through closed nodes by highest UCB among live children
    (ties break to the earliest-created child) and stops at the first
    node with status Open.  Exhausted, full, and terminal nodes are
    never returned as targets.
    """
    if not root.live:
        raise NoSelectableNodeError("no expandable node remains")
    node = root
    path = [root]
    while node.status is not NodeStatus.OPEN:
        best: SearchNode | None = None
        best_score = -math.inf
        for child in node.children:
            if not child.live:
                continue
            score = ucb_score(
                child.mean_value,
                child.visit_count,
                node.visit_count,
                config.exploration_c,
                config.ucb_variant,
            )
            if best is None or score > best_score:
                best, best_score = child, score
        if best is None:
            raise NoSelectableNodeError("live bookkeeping out of sync")
        node = best
        path.append(node)
    return path


@dataclass
class ExpandResult:
    child: SearchNode | None
    samples_consumed: int
    policy_failed: bool = False
    budget_stopped: bool = False


def expand(
    node: SearchNode,
    policy: Policy,
    env: Environment,
    config: SearchConfig,
    rng: random.Random,
    next_node_id: int = 1,
    budget_left: int | None = None,
) -> ExpandResult:
    """Try policy candidates until one validates, creating one child.

    Candidates that classify as invalid, or that duplicate an existing
    child action, count as failed trials.  If the whole attempt yields
    no child, the node is closed to further expansion.  A policy
    transport failure counts as one failed trial and leaves the node
    open for a later attempt.
    """
    if node.status is not NodeStatus.OPEN:
        raise ValueError("expand requires an open node")
    node.failed_trials = 0
    try:
        candidates = policy.sample_candidates(
            node.state, node.goals.top(), config.max_expansion_trials, rng
        )
    except PolicyFailure:
        node.failed_trials = 1
        return ExpandResult(None, 0, policy_failed=True)

    existing = {child.action for child in node.children}
    consumed = 0
    for candidate in candidates[: config.max_expansion_trials]:
        if budget_left is not None and consumed >= budget_left:
            return ExpandResult(None, consumed, budget_stopped=True)
        consumed += 1
        action = " ".join(candidate.split())
        if action in existing:
            node.failed_trials += 1
            continue
        outcome = step(env, node.state, node.goals, action)
        if outcome.case_tag is CaseTag.NO_OP:
            node.failed_trials += 1
            continue
        child = SearchNode(
            node_id=next_node_id,
            state=outcome.next_state,
            goals=outcome.next_goals,
            parent=node,
            action=action,
            edge_case=outcome.case_tag,
            depth=node.depth + 1,
            solved_conjectures=node.solved_conjectures
            + (1 if outcome.case_tag is CaseTag.GOAL_SOLVED else 0),
        )
        child.status = NodeStatus.TERMINAL if child.goals.is_empty else NodeStatus.OPEN
        child.live = child.status is NodeStatus.OPEN
        node.children.append(child)
        if len(node.children) >= config.max_children:
            node.set_status(NodeStatus.CHILDREN_FULL)
        return ExpandResult(child, consumed)

    node.set_status(NodeStatus.EXPANSION_EXHAUSTED)
    return ExpandResult(None, consumed)


def estimate(node: SearchNode, env: Environment, spec: RewardSpec, root_goal: Goal) -> float:
    """Initial value of a fresh node from verified outcomes only."""
    base = shaped_reward(env, node.state, node.goals, root_goal, spec)
    if spec.recipe is EstimationRecipe.ROOT_ONLY:
        return base
    if spec.recipe is EstimationRecipe.SOLVED_CONJECTURES:
        return base + spec.conjecture_weight * node.solved_conjectures
    if spec.recipe is EstimationRecipe.DEPTH_WEIGHTED:
        return base + spec.depth_weight * node.depth
    return (
        base
        + spec.conjecture_weight * node.solved_conjectures
        + spec.depth_weight * node.depth
    )


def backpropagate(path: list[SearchNode], reward: float) -> None:
    """Add one visit and the reward to every node on the path."""
    for node in path:
        node.visit_count += 1
        node.value_sum += reward


def extract_proof(node: SearchNode) -> list[str]:
    """Action texts along the root-to-node path; requires empty goals."""
    if not node.goals.is_empty:
        raise NotTerminalError("node still has open goals")
    actions: list[str] = []
    cursor: SearchNode | None = node
    while cursor is not None and cursor.parent is not None:
        actions.append(cursor.action)
        cursor = cursor.parent
    actions.reverse()
    return actions


@dataclass
class SearchResult:
    outcome: Outcome
    proof: list[str] | None
    iterations_used: int
    nodes_created: int
    policy_samples_used: int
    trace: list[dict]
    root: SearchNode

    def to_record(self) -> dict:
        return {
            "outcome": self.outcome.value,
            "proof": self.proof,
            "iterations_used": self.iterations_used,
            "nodes_created": self.nodes_created,
            "policy_samples_used": self.policy_samples_used,
        }


def search(
    task: Any,
    policy: Policy,
    env: Environment,
    config: SearchConfig,
    sample_budget: int | None = None,
) -> SearchResult:
    """Run selection/expansion/estimation/backup loops on one task.

    Terminates on a checker-verified proof, after ``max_iterations``,
    when no node remains selectable, or when the optional sample budget
    would be exceeded.  Deterministic for a fixed seed and a
    deterministic or seeded policy.
    """
    state0, goals0 = env.initial_state(task)
    root_goal = goals0.bottom()
    root = SearchNode(node_id=0, state=state0, goals=goals0)
    rng = random.Random(config.seed)
    trace: list[dict] = []
    samples_used = 0
    nodes_created = 1
    iterations = 0

    for iteration in range(1, config.max_iterations + 1):
        if sample_budget is not None and samples_used >= sample_budget:
            break
        try:
            path = select(root, config)
        except NoSelectableNodeError:
            break
        target = path[-1]
        before_status = target.status
        budget_left = None if sample_budget is None else sample_budget - samples_used
        result = expand(
            target, policy, env, config, rng,
            next_node_id=nodes_created, budget_left=budget_left,
        )
        samples_used += result.samples_consumed
        iterations = iteration

        status_changes = []
        if target.status is not before_status:
            status_changes.append(f"{target.node_id}:{target.status.value}")

        if result.child is None:
            trace.append(
                _trace_record(iteration, path, None, None, None, root, status_changes)
            )
            if result.budget_stopped:
                break
            continue

        child = result.child
        nodes_created += 1
        if child.status is NodeStatus.TERMINAL:
            status_changes.append(f"{child.node_id}:{child.status.value}")
        reward = estimate(child, env, config.reward, root_goal)
        backpropagate(path + [child], reward)
        trace.append(
            _trace_record(
                iteration, path, child.action, child.edge_case.value, reward, root, status_changes
            )
        )

        if child.goals.is_empty:
            proof = extract_proof(child)
            if env.check_proof(task, proof):
                return SearchResult(
                    Outcome.PROVED, proof, iterations, nodes_created, samples_used, trace, root
                )
            # The tree lied; the terminal node stays dead and search goes on.
            _refresh_live(child.parent)

    return SearchResult(
        Outcome.BUDGET_EXHAUSTED, None, iterations, nodes_created, samples_used, trace, root
    )


def _trace_record(
    iteration: int,
    path: list[SearchNode],
    action_text: str | None,
    case: str | None,
    reward: float | None,
    root: SearchNode,
    status_changes: list[str],
) -> dict:
    return {
        "iter": iteration,
        "selected_path": [node.node_id for node in path],
        "action_text": action_text,
        "case": case,
        "reward": reward,
        "N_root": root.visit_count,
        "W_root": root.value_sum,
        "status_changes": status_changes,
    }
