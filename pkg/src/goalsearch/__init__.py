"""Conjecture-aware Monte Carlo proof search over a goal-stack MDP."""

from .core import (
    Action,
    ActionClass,
    CaseTag,
    EmptyGoalStackError,
    Environment,
    EnvironmentContractError,
    EstimationRecipe,
    Goal,
    GoalStack,
    RewardSpec,
    TransitionOutcome,
    classify_action,
    discounted_return,
    shaped_reward,
    step,
    transition_record,
)
from .mcts import (
    DomainError,
    NodeStatus,
    NoSelectableNodeError,
    NotTerminalError,
    Outcome,
    SearchConfig,
    SearchNode,
    SearchResult,
    UcbVariant,
    backpropagate,
    estimate,
    expand,
    extract_proof,
    search,
    select,
    ucb_score,
)
from .policies import (
    DeterminismClass,
    EnumerationPolicy,
    Policy,
    PolicyFailure,
    PolicySpec,
    RemotePolicy,
    RemotePolicyConfig,
    StochasticPolicy,
)

__version__ = "0.1.0"

__all__ = [
    "Action",
    "ActionClass",
    "CaseTag",
    "DeterminismClass",
    "DomainError",
    "EmptyGoalStackError",
    "EnumerationPolicy",
    "Environment",
    "EnvironmentContractError",
    "EstimationRecipe",
    "Goal",
    "GoalStack",
    "NodeStatus",
    "NoSelectableNodeError",
    "NotTerminalError",
    "Outcome",
    "Policy",
    "PolicyFailure",
    "PolicySpec",
    "RemotePolicy",
    "RemotePolicyConfig",
    "RewardSpec",
    "SearchConfig",
    "SearchNode",
    "SearchResult",
    "StochasticPolicy",
    "TransitionOutcome",
    "UcbVariant",
    "backpropagate",
    "classify_action",
    "discounted_return",
    "estimate",
    "expand",
    "extract_proof",
    "search",
    "select",
    "shaped_reward",
    "step",
    "transition_record",
    "ucb_score",
]
