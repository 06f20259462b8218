"""Interchangeable candidate-action policies.

A policy suggests tactic candidates conditioned on the proof state and
the top goal only — never on interior goals.  Three backends: exhaustive
enumeration (deterministic, for tests and baselines), seeded stochastic
sampling, and a remote text-completion client that slots in real
generative provers.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Protocol, Sequence, runtime_checkable

import requests

from .core import Goal
from .propcalc.env import PropCalcEnv, ProofState, parse_tactic
from .propcalc.formulas import And, Imp, Or


class PolicyFailure(RuntimeError):
    """Candidate generation failed (backend unreachable or broken)."""


class DeterminismClass(Enum):
    DETERMINISTIC = "Deterministic"
    SEEDED_STOCHASTIC = "SeededStochastic"
    EXTERNAL = "External"


@runtime_checkable
class Policy(Protocol):
    determinism_class: DeterminismClass

    def sample_candidates(
        self, state, top_goal: Goal, k: int, rng: random.Random
    ) -> list[str]: ...


class EnumerationPolicy:
    """First ``k`` entries of the environment's canonical applicable-action
    list.  Pure function of (state, top goal); ignores the RNG."""

    determinism_class = DeterminismClass.DETERMINISTIC

    def __init__(self, env: PropCalcEnv):
        self.env = env

    def sample_candidates(
        self, state: ProofState, top_goal: Goal, k: int, rng: random.Random
    ) -> list[str]:
        if k <= 0:
            return []
        return self.env.applicable_actions(state)[:k]


# Sampling weights by how directly a tactic addresses the current target.
_WEIGHT_CLOSING = 8.0
_WEIGHT_MATCHING = 4.0
_WEIGHT_OTHER = 2.0
_WEIGHT_PROPOSAL = 1.0


class StochasticPolicy:
    """Weighted sampling without replacement from the applicable actions.

    Tactics that close or structurally match the target are favoured.
    With probability ``invalid_rate`` a slot is filled with a deliberately
    malformed candidate instead, to exercise failed-trial handling.
    """

    determinism_class = DeterminismClass.SEEDED_STOCHASTIC

    def __init__(self, env: PropCalcEnv, invalid_rate: float = 0.0):
        if not (0.0 <= invalid_rate <= 1.0):
            raise ValueError("invalid_rate must be in [0, 1]")
        self.env = env
        self.invalid_rate = invalid_rate

    def _weight(self, action: str, state: ProofState) -> float:
        tactic = parse_tactic(action)
        if tactic is None:
            return _WEIGHT_OTHER
        if tactic.kind == "have":
            return _WEIGHT_PROPOSAL
        if tactic.kind == "exact":
            return _WEIGHT_CLOSING
        target = state.open_sequents[-1].target
        matching = (
            (tactic.kind == "intro" and isinstance(target, Imp))
            or (tactic.kind == "split" and isinstance(target, And))
            or (tactic.kind in ("left", "right") and isinstance(target, Or))
        )
        return _WEIGHT_MATCHING if matching else _WEIGHT_OTHER

    def sample_candidates(
        self, state: ProofState, top_goal: Goal, k: int, rng: random.Random
    ) -> list[str]:
        pool = self.env.applicable_actions(state)
        weights = [self._weight(a, state) for a in pool]
        out: list[str] = []
        n_invalid = 0
        for _ in range(max(0, k)):
            if rng.random() < self.invalid_rate:
                n_invalid += 1
                out.append(f"bogus {n_invalid}")
                continue
            if not pool:
                break
            total = sum(weights)
            pick = rng.random() * total
            acc = 0.0
            idx = len(pool) - 1
            for i, w in enumerate(weights):
                acc += w
                if pick < acc:
                    idx = i
                    break
            out.append(pool.pop(idx))
            weights.pop(idx)
        return out


@dataclass(frozen=True)
class RemotePolicyConfig:
    """One completion endpoint.

    The wire protocol is a single JSON POST of
    ``{"prompt", "max_tokens", "temperature", "seed"}`` answered with
    ``{"text": ...}``; the first line of the completion is the candidate.
    """

    endpoint: str
    timeout_ms: int = 10_000
    prompt_template: str = "{state}\nGOAL: {goal}\nNEXT TACTIC:"
    max_tokens: int = 128
    retries: int = 2
    temperature: float = 1.0

    def __post_init__(self) -> None:
        if self.timeout_ms <= 0:
            raise ValueError("timeout_ms must be positive")
        if self.retries < 0:
            raise ValueError("retries must be non-negative")


class RemotePolicy:
    """Client for one or more completion services.

    Requests for one expansion are issued in request-index order and an
    endpoint list is used round-robin, so ensembles interleave
    deterministically.  Malformed or empty completions become invalid
    candidates; transport failures raise :class:`PolicyFailure` after
    the configured retries.
    """

    determinism_class = DeterminismClass.EXTERNAL

    def __init__(self, configs: Sequence[RemotePolicyConfig] | RemotePolicyConfig):
        if isinstance(configs, RemotePolicyConfig):
            configs = [configs]
        if not configs:
            raise ValueError("at least one endpoint is required")
        self.configs = list(configs)
        self._session = requests.Session()

    def _complete(self, config: RemotePolicyConfig, prompt: str, seed: int) -> str:
        payload = {
            "prompt": prompt,
            "max_tokens": config.max_tokens,
            "temperature": config.temperature,
            "seed": seed,
        }
        last_error: Exception | None = None
        for _ in range(config.retries + 1):
            try:
                response = self._session.post(
                    config.endpoint, json=payload, timeout=config.timeout_ms / 1000.0
                )
                response.raise_for_status()
                body = response.json()
            except Exception as exc:  # transport, HTTP, or JSON failure
                last_error = exc
                continue
            text = body.get("text") if isinstance(body, dict) else None
            return text if isinstance(text, str) else ""
        raise PolicyFailure(
            f"endpoint {config.endpoint} failed after {config.retries + 1} attempts: {last_error}"
        )

    def sample_candidates(self, state, top_goal: Goal, k: int, rng: random.Random) -> list[str]:
        out: list[str] = []
        for index in range(max(0, k)):
            config = self.configs[index % len(self.configs)]
            prompt = config.prompt_template.format(
                state=_render_for_prompt(state), goal=top_goal.text
            )
            completion = self._complete(config, prompt, seed=rng.randrange(2**31))
            out.append(completion.splitlines()[0].strip() if completion.strip() else "")
        return out


def _render_for_prompt(state) -> str:
    render = getattr(state, "open_sequents", None)
    if render is None:
        return str(state)
    return "; ".join(seq.render() for seq in state.open_sequents)


@dataclass
class PolicySpec:
    """Backend selection used by the benchmark harness CLI."""

    name: str = "enumeration"
    invalid_rate: float = 0.0
    endpoints: tuple[str, ...] = ()
    remote: dict = field(default_factory=dict)

    def build(self, env: PropCalcEnv) -> Policy:
        if self.name == "enumeration":
            return EnumerationPolicy(env)
        if self.name == "stochastic":
            return StochasticPolicy(env, invalid_rate=self.invalid_rate)
        if self.name == "remote":
            configs = [
                RemotePolicyConfig(endpoint=url, **self.remote) for url in self.endpoints
            ]
            return RemotePolicy(configs)
        raise ValueError(f"unknown policy backend {self.name!r}")
