"""The online-policy interface.

A policy is a small state machine.  ``start()`` lists the possible initial
private states with their probabilities (the declared randomness: coins,
sample vectors, ...).  ``step(obs, state)`` lists the possible
``(probability, accept, next_state)`` outcomes when element ``obs.element``
arrives with weight ``obs.weight``.  The exact evaluator branches on every
outcome; the Monte Carlo evaluator draws one.

Policies only ever see the observed prefix, so one-pass behaviour is enforced
by construction.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Hashable

from ..feasibility import FeasibilityFamily

Outcome = tuple[float, bool, Hashable]


@dataclass(frozen=True)
class Observation:
    step: int
    element: int
    weight: float
    selected: frozenset
    prefix: tuple  # weights seen before this step, in arrival order


class OnlinePolicy:
    name = "policy"
    # Finite randomness declared through start()/step(); False forces Monte Carlo.
    declared = True
    # Decisions depend only on (element, weight) while nothing is selected and the
    # state never changes; lets single-choice evaluation collapse the prefix.
    memoryless = False

    def __init__(self, family: FeasibilityFamily):
        self.family = family

    def params(self) -> dict[str, Any]:
        return {}

    def describe(self) -> str:
        ps = ",".join(f"{k}={_fmt(v)}" for k, v in self.params().items())
        return f"{self.name}({ps})" if ps else self.name

    def start(self) -> list[tuple[float, Hashable]]:
        return [(1.0, None)]

    def step(self, obs: Observation, state) -> list[Outcome]:
        return [(1.0, bool(self.decide(obs, state)), state)]

    def decide(self, obs: Observation, state) -> bool:
        raise NotImplementedError

    def accept_prob(self, element: int, weight: float) -> float:
        """Acceptance probability for memoryless policies (nothing selected yet)."""
        raise NotImplementedError

    def __repr__(self):
        return self.describe()


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def threshold_exceeds(weight: float, tau: float, q: float) -> list[tuple[float, bool]]:
    """Outcomes of the randomized comparison "weight exceeds tau" with atom coin q."""
    if weight > tau:
        return [(1.0, True)]
    if weight < tau or q <= 0.0:
        return [(1.0, False)]
    if q >= 1.0:
        return [(1.0, True)]
    return [(q, True), (1.0 - q, False)]
