"""Baseline policies: thresholds, greedy, secretary, and the pair policies."""
from __future__ import annotations

import math

from ..distributions import (
    ProductDistribution,
    RandomizedThreshold,
    expected_max,
    solve_gamma_threshold,
)
from ..errors import BadParams, WrongFamily
from ..feasibility import ExplicitDC, FeasibilityFamily, PartitionMatroid, SingleChoice
from ..instances import Instance
from .base import OnlinePolicy, threshold_exceeds


class FixedThreshold(OnlinePolicy):
    """Accept arriving weights above ``T``.

    Single-choice families take the first such weight.  Richer families take
    every feasible one unless ``single_pick`` is set, in which case only the
    first weight clearing the bar is taken.  ``inclusive`` switches the
    comparison from ``>`` to ``>=``.
    """

    name = "fixed_threshold"
    memoryless = True

    def __init__(self, family: FeasibilityFamily, T: float, inclusive: bool = False,
                 single_pick: bool = False):
        super().__init__(family)
        if T < 0:
            raise BadParams("threshold must be nonnegative")
        self.T = float(T)
        self.inclusive = inclusive
        self.single_pick = single_pick or isinstance(family, SingleChoice)

    def params(self):
        p = {"T": self.T}
        if self.inclusive:
            p["inclusive"] = True
        return p

    def _clears(self, w):
        return w >= self.T if self.inclusive else w > self.T

    def decide(self, obs, state):
        if self.single_pick and obs.selected:
            return False
        return self._clears(obs.weight) and self.family.can_add(obs.selected, obs.element)

    def step(self, obs, state):
        if state == "done":
            return [(1.0, False, state)]
        acc = self.decide(obs, state)
        # "done" marks a single pick that has been spent (the set may stay empty
        # when the chosen singleton is infeasible).
        nxt = "done" if (self.single_pick and self._clears(obs.weight)) else state
        return [(1.0, acc, nxt)]

    def accept_prob(self, element, weight):
        return 1.0 if self._clears(weight) and self.family.can_add(frozenset(), element) else 0.0


def fixed_threshold_policy(instance: Instance, T: float | None = None) -> FixedThreshold:
    """Fixed threshold; defaults to the classic E[max]/2."""
    if T is None:
        T = expected_max(instance.dist) / 2
    return FixedThreshold(instance.family, T)


class RandomizedThresholdPolicy(OnlinePolicy):
    """Single pick of the first weight exceeding a randomized threshold."""

    name = "randomized_threshold"
    memoryless = True

    def __init__(self, family: FeasibilityFamily, thr: RandomizedThreshold, gamma: float | None = None):
        super().__init__(family)
        self.thr = thr
        self.gamma = gamma

    def params(self):
        p = {"tau": self.thr.tau, "q": self.thr.accept_prob_at_atom}
        if self.gamma is not None:
            p = {"gamma": self.gamma, **p}
        return p

    def step(self, obs, state):
        if state == "done" or obs.selected:
            return [(1.0, False, state)]
        out = []
        for p, exceeds in threshold_exceeds(obs.weight, self.thr.tau, self.thr.accept_prob_at_atom):
            if exceeds:
                out.append((p, self.family.can_add(obs.selected, obs.element), "done"))
            else:
                out.append((p, False, state))
        return out

    def accept_prob(self, element, weight):
        if not self.family.can_add(frozenset(), element):
            return 0.0
        return sum(p for p, ex in threshold_exceeds(weight, self.thr.tau, self.thr.accept_prob_at_atom) if ex)


def eor_threshold_policy(instance: Instance, gamma: float = 1 / math.e) -> RandomizedThresholdPolicy:
    """Single-choice rule whose threshold the maximum clears with probability 1 - gamma."""
    if not isinstance(instance.family, SingleChoice):
        raise WrongFamily("eor_threshold_policy needs a single-choice family")
    pol = RandomizedThresholdPolicy(instance.family, solve_gamma_threshold(instance.dist, gamma), gamma)
    pol.name = "eor_threshold"
    return pol


class AlwaysFirst(OnlinePolicy):
    """Greedy: accept every arriving element that keeps the set feasible."""

    name = "always_first"
    memoryless = True

    def decide(self, obs, state):
        return self.family.can_add(obs.selected, obs.element)

    def accept_prob(self, element, weight):
        return 1.0 if self.family.can_add(frozenset(), element) else 0.0


class PickElements(OnlinePolicy):
    """Accept exactly the listed elements (when feasible), whatever their weight."""

    name = "pick"
    memoryless = True

    def __init__(self, family: FeasibilityFamily, targets):
        super().__init__(family)
        self.targets = frozenset(int(t) for t in ([targets] if isinstance(targets, int) else targets))

    def params(self):
        t = sorted(self.targets)
        return {"target": t[0] if len(t) == 1 else "+".join(map(str, t))}

    def decide(self, obs, state):
        return obs.element in self.targets and self.family.can_add(obs.selected, obs.element)

    def accept_prob(self, element, weight):
        return 1.0 if element in self.targets and self.family.can_add(frozenset(), element) else 0.0


class SecretaryPolicy(OnlinePolicy):
    """Reject the first r arrivals, then take the first weight beating all of them."""

    name = "secretary"

    def __init__(self, family: FeasibilityFamily, r: int):
        super().__init__(family)
        n = family.ground_size
        if not 0 <= r < n:
            raise BadParams("secretary needs 0 <= r < n")
        self.r = int(r)

    def params(self):
        return {"r": self.r}

    def decide(self, obs, state):
        if obs.selected or obs.step < self.r:
            return False
        bar = max(obs.prefix[: self.r], default=-math.inf)
        return obs.weight > bar and self.family.can_add(obs.selected, obs.element)


def secretary_policy(n: int, r: int) -> SecretaryPolicy:
    return SecretaryPolicy(SingleChoice(n), r)


class PerBlockThreshold(OnlinePolicy):
    """Partition matroids: in each block, fixed threshold at half that block's E[max]."""

    name = "per_block_threshold"

    def __init__(self, family: PartitionMatroid, dist: ProductDistribution):
        if not isinstance(family, PartitionMatroid):
            raise WrongFamily("per_block_threshold needs a partition matroid")
        super().__init__(family)
        self.block_thresholds = tuple(
            expected_max(ProductDistribution(tuple(dist[e] for e in b))) / 2 for b in family.blocks
        )

    def decide(self, obs, state):
        T = self.block_thresholds[self.family.block_of(obs.element)]
        return obs.weight > T and self.family.can_add(obs.selected, obs.element)


def per_block_threshold_policy(instance: Instance) -> PerBlockThreshold:
    return PerBlockThreshold(instance.family, instance.dist)


class RandomMaximalSet(OnlinePolicy):
    """Pick one maximal set uniformly at random up front and take all of it."""

    name = "random_pair"

    def __init__(self, family: ExplicitDC):
        if not isinstance(family, ExplicitDC) or not family.maximal_sets:
            raise WrongFamily("random_pair needs an explicit family with maximal sets")
        super().__init__(family)

    def start(self):
        m = len(self.family.maximal_sets)
        return [(1.0 / m, i) for i in range(m)]

    def decide(self, obs, state):
        return obs.element in self.family.maximal_sets[state] and self.family.can_add(obs.selected, obs.element)


class CatchMaxThenPair(OnlinePolicy):
    """Single-choice 1/e rule over all boxes, then complete the caught box's maximal set."""

    name = "catch_max_pair"

    def __init__(self, family: ExplicitDC, dist: ProductDistribution, gamma: float = 1 / math.e):
        if not isinstance(family, ExplicitDC):
            raise WrongFamily("catch_max_pair needs an explicit family")
        super().__init__(family)
        self.thr = solve_gamma_threshold(dist, gamma)
        self.home = {}
        for j, m in enumerate(family.maximal_sets):
            for e in m:
                self.home.setdefault(e, j)

    def params(self):
        return {"tau": self.thr.tau, "q": self.thr.accept_prob_at_atom}

    def step(self, obs, state):
        if state is not None:
            acc = obs.element in self.family.maximal_sets[state] and self.family.can_add(obs.selected, obs.element)
            return [(1.0, acc, state)]
        out = []
        for p, exceeds in threshold_exceeds(obs.weight, self.thr.tau, self.thr.accept_prob_at_atom):
            if exceeds and obs.element in self.home and self.family.can_add(obs.selected, obs.element):
                out.append((p, True, self.home[obs.element]))
            else:
                out.append((p, False, None))
        return out
