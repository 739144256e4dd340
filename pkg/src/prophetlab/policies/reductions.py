"""The two reductions between ratio-of-expectations and expected-ratio policies,
plus the single-sample variant of the first.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from ..distributions import (
    RandomizedThreshold,
    expected_max,
    max_distribution,
    solve_gamma_threshold,
    truncate_product,
)
from ..errors import BadParams
from ..expectations import core_expectation, expected_offline
from ..instances import Instance
from .base import OnlinePolicy, threshold_exceeds
from .classic import FixedThreshold
from .optimal import optimal_policy

TOL = 1e-12


@dataclass(frozen=True)
class ReductionParams:
    """Parameters of the RoE-to-EoR reduction.  ``c`` defaults to (8/3) ln(3/alpha)."""

    alpha: float = 1.0
    gamma: float = 0.5
    delta: float = 2.0
    k: float = 3.0
    c: float | None = None

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise BadParams("gamma must lie in (0, 1)")
        if not self.delta > 1:
            raise BadParams("delta must exceed 1")
        if not self.k > 2:
            raise BadParams("k must exceed 2")
        if not 0 < self.alpha <= 1:
            raise BadParams("alpha must lie in (0, 1]")
        if self.c is None:
            object.__setattr__(self, "c", (8 / 3) * math.log(3 / self.alpha))
        if not self.c > 0:
            raise BadParams("c must be positive")
        if self.c < self.c_min * (1 - TOL):
            raise BadParams(f"c={self.c:.6g} is below the required {self.c_min:.6g}")

    @property
    def c_min(self) -> float:
        d = self.delta
        return (4 + 2 * d) / (3 * (d - 1) ** 2) * math.log(self.k / self.alpha)

    def guarantee(self) -> float:
        """min{gamma ln(1/gamma)/(c+1), (gamma/delta)((k-delta)/k) alpha}."""
        g, d, k = self.gamma, self.delta, self.k
        return min(g * math.log(1 / g) / (self.c + 1), (g / d) * ((k - d) / k) * self.alpha)


class RoeToEor(OnlinePolicy):
    """Catch the superstar when W <= c tau, otherwise run the subroutine on the core."""

    name = "roe_to_eor"

    def __init__(self, instance: Instance, subroutine: OnlinePolicy, params: ReductionParams):
        super().__init__(instance.family)
        self.sub = subroutine
        self.params_ = params
        self.thr = solve_gamma_threshold(instance.dist, params.gamma)
        self.W = core_expectation(instance, self.thr)
        self.branch = "superstar" if self.W <= params.c * self.thr.tau else "combinatorial"
        self.memoryless = self.branch == "superstar"

    def params(self):
        p = self.params_
        return {"sub": self.sub.describe(), "alpha": p.alpha, "gamma": p.gamma,
                "delta": p.delta, "k": p.k, "branch": self.branch}

    def _exceeds(self, w):
        return threshold_exceeds(w, self.thr.tau, self.thr.accept_prob_at_atom)

    def start(self):
        if self.branch == "superstar":
            return [(1.0, "scan")]
        return [(p, ("run", s)) for p, s in self.sub.start()]

    def step(self, obs, state):
        if state == "stop":
            return [(1.0, False, "stop")]
        out = []
        if self.branch == "superstar":
            for p, ex in self._exceeds(obs.weight):
                if ex:
                    out.append((p, self.family.can_add(obs.selected, obs.element), "stop"))
                else:
                    out.append((p, False, state))
            return out
        for p, ex in self._exceeds(obs.weight):
            if ex:
                out.append((p, False, "stop"))
                continue
            for q, acc, nxt in self.sub.step(obs, state[1]):
                out.append((p * q, acc, ("run", nxt)))
        return out

    def accept_prob(self, element, weight):
        if not self.family.can_add(frozenset(), element):
            return 0.0
        return sum(p for p, ex in self._exceeds(weight) if ex)


def roe_to_eor(instance: Instance, subroutine: OnlinePolicy, params: ReductionParams) -> RoeToEor:
    return RoeToEor(instance, subroutine, params)


def truncated_instance(instance: Instance, thr: RandomizedThreshold) -> Instance:
    return instance.with_dist(truncate_product(instance.dist, thr), label=f"core({instance.label})")


def core_subroutine(instance: Instance, gamma: float = 0.5):
    """Optimal-RoE policy on the core instance and its RoE there (the alpha of the reduction)."""
    core = truncated_instance(instance, solve_gamma_threshold(instance.dist, gamma))
    sub = optimal_policy(core, "roe")
    return sub, sub.value


def build_roe_to_eor(instance: Instance, gamma: float = 0.5, delta: float = 2.0, k: float = 3.0,
                     c: float | None = None) -> RoeToEor:
    sub, alpha = core_subroutine(instance, gamma)
    alpha = min(1.0, alpha)
    return RoeToEor(instance, sub, ReductionParams(alpha=alpha, gamma=gamma, delta=delta, k=k, c=c))


class EorToRoe(OnlinePolicy):
    """If E[max] is a large share of E[f], run a single-pick threshold at E[max]/2; else the subroutine."""

    name = "eor_to_roe"

    def __init__(self, instance: Instance, subroutine: OnlinePolicy, alpha: float):
        super().__init__(instance.family)
        if not 0 < alpha <= 1:
            raise BadParams("alpha must lie in (0, 1]")
        self.alpha = float(alpha)
        self.sub = subroutine
        self.A = expected_max(instance.dist)
        self.Ef = expected_offline(instance)
        self.branch = "threshold" if self.A >= self.alpha * self.Ef / 34 else "subroutine"
        self.inner = (FixedThreshold(instance.family, self.A / 2, inclusive=True, single_pick=True)
                      if self.branch == "threshold" else subroutine)
        self.memoryless = self.inner.memoryless
        self.declared = self.inner.declared

    def params(self):
        return {"sub": self.sub.describe(), "alpha": self.alpha, "branch": self.branch}

    def start(self):
        return self.inner.start()

    def step(self, obs, state):
        return self.inner.step(obs, state)

    def accept_prob(self, element, weight):
        return self.inner.accept_prob(element, weight)


def eor_to_roe(instance: Instance, subroutine: OnlinePolicy, alpha: float) -> EorToRoe:
    return EorToRoe(instance, subroutine, alpha)


def build_eor_to_roe(instance: Instance) -> EorToRoe:
    sub = optimal_policy(instance, "eor")
    return EorToRoe(instance, sub, min(1.0, sub.value))


class SingleSampleRoeToEor(OnlinePolicy):
    """Fair coin between a max-of-samples threshold and the guarded subroutine.

    The sample vector only enters through its maximum, so the declared
    randomness is the coin together with the law of max_e s_e.
    """

    name = "single_sample_roe_to_eor"

    def __init__(self, instance: Instance, subroutine: OnlinePolicy, params: ReductionParams):
        super().__init__(instance.family)
        self.sub = subroutine
        self.params_ = params
        self.thr = solve_gamma_threshold(instance.dist, params.gamma)
        self.sample_max = max_distribution(instance.dist)

    def params(self):
        return {"sub": self.sub.describe(), "alpha": self.params_.alpha, "gamma": self.params_.gamma}

    def start(self):
        heads = [(0.5 * p, ("heads", v)) for v, p in self.sample_max.atoms]
        tails = [(0.5 * p, ("run", s)) for p, s in self.sub.start()]
        return heads + tails

    def step(self, obs, state):
        if state == "stop":
            return [(1.0, False, "stop")]
        if state[0] == "heads":
            if obs.weight > state[1]:
                return [(1.0, self.family.can_add(obs.selected, obs.element), "stop")]
            return [(1.0, False, state)]
        out = []
        for p, ex in threshold_exceeds(obs.weight, self.thr.tau, self.thr.accept_prob_at_atom):
            if ex:
                out.append((p, False, "stop"))
                continue
            for q, acc, nxt in self.sub.step(obs, state[1]):
                out.append((p * q, acc, ("run", nxt)))
        return out


def single_sample_roe_to_eor(instance: Instance, subroutine: OnlinePolicy, params: ReductionParams,
                             rng=None) -> SingleSampleRoeToEor:
    # ``rng`` is accepted for interface symmetry; the sample is integrated exactly via start().
    return SingleSampleRoeToEor(instance, subroutine, params)


def build_single_sample(instance: Instance, gamma: float = 0.5) -> SingleSampleRoeToEor:
    sub, alpha = core_subroutine(instance, gamma)
    return SingleSampleRoeToEor(instance, sub, ReductionParams(alpha=min(1.0, alpha), gamma=gamma))
