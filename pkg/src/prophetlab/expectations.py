"""Exact expectations of the offline optimum, by family structure where possible."""
from __future__ import annotations

import math

import numpy as np

from .distributions import (
    ProductDistribution,
    RandomizedThreshold,
    expected_max,
    sample_from_uniforms,
    truncate_product,
)
from .feasibility import FeasibilityFamily, KUniform, PartitionMatroid, SingleChoice
from .rng import uniforms

ENUM_LIMIT = 10**6
MC_DRAWS = 10**5
_CHUNK = 2**17


def _kth_largest_means(product: ProductDistribution, k: int) -> float:
    """E[sum of the k largest weights] via Pr[X_(j) > v] from a Poisson-binomial count."""
    vals = product.support_values()
    total = 0.0
    prev = 0.0
    for v in vals:
        # E[sum_{j<=k} X_(j)] = sum over gaps of width (v - prev) times E[min(k, #{w >= v})].
        q = [1.0 - d.cdf_below(v) for d in product]
        pmf = np.zeros(len(q) + 1)
        pmf[0] = 1.0
        for qi in q:
            pmf[1:] = pmf[1:] * (1 - qi) + pmf[:-1] * qi
            pmf[0] *= 1 - qi
        counts = np.minimum(np.arange(len(q) + 1), k)
        total += (v - prev) * float(pmf @ counts)
        prev = v
    return total


def expected_offline(instance_or_family, dist: ProductDistribution | None = None,
                     seed: int = 0) -> float:
    """E[f(w)] under ``dist``; exact for structured families and small joint supports."""
    if dist is None:
        family, dist = instance_or_family.family, instance_or_family.dist
    else:
        family = instance_or_family
    if isinstance(family, SingleChoice):
        return expected_max(dist)
    if isinstance(family, PartitionMatroid):
        return math.fsum(expected_max(ProductDistribution(tuple(dist[e] for e in b))) for b in family.blocks)
    if isinstance(family, KUniform):
        return _kth_largest_means(dist, family.k)
    if dist.joint_size <= ENUM_LIMIT:
        W, P = dist.grid()
        return float(np.sum(family.f_batch(W) * P))
    return monte_carlo_offline(family, dist, MC_DRAWS, seed)


def monte_carlo_offline(family: FeasibilityFamily, dist: ProductDistribution, draws: int, seed: int) -> float:
    trials = np.arange(draws, dtype=np.uint64)
    W = np.stack([sample_from_uniforms(d, uniforms(seed, trials, e)) for e, d in enumerate(dist)], axis=1)
    return float(np.mean(family.f_batch(W)))


def core_expectation(instance, thr: RandomizedThreshold) -> float:
    """W = E[f(w_bar)] with w_bar drawn from the product truncated at ``thr``."""
    return expected_offline(instance.family, truncate_product(instance.dist, thr))
