"""Seeded random instance suites used by the verification commands and tests."""
from __future__ import annotations

import numpy as np

from .distributions import DiscreteDistribution, ProductDistribution
from .feasibility import ExplicitDC, KUniform, PartitionMatroid, SingleChoice
from .instances import Instance


def random_distribution(rng: np.random.Generator, max_atoms: int = 4, scale: float = 10.0) -> DiscreteDistribution:
    m = int(rng.integers(1, max_atoms + 1))
    vals = np.unique(np.round(rng.uniform(0, scale, size=m), 3))
    if rng.random() < 0.3:
        vals = np.unique(np.concatenate(([0.0], vals)))
    probs = rng.dirichlet(np.ones(len(vals)))
    probs = np.maximum(probs, 1e-3)
    probs /= probs.sum()
    probs[-1] = 1.0 - probs[:-1].sum()
    return DiscreteDistribution(tuple(map(float, vals)), tuple(map(float, probs)))


def random_product(rng, n: int, max_atoms: int, budget: int | None = None) -> ProductDistribution:
    while True:
        per = tuple(random_distribution(rng, max_atoms) for _ in range(n))
        prod = ProductDistribution(per)
        if budget is None or prod.joint_size <= budget:
            return prod


def single_choice_suite(count: int = 200, seed: int = 2024, max_n: int = 6, max_atoms: int = 4) -> list[Instance]:
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        n = int(rng.integers(1, max_n + 1))
        out.append(Instance(SingleChoice(n), random_product(rng, n, max_atoms), label=f"single#{i}"))
    return out


def mixed_suite(count: int = 100, seed: int = 7, budget: int = 20000) -> list[Instance]:
    """Single-choice, k-uniform and partition instances with joint support <= budget."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        kind = i % 3
        n = int(rng.integers(2, 9))
        dist = random_product(rng, n, 3 if n > 5 else 4, budget)
        if kind == 0:
            fam = SingleChoice(n)
        elif kind == 1:
            fam = KUniform(n, int(rng.integers(1, n + 1)))
        else:
            perm = rng.permutation(n)
            cuts = sorted(rng.choice(np.arange(1, n), size=int(rng.integers(0, n)), replace=False).tolist())
            blocks = [tuple(sorted(int(e) for e in b)) for b in np.split(perm, cuts) if len(b)]
            fam = PartitionMatroid(n, tuple(blocks))
        order = tuple(int(e) for e in rng.permutation(n)) if rng.random() < 0.5 else ()
        out.append(Instance(fam, dist, arrival_order=order, label=f"mixed#{i}:{fam.variant}"))
    return out


def random_explicit_family(rng: np.random.Generator, max_n: int = 8) -> ExplicitDC:
    """A random antichain of subsets, i.e. the maximal sets of a downward-closed family."""
    n = int(rng.integers(1, max_n + 1))
    cands = []
    for _ in range(int(rng.integers(1, 7))):
        size = int(rng.integers(1, n + 1))
        cands.append(frozenset(int(e) for e in rng.choice(n, size=size, replace=False)))
    cands = sorted(set(cands), key=len, reverse=True)
    antichain = []
    for c in cands:
        if not any(c <= m for m in antichain):
            antichain.append(c)
    return ExplicitDC(n, tuple(tuple(sorted(m)) for m in antichain))


def explicit_suite(count: int = 50, seed: int = 11, max_n: int = 8) -> list[ExplicitDC]:
    rng = np.random.default_rng(seed)
    return [random_explicit_family(rng, max_n) for _ in range(count)]


def explicit_instance_suite(count: int = 30, seed: int = 13, max_n: int = 6) -> list[Instance]:
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        fam = random_explicit_family(rng, max_n)
        out.append(Instance(fam, random_product(rng, fam.ground_size, 3, 5000), label=f"explicit#{i}"))
    return out


def structured_families() -> list:
    fams = [SingleChoice(n) for n in (1, 3, 6)]
    fams += [KUniform(5, 2), KUniform(8, 3), KUniform(6, 6)]
    fams += [PartitionMatroid(4, ((0, 1), (2, 3))), PartitionMatroid(6, ((0, 3, 5), (1,), (2, 4)))]
    return fams
