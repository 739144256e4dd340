"""Finite-support weight laws, their products, and quantile thresholds."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.optimize import brentq

from .errors import ZeroMass
from .rng import Stream

PROB_TOL = 1e-12


@dataclass(frozen=True)
class DiscreteDistribution:
    """A law on finitely many nonnegative values.

    ``values`` are strictly increasing and every atom carries positive mass.
    Use :meth:`from_pairs` to build one from unsorted or duplicated atoms.
    """

    values: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != len(self.probs) or not self.values:
            raise ValueError("need one probability per value and at least one atom")
        for v in self.values:
            if not (v >= 0) or math.isinf(v):
                raise ValueError(f"weights must be finite and nonnegative, got {v}")
        for a, b in zip(self.values, self.values[1:]):
            if not a < b:
                raise ValueError("values must be strictly increasing")
        for p in self.probs:
            if not (0 < p <= 1):
                raise ValueError(f"atom probability {p} outside (0, 1]")
        if abs(math.fsum(self.probs) - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {math.fsum(self.probs)!r}")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]]) -> "DiscreteDistribution":
        """Sort atoms, merge equal values and drop zero-mass atoms."""
        acc: dict[float, float] = {}
        for v, p in pairs:
            if p < 0:
                raise ValueError("negative probability")
            if p == 0:
                continue
            v = float(v)
            acc[v] = acc.get(v, 0.0) + float(p)
        vals = sorted(acc)
        return cls(tuple(vals), tuple(acc[v] for v in vals))

    @classmethod
    def point(cls, value: float) -> "DiscreteDistribution":
        return cls((float(value),), (1.0,))

    @classmethod
    def uniform_grid(cls, lo: float, hi: float, atoms: int = 64) -> "DiscreteDistribution":
        """Equiprobable midpoint discretisation of Uniform[lo, hi]."""
        if atoms < 1 or not hi > lo:
            raise ValueError("need atoms >= 1 and hi > lo")
        width = (hi - lo) / atoms
        return cls(tuple(lo + (i + 0.5) * width for i in range(atoms)), (1.0 / atoms,) * atoms)

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.values, self.probs))

    def __len__(self):
        return len(self.values)

    def mean(self) -> float:
        return math.fsum(v * p for v, p in self.atoms)

    def cdf(self, x: float) -> float:
        """Pr[w <= x]."""
        return min(1.0, math.fsum(p for v, p in self.atoms if v <= x))

    def cdf_below(self, x: float) -> float:
        """Pr[w < x]."""
        return min(1.0, math.fsum(p for v, p in self.atoms if v < x))

    def mass_at(self, x: float) -> float:
        for v, p in self.atoms:
            if v == x:
                return p
        return 0.0

    def index_of(self, x: float) -> int:
        return self.values.index(x)

    def to_json(self) -> dict:
        return {"atoms": [[v, p] for v, p in self.atoms]}

    @classmethod
    def from_json(cls, obj: dict) -> "DiscreteDistribution":
        return cls(tuple(float(v) for v, _ in obj["atoms"]), tuple(float(p) for _, p in obj["atoms"]))


def sample(dist: DiscreteDistribution, stream: Stream) -> float:
    """Inverse-CDF draw driven by the next uniform of ``stream``."""
    return dist.values[stream.choice_index(dist.probs)]


def sample_from_uniforms(dist: DiscreteDistribution, u: np.ndarray) -> np.ndarray:
    cum = np.cumsum(dist.probs)
    idx = np.searchsorted(cum, u, side="right")
    np.minimum(idx, len(dist.values) - 1, out=idx)
    return np.asarray(dist.values)[idx]


def cdf(dist: DiscreteDistribution, x: float) -> float:
    return dist.cdf(x)


@dataclass(frozen=True)
class ProductDistribution:
    per_element: tuple[DiscreteDistribution, ...]

    def __post_init__(self):
        if not self.per_element:
            raise ValueError("empty product")

    def __len__(self):
        return len(self.per_element)

    def __getitem__(self, i) -> DiscreteDistribution:
        return self.per_element[i]

    def __iter__(self):
        return iter(self.per_element)

    @property
    def joint_size(self) -> int:
        return math.prod(len(d) for d in self.per_element)

    def support_values(self) -> list[float]:
        return sorted({v for d in self.per_element for v in d.values})

    def cdf_max(self, x: float) -> float:
        return math.prod(d.cdf(x) for d in self.per_element)

    def outcomes(self):
        """Iterate (weights, probability) over the full joint support."""
        for combo in itertools.product(*(d.atoms for d in self.per_element)):
            yield tuple(v for v, _ in combo), math.prod(p for _, p in combo)

    def grid(self) -> tuple[np.ndarray, np.ndarray]:
        """Joint support as an (N, n) weight matrix and an (N,) probability vector.

        Rows follow ``itertools.product`` order (last element varies fastest).
        """
        vals = [np.asarray(d.values, dtype=float) for d in self.per_element]
        probs = [np.asarray(d.probs, dtype=float) for d in self.per_element]
        mesh = np.meshgrid(*vals, indexing="ij")
        pmesh = np.meshgrid(*probs, indexing="ij")
        W = np.stack([m.reshape(-1) for m in mesh], axis=1)
        P = np.prod(np.stack([m.reshape(-1) for m in pmesh], axis=1), axis=1)
        return W, P

    def to_json(self) -> list:
        return [d.to_json() for d in self.per_element]

    @classmethod
    def from_json(cls, obj: list) -> "ProductDistribution":
        return cls(tuple(DiscreteDistribution.from_json(d) for d in obj))


@dataclass(frozen=True)
class RandomizedThreshold:
    """Threshold ``tau`` whose atom counts as exceeding with ``accept_prob_at_atom``."""

    tau: float
    accept_prob_at_atom: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.accept_prob_at_atom <= 1.0:
            raise ValueError("accept_prob_at_atom must lie in [0, 1]")

    def exceed_prob(self, dist: DiscreteDistribution) -> float:
        """Pr[w "exceeds" tau] including the atom coin."""
        above = math.fsum(p for v, p in dist.atoms if v > self.tau)
        return min(1.0, above + self.accept_prob_at_atom * dist.mass_at(self.tau))

    def stay_prob(self, dist: DiscreteDistribution) -> float:
        below = dist.cdf_below(self.tau)
        return min(1.0, below + (1.0 - self.accept_prob_at_atom) * dist.mass_at(self.tau))

    def to_json(self) -> dict:
        return {"tau": self.tau, "accept_prob_at_atom": self.accept_prob_at_atom}


def truncate(dist: DiscreteDistribution, thr: RandomizedThreshold) -> DiscreteDistribution:
    """Law of ``w`` conditioned on not exceeding the randomized threshold."""
    kept = []
    for v, p in dist.atoms:
        if v < thr.tau:
            kept.append((v, p))
        elif v == thr.tau:
            kept.append((v, p * (1.0 - thr.accept_prob_at_atom)))
    mass = math.fsum(p for _, p in kept)
    if mass <= 0:
        raise ZeroMass(f"no mass at or below tau={thr.tau}")
    return DiscreteDistribution.from_pairs((v, p / mass) for v, p in kept)


def truncate_product(product: ProductDistribution, thr: RandomizedThreshold) -> ProductDistribution:
    return ProductDistribution(tuple(truncate(d, thr) for d in product))


def max_distribution(product: ProductDistribution) -> DiscreteDistribution:
    """Law of max_e w_e from the product of marginal CDFs."""
    pairs = []
    prev = 0.0
    for v in product.support_values():
        F = product.cdf_max(v)
        pairs.append((v, F - prev))
        prev = F
    total = math.fsum(p for _, p in pairs)
    return DiscreteDistribution.from_pairs((v, p / total) for v, p in pairs if p > 0)


def expected_max(product: ProductDistribution, method: str = "cdf") -> float:
    """E[max_e w_e].

    ``method="cdf"`` sums v * (F(v) - F(v-)) over the union of supports with
    F the product CDF; ``method="enumerate"`` walks the joint support.
    """
    if method == "enumerate":
        return math.fsum(max(w) * p for w, p in product.outcomes())
    if method != "cdf":
        raise ValueError(method)
    terms = []
    prev = 0.0
    for v in product.support_values():
        F = product.cdf_max(v)
        terms.append(v * (F - prev))
        prev = F
    return math.fsum(terms)


def solve_gamma_threshold(product: ProductDistribution, gamma: float) -> RandomizedThreshold:
    """Randomized threshold with Pr[no element exceeds] = gamma.

    ``tau`` is the smallest support value where the product CDF reaches gamma;
    the atom coin splits the mass at ``tau`` so the product hits gamma exactly.
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie strictly inside (0, 1)")
    tau = None
    for v in product.support_values():
        if product.cdf_max(v) >= gamma - PROB_TOL:
            tau = v
            break
    assert tau is not None  # product CDF reaches 1 at the largest value
    if abs(product.cdf_max(tau) - gamma) <= PROB_TOL:
        return RandomizedThreshold(tau, 0.0)

    below = [d.cdf_below(tau) for d in product]
    at = [d.mass_at(tau) for d in product]

    def gap(q: float) -> float:
        return math.prod(b + (1.0 - q) * a for b, a in zip(below, at)) - gamma

    q = brentq(gap, 0.0, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    return RandomizedThreshold(tau, min(1.0, max(0.0, q)))


def core_probability(product: ProductDistribution, thr: RandomizedThreshold) -> float:
    return math.prod(thr.stay_prob(d) for d in product)
