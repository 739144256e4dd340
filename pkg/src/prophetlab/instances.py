"""Instances (family + product law + arrival order) and the hard-instance generators."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

from .distributions import DiscreteDistribution, ProductDistribution
from .errors import BadParams, InstanceOverflow
from .feasibility import ExplicitDC, FeasibilityFamily, PartitionMatroid, SingleChoice

OVERFLOW_LIMIT = 1e300
INSTANCE_SUFFIX = ".pli.json"


@dataclass(frozen=True)
class Instance:
    family: FeasibilityFamily
    dist: ProductDistribution
    arrival_order: tuple[int, ...] = ()
    label: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        n = self.family.ground_size
        if len(self.dist) != n:
            raise ValueError(f"{len(self.dist)} distributions for a ground set of size {n}")
        order = tuple(int(e) for e in self.arrival_order) or tuple(range(n))
        if sorted(order) != list(range(n)):
            raise ValueError("arrival_order must be a permutation of the ground set")
        object.__setattr__(self, "arrival_order", order)

    @property
    def n(self) -> int:
        return self.family.ground_size

    def with_order(self, order: Sequence[int]) -> "Instance":
        return replace(self, arrival_order=tuple(order))

    def with_dist(self, dist: ProductDistribution, label: str | None = None) -> "Instance":
        return replace(self, dist=dist, label=self.label if label is None else label)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "family": self.family.to_json(),
            "arrival_order": list(self.arrival_order),
            "distributions": self.dist.to_json(),
            "meta": dict(self.meta),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Instance":
        return cls(
            family=FeasibilityFamily.from_json(obj["family"]),
            dist=ProductDistribution.from_json(obj["distributions"]),
            arrival_order=tuple(obj.get("arrival_order", ())),
            label=obj.get("label", ""),
            meta=dict(obj.get("meta", {})),
        )

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(self.to_json(), indent=1))
        return path

    @classmethod
    def load(cls, path) -> "Instance":
        return cls.from_json(json.loads(Path(path).read_text()))


def _check_eps(eps: float):
    if not 0 < eps <= 1:
        raise BadParams(f"eps must lie in (0, 1], got {eps}")


def _two_box(second: DiscreteDistribution, label: str, **meta) -> Instance:
    dist = ProductDistribution((DiscreteDistribution.point(1.0), second))
    return Instance(SingleChoice(2), dist, label=label, meta=meta)


def gen_example1(eps: float) -> Instance:
    """Box 1 is 1; box 2 is (1 + 2 eps)/eps with probability eps, else 0."""
    _check_eps(eps)
    high = (1 + 2 * eps) / eps
    return _two_box(DiscreteDistribution.from_pairs([(0.0, 1 - eps), (high, eps)]),
                    f"example1(eps={eps})", generator="example1", eps=eps)


def gen_example2(n: int) -> Instance:
    """n pairs (1 surely, {0, 2} fairly); at most one box per pair.

    Element 2i is the deterministic box of pair i, element 2i+1 the random one.
    """
    if n < 1:
        raise BadParams("n must be >= 1")
    det = DiscreteDistribution.point(1.0)
    coin = DiscreteDistribution.from_pairs([(0.0, 0.5), (2.0, 0.5)])
    dist = ProductDistribution(tuple(d for _ in range(n) for d in (det, coin)))
    family = PartitionMatroid(2 * n, tuple((2 * i, 2 * i + 1) for i in range(n)))
    return Instance(family, dist, label=f"example2(n={n})", meta={"generator": "example2", "n": n})


def gen_example3(eps: float) -> Instance:
    """Box 1 is 1; box 2 is eps^2 with probability 1 - eps, else 1/eps^2."""
    _check_eps(eps)
    second = DiscreteDistribution.from_pairs([(eps * eps, 1 - eps), (1 / (eps * eps), eps)])
    return _two_box(second, f"example3(eps={eps})", generator="example3", eps=eps)


def gen_mpower(n: int, M: float) -> Instance:
    """Element 1 is 1; element i > 1 is M^(i-1) with probability 1/n, else 0."""
    if n < 2 or not M > 1:
        raise BadParams("mpower needs n >= 2 and M > 1")
    if (n - 1) * math.log10(M) > math.log10(OVERFLOW_LIMIT):
        raise InstanceOverflow(f"M^(n-1) = {M}^{n - 1} exceeds {OVERFLOW_LIMIT:g}")
    per = [DiscreteDistribution.point(1.0)]
    for i in range(2, n + 1):
        per.append(DiscreteDistribution.from_pairs([(0.0, 1 - 1 / n), (float(M) ** (i - 1), 1 / n)]))
    return Instance(SingleChoice(n), ProductDistribution(tuple(per)),
                    label=f"mpower(n={n},M={M:g})", meta={"generator": "mpower", "n": n, "M": M})


def gen_roe_ub(eps: float) -> Instance:
    """X1 = 1; X2 = 1/eps with probability eps, else 0."""
    _check_eps(eps)
    return _two_box(DiscreteDistribution.from_pairs([(0.0, 1 - eps), (1 / eps, eps)]),
                    f"roe_ub(eps={eps})", generator="roe_ub", eps=eps)


def gen_risk(eps: float) -> Instance:
    """Three boxes: 1 surely; 1/eps w.p. sqrt(eps); 2/eps^2 w.p. eps.  Utility cap 2/eps."""
    _check_eps(eps)
    r = math.sqrt(eps)
    per = (
        DiscreteDistribution.point(1.0),
        DiscreteDistribution.from_pairs([(0.0, 1 - r), (1 / eps, r)]),
        DiscreteDistribution.from_pairs([(0.0, 1 - eps), (2 / (eps * eps), eps)]),
    )
    return Instance(SingleChoice(3), ProductDistribution(per), label=f"risk(eps={eps})",
                    meta={"generator": "risk", "eps": eps, "utility_cap": 2 / eps})


def gen_pbmp_pairs(n: int, grid: int = 64) -> Instance:
    """n pairs (1 surely, Uniform[1,2] on a midpoint grid); only one pair may be used.

    Elements 0..n-1 are the deterministic boxes, n..2n-1 the random ones; pair i
    is {i, n + i}, so index order already delivers all deterministic boxes first.
    """
    if n < 1 or grid < 2:
        raise BadParams("pbmp_pairs needs n >= 1 and grid >= 2")
    det = DiscreteDistribution.point(1.0)
    unif = DiscreteDistribution.uniform_grid(1.0, 2.0, grid)
    family = ExplicitDC(2 * n, tuple((i, n + i) for i in range(n)))
    return Instance(family, ProductDistribution((det,) * n + (unif,) * n),
                    label=f"pbmp_pairs(n={n},grid={grid})",
                    meta={"generator": "pbmp_pairs", "n": n, "grid": grid})


def bernoulli_boost(instance: Instance, x: float, target_element: int = 0) -> Instance:
    """Add (E[sum w]/x) * Bernoulli(x) to the target element's weight."""
    if not 0 < x <= 1:
        raise BadParams("x must lie in (0, 1]")
    if not 0 <= target_element < instance.n:
        raise BadParams("target element outside the ground set")
    boost = math.fsum(d.mean() for d in instance.dist) / x
    old = instance.dist[target_element]
    new = DiscreteDistribution.from_pairs(
        [(v, p * (1 - x)) for v, p in old.atoms] + [(v + boost, p * x) for v, p in old.atoms]
    )
    per = list(instance.dist)
    per[target_element] = new
    meta = dict(instance.meta, boost_x=x, boost_target=target_element, boost_magnitude=boost)
    return replace(instance, dist=ProductDistribution(tuple(per)),
                   label=f"boost({instance.label},x={x},e={target_element})", meta=meta)


GENERATORS = {
    "example1": (gen_example1, {"eps": float}),
    "example2": (gen_example2, {"n": int}),
    "example3": (gen_example3, {"eps": float}),
    "mpower": (gen_mpower, {"n": int, "M": float}),
    "roe_ub": (gen_roe_ub, {"eps": float}),
    "risk": (gen_risk, {"eps": float}),
    "pbmp_pairs": (gen_pbmp_pairs, {"n": int, "grid": int}),
}
