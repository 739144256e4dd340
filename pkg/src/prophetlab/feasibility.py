"""Downward-closed feasibility families and the offline optimum f(w)."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import IndexOutOfRange, MalformedFamily

EXPLICIT_MAX_GROUND = 30


def _as_set(S: Iterable[int]) -> frozenset[int]:
    return frozenset(int(e) for e in S)


@dataclass(frozen=True)
class FeasibilityFamily:
    """Base class.  Subclasses define membership and a fast offline optimum.

    The offline optimum is reported as the lexicographically smallest optimal
    set among those containing no zero-weight element.
    """

    ground_size: int

    variant = "abstract"

    def __post_init__(self):
        if self.ground_size < 1:
            raise ValueError("ground_size must be positive")

    def _check_indices(self, S: frozenset[int]):
        for e in S:
            if not 0 <= e < self.ground_size:
                raise IndexOutOfRange(f"element {e} outside ground set of size {self.ground_size}")

    def is_feasible(self, S: Iterable[int]) -> bool:
        S = _as_set(S)
        self._check_indices(S)
        return self._feasible(S)

    def _feasible(self, S: frozenset[int]) -> bool:
        raise NotImplementedError

    def can_add(self, S: frozenset[int], e: int) -> bool:
        return e not in S and self._feasible(S | {e})

    def offline_optimum(self, w: Sequence[float]) -> tuple[tuple[int, ...], float]:
        w = list(map(float, w))
        if len(w) != self.ground_size:
            raise ValueError("weight vector length does not match ground set")
        if any(x < 0 for x in w):
            raise ValueError("weights must be nonnegative")
        S = self._opt_set(w)
        return S, float(sum(w[e] for e in S))

    def f(self, w: Sequence[float]) -> float:
        return self.offline_optimum(w)[1]

    def _opt_set(self, w: list[float]) -> tuple[int, ...]:
        raise NotImplementedError

    def f_batch(self, W: np.ndarray) -> np.ndarray:
        """f over the rows of an (N, n) weight matrix."""
        raise NotImplementedError

    def feasible_sets(self) -> Iterable[tuple[int, ...]]:
        """Every feasible set (brute force; small ground sets only)."""
        n = self.ground_size
        for r in range(n + 1):
            for S in itertools.combinations(range(n), r):
                if self._feasible(frozenset(S)):
                    yield S

    def to_json(self) -> dict:
        raise NotImplementedError

    @staticmethod
    def from_json(obj: dict) -> "FeasibilityFamily":
        kind = obj["variant"]
        n = int(obj["ground_size"])
        if kind == "single":
            return SingleChoice(n)
        if kind == "kuniform":
            return KUniform(n, int(obj["k"]))
        if kind == "partition":
            return PartitionMatroid(n, tuple(tuple(b) for b in obj["blocks"]))
        if kind == "explicit":
            return ExplicitDC(n, tuple(tuple(m) for m in obj["maximal_sets"]))
        raise MalformedFamily(f"unknown family variant {kind!r}")


def _top_by_weight(w: list[float], idx: Iterable[int], k: int) -> list[int]:
    ranked = sorted((e for e in idx if w[e] > 0), key=lambda e: (-w[e], e))
    return ranked[:k]


@dataclass(frozen=True)
class SingleChoice(FeasibilityFamily):
    variant = "single"

    def _feasible(self, S):
        return len(S) <= 1

    def can_add(self, S, e):
        return not S

    def _opt_set(self, w):
        return tuple(_top_by_weight(w, range(self.ground_size), 1))

    def f_batch(self, W):
        return W.max(axis=1)

    def to_json(self):
        return {"variant": "single", "ground_size": self.ground_size}


@dataclass(frozen=True)
class KUniform(FeasibilityFamily):
    k: int = 1
    variant = "kuniform"

    def __post_init__(self):
        super().__post_init__()
        if not 1 <= self.k <= self.ground_size:
            raise MalformedFamily("KUniform needs 1 <= k <= ground_size")

    def _feasible(self, S):
        return len(S) <= self.k

    def can_add(self, S, e):
        return e not in S and len(S) < self.k

    def _opt_set(self, w):
        return tuple(sorted(_top_by_weight(w, range(self.ground_size), self.k)))

    def f_batch(self, W):
        if self.k == W.shape[1]:
            return W.sum(axis=1)
        part = np.partition(W, W.shape[1] - self.k, axis=1)
        return part[:, W.shape[1] - self.k:].sum(axis=1)

    def to_json(self):
        return {"variant": "kuniform", "ground_size": self.ground_size, "k": self.k}


@dataclass(frozen=True)
class PartitionMatroid(FeasibilityFamily):
    """At most one element from each block; blocks partition the ground set."""

    blocks: tuple[tuple[int, ...], ...] = ()
    variant = "partition"

    def __post_init__(self):
        super().__post_init__()
        seen = sorted(e for b in self.blocks for e in b)
        if seen != list(range(self.ground_size)):
            raise MalformedFamily("blocks must partition the ground set")
        object.__setattr__(self, "_block_of", {e: i for i, b in enumerate(self.blocks) for e in b})

    def block_of(self, e: int) -> int:
        return self._block_of[e]

    def _feasible(self, S):
        used = [self._block_of[e] for e in S]
        return len(used) == len(set(used))

    def can_add(self, S, e):
        b = self._block_of[e]
        return e not in S and all(self._block_of[x] != b for x in S)

    def _opt_set(self, w):
        out = []
        for b in self.blocks:
            out.extend(_top_by_weight(w, b, 1))
        return tuple(sorted(out))

    def f_batch(self, W):
        return sum(W[:, list(b)].max(axis=1) for b in self.blocks)

    def to_json(self):
        return {"variant": "partition", "ground_size": self.ground_size,
                "blocks": [list(b) for b in self.blocks]}


@dataclass(frozen=True)
class ExplicitDC(FeasibilityFamily):
    """Downward closure of an explicit list of maximal sets."""

    maximal_sets: tuple[tuple[int, ...], ...] = ()
    variant = "explicit"

    def __post_init__(self):
        super().__post_init__()
        if self.ground_size > EXPLICIT_MAX_GROUND:
            raise MalformedFamily(f"explicit families are limited to {EXPLICIT_MAX_GROUND} elements")
        norm = tuple(tuple(sorted(set(int(e) for e in m))) for m in self.maximal_sets)
        for m in norm:
            self._check_indices(frozenset(m))
        object.__setattr__(self, "maximal_sets", norm)
        object.__setattr__(self, "_frozen", tuple(frozenset(m) for m in norm))
        inc = np.zeros((self.ground_size, max(1, len(norm))))
        for j, m in enumerate(norm):
            inc[list(m), j] = 1.0
        object.__setattr__(self, "_incidence", inc)

    def _feasible(self, S):
        return not S or any(S <= m for m in self._frozen)

    def check_downward_closed(self) -> bool:
        """Validate the representation: no maximal set may contain another."""
        for i, a in enumerate(self._frozen):
            for j, b in enumerate(self._frozen):
                if i != j and a <= b:
                    raise MalformedFamily(f"maximal set {sorted(a)} is contained in {sorted(b)}")
        return True

    def _opt_set(self, w):
        best_val, best = 0.0, ()
        for m in self.maximal_sets:
            pos = tuple(e for e in m if w[e] > 0)
            val = sum(w[e] for e in pos)
            tol = 1e-12 * max(1.0, abs(best_val))
            if val > best_val + tol or (abs(val - best_val) <= tol and pos < best and val > 0):
                best_val, best = val, pos
        return best

    def f_batch(self, W):
        if not self.maximal_sets:
            return np.zeros(W.shape[0])
        return (W @ self._incidence).max(axis=1)

    def to_json(self):
        return {"variant": "explicit", "ground_size": self.ground_size,
                "maximal_sets": [list(m) for m in self.maximal_sets]}


def brute_force_optimum(family: FeasibilityFamily, w: Sequence[float]) -> tuple[tuple[int, ...], float]:
    """Offline optimum by scanning every feasible set (verification oracle)."""
    best_val, best = 0.0, ()
    for S in family.feasible_sets():
        if any(w[e] <= 0 for e in S):
            continue
        val = sum(w[e] for e in S)
        tol = 1e-12 * max(1.0, abs(best_val))
        if val > best_val + tol or (abs(val - best_val) <= tol and S < best):
            best_val, best = val, S
    return best, float(best_val)


def as_explicit(family: FeasibilityFamily) -> ExplicitDC:
    """Explicit maximal-set form of any (small) family."""
    sets = [frozenset(S) for S in family.feasible_sets()]
    maximal = [S for S in sets if not any(S < T for T in sets)]
    return ExplicitDC(family.ground_size, tuple(tuple(sorted(m)) for m in maximal))
