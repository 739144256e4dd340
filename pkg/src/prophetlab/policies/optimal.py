"""Exact optimal online policy by backward induction.

The state after t arrivals is (atom indices of the t observed weights, selected
set).  Values live in numpy arrays indexed by the observed atom indices, one
array per feasible selected set, so each induction step is a vectorised max
followed by a contraction against the arriving element's probabilities.
"""
from __future__ import annotations

import numpy as np

from ..errors import BadParams, TooLarge
from ..instances import Instance
from .base import OnlinePolicy

MAX_LEAVES = 10**6
MAX_CELLS = 5 * 10**7
OBJECTIVES = ("roe", "eor", "pbm")
PBM_TOL = 1e-12


def leaf_values(objective: str, a: np.ndarray, f: np.ndarray) -> np.ndarray:
    if objective == "roe":
        return a
    if objective == "eor":
        out = np.ones_like(f)
        pos = f > 0
        out[pos] = a[pos] / f[pos]
        return out
    if objective == "pbm":
        return (np.abs(a - f) <= PBM_TOL * np.maximum(1.0, f)).astype(float)
    raise BadParams(f"unknown objective {objective!r}")


class OptimalPolicy(OnlinePolicy):
    """Deterministic optimal policy; ties go to rejection."""

    name = "optimal"

    def __init__(self, instance: Instance, objective: str):
        super().__init__(instance.family)
        objective = objective.lower()
        if objective not in OBJECTIVES:
            raise BadParams(f"objective must be one of {OBJECTIVES}")
        self.objective = objective
        self.name = f"optimal_{objective}"
        self.instance = instance
        order = instance.arrival_order
        dist = instance.dist
        if dist.joint_size > MAX_LEAVES:
            raise TooLarge(f"joint support {dist.joint_size} exceeds {MAX_LEAVES}")
        self._lookup = [{v: i for i, v in enumerate(dist[e].values)} for e in range(instance.n)]
        self._decisions, value = self._solve(instance, order)
        if objective == "roe":
            from ..expectations import expected_offline

            ef = expected_offline(instance)
            self.expected_value = value
            value = value / ef if ef > 0 else 1.0
        self.value = float(value)

    def _solve(self, instance, order):
        dist, fam, n = instance.dist, instance.family, instance.n
        dims = tuple(len(dist[e]) for e in order)
        sets_by_step = [[frozenset()]]
        for t in range(n):
            e = order[t]
            nxt = set(sets_by_step[-1])
            nxt.update(S | {e} for S in sets_by_step[-1] if fam.can_add(S, e))
            sets_by_step.append(sorted(nxt, key=lambda S: (len(S), sorted(S))))
        N = int(np.prod(dims))
        if N * len(sets_by_step[-1]) > MAX_CELLS:
            raise TooLarge("state space too large for backward induction")

        W, _ = dist.grid()  # element-index columns, product order over elements
        # Reorder rows to arrival order so that axis t is the t-th arrival.
        W = W.reshape(tuple(len(d) for d in dist) + (n,))
        W = np.transpose(W, axes=list(order) + [n]).reshape(N, n)
        f = fam.f_batch(W)

        V = {}
        for S in sets_by_step[n]:
            a = W[:, sorted(S)].sum(axis=1) if S else np.zeros(N)
            V[S] = leaf_values(self.objective, a, f).reshape(dims)

        decisions = [None] * n
        for t in range(n - 1, -1, -1):
            e = order[t]
            p = np.asarray(dist[e].probs)
            dec_t, newV = {}, {}
            for S in sets_by_step[t]:
                stay = V[S]
                if fam.can_add(S, e):
                    acc = V[S | {e}]
                    take = acc > stay + 1e-13 * np.abs(stay)
                    best = np.where(take, acc, stay)
                    if take.any():
                        dec_t[S] = take
                else:
                    best = stay
                newV[S] = np.tensordot(best, p, axes=([t], [0]))
            decisions[t] = dec_t
            V = newV
        return decisions, float(V[frozenset()])

    def params(self):
        return {}

    def decide(self, obs, state):
        table = self._decisions[obs.step].get(obs.selected)
        if table is None:
            return False
        order = self.instance.arrival_order
        idx = tuple(self._lookup[order[s]][v] for s, v in enumerate(obs.prefix))
        return bool(table[idx + (self._lookup[obs.element][obs.weight],)])


def optimal_policy(instance: Instance, objective: str = "roe") -> OptimalPolicy:
    return OptimalPolicy(instance, objective)
