"""Exact and Monte Carlo performance measures for (instance, policy) pairs."""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .distributions import RandomizedThreshold, solve_gamma_threshold
from .errors import PolicyError, TooLarge, UndeclaredRandomness
from .expectations import core_expectation, expected_offline  # noqa: F401  (re-exported)
from .feasibility import SingleChoice
from .instances import Instance
from .policies.base import Observation, OnlinePolicy
from .rng import uniforms

MAX_EXACT_LEAVES = 10**7
COMPRESS_ABOVE = 10**5
PBM_TOL = 1e-12
Z95 = 1.959963984540054
BLOCK = 1 << 14
METRICS = ("roe", "eor", "eoir", "pbm", "pbm_p", "ev", "eopt")
CSV_COLUMNS = ("label", "policy", "mode") + METRICS + tuple(f"ci_{m}" for m in METRICS)


@dataclass
class MetricReport:
    label: str
    policy: str
    mode: str  # "exact" or "mc"
    roe: float
    eor: float
    eoir: float
    pbm: float
    pbm_p: float | None
    expected_value: float
    expected_opt: float
    expected_utility: float | None = None
    utility_cap: float | None = None
    ratio_distribution: list = field(default_factory=list)
    trials: int | None = None
    seed: int | None = None
    ci_halfwidth: dict = field(default_factory=dict)

    def _row(self) -> dict:
        vals = {"label": self.label, "policy": self.policy, "mode": self.mode,
                "roe": self.roe, "eor": self.eor, "eoir": self.eoir, "pbm": self.pbm,
                "pbm_p": self.pbm_p, "ev": self.expected_value, "eopt": self.expected_opt}
        for m in METRICS:
            vals[f"ci_{m}"] = self.ci_halfwidth.get(m)
        return vals

    def to_json(self) -> dict:
        d = asdict(self)
        d["ratio_distribution"] = [[r, p] for r, p in self.ratio_distribution]
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, default=_json_default)

    @staticmethod
    def csv_header() -> str:
        return ",".join(CSV_COLUMNS)

    def csv_row(self) -> str:
        buf = io.StringIO()
        row = self._row()
        csv.writer(buf, lineterminator="").writerow(["" if row[c] is None else _fmt(row[c]) for c in CSV_COLUMNS])
        return buf.getvalue()

    def to_csv(self) -> str:
        return self.csv_header() + "\n" + self.csv_row() + "\n"

    def prob_ratio_at_least(self, x: float) -> float:
        return math.fsum(p for r, p in self.ratio_distribution if r >= x - 1e-15)


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(type(o))


@dataclass(frozen=True)
class EventProbs:
    p_core: float
    p_tail: float
    threshold: RandomizedThreshold


def event_probabilities(instance: Instance, gamma: float) -> EventProbs:
    thr = solve_gamma_threshold(instance.dist, gamma)
    stay = [thr.stay_prob(d) for d in instance.dist]
    up = [thr.exceed_prob(d) for d in instance.dist]
    core = math.prod(stay)
    tail = math.fsum(up[e] * math.prod(s for j, s in enumerate(stay) if j != e) for e in range(len(stay)))
    return EventProbs(core, tail, thr)


# ---------------------------------------------------------------- shared maths


def _ratio(a: np.ndarray, f: np.ndarray) -> np.ndarray:
    r = np.ones_like(f)
    pos = f > 0
    r[pos] = a[pos] / f[pos]
    return r


def _inv_ratio(a: np.ndarray, f: np.ndarray) -> np.ndarray:
    out = np.ones_like(f)
    both = (f > 0) & (a > 0)
    out[both] = f[both] / a[both]
    out[(f > 0) & (a <= 0)] = np.inf
    return out


def _hit(a: np.ndarray, f: np.ndarray) -> np.ndarray:
    return np.abs(a - f) <= PBM_TOL * np.maximum(1.0, f)


def _ratio_table(r: np.ndarray, p: np.ndarray) -> list[tuple[float, float]]:
    acc: dict[float, float] = {}
    for x, q in zip(r.tolist(), p.tolist()):
        acc[x] = acc.get(x, 0.0) + q
    return sorted(acc.items())


def _weighted(x: np.ndarray, p: np.ndarray) -> float:
    if np.isinf(x[p > 0]).any():
        return math.inf
    return float(np.sum(np.where(p > 0, x, 0.0) * p))


def _opt_membership(instance: Instance, W: np.ndarray) -> np.ndarray:
    """Boolean (N, n): element e lies in OPT(w) for row w (element-index columns)."""
    fam = instance.family
    if isinstance(fam, SingleChoice):
        arg = np.argmax(W, axis=1)
        out = np.zeros(W.shape, dtype=bool)
        pos = W[np.arange(len(W)), arg] > 0
        out[np.arange(len(W))[pos], arg[pos]] = True
        return out
    out = np.zeros(W.shape, dtype=bool)
    cache: dict[bytes, tuple] = {}
    for i, row in enumerate(W):
        key = row.tobytes()
        S = cache.get(key)
        if S is None:
            S = cache[key] = fam.offline_optimum(row)[0]
        out[i, list(S)] = True
    return out


# ---------------------------------------------------------------- exact


def _ordered_grid(instance: Instance):
    """Joint support with rows in product order of the arrival sequence.

    Columns stay indexed by element; only the row order follows arrivals.
    """
    dist, order, n = instance.dist, instance.arrival_order, instance.n
    W, P = dist.grid()
    shape = tuple(len(d) for d in dist)
    W = np.transpose(W.reshape(shape + (n,)), axes=list(order) + [n]).reshape(-1, n)
    P = np.transpose(P.reshape(shape), axes=list(order)).reshape(-1)
    return W, P


def _enumerate(instance: Instance, policy: OnlinePolicy):
    """All leaves (row, prob, selected) of the realisation-by-randomness tree."""
    if not policy.declared:
        raise UndeclaredRandomness(f"{policy.describe()} does not declare its randomness")
    dist, order, fam = instance.dist, instance.arrival_order, instance.family
    start = [(p, s) for p, s in policy.start() if p > 0]
    nodes = [(0, p, s, frozenset(), ()) for p, s in start]
    for t, e in enumerate(order):
        atoms = dist[e].atoms
        m = len(atoms)
        nxt = []
        for row, prob, state, sel, prefix in nodes:
            for j, (w, pw) in enumerate(atoms):
                obs = Observation(t, e, w, sel, prefix)
                for q, acc, ns in policy.step(obs, state):
                    if q <= 0:
                        continue
                    if acc:
                        if not fam.can_add(sel, e):
                            raise PolicyError(f"{policy.describe()} accepted infeasible element {e}")
                        nsel = sel | {e}
                    else:
                        nsel = sel
                    nxt.append((row * m + j, prob * pw * q, ns, nsel, prefix + (w,)))
        nodes = nxt
        if len(nodes) > MAX_EXACT_LEAVES:
            raise TooLarge(f"more than {MAX_EXACT_LEAVES} leaves")
    return nodes


def _compressible(instance: Instance, policy: OnlinePolicy) -> bool:
    return (isinstance(instance.family, SingleChoice) and policy.memoryless and policy.declared
            and len(policy.start()) == 1)


def evaluate_exact(instance: Instance, policy: OnlinePolicy, utility_cap: float | None = None,
                   method: str = "auto") -> MetricReport:
    """Exact metrics by enumerating weights and declared policy randomness.

    ``method`` is "tree", "compressed" (single-choice memoryless policies), or
    "auto", which compresses only when the joint support is large.
    """
    if method == "compressed" or (method == "auto" and instance.dist.joint_size > COMPRESS_ABOVE
                                  and _compressible(instance, policy)):
        if not _compressible(instance, policy):
            raise ValueError("compressed evaluation needs a memoryless single-choice policy")
        return _evaluate_compressed(instance, policy, utility_cap)
    t = leaf_table(instance, policy)
    opt = _opt_membership(instance, t.grid)[t.rows]
    in_opt = (opt * t.p[:, None]).sum(axis=0)
    both = ((opt & t.selected) * t.p[:, None]).sum(axis=0)
    live = in_opt > 1e-15
    pbmp = float(np.min(both[live] / in_opt[live])) if live.any() else 1.0
    return _report(instance, policy, "exact", t.p, t.a, t.f, pbmp, utility_cap)


@dataclass
class LeafTable:
    """Leaves of the exact tree: probability, value, optimum, selected mask, weight row."""

    p: np.ndarray
    a: np.ndarray
    f: np.ndarray
    selected: np.ndarray
    rows: np.ndarray
    grid: np.ndarray  # (N, n) joint support, element-index columns

    @property
    def weights(self) -> np.ndarray:
        return self.grid[self.rows]


def leaf_table(instance: Instance, policy: OnlinePolicy) -> LeafTable:
    joint = instance.dist.joint_size
    if joint > MAX_EXACT_LEAVES:
        raise TooLarge(f"joint support {joint} exceeds {MAX_EXACT_LEAVES}")
    leaves = _enumerate(instance, policy)
    grid, _ = _ordered_grid(instance)
    f_rows = instance.family.f_batch(grid)
    rows = np.fromiter((l[0] for l in leaves), dtype=np.int64, count=len(leaves))
    p = np.fromiter((l[1] for l in leaves), dtype=float, count=len(leaves))
    sel = np.zeros((len(leaves), instance.n), dtype=bool)
    for i, l in enumerate(leaves):
        if l[3]:
            sel[i, list(l[3])] = True
    a = np.sum(np.where(sel, grid[rows], 0.0), axis=1)
    return LeafTable(p, a, f_rows[rows], sel, rows, grid)


def _report(instance, policy, mode, p, a, f, pbmp, cap, ratio_table=None) -> MetricReport:
    ev, eopt = float(np.sum(p * a)), float(np.sum(p * f))
    r = _ratio(a, f)
    return MetricReport(
        label=instance.label, policy=policy.describe(), mode=mode,
        roe=ev / eopt if eopt > 0 else 1.0,
        eor=float(np.sum(p * r)),
        eoir=_weighted(_inv_ratio(a, f), p),
        pbm=float(np.sum(p * _hit(a, f))),
        pbm_p=pbmp,
        expected_value=ev, expected_opt=eopt,
        expected_utility=None if cap is None else float(np.sum(p * np.minimum(a, cap))),
        utility_cap=cap,
        ratio_distribution=ratio_table if ratio_table is not None else _ratio_table(r, p),
    )


def _evaluate_compressed(instance: Instance, policy: OnlinePolicy, cap) -> MetricReport:
    """Single-choice memoryless policies: the step-t pick only interacts with the
    rejected-prefix maximum and the unconstrained suffix maximum."""
    dist, order = instance.dist, instance.arrival_order
    grid = np.asarray(dist.support_values())
    n = len(order)
    acc = []
    for e in order:
        acc.append(np.array([policy.accept_prob(e, v) for v in dist[e].values]))
    # suffix[t][k] = Pr[max of arrivals t.. <= grid[k]]
    suffix = [np.ones(len(grid)) for _ in range(n + 1)]
    for t in range(n - 1, -1, -1):
        d = dist[order[t]]
        suffix[t] = suffix[t + 1] * np.array([d.cdf(v) for v in grid])
    a_parts, f_parts, p_parts = [], [], []
    G = np.ones(len(grid))  # Pr[no pick so far and prefix max <= grid[k]]
    for t in range(n):
        d = dist[order[t]]
        H = suffix[t + 1]
        for (x, px), ax in zip(d.atoms, acc[t]):
            if ax <= 0:
                continue
            # law of Z = max(rejected prefix, suffix) as increments of G*H
            F = G * H
            mass = np.diff(np.concatenate(([0.0], F)))
            w = px * ax * mass
            keep = w > 0
            z = grid[keep]
            a_parts.append(np.full(z.shape, x))
            f_parts.append(np.maximum(z, x))
            p_parts.append(w[keep])
        stay = np.array([px * (1 - ax) for (x, px), ax in zip(d.atoms, acc[t])])
        G = G * np.array([stay[np.asarray(d.values) <= v].sum() for v in grid])
    mass = np.diff(np.concatenate(([0.0], G)))
    keep = mass > 0
    a_parts.append(np.zeros(keep.sum()))
    f_parts.append(grid[keep])
    p_parts.append(mass[keep])
    a, f, p = map(np.concatenate, (a_parts, f_parts, p_parts))
    return _report(instance, policy, "exact", p, a, f, None, cap)


def evaluate_random_order(instance: Instance, policy: OnlinePolicy, utility_cap=None) -> MetricReport:
    """Exact metrics with the arrival order uniform over all permutations (n <= 8)."""
    n = instance.n
    if n > 8:
        raise TooLarge("random-order enumeration is limited to 8 elements")
    reports = [evaluate_exact(instance.with_order(perm), policy, utility_cap, method="tree")
               for perm in itertools.permutations(range(n))]
    k = len(reports)
    mean = lambda attr: math.fsum(getattr(r, attr) for r in reports) / k  # noqa: E731
    ev, eopt = mean("expected_value"), mean("expected_opt")
    table: dict[float, float] = {}
    for r in reports:
        for x, p in r.ratio_distribution:
            table[x] = table.get(x, 0.0) + p / k
    return MetricReport(
        label=f"{instance.label}[random order]", policy=policy.describe(), mode="exact",
        roe=ev / eopt if eopt > 0 else 1.0, eor=mean("eor"), eoir=mean("eoir"), pbm=mean("pbm"),
        pbm_p=None, expected_value=ev, expected_opt=eopt,
        expected_utility=None if utility_cap is None else mean("expected_utility"),
        utility_cap=utility_cap, ratio_distribution=sorted(table.items()),
    )


# ---------------------------------------------------------------- Monte Carlo


def _threads() -> int:
    try:
        cap = int(os.environ.get("PROPHET_LAB_THREADS", "0"))
    except ValueError:
        cap = 0
    n = os.cpu_count() or 1
    return max(1, min(n, cap) if cap > 0 else n)


def _pick(outcomes, u):
    c = 0.0
    for o in outcomes:
        c += o[0]
        if u < c:
            return o
    return outcomes[-1]


def _mc_block(instance: Instance, policy: OnlinePolicy, seed: int, lo: int, hi: int):
    dist, order, fam, n = instance.dist, instance.arrival_order, instance.family, instance.n
    trials = np.arange(lo, hi, dtype=np.uint64)
    B = hi - lo
    idx = np.empty((B, n), dtype=np.int64)
    W = np.empty((B, n))
    for e, d in enumerate(dist):
        u = uniforms(seed, trials, e)
        k = np.minimum(np.searchsorted(np.cumsum(d.probs), u, side="right"), len(d) - 1)
        idx[:, e] = k
        W[:, e] = np.asarray(d.values)[k]
    sel = np.zeros((B, n), dtype=bool)
    coins = np.stack([uniforms(seed, trials, n + 1 + t) for t in range(n)], axis=1)
    if _compressible(instance, policy):
        done = np.zeros(B, dtype=bool)
        for t, e in enumerate(order):
            table = np.array([policy.accept_prob(e, v) for v in dist[e].values])
            take = ~done & (coins[:, t] < table[idx[:, e]])
            sel[take, e] = True
            done |= take
    else:
        u0 = uniforms(seed, trials, n)
        for b in range(B):
            start = _pick(policy.start(), u0[b])
            state, chosen, prefix = start[1], frozenset(), ()
            for t, e in enumerate(order):
                w = float(W[b, e])
                _, acc, state = _pick(policy.step(Observation(t, e, w, chosen, prefix), state), coins[b, t])
                if acc:
                    if not fam.can_add(chosen, e):
                        raise PolicyError(f"{policy.describe()} accepted infeasible element {e}")
                    chosen = chosen | {e}
                prefix = prefix + (w,)
            if chosen:
                sel[b, list(chosen)] = True
    a = np.where(sel, W, 0.0).sum(axis=1)
    f = fam.f_batch(W)
    opt = _opt_membership(instance, W)
    return a, f, sel, opt


def evaluate_monte_carlo(instance: Instance, policy: OnlinePolicy, trials: int, seed: int = 0,
                         utility_cap: float | None = None) -> MetricReport:
    """Seeded estimates with 95% normal intervals; identical for any thread count."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    bounds = [(lo, min(trials, lo + BLOCK)) for lo in range(0, trials, BLOCK)]
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        parts = list(pool.map(lambda b: _mc_block(instance, policy, seed, *b), bounds))
    a = np.concatenate([x[0] for x in parts])
    f = np.concatenate([x[1] for x in parts])
    sel = np.concatenate([x[2] for x in parts])
    opt = np.concatenate([x[3] for x in parts])
    T = len(a)
    r, ir, hit = _ratio(a, f), _inv_ratio(a, f), _hit(a, f).astype(float)

    def mean_ci(x):
        m = float(np.sum(x) / T)
        s = float(np.max(np.abs(x))) if np.all(np.isfinite(x)) and T else 1.0
        s = s if s > 0 else 1.0
        if T < 2 or not np.isfinite(m):
            return m, (math.inf if not np.isfinite(m) else 0.0)
        return m, Z95 * s * float(np.std(x / s, ddof=1)) / math.sqrt(T)

    ev, ci_ev = mean_ci(a)
    eopt, ci_eopt = mean_ci(f)
    eor, ci_eor = mean_ci(r)
    eoir, ci_eoir = mean_ci(ir)
    pbm, ci_pbm = mean_ci(hit)
    roe = ev / eopt if eopt > 0 else 1.0
    if T > 1 and eopt > 0:
        # scale first: weights can sit near 1e300, where squares overflow
        s = float(np.max(f))
        cov = np.cov(np.stack([a / s, f / s]), ddof=1)
        var = (cov[0, 0] - 2 * roe * cov[0, 1] + roe * roe * cov[1, 1]) / (eopt / s) ** 2
        ci_roe = Z95 * math.sqrt(max(var, 0.0) / T)
    else:
        ci_roe = 0.0
    n_opt = opt.sum(axis=0)
    n_both = (opt & sel).sum(axis=0)
    live = n_opt > 0
    if live.any():
        rates = n_both[live] / n_opt[live]
        j = int(np.argmin(rates))
        pbmp = float(rates[j])
        ci_pbmp = Z95 * math.sqrt(pbmp * (1 - pbmp) / n_opt[live][j])
    else:
        pbmp, ci_pbmp = 1.0, 0.0
    util = None if utility_cap is None else float(np.sum(np.minimum(a, utility_cap)) / T)
    vals, counts = np.unique(r, return_counts=True)
    return MetricReport(
        label=instance.label, policy=policy.describe(), mode="mc",
        roe=roe, eor=eor, eoir=eoir, pbm=pbm, pbm_p=pbmp,
        expected_value=ev, expected_opt=eopt, expected_utility=util, utility_cap=utility_cap,
        ratio_distribution=list(zip(vals.tolist(), (counts / T).tolist())),
        trials=trials, seed=seed,
        ci_halfwidth={"roe": ci_roe, "eor": ci_eor, "eoir": ci_eoir, "pbm": ci_pbm,
                      "pbm_p": ci_pbmp, "ev": ci_ev, "eopt": ci_eopt},
    )


# ---------------------------------------------------------------- convenience


def evaluate(instance: Instance, policy: OnlinePolicy, mode: str = "exact", trials: int | None = None,
             seed: int = 0, utility_cap: float | None = None) -> MetricReport:
    if mode == "exact":
        return evaluate_exact(instance, policy, utility_cap)
    if mode == "mc":
        if not trials:
            raise ValueError("Monte Carlo mode needs a trial count")
        return evaluate_monte_carlo(instance, policy, trials, seed, utility_cap)
    raise ValueError(f"unknown mode {mode!r}")


def pbm_p(instance: Instance, policy: OnlinePolicy, trials: int | None = None, seed: int = 0) -> float:
    """min_e Pr[e in ALG | e in OPT]; exact when ``trials`` is None."""
    if trials is None:
        rep = evaluate_exact(instance, policy, method="tree")
    else:
        rep = evaluate_monte_carlo(instance, policy, trials, seed)
    return rep.pbm_p


def expected_utility(instance: Instance, policy: OnlinePolicy, cap: float, trials: int | None = None,
                     seed: int = 0) -> float:
    if trials is None:
        return evaluate_exact(instance, policy, utility_cap=cap).expected_utility
    return evaluate_monte_carlo(instance, policy, trials, seed, utility_cap=cap).expected_utility


def secretary_monte_carlo(n: int, r: int, trials: int, seed: int = 0) -> tuple[float, float]:
    """Win probability of the wait-r rule over uniformly random orders of n distinct values."""
    wins = []
    for lo in range(0, trials, BLOCK):
        t = np.arange(lo, min(trials, lo + BLOCK), dtype=np.uint64)
        keys = np.stack([uniforms(seed, t, e) for e in range(n)], axis=1)
        vals = np.argsort(keys, axis=1)  # a uniformly random permutation of ranks
        bar = vals[:, :r].max(axis=1) if r > 0 else np.full(len(t), -1)
        beat = vals[:, r:] > bar[:, None]
        first = np.argmax(beat, axis=1)
        picked = vals[np.arange(len(t)), r + first]
        wins.append(beat.any(axis=1) & (picked == n - 1))
    w = np.concatenate(wins).astype(float)
    p = float(np.sum(w) / trials)
    return p, Z95 * math.sqrt(p * (1 - p) / trials)
