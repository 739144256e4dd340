"""Checkers for the structural claims behind the reductions."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .distributions import (
    DiscreteDistribution,
    sample_from_uniforms,
    solve_gamma_threshold,
    truncate_product,
)
from .errors import BadParams, TooLarge
from .evaluation import MetricReport, evaluate_exact, event_probabilities, leaf_table
from .expectations import core_expectation
from .feasibility import FeasibilityFamily
from .instances import Instance, bernoulli_boost
from .policies import (
    PickElements,
    ReductionParams,
    RoeToEor,
    optimal_policy,
    truncated_instance,
)
from .rng import uniforms

SB_TOL = 1e-9
ENUM_LIMIT = 10**6


def _rng(rng) -> np.random.Generator:
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


# ---------------------------------------------------------------- self-bounding


@dataclass
class SelfBoundingReport:
    checked_points: int
    max_violation_cond1: float
    max_violation_cond2: float
    passed: bool

    @property
    def pass_(self) -> bool:
        return self.passed


def check_self_bounding(family: FeasibilityFamily, tau: float, num_points: int = 1000, rng=0,
                        points: np.ndarray | None = None) -> SelfBoundingReport:
    """Check both self-bounding conditions for g = f/tau on points of [0, tau]^n.

    ``points`` overrides the uniform sample (used to probe the checker itself).
    """
    if not tau > 0:
        raise BadParams("tau must be positive")
    n = family.ground_size
    W = points if points is not None else _rng(rng).uniform(0.0, tau, size=(num_points, n))
    g = family.f_batch(W) / tau
    diffs = np.empty_like(W)
    for e in range(n):
        We = W.copy()
        We[:, e] = 0.0
        diffs[:, e] = g - family.f_batch(We) / tau
    v1 = max(0.0, float(np.max(-diffs)), float(np.max(diffs - 1.0)))
    v2 = max(0.0, float(np.max(diffs.sum(axis=1) - g)))
    return SelfBoundingReport(len(W), v1, v2, v1 <= SB_TOL and v2 <= SB_TOL)


# ---------------------------------------------------------------- BLM tails


@dataclass
class TailRow:
    z: float
    upper_empirical: float
    upper_bound: float
    upper_ok: bool
    lower_empirical: float | None
    lower_bound: float | None
    lower_ok: bool

    @property
    def ok(self) -> bool:
        return self.upper_ok and self.lower_ok


@dataclass
class BLMTable:
    label: str
    tau: float
    mean_g: float
    trials: int
    rows: list

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.rows)

    def to_json(self) -> dict:
        return {"label": self.label, "tau": self.tau, "mean_g": self.mean_g, "trials": self.trials,
                "passed": self.passed, "rows": [asdict(r) for r in self.rows]}


def blm_upper(E: float, z: float) -> float:
    return math.exp(-3 * z * z / (6 * E + 2 * z)) if E + z > 0 else 1.0


def blm_lower(E: float, z: float) -> float:
    return math.exp(-z * z / (2 * E)) if E > 0 else 1.0


def sample_core(instance: Instance, gamma: float, trials: int, seed: int):
    """Draws of w_bar from the product truncated at the gamma threshold."""
    thr = solve_gamma_threshold(instance.dist, gamma)
    core = truncate_product(instance.dist, thr)
    t = np.arange(trials, dtype=np.uint64)
    W = np.stack([sample_from_uniforms(d, uniforms(seed, t, e)) for e, d in enumerate(core)], axis=1)
    return thr, core, W


def blm_tail_check(instance: Instance, gamma: float = 0.5, z_grid=None, trials: int = 10**5,
                   seed: int = 0, slack_se: float = 4.0) -> BLMTable:
    """Empirical tails of g = f(w_bar)/tau against the self-bounding concentration bounds."""
    if not 0 < gamma < 1:
        raise BadParams("gamma must lie in (0, 1)")
    if trials < 10**4:
        raise BadParams("need at least 10^4 trials")
    thr, core, W = sample_core(instance, gamma, trials, seed)
    g = instance.family.f_batch(W) / thr.tau
    E = core_expectation(instance, thr) / thr.tau
    if z_grid is None:
        z_grid = [s * math.sqrt(E) for s in (0.25, 0.5, 1.0, 1.5, 2.0)]
    rows = []
    for z in z_grid:
        up = float(np.mean(g >= E + z - 1e-12))
        ub = blm_upper(E, z)
        up_ok = up <= ub + slack_se * math.sqrt(up * (1 - up) / trials)
        if z < E:
            lo = float(np.mean(g <= E - z + 1e-12))
            lb = blm_lower(E, z)
            lo_ok = lo <= lb + slack_se * math.sqrt(lo * (1 - lo) / trials)
        else:
            lo, lb, lo_ok = None, None, True
        rows.append(TailRow(float(z), up, ub, up_ok, lo, lb, lo_ok))
    return BLMTable(instance.label, thr.tau, E, trials, rows)


# ---------------------------------------------------------------- reduction audit


@dataclass
class ReductionAudit:
    tau: float
    q: float
    W: float
    c: float
    branch: str
    p_core: float
    p_tail: float
    alpha: float
    prob_f_above_delta_W: float
    bound_alpha_over_k: float
    cond_value: float | None  # E[a | f <= delta W, core]
    cond_rhs: float  # (1 - (delta-1)/k) alpha W
    superstar_rhs: float  # gamma ln(1/gamma) / (c+1)
    combinatorial_rhs: float  # (gamma/delta)((k-delta)/k) alpha
    eor: float
    guarantee: float
    alpha_over_12: float

    @property
    def lemma_holds(self) -> bool:
        rhs = self.superstar_rhs if self.branch == "superstar" else self.combinatorial_rhs
        return self.eor >= rhs - 1e-9

    def to_json(self) -> dict:
        d = asdict(self)
        d["lemma_holds"] = self.lemma_holds
        return d


def reduction_audit(instance: Instance, params: ReductionParams | None = None) -> ReductionAudit:
    """Evaluate every displayed inequality of the RoE-to-EoR analysis on one instance."""
    gamma = params.gamma if params else 0.5
    thr = solve_gamma_threshold(instance.dist, gamma)
    core = truncated_instance(instance, thr)
    if core.dist.joint_size > ENUM_LIMIT:
        raise TooLarge("core instance too large for exact audit")
    sub = optimal_policy(core, "roe")
    alpha = min(1.0, sub.value)
    if params is None:
        params = ReductionParams(alpha=alpha, gamma=gamma)
    policy = RoeToEor(instance, sub, params)
    W = policy.W
    leaves = leaf_table(core, sub)
    big = leaves.f > params.delta * W * (1 + 1e-12)
    p_big = float(np.sum(leaves.p[big]))
    small_mass = float(np.sum(leaves.p[~big]))
    cond = float(np.sum(leaves.p[~big] * leaves.a[~big]) / small_mass) if small_mass > 0 else None
    ev = event_probabilities(instance, gamma)
    g, d, k, c = params.gamma, params.delta, params.k, params.c
    return ReductionAudit(
        tau=thr.tau, q=thr.accept_prob_at_atom, W=W, c=c, branch=policy.branch,
        p_core=ev.p_core, p_tail=ev.p_tail, alpha=params.alpha,
        prob_f_above_delta_W=p_big, bound_alpha_over_k=params.alpha / k,
        cond_value=cond, cond_rhs=(1 - (d - 1) / k) * params.alpha * W,
        superstar_rhs=g * math.log(1 / g) / (c + 1),
        combinatorial_rhs=(g / d) * ((k - d) / k) * params.alpha,
        eor=evaluate_exact(instance, policy).eor,
        guarantee=params.guarantee(), alpha_over_12=params.alpha / 12,
    )


def default_guarantee_identity(alpha: float) -> tuple[float, float]:
    """(min-expression at the default parameters, alpha/12)."""
    c = (8 / 3) * math.log(3 / alpha)
    return min((math.log(2) / 2) / (c + 1), alpha / 12), alpha / 12


# ---------------------------------------------------------------- literal claims


def gamma_lemma(instance: Instance, gamma: float) -> tuple[bool, float, float]:
    ev = event_probabilities(instance, gamma)
    ok = abs(ev.p_core - gamma) <= 1e-9 and ev.p_tail >= gamma * math.log(1 / gamma) - 1e-9
    return ok, ev.p_core, ev.p_tail


def imply_claim(report: MetricReport) -> tuple[bool, float, float]:
    """Pr[ratio >= alpha/2] >= alpha/2 read off an exact ratio distribution with mean alpha."""
    alpha = report.eor
    lhs = report.prob_ratio_at_least(alpha / 2)
    return lhs >= alpha / 2 - 1e-9, lhs, alpha / 2


def _random_law(rng, max_atoms=4, lo=0.01, hi=10.0) -> DiscreteDistribution:
    m = int(rng.integers(1, max_atoms + 1))
    vals = np.unique(rng.uniform(lo, hi, size=m))
    p = rng.dirichlet(np.ones(len(vals)))
    p[-1] = 1 - p[:-1].sum()
    return DiscreteDistribution(tuple(map(float, vals)), tuple(map(float, p)))


def jensen_claims(cases: int = 200, rng=0) -> tuple[bool, float]:
    """E[a/(a+u)] >= a/(a+E[u]) and E[u/(a+v)] >= E[u]/(a+E[v]) for independent positive u, v."""
    rng = _rng(rng)
    worst = math.inf
    for _ in range(cases):
        a = float(rng.uniform(0.1, 10))
        u, v = _random_law(rng), _random_law(rng)
        lhs1 = math.fsum(p * a / (a + x) for x, p in u.atoms)
        lhs2 = math.fsum(pu * pv * x / (a + y) for x, pu in u.atoms for y, pv in v.atoms)
        worst = min(worst, lhs1 - a / (a + u.mean()), lhs2 - u.mean() / (a + v.mean()))
    return worst >= -1e-12, worst


def amgm_claim(cases: int = 1000, rng=0) -> tuple[bool, float]:
    """n(1-p)/p <= sum (1-p_i)/p_i with p the geometric mean of p_1..p_n."""
    rng = _rng(rng)
    worst = math.inf
    for _ in range(cases):
        n = int(rng.integers(1, 12))
        ps = rng.uniform(1e-3, 1 - 1e-3, size=n)
        gm = math.exp(float(np.mean(np.log(ps))))
        rhs = float(np.sum((1 - ps) / ps))
        worst = min(worst, rhs - n * (1 - gm) / gm + 1e-12 * max(1.0, rhs))
    return worst >= 0, worst


def opts_claim(instances, per_instance: int = 200, seed: int = 0) -> tuple[bool, float]:
    """f(w) <= f(w_bar) + sum_e w_e 1[w_e > tau] for w_bar the coupled resample."""
    worst = math.inf
    for i, inst in enumerate(instances):
        rng = np.random.default_rng(seed + i)
        thr = solve_gamma_threshold(inst.dist, float(rng.uniform(0.05, 0.95)))
        core = truncate_product(inst.dist, thr)
        for _ in range(per_instance):
            w = np.array([d.values[rng.choice(len(d), p=d.probs)] for d in inst.dist])
            fresh = np.array([d.values[rng.choice(len(d), p=d.probs)] for d in core])
            over = w > thr.tau
            wbar = np.where(over, fresh, w)
            lhs = inst.family.f(w)
            rhs = inst.family.f(wbar) + float(np.sum(w[over]))
            worst = min(worst, rhs - lhs + 1e-12 * max(1.0, lhs))
    return worst >= 0, worst


# ---------------------------------------------------------------- boost


@dataclass
class BoostCheck:
    x: float
    eor_before: float
    eor_after: float
    roe_target_after: float

    @property
    def passed(self) -> bool:
        return self.eor_after <= self.x + self.eor_before + 1e-9 and self.roe_target_after >= 0.5 - 1e-9


def boost_check(instance: Instance, x: float, target: int = 0) -> BoostCheck:
    """Bernoulli boost: optimal EoR barely moves while always-target reaches RoE 1/2."""
    boosted = bernoulli_boost(instance, x, target)
    before = evaluate_exact(instance, optimal_policy(instance, "eor")).eor
    after = evaluate_exact(boosted, optimal_policy(boosted, "eor")).eor
    roe = evaluate_exact(boosted, PickElements(boosted.family, target)).roe
    return BoostCheck(x, before, after, roe)

