"""Named verification checks run by ``prophetlab verify``."""
from __future__ import annotations

import math
from dataclasses import dataclass


from . import analysis
from .distributions import DiscreteDistribution, ProductDistribution, expected_max
from .evaluation import evaluate_exact
from .feasibility import KUniform
from .instances import Instance, gen_example1, gen_example2, gen_example3, gen_risk, gen_roe_ub
from .policies import (
    AlwaysFirst,
    FixedThreshold,
    PickElements,
    build_eor_to_roe,
    build_roe_to_eor,
    build_single_sample,
    eor_threshold_policy,
    fixed_threshold_policy,
    optimal_policy,
)
from .suites import explicit_suite, mixed_suite, single_choice_suite, structured_families


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _close(x, y, tol):
    return abs(x - y) <= tol


def check_examples(seed: int = 0, **_) -> list[CheckResult]:
    out = []
    for eps in (0.5, 0.1, 0.01):
        I = gen_example1(eps)
        thr = evaluate_exact(I, FixedThreshold(I.family, 1 + eps / 2)).eor
        first = evaluate_exact(I, AlwaysFirst(I.family)).eor
        want = (1 - eps) + eps * eps / (1 + 2 * eps)
        out.append(CheckResult(f"example1 eps={eps}", _close(thr, eps, 1e-12) and _close(first, want, 1e-12),
                               f"threshold eor={thr:.12g} always_first eor={first:.12g}"))
    I = gen_example3(0.1)
    r = evaluate_exact(I, AlwaysFirst(I.family))
    out.append(CheckResult("example3 eps=0.1", _close(r.eor, 0.901, 1e-12) and _close(r.roe, 1 / 10.9, 1e-12)
                           and r.eoir >= 10, f"eor={r.eor:.12g} roe={r.roe:.12g} eoir={r.eoir:.6g}"))
    for n in (1, 2, 3):
        I = gen_example2(n)
        opt = optimal_policy(I, "pbm").value
        r = evaluate_exact(I, AlwaysFirst(I.family))
        ok = _close(opt, 2.0**-n, 1e-12) and _close(r.pbm, 2.0**-n, 1e-12) and r.eor >= 2 / 3
        out.append(CheckResult(f"example2 n={n}", ok, f"optimal pbm={opt:.12g} always_first eor={r.eor:.6g}"))
    I = gen_roe_ub(0.01)
    v = optimal_policy(I, "roe").value
    out.append(CheckResult("roe_ub eps=0.01", v <= 1 / 1.99 + 1e-9, f"optimal roe={v:.12g}"))
    I = gen_risk(0.25)
    r = evaluate_exact(I, PickElements(I.family, 1), utility_cap=8.0)
    ok = _close(r.expected_utility, 2.0, 1e-12) and r.roe <= 0.25 and r.eor <= 0.5
    out.append(CheckResult("risk eps=0.25", ok, f"util={r.expected_utility:.12g} roe={r.roe:.6g} eor={r.eor:.6g}"))
    return out


def check_prophet(seed: int = 2024, **_) -> list[CheckResult]:
    worst_roe, worst_eor = math.inf, math.inf
    for I in single_choice_suite(seed=seed):
        worst_roe = min(worst_roe, evaluate_exact(I, fixed_threshold_policy(I)).roe)
        worst_eor = min(worst_eor, evaluate_exact(I, eor_threshold_policy(I)).eor)
    return [CheckResult("fixed threshold roe >= 1/2", worst_roe >= 0.5 - 1e-9, f"min={worst_roe:.6g}"),
            CheckResult("1/e threshold eor >= 1/e", worst_eor >= 1 / math.e - 1e-9, f"min={worst_eor:.6g}")]


def check_gamma(seed: int = 3, **_) -> list[CheckResult]:
    out = []
    insts = mixed_suite(50, seed=seed)
    for g in (0.1, 0.25, 0.5, 1 / math.e, 0.9):
        res = [analysis.gamma_lemma(I, g) for I in insts]
        dev = max(abs(c - g) for _, c, _ in res)
        tail = min(t for _, _, t in res)
        out.append(CheckResult(f"gamma lemma g={g:.4g}", all(ok for ok, _, _ in res),
                               f"max|p_core-g|={dev:.2e} min p_tail={tail:.6g} floor={g * math.log(1 / g):.6g}"))
    return out


def check_selfbound(seed: int = 0, **_) -> list[CheckResult]:
    out = []
    fams = structured_families() + explicit_suite(50)
    bad = 0
    worst = 0.0
    for i, fam in enumerate(fams):
        rep = analysis.check_self_bounding(fam, 1.0 + i % 3, 1000, seed + i)
        bad += not rep.passed
        worst = max(worst, rep.max_violation_cond1, rep.max_violation_cond2)
    out.append(CheckResult(f"self-bounding on {len(fams)} families", bad == 0, f"max violation={worst:.2e}"))
    return out


def blm_instances():
    ku = Instance(KUniform(20, 5),
                  ProductDistribution(tuple(DiscreteDistribution.uniform_grid(0.0, 1.0, 16) for _ in range(20))),
                  label="kuniform(20,5) iid")
    return [gen_example2(20), ku]


def check_blm(seed: int = 7, trials: int = 10**5, **_) -> list[CheckResult]:
    out = []
    for I in blm_instances():
        tab = analysis.blm_tail_check(I, 0.5, trials=trials, seed=seed)
        detail = "; ".join(f"z={r.z:.3g} up={r.upper_empirical:.4g}<={r.upper_bound:.4g}"
                           + (f" lo={r.lower_empirical:.4g}<={r.lower_bound:.4g}" if r.lower_bound is not None else "")
                           for r in tab.rows)
        out.append(CheckResult(f"BLM tails {I.label}", tab.passed, detail))
    return out


def check_claims(seed: int = 0, **_) -> list[CheckResult]:
    j, jw = analysis.jensen_claims(rng=seed)
    a, aw = analysis.amgm_claim(rng=seed)
    o, ow = analysis.opts_claim(mixed_suite(20, seed=seed + 1), per_instance=100, seed=seed)
    worst_imply, worst_inv = math.inf, math.inf
    for I in single_choice_suite(40, seed=seed + 5):
        for pol in (fixed_threshold_policy(I), eor_threshold_policy(I), AlwaysFirst(I.family)):
            rep = evaluate_exact(I, pol)
            _, lhs, rhs = analysis.imply_claim(rep)
            worst_imply = min(worst_imply, lhs - rhs)
            if rep.eor > 0:
                worst_inv = min(worst_inv, rep.eoir - 1 / rep.eor)
    return [CheckResult("jensen", j, f"min slack={jw:.2e}"),
            CheckResult("am-gm", a, f"min slack={aw:.2e}"),
            CheckResult("opts coupling", o, f"min slack={ow:.2e}"),
            CheckResult("imply", worst_imply >= -1e-9, f"min slack={worst_imply:.3g}"),
            CheckResult("eoir >= 1/eor", worst_inv >= -1e-9, f"min slack={worst_inv:.3g}")]


def reduction_rows(insts=None):
    """Per-instance (label, alpha, metric, floor) for the three reductions."""
    insts = insts if insts is not None else mixed_suite()
    rows = []
    for I in insts:
        p = build_roe_to_eor(I)
        rows.append(("roe2eor", I.label, p.params_.alpha, evaluate_exact(I, p).eor, p.params_.alpha / 12))
        p = build_eor_to_roe(I)
        rows.append(("eor2roe", I.label, p.alpha, evaluate_exact(I, p).roe, p.alpha / 68))
        p = build_single_sample(I)
        rows.append(("single_sample", I.label, p.params_.alpha, evaluate_exact(I, p).eor, p.params_.alpha / 144))
    return rows


def check_reductions(seed: int = 7, **_) -> list[CheckResult]:
    rows = reduction_rows(mixed_suite(seed=seed))
    out = []
    for kind, div in (("roe2eor", 12), ("eor2roe", 68), ("single_sample", 144)):
        sel = [r for r in rows if r[0] == kind]
        ok = all(m >= fl - 1e-9 for _, _, _, m, fl in sel)
        worst = min(m / (a / div) for _, _, a, m, _ in sel)
        out.append(CheckResult(f"{kind} >= alpha/{div}", ok, f"min measured/(alpha/{div})={worst:.4g}"))
    return out


def check_boost(x: float = 0.05, **_) -> list[CheckResult]:
    b = analysis.boost_check(gen_example2(3), x)
    return [CheckResult(f"boost x={x}", b.passed,
                        f"eor before={b.eor_before:.6g} after={b.eor_after:.6g} target roe={b.roe_target_after:.6g}")]


def check_optimal(seed: int = 5, **_) -> list[CheckResult]:
    worst = math.inf
    for I in single_choice_suite(30, seed=seed, max_n=4, max_atoms=3):
        lib = [fixed_threshold_policy(I), eor_threshold_policy(I), AlwaysFirst(I.family)]
        lib += [PickElements(I.family, e) for e in range(I.n)]
        reps = [evaluate_exact(I, p) for p in lib]
        for obj in ("roe", "eor", "pbm"):
            v = optimal_policy(I, obj).value
            worst = min(worst, min(v - getattr(r, obj) for r in reps))
    return [CheckResult("optimal dominates library", worst >= -1e-12, f"min slack={worst:.3g}")]


def check_expectations(**_) -> list[CheckResult]:
    worst = 0.0
    for I in single_choice_suite(50, seed=9):
        worst = max(worst, abs(expected_max(I.dist) - expected_max(I.dist, "enumerate")))
    return [CheckResult("E[max] cdf vs enumeration", worst <= 1e-12, f"max diff={worst:.2e}")]


SUITES = {
    "examples": check_examples,
    "prophet": check_prophet,
    "gamma": check_gamma,
    "selfbound": check_selfbound,
    "blm": check_blm,
    "claims": check_claims,
    "reductions": check_reductions,
    "boost": check_boost,
    "optimal": check_optimal,
    "expectations": check_expectations,
}


def run_suite(name: str, **kwargs) -> list[CheckResult]:
    if name == "all":
        return [r for key in SUITES for r in SUITES[key](**kwargs)]
    return SUITES[name](**kwargs)
