import math

import numpy as np
import pytest

from prophetlab.analysis import (
    amgm_claim,
    blm_lower,
    blm_tail_check,
    blm_upper,
    boost_check,
    check_self_bounding,
    default_guarantee_identity,
    gamma_lemma,
    imply_claim,
    jensen_claims,
    opts_claim,
    reduction_audit,
)
from prophetlab.distributions import DiscreteDistribution, ProductDistribution
from prophetlab.errors import BadParams
from prophetlab.evaluation import evaluate_exact
from prophetlab.feasibility import KUniform, SingleChoice
from prophetlab.instances import Instance, gen_example1, gen_example2
from prophetlab.policies import AlwaysFirst, ReductionParams, build_roe_to_eor
from prophetlab.suites import mixed_suite, single_choice_suite


def test_self_bounding_examples():
    for tau in (0.5, 1.0, 7.0):
        assert check_self_bounding(SingleChoice(4), tau, 500, rng=1).passed
    assert check_self_bounding(KUniform(5, 2), 1.0, 1000, rng=2).passed


def test_self_bounding_detects_outside_domain():
    pts = np.random.default_rng(0).uniform(0, 1, size=(50, 3))
    pts[0, 1] = 5.0
    rep = check_self_bounding(KUniform(3, 2), 1.0, points=pts)
    assert not rep.passed and rep.max_violation_cond1 > 1
    with pytest.raises(BadParams):
        check_self_bounding(SingleChoice(2), 0.0)


def test_blm_bounds():
    assert blm_upper(5.0, 0.0) == 1.0
    assert blm_lower(5.0, 0.0) == 1.0
    assert blm_upper(2.0, 1.0) == pytest.approx(math.exp(-3 / 14))
    # the 3z^2/(6E+2z) form equals z^2/(2E+2z/3)
    for E, z in ((1.0, 0.3), (10.0, 4.0)):
        assert blm_upper(E, z) == pytest.approx(math.exp(-z * z / (2 * E + 2 * z / 3)))


def test_blm_table_example2():
    I = gen_example2(20)
    tab = blm_tail_check(I, 0.5, trials=20_000, seed=3)
    assert tab.passed and len(tab.rows) == 5
    E = tab.mean_g
    half = blm_tail_check(I, 0.5, z_grid=[E / 2], trials=20_000, seed=3).rows[0]
    assert half.lower_bound == pytest.approx(math.exp(-E / 8))
    assert half.lower_ok


def test_blm_deterministic():
    I = Instance(KUniform(20, 5), ProductDistribution((DiscreteDistribution.uniform_grid(0, 1, 16),) * 20))
    z = [0.5, 1.0, 2.0]
    a = blm_tail_check(I, 0.5, z_grid=[s * math.sqrt(4.0) for s in z], trials=10_000, seed=7)
    b = blm_tail_check(I, 0.5, z_grid=[s * math.sqrt(4.0) for s in z], trials=10_000, seed=7)
    assert a.to_json() == b.to_json() and a.passed


def test_reduction_audit_branches():
    a = reduction_audit(gen_example1(0.5))
    assert a.branch == "superstar" and a.lemma_holds
    assert a.eor >= a.superstar_rhs - 1e-12
    seen = {"superstar": 0, "combinatorial": 0}
    for I in mixed_suite(30, seed=7):
        rep = reduction_audit(I)
        seen[rep.branch] += 1
        assert rep.lemma_holds
        assert abs(rep.p_core - 0.5) <= 1e-9
        if rep.branch == "combinatorial":  # concentration is only claimed when W > c tau
            assert rep.prob_f_above_delta_W <= rep.bound_alpha_over_k + 1e-9
            assert rep.cond_value >= rep.cond_rhs - 1e-9
        assert rep.eor >= rep.alpha_over_12 - 1e-9
    assert seen["combinatorial"] > 0


def test_audit_point_mass():
    I = Instance(SingleChoice(1), ProductDistribution((DiscreteDistribution.point(3.0),)))
    rep = reduction_audit(I)
    assert rep.lemma_holds and rep.eor >= rep.alpha_over_12


def test_guarantee_identity():
    for alpha in (1.0, 0.5, 0.1, 1e-3):
        lhs, rhs = default_guarantee_identity(alpha)
        assert lhs == pytest.approx(rhs, rel=1e-12)
        assert ReductionParams(alpha=alpha).guarantee() == pytest.approx(alpha / 12, rel=1e-12)


def test_gamma_lemma_suite():
    for I in mixed_suite(20, seed=3):
        for g in (0.1, 0.5, 0.9):
            assert gamma_lemma(I, g)[0]


def test_imply_claim():
    for I in single_choice_suite(20, seed=1):
        assert imply_claim(evaluate_exact(I, AlwaysFirst(I.family)))[0]


def test_literal_claims():
    assert jensen_claims(100, rng=1)[0]
    assert amgm_claim(500, rng=1)[0]
    assert opts_claim(mixed_suite(5, seed=2), per_instance=50)[0]


def test_boost():
    b = boost_check(gen_example2(3), 0.05)
    assert b.passed
    assert b.roe_target_after >= 0.5
    assert b.eor_after <= 0.05 + b.eor_before + 1e-9


def test_roe_to_eor_matches_audit():
    I = mixed_suite(4, seed=9)[2]
    assert reduction_audit(I).eor == pytest.approx(evaluate_exact(I, build_roe_to_eor(I)).eor, abs=1e-12)
