import csv
import io
import json
import math

import numpy as np
import pytest

from prophetlab.distributions import DiscreteDistribution, ProductDistribution
from prophetlab.errors import TooLarge, UndeclaredRandomness
from prophetlab.evaluation import (
    CSV_COLUMNS,
    MetricReport,
    evaluate,
    evaluate_exact,
    evaluate_monte_carlo,
    evaluate_random_order,
    event_probabilities,
    expected_utility,
    pbm_p,
    secretary_monte_carlo,
)
from prophetlab.feasibility import SingleChoice
from prophetlab.instances import (
    Instance,
    gen_example1,
    gen_example2,
    gen_example3,
    gen_mpower,
    gen_pbmp_pairs,
    gen_risk,
)
from prophetlab.policies import (
    AlwaysFirst,
    FixedThreshold,
    OnlinePolicy,
    PickElements,
    RandomMaximalSet,
    SecretaryPolicy,
    build_roe_to_eor,
    build_single_sample,
    eor_threshold_policy,
    optimal_policy,
)
from prophetlab.suites import explicit_instance_suite, mixed_suite, single_choice_suite

D = DiscreteDistribution
METRICS = ("roe", "eor", "eoir", "pbm", "ev", "eopt")


def _val(rep, m):
    return {"ev": rep.expected_value, "eopt": rep.expected_opt}.get(m, getattr(rep, m, None))


def test_example_values():
    I = gen_example1(0.5)
    assert evaluate_exact(I, FixedThreshold(I.family, 1.25)).eor == pytest.approx(0.5, abs=1e-15)
    I = gen_example3(0.1)
    first = evaluate_exact(I, AlwaysFirst(I.family))
    assert first.eor == pytest.approx(0.9 + 0.1 * 0.01, abs=1e-12)
    assert first.roe == pytest.approx(1 / 10.9, abs=1e-12)
    # inverse-ratio bound, linear in the first-box probability p: p=1 and p=0 ends
    eps = 0.1
    assert evaluate_exact(I, PickElements(I.family, 0)).eoir == pytest.approx(1 / eps + 1 - eps, rel=1e-12)
    assert evaluate_exact(I, PickElements(I.family, 1)).eoir == pytest.approx((1 - eps) / eps**2 + eps, rel=1e-12)


def test_eoir_infinite_when_nothing_taken():
    I = gen_example1(0.5)
    rep = evaluate_exact(I, PickElements(I.family, []))
    assert rep.eoir == math.inf and rep.eor == 0.0


def test_ratio_conventions_zero_opt():
    I = Instance(SingleChoice(2), ProductDistribution((D.point(0.0), D.point(0.0))))
    rep = evaluate_exact(I, PickElements(I.family, []))
    assert rep.eor == 1.0 and rep.eoir == 1.0 and rep.pbm == 1.0 and rep.roe == 1.0


@pytest.mark.parametrize("inst", mixed_suite(12, seed=21) + explicit_instance_suite(4), ids=lambda i: i.label)
def test_mc_agrees_with_exact(inst):
    pols = [AlwaysFirst(inst.family)]
    if inst.dist.joint_size <= 5000:
        pols.append(optimal_policy(inst, "eor"))
    if not inst.family.variant == "explicit":
        pols.append(build_roe_to_eor(inst))
    for pol in pols:
        ex = evaluate_exact(inst, pol)
        mc = evaluate_monte_carlo(inst, pol, 20_000, seed=5)
        for m in METRICS:
            hw = mc.ci_halfwidth[m]
            if math.isinf(_val(ex, m)):
                assert math.isinf(_val(mc, m)) or mc.ratio_distribution[0][0] > 0
                continue
            assert abs(_val(mc, m) - _val(ex, m)) <= 4 * hw + 1e-12, (pol.describe(), m)


def test_mc_agrees_randomized_start():
    inst = mixed_suite(6, seed=2)[4]
    pol = build_single_sample(inst)
    ex = evaluate_exact(inst, pol)
    mc = evaluate_monte_carlo(inst, pol, 40_000, seed=9)
    for m in ("eor", "pbm", "ev"):
        assert abs(_val(mc, m) - _val(ex, m)) <= 4 * mc.ci_halfwidth[m] + 1e-12


def test_mpower_mc_within_ci():
    I = gen_mpower(50, 1e6)
    pol = eor_threshold_policy(I)
    ex = evaluate_exact(I, pol)
    mc = evaluate_monte_carlo(I, pol, 10**6, seed=1)
    assert abs(mc.eor - ex.eor) <= mc.ci_halfwidth["eor"]
    assert math.isfinite(mc.ci_halfwidth["roe"])


def test_compressed_matches_tree():
    for I in single_choice_suite(25, seed=8):
        pol = eor_threshold_policy(I)
        a = evaluate_exact(I, pol, method="tree")
        b = evaluate_exact(I, pol, method="compressed")
        for m in ("roe", "eor", "pbm", "eoir"):
            assert getattr(b, m) == pytest.approx(getattr(a, m), rel=1e-12, abs=1e-12)
        assert b.pbm_p is None
        assert b.prob_ratio_at_least(0.5) == pytest.approx(a.prob_ratio_at_least(0.5), abs=1e-12)
    with pytest.raises(ValueError):
        evaluate_exact(gen_example2(1), AlwaysFirst(gen_example2(1).family), method="compressed")


def test_thread_count_determinism(monkeypatch):
    I = mixed_suite(3, seed=4)[1]
    pol = AlwaysFirst(I.family)
    runs = []
    for threads in ("1", "3", "8"):
        monkeypatch.setenv("PROPHET_LAB_THREADS", threads)
        runs.append(evaluate_monte_carlo(I, pol, 50_000, seed=11))
    for r in runs[1:]:
        assert r.to_json() == runs[0].to_json()
    assert evaluate_monte_carlo(I, pol, 50_000, seed=12).eor != runs[0].eor


def test_csv_columns_and_json():
    I = gen_example1(0.1)
    rep = evaluate(I, AlwaysFirst(I.family))
    rows = list(csv.reader(io.StringIO(rep.to_csv())))
    assert tuple(rows[0]) == CSV_COLUMNS == tuple(MetricReport.csv_header().split(","))
    assert len(rows[1]) == len(CSV_COLUMNS)
    assert float(rows[1][CSV_COLUMNS.index("eor")]) == pytest.approx(rep.eor, rel=1e-12)
    back = json.loads(rep.dumps())
    assert back["eor"] == pytest.approx(rep.eor)


def test_evaluate_mode_dispatch():
    I = gen_example1(0.1)
    with pytest.raises(ValueError):
        evaluate(I, AlwaysFirst(I.family), "mc")
    mc = evaluate(I, AlwaysFirst(I.family), "mc", trials=1000)
    assert mc.mode == "mc" and mc.trials == 1000


class CoinFlip(OnlinePolicy):
    declared = False

    def decide(self, obs, state):
        return not obs.selected


def test_undeclared_randomness():
    I = gen_example1(0.5)
    with pytest.raises(UndeclaredRandomness):
        evaluate_exact(I, CoinFlip(I.family))
    assert evaluate_monte_carlo(I, CoinFlip(I.family), 100).expected_value == 1.0


def test_too_large():
    I = Instance(SingleChoice(12), ProductDistribution((D((0.0, 1.0, 2.0, 3.0), (0.25,) * 4),) * 12))
    with pytest.raises(TooLarge):
        evaluate_exact(I, SecretaryPolicy(I.family, 2))


def test_secretary_exact_random_order():
    I = Instance(SingleChoice(4), ProductDistribution(tuple(D.point(float(v)) for v in (4, 1, 3, 2))))
    assert evaluate_random_order(I, SecretaryPolicy(I.family, 1)).pbm == pytest.approx(11 / 24, abs=1e-15)
    assert evaluate_random_order(I, SecretaryPolicy(I.family, 0)).pbm == pytest.approx(1 / 4, abs=1e-15)


def test_secretary_mc_formula():
    n, r = 100, 36
    want = r / n * sum(1 / i for i in range(r, n))
    p, ci = secretary_monte_carlo(n, r, 10**6, seed=3)
    assert abs(p - want) <= 0.002
    assert ci < 0.002


def test_event_probabilities():
    coin = D((0.0, 1.0), (0.5, 0.5))
    ev = event_probabilities(Instance(SingleChoice(2), ProductDistribution((coin, coin))), 0.25)
    assert ev.p_core == pytest.approx(0.25) and ev.p_tail == pytest.approx(0.5)
    one = Instance(SingleChoice(1), ProductDistribution((D((1.0, 2.0, 3.0), (0.2, 0.3, 0.5)),)))
    ev = event_probabilities(one, 0.3)
    assert ev.p_tail == pytest.approx(0.7, abs=1e-12)
    for I in mixed_suite(10, seed=5):
        assert event_probabilities(I, 0.5).p_tail >= 0.5 * math.log(2) - 1e-9


def test_pbm_p_cases():
    I = gen_pbmp_pairs(1, 4)
    assert pbm_p(I, PickElements(I.family, [0, 1])) == pytest.approx(1.0)
    assert pbm_p(gen_pbmp_pairs(4, 4), RandomMaximalSet(gen_pbmp_pairs(4, 4).family)) <= 0.25 + 1e-12
    # single choice with a.s. unique positive maximum: pbm_p is the worst per-element catch rate
    I = Instance(SingleChoice(2), ProductDistribution((D((1.0, 3.0), (0.5, 0.5)), D.point(2.0))))
    rep = evaluate_exact(I, AlwaysFirst(I.family))
    assert rep.pbm_p == pytest.approx(0.0) and rep.pbm == pytest.approx(0.5)
    one = Instance(SingleChoice(1), ProductDistribution((D((1.0, 3.0), (0.5, 0.5)),)))
    rep = evaluate_exact(one, AlwaysFirst(one.family))
    assert rep.pbm_p == rep.pbm == 1.0


def test_utility():
    I = gen_risk(0.25)
    assert expected_utility(I, PickElements(I.family, 1), 8.0) == pytest.approx(2.0, abs=1e-12)
    assert expected_utility(I, PickElements(I.family, 2), 8.0) == pytest.approx(2.0, abs=1e-12)
    assert expected_utility(I, PickElements(I.family, 0), 8.0) == pytest.approx(1.0)
    rep = evaluate_exact(I, PickElements(I.family, 2), utility_cap=math.inf)
    assert rep.expected_utility == pytest.approx(rep.expected_value)


def test_ratio_distribution_sums_to_one():
    for I in mixed_suite(5, seed=6):
        rep = evaluate_exact(I, AlwaysFirst(I.family))
        assert sum(p for _, p in rep.ratio_distribution) == pytest.approx(1.0, abs=1e-12)
        assert sum(r * p for r, p in rep.ratio_distribution) == pytest.approx(rep.eor, abs=1e-12)
        assert rep.prob_ratio_at_least(0.0) == pytest.approx(1.0)


def test_mc_seed_reproducible():
    I = gen_example2(3)
    a = evaluate_monte_carlo(I, AlwaysFirst(I.family), 20_000, seed=4)
    b = evaluate_monte_carlo(I, AlwaysFirst(I.family), 20_000, seed=4)
    assert np.isclose(a.eor, b.eor, rtol=0, atol=0)
