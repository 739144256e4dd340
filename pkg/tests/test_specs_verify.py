import math

import pytest

from prophetlab.errors import BadParams, UnknownGenerator
from prophetlab.specs import POLICIES, make_instance, make_policy, parse_spec
from prophetlab.verify import SUITES, run_suite


def test_parse_spec():
    assert parse_spec("example1(eps=0.1)") == ("example1", {"eps": 0.1})
    assert parse_spec("always_first") == ("always_first", {})
    name, kw = parse_spec("x(a=1, b=true, c=1/e, d=1/4, e=optimal_roe)")
    assert kw == {"a": 1, "b": True, "c": pytest.approx(1 / math.e), "d": 0.25, "e": "optimal_roe"}
    with pytest.raises(BadParams):
        parse_spec("x(a)")
    with pytest.raises(BadParams):
        parse_spec("1bad")


def test_make_instance_errors():
    assert make_instance("example2(n=2)").n == 4
    with pytest.raises(UnknownGenerator):
        make_instance("nope")
    with pytest.raises(BadParams):
        make_instance("example2(m=2)")


@pytest.mark.parametrize("spec", sorted(set(POLICIES) - {"per_block_threshold", "random_pair", "catch_max_pair",
                                                          "eor_threshold", "secretary"}))
def test_every_policy_builds_on_single_choice(spec):
    inst = make_instance("example1(eps=0.25)")
    assert make_policy(inst, spec).family is inst.family


def test_family_specific_policies():
    assert make_policy(make_instance("example2(n=2)"), "per_block_threshold")
    assert make_policy(make_instance("pbmp_pairs(n=2,grid=4)"), "random_pair")
    assert make_policy(make_instance("pbmp_pairs(n=2,grid=4)"), "catch_max_pair")
    assert make_policy(make_instance("example1(eps=0.25)"), "secretary(r=1)").r == 1
    inc = make_policy(make_instance("example1(eps=0.25)"), "fixed_threshold(T=1,inclusive=true)")
    assert inc.inclusive
    with pytest.raises(BadParams):
        make_policy(make_instance("example1(eps=0.25)"), "always_first(x=1)")


@pytest.mark.parametrize("suite", sorted(set(SUITES) - {"blm"}))
def test_verify_suites_pass(suite):
    res = run_suite(suite)
    assert res and all(r.passed for r in res), [(r.name, r.detail) for r in res if not r.passed]
