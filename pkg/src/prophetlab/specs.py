"""The ``name(key=value,...)`` mini-language for generators and policies."""
from __future__ import annotations

import math
import re

from .distributions import solve_gamma_threshold
from .errors import BadParams, UnknownGenerator
from .evaluation import evaluate_exact
from .instances import GENERATORS, Instance
from .policies import (
    AlwaysFirst,
    CatchMaxThenPair,
    EorToRoe,
    FixedThreshold,
    OnlinePolicy,
    PickElements,
    RandomMaximalSet,
    ReductionParams,
    RoeToEor,
    SecretaryPolicy,
    SingleSampleRoeToEor,
    core_subroutine,
    eor_threshold_policy,
    fixed_threshold_policy,
    optimal_policy,
    per_block_threshold_policy,
    truncated_instance,
)

_SPEC = re.compile(r"^\s*([A-Za-z_][\w]*)\s*(?:\((.*)\))?\s*$")


def _value(text: str):
    t = text.strip()
    if t.lower() in ("true", "false"):
        return t.lower() == "true"
    if t.lower() in ("e", "1/e"):
        return 1 / math.e if t.lower() == "1/e" else math.e
    for conv in (int, float):
        try:
            return conv(t)
        except ValueError:
            pass
    if "/" in t:
        num, den = t.split("/", 1)
        try:
            return float(num) / float(den)
        except ValueError:
            pass
    return t


def parse_spec(spec: str) -> tuple[str, dict]:
    """'name(a=1,b=x)' -> ('name', {'a': 1, 'b': 'x'})."""
    m = _SPEC.match(spec)
    if not m:
        raise BadParams(f"cannot parse {spec!r}; expected name(key=value,...)")
    name, body = m.group(1), m.group(2)
    kwargs = {}
    if body and body.strip():
        for part in body.split(","):
            if "=" not in part:
                raise BadParams(f"argument {part!r} in {spec!r} is not key=value")
            k, v = part.split("=", 1)
            kwargs[k.strip()] = _value(v)
    return name, kwargs


def make_instance(spec: str) -> Instance:
    name, kwargs = parse_spec(spec)
    return generate(name, kwargs)


def generate(name: str, kwargs: dict) -> Instance:
    if name not in GENERATORS:
        raise UnknownGenerator(f"unknown generator {name!r}; known: {', '.join(sorted(GENERATORS))}")
    fn, types = GENERATORS[name]
    unknown = set(kwargs) - set(types)
    if unknown:
        raise BadParams(f"{name} does not take {sorted(unknown)}")
    try:
        return fn(**{k: types[k](v) for k, v in kwargs.items()})
    except TypeError as exc:
        raise BadParams(str(exc)) from exc


def _roe_to_eor(inst, sub="optimal_roe", gamma=0.5, delta=2.0, k=3.0, c=None, alpha=None):
    if sub == "optimal_roe":
        policy, measured = core_subroutine(inst, gamma)
    else:
        core = truncated_instance(inst, solve_gamma_threshold(inst.dist, gamma))
        policy = make_policy(core, sub)
        measured = evaluate_exact(core, policy).roe
    a = min(1.0, measured if alpha is None else float(alpha))
    return RoeToEor(inst, policy, ReductionParams(alpha=a, gamma=gamma, delta=delta, k=k, c=c))


def _eor_to_roe(inst, sub="optimal_eor", alpha=None):
    policy = make_policy(inst, sub)
    if alpha is None:
        alpha = evaluate_exact(inst, policy).eor
    return EorToRoe(inst, policy, float(alpha))


def _single_sample(inst, sub="optimal_roe", gamma=0.5):
    policy, measured = core_subroutine(inst, gamma)
    if sub != "optimal_roe":
        raise BadParams("single_sample currently supports sub=optimal_roe")
    return SingleSampleRoeToEor(inst, policy, ReductionParams(alpha=min(1.0, measured), gamma=gamma))


def _fixed_threshold(inst, T=None, inclusive=False):
    pol = fixed_threshold_policy(inst, T)
    return FixedThreshold(inst.family, pol.T, inclusive=True) if inclusive else pol


POLICIES = {
    "fixed_threshold": _fixed_threshold,
    "eor_threshold": lambda inst, gamma=1 / math.e: eor_threshold_policy(inst, gamma),
    "always_first": lambda inst: AlwaysFirst(inst.family),
    "pick": lambda inst, target=0: PickElements(inst.family, int(target)),
    "secretary": lambda inst, r=0: SecretaryPolicy(inst.family, int(r)),
    "per_block_threshold": per_block_threshold_policy,
    "random_pair": lambda inst: RandomMaximalSet(inst.family),
    "catch_max_pair": lambda inst, gamma=1 / math.e: CatchMaxThenPair(inst.family, inst.dist, gamma),
    "optimal_roe": lambda inst: optimal_policy(inst, "roe"),
    "optimal_eor": lambda inst: optimal_policy(inst, "eor"),
    "optimal_pbm": lambda inst: optimal_policy(inst, "pbm"),
    "roe_to_eor": _roe_to_eor,
    "eor_to_roe": _eor_to_roe,
    "single_sample": _single_sample,
}


def make_policy(instance: Instance, spec: str) -> OnlinePolicy:
    name, kwargs = parse_spec(spec)
    if name not in POLICIES:
        raise BadParams(f"unknown policy {name!r}; known: {', '.join(sorted(POLICIES))}")
    try:
        return POLICIES[name](instance, **kwargs)
    except TypeError as exc:
        raise BadParams(f"{spec}: {exc}") from exc
