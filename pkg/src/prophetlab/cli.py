"""Command-line front end.

Generators and policies use the mini-language ``name(key=value,...)``, e.g.
``--gen "example1(eps=0.1)"`` or ``--policy "roe_to_eor(sub=optimal_roe,gamma=0.5)"``.
CSV goes to standard output (or --out); human-readable tables go to standard error.
Exit codes: 0 success, 1 verification failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .analysis import reduction_audit
from .distributions import expected_max
from .errors import BadParams, ProphetLabError
from .evaluation import MetricReport, _threads, evaluate
from .expectations import expected_offline
from .instances import GENERATORS, INSTANCE_SUFFIX, Instance
from .specs import generate, make_instance, make_policy, parse_spec
from .verify import SUITES, run_suite

POLICY_HELP = (
    "policy spec, e.g. fixed_threshold(T=1.5), eor_threshold, always_first, pick(target=0), "
    "secretary(r=1), per_block_threshold, random_pair, catch_max_pair, optimal_roe, optimal_eor, "
    "optimal_pbm, roe_to_eor(sub=optimal_roe,gamma=0.5,delta=2,k=3), eor_to_roe(sub=optimal_eor), "
    "single_sample"
)


class UsageError(Exception):
    pass


def _err(msg: str):
    print(msg, file=sys.stderr)


def _load_instance(args) -> Instance:
    if getattr(args, "instance", None):
        return Instance.load(args.instance)
    if getattr(args, "gen", None):
        return make_instance(args.gen)
    raise UsageError("give --instance PATH or --gen SPEC")


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _table(reports: list[MetricReport]):
    _err(f"{'policy':<48} {'mode':<5} {'roe':>10} {'eor':>10} {'pbm':>10} {'eoir':>10}")
    for r in reports:
        _err(f"{r.policy[:48]:<48} {r.mode:<5} {r.roe:>10.6g} {r.eor:>10.6g} {r.pbm:>10.6g} {r.eoir:>10.6g}")


def _format_reports(reports: list[MetricReport], fmt: str, extra: dict | None = None) -> str:
    if fmt == "json":
        body = [r.to_json() for r in reports]
        if extra:
            body = {"reports": body, **extra}
        return json.dumps(body, indent=1, default=float) + "\n"
    return MetricReport.csv_header() + "\n" + "".join(r.csv_row() + "\n" for r in reports)


def _check_mode(args):
    if args.mode == "mc" and not args.trials:
        raise UsageError("--mode mc requires --trials")
    if args.mode == "exact" and args.trials:
        raise UsageError("--trials only applies to --mode mc")


# ---------------------------------------------------------------- commands


def cmd_gen(args) -> int:
    if args.gen:
        inst = make_instance(args.gen)
    else:
        if not args.generator:
            raise UsageError("name a generator")
        kw = {k: v for k, v in (("n", args.n), ("eps", args.eps), ("M", args.M), ("grid", args.grid))
              if v is not None}
        inst = generate(args.generator, kw)
    out = Path(args.out) if args.out else Path(_slug(inst.label) + INSTANCE_SUFFIX)
    inst.save(out)
    _err(f"{inst.label}: {inst.n} elements, E[f]={expected_offline(inst):.6g}, E[max]={expected_max(inst.dist):.6g}")
    print(out)
    return 0


def _slug(label: str) -> str:
    return "".join(c if c.isalnum() or c in "._-" else "_" for c in label).strip("_")


def cmd_eval(args) -> int:
    _check_mode(args)
    inst = _load_instance(args)
    reports = [evaluate(inst, make_policy(inst, spec), args.mode, args.trials, args.seed, args.cap)
               for spec in args.policy]
    _table(reports)
    _emit(_format_reports(reports, args.format), args.out)
    return 0


def cmd_reduce(args) -> int:
    _check_mode(args)
    inst = _load_instance(args)
    extra = {}
    if args.direction == "roe2eor":
        sub = args.sub or "optimal_roe"
        pol = make_policy(inst, f"roe_to_eor(sub={sub},gamma={args.gamma})")
        alpha, floor, metric = pol.params_.alpha, pol.params_.alpha / 12, "eor"
        if sub == "optimal_roe":
            extra["audit"] = reduction_audit(inst, pol.params_).to_json()
    elif args.direction == "eor2roe":
        sub = args.sub or "optimal_eor"
        spec = f"eor_to_roe(sub={sub})" if args.alpha is None else f"eor_to_roe(sub={sub},alpha={args.alpha})"
        pol = make_policy(inst, spec)
        alpha, floor, metric = pol.alpha, pol.alpha / 68, "roe"
    else:
        pol = make_policy(inst, f"single_sample(gamma={args.gamma})")
        alpha, floor, metric = pol.params_.alpha, None, "eor"
    rep = evaluate(inst, pol, args.mode, args.trials, args.seed)
    value = getattr(rep, metric)
    extra.update({"alpha": alpha, "metric": metric, "value": value, "floor": floor})
    _err(f"alpha={alpha:.6g}  {metric}={value:.6g}  "
         + (f"floor={floor:.6g}  {'OK' if value >= floor - 1e-9 else 'BELOW FLOOR'}" if floor is not None
            else f"ratio to alpha={value / alpha:.6g} (measured only)"))
    _emit(_format_reports([rep], args.format, extra if args.format == "json" else None), args.out)
    return 0


def cmd_verify(args) -> int:
    kwargs = {}
    if args.seed is not None:
        kwargs["seed"] = args.seed
    if args.x is not None:
        kwargs["x"] = args.x
    if args.suite != "boost":
        kwargs.pop("x", None)
    results = run_suite(args.suite, **kwargs)
    lines = ["check,passed,detail"]
    for r in results:
        _err(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<36} {r.detail}")
        lines.append(",".join([r.name, str(r.passed).lower(), '"' + r.detail.replace('"', "'") + '"']))
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if all(r.passed for r in results) else 1


def cmd_sweep(args) -> int:
    _check_mode(args)
    if not args.policy:
        raise BadParams("sweep needs at least one --policy")
    name, base = parse_spec(args.gen)
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    if not values:
        raise UsageError("--values is empty")
    _, types = GENERATORS.get(name, (None, {}))
    jobs = []
    for v in values:
        kw = dict(base)
        kw[args.param] = types.get(args.param, float)(float(v)) if args.param in types else v
        jobs.extend((kw, spec) for spec in args.policy)

    def run(job):
        kw, spec = job
        inst = generate(name, kw)
        return evaluate(inst, make_policy(inst, spec), args.mode, args.trials, args.seed or 0, args.cap)

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        reports = list(pool.map(run, jobs))  # map keeps input order
    _table(reports)
    _emit(_format_reports(reports, args.format), args.out)
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="prophetlab", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, policy=True, many=True):
        sp.add_argument("--instance", help="instance file (*.pli.json)")
        sp.add_argument("--gen", help="generator spec, e.g. example2(n=3)")
        if policy:
            sp.add_argument("--policy", action="append" if many else "store", default=[] if many else None,
                            help=POLICY_HELP + "; repeatable")
        sp.add_argument("--mode", choices=("exact", "mc"), default="exact")
        sp.add_argument("--trials", type=int)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")

    g = sub.add_parser("gen", help="write an instance file")
    g.add_argument("generator", nargs="?", help=f"one of {', '.join(sorted(GENERATORS))}")
    g.add_argument("--gen", help="generator spec, e.g. mpower(n=50,M=1e6)")
    g.add_argument("--n", type=int)
    g.add_argument("--eps", type=float)
    g.add_argument("--M", type=float)
    g.add_argument("--grid", type=int)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    e = sub.add_parser("eval", help="evaluate policies on one instance")
    common(e)
    e.add_argument("--cap", type=float, help="utility cap for expected min(value, cap)")
    e.set_defaults(func=cmd_eval)

    r = sub.add_parser("reduce", help="build and evaluate a reduction")
    common(r, policy=False)
    r.add_argument("--direction", choices=("roe2eor", "eor2roe", "single_sample"), required=True)
    r.add_argument("--sub", help="subroutine policy spec")
    r.add_argument("--alpha", type=float, help="alpha for eor2roe (measured when omitted)")
    r.add_argument("--gamma", type=float, default=0.5)
    r.set_defaults(func=cmd_reduce)

    v = sub.add_parser("verify", help="run named verification checks")
    v.add_argument("suite", nargs="?", default="all", choices=("all",) + tuple(SUITES))
    v.add_argument("--seed", type=int)
    v.add_argument("--x", type=float, help="boost probability for the boost suite")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="evaluate policies across a generator parameter")
    s.add_argument("--gen", required=True, help="generator spec with fixed parameters, e.g. mpower(M=1e6)")
    s.add_argument("--param", required=True, help="parameter to sweep")
    s.add_argument("--values", required=True, help="comma-separated values")
    s.add_argument("--policy", action="append", default=[], help=POLICY_HELP + "; repeatable")
    s.add_argument("--mode", choices=("exact", "mc"), default="exact")
    s.add_argument("--trials", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--cap", type=float)
    s.add_argument("--out")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "eval" and not args.policy:
        _err("eval needs at least one --policy")
        return 2
    try:
        return args.func(args)
    except (UsageError, ProphetLabError) as exc:
        _err(f"error: {type(exc).__name__}: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
