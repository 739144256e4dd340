"""Exact metrics for the small worked instances, one CSV row per (instance, policy)."""
import argparse
import sys

from prophetlab.evaluation import MetricReport, evaluate_exact
from prophetlab.specs import make_instance, make_policy

ROWS = [
    ("example1(eps=0.5)", ["fixed_threshold(T=1.25)", "always_first", "optimal_eor"]),
    ("example1(eps=0.1)", ["fixed_threshold(T=1.05)", "always_first", "optimal_eor"]),
    ("example1(eps=0.01)", ["fixed_threshold(T=1.005)", "always_first", "optimal_eor"]),
    ("example3(eps=0.1)", ["always_first", "pick(target=1)", "optimal_roe"]),
    ("example2(n=3)", ["always_first", "per_block_threshold", "optimal_pbm", "optimal_eor"]),
    ("roe_ub(eps=0.01)", ["optimal_roe", "fixed_threshold"]),
    ("risk(eps=0.25)", ["pick(target=0)", "pick(target=1)", "pick(target=2)"]),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=argparse.FileType("w"), default=sys.stdout)
    args = ap.parse_args()
    args.out.write(MetricReport.csv_header() + "\n")
    for gen, specs in ROWS:
        inst = make_instance(gen)
        cap = inst.meta.get("utility_cap")
        for spec in specs:
            rep = evaluate_exact(inst, make_policy(inst, spec), utility_cap=cap)
            args.out.write(rep.csv_row() + "\n")


if __name__ == "__main__":
    main()
