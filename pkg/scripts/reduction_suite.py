"""Per-instance table for the three reductions on the seeded mixed suite."""
import argparse
import statistics

from prophetlab.suites import mixed_suite
from prophetlab.verify import reduction_rows

DIV = {"roe2eor": 12, "eor2roe": 68, "single_sample": 144}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    rows = reduction_rows(mixed_suite(args.count, seed=args.seed))
    print("reduction,instance,alpha,metric,floor,metric_over_alpha,holds")
    for kind, label, alpha, metric, floor in rows:
        print(f"{kind},{label},{alpha:.6g},{metric:.6g},{floor:.6g},{metric / alpha:.4f},{metric >= floor - 1e-9}")
    for kind, div in DIV.items():
        r = [m / a for k, _, a, m, _ in rows if k == kind]
        print(f"# {kind}: min metric/alpha={min(r):.4f} median={statistics.median(r):.4f} floor=1/{div}")


if __name__ == "__main__":
    main()
