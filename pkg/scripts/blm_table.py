"""Empirical BLM tails against the bounds on the two reference instances."""
import argparse
import json

from prophetlab.analysis import blm_tail_check
from prophetlab.verify import blm_instances


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=10**5)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    tables = [blm_tail_check(I, 0.5, trials=args.trials, seed=args.seed) for I in blm_instances()]
    if args.json:
        print(json.dumps([t.to_json() for t in tables], indent=1))
        return
    print("instance,tau,E_g,z,upper_emp,upper_bound,lower_emp,lower_bound,ok")
    for t in tables:
        for r in t.rows:
            print(f"{t.label},{t.tau:.6g},{t.mean_g:.6g},{r.z:.4g},{r.upper_empirical:.5g},{r.upper_bound:.5g},"
                  f"{r.lower_empirical if r.lower_empirical is not None else ''},"
                  f"{'' if r.lower_bound is None else f'{r.lower_bound:.5g}'},{r.ok}")


if __name__ == "__main__":
    main()
