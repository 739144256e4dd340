"""Best value threshold on the M-power instance versus (1 - 1/n)^(n-1).

For each n the n thresholds M^(i-1) are evaluated exactly; the best EoR, its
PbM and the closed form are printed as CSV.
"""
import argparse

from prophetlab.evaluation import evaluate_exact
from prophetlab.instances import gen_mpower
from prophetlab.policies import FixedThreshold, eor_threshold_policy


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--M", type=float, default=30.0)
    ap.add_argument("--ns", default="5,10,50,200")
    args = ap.parse_args()
    print("n,M,best_i,best_eor,best_pbm,rho1,eor_threshold_eor,slack_allowed")
    for n in map(int, args.ns.split(",")):
        inst = gen_mpower(n, args.M)
        reps = [evaluate_exact(inst, FixedThreshold(inst.family, args.M ** i, inclusive=True)) for i in range(n)]
        i = max(range(n), key=lambda j: reps[j].eor)
        rho = (1 - 1 / n) ** (n - 1)
        e = evaluate_exact(inst, eor_threshold_policy(inst)).eor
        print(f"{n},{args.M:g},{i + 1},{reps[i].eor:.10f},{reps[i].pbm:.10f},{rho:.10f},{e:.10f},{1e-6 + n / args.M:.3g}")


if __name__ == "__main__":
    main()
