"""Run one of the long experiments and record its JSON result under results/.

    python3 scripts/run_criterion.py 4    # color-code threshold, tabulated hyperparameters
    python3 scripts/run_criterion.py 6    # neural vs matching, correlated noise
    python3 scripts/run_criterion.py 8    # curriculum vs direct training
    python3 scripts/run_criterion.py 3    # d=3 maximum-likelihood comparison
"""
import argparse
import json
import os
import sys

from topodec import experiments

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), os.pardir, "results")


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("criterion", type=int, choices=[3, 4, 6, 8])
    p.add_argument("--out-dir", default=os.path.normpath(ROOT))
    args = p.parse_args(argv)
    models = os.path.join(args.out_dir, "models")
    if args.criterion == 3:
        res = experiments.oracle_equivalence(out=os.path.join(args.out_dir, "criterion3.json"))
    elif args.criterion == 4:
        res = experiments.color_bitphase_threshold(models, args.out_dir)
    elif args.criterion == 6:
        res = experiments.correlated_noise_ordering(models, args.out_dir)
    else:
        res = experiments.curriculum_study(models, args.out_dir)
    print(json.dumps(res, indent=2, sort_keys=True))
    return 0 if res["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
