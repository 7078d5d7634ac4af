"""Run every identity at p = 0, where theta(x) = 1 - x and the sums become
their basic hypergeometric counterparts. Exits nonzero above the threshold."""
import argparse
import sys

from ellipsum import harness
from ellipsum.sampling import IDENTITIES, SamplerConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threshold", type=float, default=1e-11)
    args = ap.parse_args()
    cfg = SamplerConfig(seed=args.seed, trials=args.trials, p_values=(0.0,))
    reports = harness.run_suite(cfg, IDENTITIES, args.threshold)
    sys.stdout.write(harness.emit_report(reports))
    return harness.exit_code(reports)


if __name__ == "__main__":
    sys.exit(main())
