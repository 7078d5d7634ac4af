"""Worst relative residual of every identity suite as a function of |p|.

    python3 scripts/residual_survey.py --trials 50 --moduli 0 0.2 0.5 0.7
"""
import argparse
import cmath
import math

from ellipsum import harness
from ellipsum.sampling import IDENTITIES, SamplerConfig


def survey(moduli, trials, seed, phases=4):
    rows = {}
    for mod in moduli:
        ps = (0.0,) if mod == 0 else tuple(mod * cmath.exp(2j * math.pi * k / phases) for k in range(phases))
        cfg = SamplerConfig(seed=seed, trials=trials, p_values=ps)
        for r in harness.run_suite(cfg, IDENTITIES, math.inf):
            if r.residual is None:
                continue
            cell = rows.setdefault(r.identity, {})
            cell[mod] = max(cell.get(mod, 0.0), r.residual)
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--moduli", type=float, nargs="+", default=[0.0, 0.1, 0.3, 0.5, 0.7])
    args = ap.parse_args()
    rows = survey(args.moduli, args.trials, args.seed)
    print("identity".ljust(16) + "".join(f"|p|={m:<8g}" for m in args.moduli))
    for name in IDENTITIES:
        cells = rows.get(name, {})
        print(name.ljust(16) + "".join(f"{cells[m]:<12.2e}" if m in cells else f"{'-':<12}" for m in args.moduli))


if __name__ == "__main__":
    main()
