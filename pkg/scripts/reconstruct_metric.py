"""Operator reconstruction of g: plain entrywise error against the closed
form versus the residual scaled by the two operator summands.

The reconstructed coefficient is a difference of two summands that can be
much larger than g_kl itself, so the plain relative error inherits their
rounding. This script reports the distribution of both figures.
"""
import argparse

import numpy as np

from ellipsum.errors import DegenerateSpectrum, DivisionByZeroTheta
from ellipsum.inversion import SequencePair, g_entry
from ellipsum.operator_method import OperatorContext, _g_pieces
from ellipsum.residual import Residual
from ellipsum.theta import Nome


def polar(rng, n, lo, hi):
    return list(rng.uniform(lo, hi, n) * np.exp(2j * np.pi * rng.uniform(size=n)))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--contexts", type=int, default=100)
    ap.add_argument("--size", type=int, default=6)
    ap.add_argument("--p", type=complex, default=0.4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    plain, aware, blowup = [], [], []
    done = 0
    while done < args.contexts:
        try:
            seq = SequencePair.from_lists(polar(rng, args.size, 0.3, 2), polar(rng, args.size, 0.3, 2), Nome(args.p))
            ctx = OperatorContext(seq, *polar(rng, 2, 0.5, 1.5))
            ctx.check_spectrum()
        except (DivisionByZeroTheta, DegenerateSpectrum):
            continue
        done += 1
        for k in range(args.size):
            for l in range(k):
                pieces, g = _g_pieces(ctx, k, l), g_entry(seq, k, l)
                plain.append(abs(sum(pieces) - g) / abs(g))
                aware.append(Residual.between(pieces, [g]).relative)
                blowup.append(max(map(abs, pieces)) / abs(g))
    plain, aware, blowup = map(np.array, (plain, aware, blowup))
    print(f"entries: {plain.size}")
    print(f"plain relative error   max {plain.max():.2e}  median {np.median(plain):.2e}  "
          f"share > 1e-9: {np.mean(plain > 1e-9):.2%}")
    print(f"cancellation residual  max {aware.max():.2e}  median {np.median(aware):.2e}")
    print(f"summand / |g| ratio    max {blowup.max():.2e}  median {np.median(blowup):.2e}")


if __name__ == "__main__":
    main()
