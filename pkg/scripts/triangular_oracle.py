"""How accurate is a numerical inverse of the f-window as a reference for g?

Compares the closed-form g-window against three inverses:
  * a double-precision triangular solve,
  * the exact inverse of the double-rounded f-window (mpmath),
  * an inverse built and solved entirely in extended precision.
Needs scipy and mpmath (the ``test`` extra).
"""
import argparse
import math

import mpmath
import numpy as np
from scipy.linalg import solve_triangular

from ellipsum.inversion import SequencePair, f_window, g_window
from ellipsum.theta import Nome


def polar(rng, n):
    return list(rng.uniform(0.3, 2.0, n) * np.exp(2j * np.pi * rng.uniform(size=n)))


def mp_inverse(F):
    n = len(F)
    inv = [[mpmath.mpc(0)] * n for _ in range(n)]
    for col in range(n):
        inv[col][col] = mpmath.mpc(1)
        for row in range(col + 1, n):
            inv[row][col] = -mpmath.fsum(F[row][k] * inv[k][col] for k in range(col, row))
    return np.array([[complex(v) for v in row] for row in inv])


def mp_f_window(a, c, p, dps):
    terms = 8 if p == 0 else int(math.ceil((dps + 2) * math.log(10) / -math.log(abs(p)))) + 8
    P = mpmath.mpc(p)

    def th(x):
        out, pj = mpmath.mpc(1), mpmath.mpc(1)
        for _ in range(terms):
            out *= (1 - x * pj) * (1 - pj * P / x)
            pj *= P
        return out

    n = len(a)
    A, C = [mpmath.mpc(x) for x in a], [mpmath.mpc(x) for x in c]
    F = [[mpmath.mpc(0)] * n for _ in range(n)]
    for k in range(n):
        F[k][k] = mpmath.mpc(1)
        for m in range(k + 1, n):
            F[m][k] = F[m - 1][k] * th(A[m - 1] * C[k]) * th(A[m - 1] / C[k]) / (th(C[m] * C[k]) * th(C[m] / C[k]))
    return F


def entrywise(G, R):
    mask = np.tril(np.ones(G.shape, dtype=bool))
    return (np.abs(G - R)[mask] / np.abs(R)[mask]).max()


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--windows", type=int, default=30)
    ap.add_argument("--size", type=int, default=8)
    ap.add_argument("--p", type=float, default=0.5)
    ap.add_argument("--dps", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    worst = {"double solve": 0.0, "exact inverse of rounded F": 0.0, "extended precision": 0.0}
    mpmath.mp.dps = args.dps
    for _ in range(args.windows):
        a, c = polar(rng, args.size), polar(rng, args.size)
        seq = SequencePair.from_lists(a, c, Nome(args.p))
        F = f_window(seq, 0, args.size - 1).entries
        G = g_window(seq, 0, args.size - 1).entries
        n = args.size
        worst["double solve"] = max(worst["double solve"],
                                    entrywise(G, solve_triangular(F, np.eye(n), lower=True, unit_diagonal=True)))
        Fmp = [[mpmath.mpc(complex(v)) for v in row] for row in F]
        worst["exact inverse of rounded F"] = max(worst["exact inverse of rounded F"], entrywise(G, mp_inverse(Fmp)))
        worst["extended precision"] = max(worst["extended precision"],
                                          entrywise(G, mp_inverse(mp_f_window(a, c, args.p, args.dps))))
    for name, val in worst.items():
        print(f"{name:28s} max entrywise relative difference {val:.2e}")


if __name__ == "__main__":
    main()
