"""Elliptic shifted factorials over a refined base.

Every base that occurs (q, q^s, q^(1/y)) is written as an integer power of a
primitive ``q_star`` with ``q = q_star**Y``, so no complex root is ever taken.
Exponents below are always counted in units of ``q_star``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ZeroArgument
from .residual import Residual, prod, quotient
from .theta import Nome, check_off_zeros, theta


@dataclass(frozen=True)
class RefinedBase:
    q_star: complex
    Y: int
    nome: Nome

    def __post_init__(self):
        object.__setattr__(self, "q_star", complex(self.q_star))
        if self.q_star == 0:
            raise ZeroArgument("q_star must be nonzero")
        if int(self.Y) != self.Y or self.Y < 1:
            raise ValueError("Y must be a positive integer")

    @property
    def q(self) -> complex:
        return self.qs(self.Y)

    def qs(self, e: int) -> complex:
        """q_star**e for an integer e."""
        cache = self.__dict__.setdefault("_pow_cache", {})
        try:
            return cache[e]
        except KeyError:
            val = self.q_star ** int(e)
            cache[e] = val
            return val

    def qpow(self, num: int, den: int = 1) -> complex:
        """q^(num/den); den must divide Y * num."""
        e, rem = divmod(self.Y * num, den)
        if rem:
            raise ValueError(f"q^({num}/{den}) is not an integer power of q_star (Y={self.Y})")
        return self.qs(e)

    def unit(self, y: int) -> int:
        """Exponent step of the base q^(1/y) in q_star units."""
        step, rem = divmod(self.Y, y)
        if rem:
            raise ValueError(f"Y={self.Y} is not divisible by {y}")
        return step

    def with_nome(self, nome: Nome) -> RefinedBase:
        return RefinedBase(self.q_star, self.Y, nome)


@dataclass(frozen=True)
class FactorialArg:
    """(a; q_star^step)_k."""

    a: complex
    step: int
    k: int

    def __post_init__(self):
        if self.a == 0:
            raise ZeroArgument("factorial argument must be nonzero")
        if self.step < 1:
            raise ValueError("step must be >= 1")


def _factors(a: complex, step: int, k: int, base: RefinedBase) -> np.ndarray:
    return np.array([a * base.qs(step * t) for t in range(k)], dtype=complex)


def poch(a: complex, k: int, step: int, base: RefinedBase, *, divisor: bool = False) -> complex:
    """(a; q_star^step)_k, extended to k < 0 by 1 / (a q^(s k); q^s)_(-k).

    With ``divisor=True`` every theta argument is checked against the zero
    set, as required when the result is going to be divided by.
    """
    if a == 0:
        raise ZeroArgument("factorial argument must be nonzero")
    if k == 0:
        return 1.0 + 0j
    if k > 0:
        args = _factors(a, step, k, base)
        if divisor:
            check_off_zeros(args, base.nome)
        return prod(theta(args, base.nome))
    args = _factors(a * base.qs(step * k), step, -k, base)
    check_off_zeros(args, base.nome)
    return 1.0 / prod(theta(args, base.nome))


def epoch(arg: FactorialArg, base: RefinedBase) -> complex:
    return poch(arg.a, arg.k, arg.step, base)


def epoch_multi(args: Sequence[FactorialArg], base: RefinedBase) -> complex:
    out = 1.0 + 0j
    for arg in args:
        out *= epoch(arg, base)
    return out


def poch_ratio(num: Sequence[complex], den: Sequence[complex], k: int, step: int,
               base: RefinedBase) -> complex:
    """(num_1, ..., num_r; q^s)_k / (den_1, ..., den_t; q^s)_k."""
    return quotient([poch(a, k, step, base) for a in num],
                    [poch(b, k, step, base, divisor=True) for b in den])


def residual_epdi(a: complex, b: complex, n: int, k: int, base: RefinedBase) -> Residual:
    """(a)_{n-k}/(b)_{n-k} = (b/a)^k (a)_n (q^{1-n}/b)_k / ((b)_n (q^{1-n}/a)_k)."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    Y = base.Y
    q1n = base.qs(Y * (1 - n))
    lhs = poch(a, n - k, Y, base) / poch(b, n - k, Y, base, divisor=True)
    rhs = ((b / a) ** k * poch(a, n, Y, base) * poch(q1n / b, k, Y, base)
           / (poch(b, n, Y, base, divisor=True) * poch(q1n / a, k, Y, base, divisor=True)))
    return Residual.between([lhs], [rhs])


def residual_epi(a: complex, b: complex, n: int, base: RefinedBase) -> Residual:
    """(a)_n/(b)_n = (a/b)^n (q^{1-n}/a)_n / (q^{1-n}/b)_n."""
    Y = base.Y
    q1n = base.qs(Y * (1 - n))
    lhs = poch(a, n, Y, base) / poch(b, n, Y, base, divisor=True)
    rhs = (a / b) ** n * poch(q1n / a, n, Y, base) / poch(q1n / b, n, Y, base, divisor=True)
    return Residual.between([lhs], [rhs])


def residual_xsk(x: complex, s: int, k: int, base: RefinedBase) -> Residual:
    """(x; q)_{sk} = (x, xq, ..., xq^{s-1}; q^s)_k."""
    if s < 1 or k < 0:
        raise ValueError("need s >= 1 and k >= 0")
    Y = base.Y
    lhs = poch(x, s * k, Y, base)
    rhs = 1.0 + 0j
    for t in range(s):
        rhs *= poch(x * base.qs(Y * t), k, Y * s, base)
    return Residual.between([lhs], [rhs])

