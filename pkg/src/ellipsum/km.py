"""Karlsson--Minton-type elliptic hypergeometric identities.

Every identity is evaluated as a flat list of terms (left-hand summands and
negated right-hand summands) and judged with the cancellation residual.
Fractional powers q^(t/y) are integer powers of the refined base, and
exponents in this module are in q_star units unless noted.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from math import comb
from typing import Sequence

import numpy as np

from .errors import BadArity, ConstraintViolated, DegenerateConstraint
from .inversion import gustafson_terms, tannery_molk_terms
from .pochhammer import RefinedBase, poch
from .residual import Residual, quotient, worst
from .theta import Nome, theta, theta_den

BALANCE_RTOL = 1e-12


def _th(xs: Sequence[complex], nome: Nome) -> complex:
    return complex(np.prod(theta(np.asarray(xs, dtype=complex), nome)))


def _ratio_parts(base: RefinedBase, num: Sequence[complex], den: Sequence[complex], k: int,
                 step: int) -> tuple[list[complex], list[complex]]:
    return ([poch(x, k, step, base) for x in num],
            [poch(x, k, step, base, divisor=True) for x in den])


def _ratio(base: RefinedBase, num: Sequence[complex], den: Sequence[complex], k: int, step: int) -> complex:
    return quotient(*_ratio_parts(base, num, den, k, step))


def _ratio_chain(base: RefinedBase, factors, scalars: Sequence[complex] = ()) -> complex:
    """Product of several ratios and scalars as one scaled quotient, for
    prefactors whose pieces are far outside the double range on their own."""
    top, bottom = list(scalars), []
    for num, den, k, step in factors:
        t, b = _ratio_parts(base, num, den, k, step)
        top += t
        bottom += b
    return quotient(top, bottom)


def _close(lhs: complex, rhs: complex, rtol: float = BALANCE_RTOL) -> bool:
    return abs(lhs - rhs) <= rtol * max(abs(lhs), abs(rhs))


def _check_units(base: RefinedBase, y: Sequence[int]) -> list[int]:
    if any(yj < 1 for yj in y):
        raise ConstraintViolated("y_j must be positive")
    try:
        return [base.unit(yj) for yj in y]
    except ValueError as exc:
        raise ConstraintViolated(str(exc)) from None


@dataclass(frozen=True)
class KmInstance:
    """Parameters for the multi-term transformations (kmt and atr modes)."""

    a: tuple[complex, ...]
    b: tuple[complex, ...]
    l: tuple[int, ...]
    m: tuple[int, ...]
    y: tuple[int, ...]
    base: RefinedBase

    def __post_init__(self):
        for name in ("a", "b", "l", "m", "y"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if len(self.a) != len(self.l) or not self.a:
            raise BadArity("need s >= 1 with len(a) == len(l)")
        if not len(self.b) == len(self.m) == len(self.y):
            raise BadArity("b, m and y must have equal length")
        if any(x == 0 for x in (*self.a, *self.b)):
            raise ValueError("parameters must be nonzero")
        if any(v < 0 for v in (*self.l, *self.m)):
            raise ConstraintViolated("l_i and m_j must be nonnegative")

    @property
    def s(self) -> int:
        return len(self.a)

    @property
    def r(self) -> int:
        return len(self.b)

    def validate(self, mode: str) -> None:
        _check_units(self.base, self.y)
        if mode == "kmt":
            if sum(self.l) + self.s != sum(self.m) + 2:
                raise ConstraintViolated("kmt needs |l| + s = |m| + 2")
        elif mode == "atr":
            if sum(self.l) + self.s != sum(self.m):
                raise ConstraintViolated("atr needs |l| + s = |m|")
            lhs, rhs = apc_sides(self)
            if not _close(lhs, rhs):
                raise ConstraintViolated("product constraint apc fails")
        else:
            raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class TwoTermInstance:
    """Parameters of the s = 2 corollaries; ``a`` is carried as alpha**2."""

    alpha: complex
    b: complex
    N: int
    L: int
    c: tuple[complex, ...]
    m: tuple[int, ...]
    y: tuple[int, ...]
    base: RefinedBase

    def __post_init__(self):
        for name in ("c", "m", "y"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not len(self.c) == len(self.m) == len(self.y):
            raise BadArity("c, m and y must have equal length")
        if self.N < 0 or self.L < 0 or any(v < 0 for v in self.m):
            raise ConstraintViolated("N, L and m_j must be nonnegative")
        if self.alpha == 0 or self.b == 0 or any(x == 0 for x in self.c):
            raise ValueError("parameters must be nonzero")

    @property
    def a(self) -> complex:
        return self.alpha * self.alpha

    def validate(self, mode: str) -> None:
        _check_units(self.base, self.y)
        M = sum(self.m)
        if mode in ("trc", "mbkms", "kmsi"):
            if M != self.L + self.N:
                raise ConstraintViolated(f"{mode} needs |m| = L + N")
            if mode in ("mbkms", "kmsi") and self.L != 0:
                raise ConstraintViolated(f"{mode} needs L = 0")
            if mode == "kmsi" and any(yj != 1 for yj in self.y):
                raise ConstraintViolated("kmsi needs y_j = 1")
        elif mode == "akmt":
            if M != self.N + self.L + 2:
                raise ConstraintViolated("akmt needs |m| = N + L + 2")
            verify_balance("npc", npc_params(self), self.b, self.base)
        else:
            raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class WbbInstance:
    a: complex
    b: complex
    c: complex
    s: int
    N: int
    base: RefinedBase

    def __post_init__(self):
        if self.s < 1 or self.N < 0:
            raise ConstraintViolated("need s >= 1 and N >= 0")
        if 0 in (self.a, self.b, self.c):
            raise ValueError("parameters must be nonzero")


# ---------------------------------------------------------------- Theorem kmt

def kmt_terms(inst: KmInstance) -> list[complex]:
    """Flattened (i, k) summands of the multi-term transformation (sum = 0)."""
    inst.validate("kmt")
    base, nome, Y = inst.base, inst.base.nome, inst.base.Y
    qs, q = base.qs, base.q
    units = [base.unit(yj) for yj in inst.y]
    a, b, l, m, y = inst.a, inst.b, inst.l, inst.m, inst.y
    terms = []
    for i, ai in enumerate(a):
        num = ai
        for bj, mj, st in zip(b, m, units):
            num *= poch(ai * bj, mj, st, base) * poch(ai * qs(st * (1 - mj)) / bj, mj, st, base)
        den = poch(ai * ai * q, l[i], Y, base, divisor=True) * poch(qs(-Y * l[i]), l[i], Y, base, divisor=True)
        for j, aj in enumerate(a):
            if j != i:
                den *= (poch(ai * aj, l[j] + 1, Y, base, divisor=True)
                        * poch(ai * qs(-Y * l[j]) / aj, l[j] + 1, Y, base, divisor=True))
        pref = num / den
        a2 = ai * ai
        theta_a2 = theta_den([a2], nome)
        for k in range(l[i] + 1):
            t = _th([a2 * qs(2 * Y * k)], nome) / theta_a2 * qs(Y * k)
            for j, aj in enumerate(a):
                t *= _ratio(base, [ai * aj, ai * qs(-Y * l[j]) / aj],
                            [ai * q / aj, ai * aj * qs(Y * (l[j] + 1))], k, Y)
            for bj, mj, yj, st in zip(b, m, y, units):
                t *= _ratio(base, [ai * bj * qs(st * mj), ai * qs(st) / bj],
                            [ai * qs(st * (1 - mj)) / bj, ai * bj], yj * k, st)
            terms.append(pref * t)
    return terms


def kmt_residual(inst: KmInstance) -> Residual:
    return Residual.of_terms(kmt_terms(inst))


def substituted_lists(inst: KmInstance) -> tuple[list[complex], list[complex]]:
    """(a_i q^k) for k <= l_i and (b_j q^(t/y_j)) for t < m_j, in summation order."""
    base = inst.base
    a_list = [ai * base.qs(base.Y * k) for ai, li in zip(inst.a, inst.l) for k in range(li + 1)]
    b_list = [bj * base.qs(base.unit(yj) * t) for bj, mj, yj in zip(inst.b, inst.m, inst.y) for t in range(mj)]
    return a_list, b_list


def kmt_gustafson_terms(inst: KmInstance) -> list[complex]:
    """The same summands obtained by substituting directly into Gustafson's sum."""
    inst.validate("kmt")
    a_list, b_list = substituted_lists(inst)
    return gustafson_terms(a_list, b_list, inst.base.nome)


def unit_y_instance(inst: KmInstance) -> KmInstance:
    """Equivalent instance with every y_j = 1.

    (x; q^(1/y))_(yk) splits into (x q^(rho/y); q)_k over residues rho < y,
    so each b_j becomes the parameters b_j q^(rho/y_j) with m_j distributed
    over the residue classes of t < m_j.
    """
    base = inst.base
    b2, m2 = [], []
    for bj, mj, yj in zip(inst.b, inst.m, inst.y):
        st = base.unit(yj)
        for rho in range(yj):
            count = len(range(rho, mj, yj))
            if count:
                b2.append(bj * base.qs(st * rho))
                m2.append(count)
    return KmInstance(inst.a, tuple(b2), inst.l, tuple(m2), (1,) * len(b2), base)


# ---------------------------------------------------------------- Theorem atr

def apc_sides(inst: KmInstance) -> tuple[complex, complex]:
    base = inst.base
    e_a = base.Y * sum(comb(li + 1, 2) for li in inst.l)
    e_b = sum(base.unit(yj) * comb(mj, 2) for mj, yj in zip(inst.m, inst.y))
    lhs = base.qs(e_a) * np.prod([ai ** (li + 1) for ai, li in zip(inst.a, inst.l)])
    rhs = base.qs(e_b) * np.prod([bj ** mj for bj, mj in zip(inst.b, inst.m)]) if inst.b else base.qs(e_b)
    return complex(lhs), complex(rhs)


def atr_terms(inst: KmInstance) -> list[complex]:
    inst.validate("atr")
    base, Y = inst.base, inst.base.Y
    qs, q = base.qs, base.q
    units = [base.unit(yj) for yj in inst.y]
    a, b, l, m, y = inst.a, inst.b, inst.l, inst.m, inst.y
    terms = []
    for i, ai in enumerate(a):
        num = 1.0 + 0j
        for bj, mj, st in zip(b, m, units):
            num *= poch(ai * qs(st * (1 - mj)) / bj, mj, st, base)
        den = poch(qs(-Y * l[i]), l[i], Y, base, divisor=True)
        for j, aj in enumerate(a):
            if j != i:
                den *= poch(ai * qs(-Y * l[j]) / aj, l[j] + 1, Y, base, divisor=True)
        pref = num / den
        for k in range(l[i] + 1):
            t = 1.0 + 0j
            for j, aj in enumerate(a):
                t *= _ratio(base, [ai * qs(-Y * l[j]) / aj], [ai * q / aj], k, Y)
            for bj, mj, yj, st in zip(b, m, y, units):
                t *= _ratio(base, [ai * qs(st) / bj], [ai * qs(st * (1 - mj)) / bj], yj * k, st)
            terms.append(pref * t)
    return terms


def atr_residual(inst: KmInstance) -> Residual:
    return Residual.of_terms(atr_terms(inst))


def atr_tannery_molk_terms(inst: KmInstance) -> list[complex]:
    inst.validate("atr")
    a_list, b_list = substituted_lists(inst)
    return tannery_molk_terms(a_list, b_list, inst.base.nome, rtol=BALANCE_RTOL)


# --------------------------------------------------------- balancing constraints

@dataclass(frozen=True)
class BalanceSolution:
    principal: complex
    roots: tuple[complex, ...]


def npc_params(inst: TwoTermInstance) -> dict:
    return {"c": list(inst.c), "m": list(inst.m), "y": list(inst.y), "N": inst.N, "L": inst.L}


def _balance_equation(mode: str, params: dict, base: RefinedBase):
    """Return (exponent, right-hand side): free**exponent == rhs."""
    Y = base.Y
    if mode in ("npc", "akms_b"):
        c, m, y, N = params["c"], params["m"], params["y"], params["N"]
        units = _check_units(base, y)
        e = Y * comb(N + 1, 2) + sum(st * comb(mj, 2) for mj, st in zip(m, units))
        power = 1
        if mode == "npc":
            L = params["L"]
            e -= Y * comb(L + 1, 2)
            power = L + 1
        rhs = base.qs(e) * complex(np.prod([complex(cj) ** mj for cj, mj in zip(c, m)]))
        return power, rhs
    if mode == "apc":
        a, b, l, m, y = params["a"], params["b"], params["l"], params["m"], params["y"]
        kind, idx = params.get("free", ("a", len(a) - 1))
        units = _check_units(base, y)
        lhs = base.qs(Y * sum(comb(li + 1, 2) for li in l))
        rhs = base.qs(sum(st * comb(mj, 2) for mj, st in zip(m, units)))
        for i, (ai, li) in enumerate(zip(a, l)):
            if not (kind == "a" and i == idx):
                lhs *= complex(ai) ** (li + 1)
        for j, (bj, mj) in enumerate(zip(b, m)):
            if not (kind == "b" and j == idx):
                rhs *= complex(bj) ** mj
        if kind == "a":
            return l[idx] + 1, rhs / lhs
        if kind == "b":
            return m[idx], lhs / rhs
        raise ValueError("free must name an 'a' or 'b' entry")
    raise ValueError(f"unknown balance mode {mode!r}")


def solve_balance(mode: str, params: dict, base: RefinedBase) -> BalanceSolution:
    """Solve apc / npc / the akms condition for the designated free parameter."""
    power, rhs = _balance_equation(mode, params, base)
    if power == 0:
        raise DegenerateConstraint("the free parameter does not occur in the constraint")
    principal = cmath.exp(cmath.log(rhs) / power)
    roots = tuple(principal * cmath.exp(2j * math.pi * t / power) for t in range(power))
    return BalanceSolution(principal, roots)


def verify_balance(mode: str, params: dict, value: complex, base: RefinedBase,
                   rtol: float = BALANCE_RTOL) -> None:
    power, rhs = _balance_equation(mode, params, base)
    lhs = complex(value) ** power
    if not _close(lhs, rhs, rtol):
        raise ConstraintViolated(f"{mode} constraint fails: {lhs!r} != {rhs!r}")


# ---------------------------------------------------------- kmsi / wbb / mbkms

def kmsi_lhs_terms(a: complex, b: complex, c: Sequence[complex], m: Sequence[int], N: int,
                   base: RefinedBase) -> list[complex]:
    nome, Y, qs, q = base.nome, base.Y, base.qs, base.q
    theta_a = theta_den([a], nome)
    terms = []
    for k in range(N + 1):
        t = _th([a * qs(2 * Y * k)], nome) / theta_a * qs(Y * k)
        t *= _ratio(base, [a, qs(-Y * N), b, a / b], [q, a * qs(Y * (N + 1)), a * q / b, b * q], k, Y)
        for cj, mj in zip(c, m):
            t *= _ratio(base, [cj * qs(Y * mj), a * q / cj], [a * qs(Y * (1 - mj)) / cj, cj], k, Y)
        terms.append(t)
    return terms


def kmsi_rhs(a: complex, b: complex, c: Sequence[complex], m: Sequence[int], N: int,
             base: RefinedBase) -> complex:
    Y, q = base.Y, base.q
    out = _ratio(base, [a * q, q], [b * q, a * q / b], N, Y)
    for cj, mj in zip(c, m):
        out *= _ratio(base, [cj / b, cj * b / a], [cj, cj / a], mj, Y)
    return out


def kmsi_residual(a: complex, b: complex, c: Sequence[complex], m: Sequence[int], N: int,
                  base: RefinedBase) -> Residual:
    if len(c) != len(m):
        raise BadArity("c and m must have equal length")
    if sum(m) != N or any(mj < 0 for mj in m):
        raise ConstraintViolated("kmsi needs |m| = N with m_j >= 0")
    return Residual.between(kmsi_lhs_terms(a, b, c, m, N, base), [kmsi_rhs(a, b, c, m, N, base)])


def wbb_terms(inst: WbbInstance) -> tuple[list[complex], list[complex]]:
    a, b, c, s, N, base = inst.a, inst.b, inst.c, inst.s, inst.N, inst.base
    nome, Y, qs, q = base.nome, base.Y, base.qs, base.q
    S = Y * s  # q^s in q_star units
    qS = qs(S)
    theta_a = theta_den([a], nome)
    lhs = []
    for k in range(N + 1):
        t = _th([a * qs(2 * S * k)], nome) / theta_a * qs(S * k)
        t *= _ratio(base, [a, qs(-S * N), b, a / b], [qS, a * qs(S * (N + 1)), a * qS / b, b * qS], k, S)
        t *= _ratio(base, [c * qs(Y * N), a * q / c], [a * qs(Y * (1 - N)) / c, c], s * k, Y)
        lhs.append(t)
    rhs = _ratio(base, [a * qS, qS], [b * qS, a * qS / b], N, S)
    rhs *= _ratio(base, [c / b, b * c / a], [c, c / a], N, Y)
    return lhs, [rhs]


def wbb_residual(inst: WbbInstance) -> Residual:
    return Residual.between(*wbb_terms(inst))


def wbb_as_mbkms(inst: WbbInstance) -> TwoTermInstance:
    """The r = 1 summation with y = (s), m = (N) over the base q^s."""
    base = RefinedBase(inst.base.q_star, inst.base.Y * inst.s, inst.base.nome)
    return TwoTermInstance(cmath.sqrt(inst.a), inst.b, inst.N, 0, (inst.c,), (inst.N,), (inst.s,), base)


def _km_lhs(inst: TwoTermInstance, L: int) -> list[complex]:
    """Left side shared by trc (general L) and mbkms (L = 0)."""
    base, a, b, N = inst.base, inst.a, inst.b, inst.N
    nome, Y, qs, q = base.nome, base.Y, base.qs, base.q
    units = [base.unit(yj) for yj in inst.y]
    theta_a = theta_den([a], nome)
    out = []
    for k in range(N + 1):
        t = _th([a * qs(2 * Y * k)], nome) / theta_a * qs(Y * k)
        t *= _ratio(base, [a, qs(-Y * N), b, a * qs(-Y * L) / b],
                    [q, a * qs(Y * (N + 1)), a * q / b, b * qs(Y * (L + 1))], k, Y)
        for cj, mj, yj, st in zip(inst.c, inst.m, inst.y, units):
            t *= _ratio(base, [cj * qs(st * mj), a * qs(st) / cj],
                        [a * qs(st * (1 - mj)) / cj, cj], yj * k, st)
        out.append(t)
    return out


def mbkms_terms(inst: TwoTermInstance) -> tuple[list[complex], list[complex]]:
    inst.validate("mbkms")
    base, a, b, N, Y = inst.base, inst.a, inst.b, inst.N, inst.base.Y
    q = base.q
    rhs = _ratio(base, [a * q, q], [b * q, a * q / b], N, Y)
    for cj, mj, yj in zip(inst.c, inst.m, inst.y):
        rhs *= _ratio(base, [cj / b, cj * b / a], [cj, cj / a], mj, base.unit(yj))
    return _km_lhs(inst, 0), [rhs]


def mbkms_residual(inst: TwoTermInstance) -> Residual:
    return Residual.between(*mbkms_terms(inst))


def trc_terms(inst: TwoTermInstance) -> tuple[list[complex], list[complex]]:
    inst.validate("trc")
    base, a, b, N, L = inst.base, inst.a, inst.b, inst.N, inst.L
    nome, Y, qs, q = base.nome, base.Y, base.qs, base.q
    units = [base.unit(yj) for yj in inst.y]
    pref = _ratio(base, [a * q, q], [b * q, a * q / b], N, Y)
    pref *= _ratio(base, [b * q, b * q / a], [b * b * q / a, q], L, Y)
    for cj, mj, st in zip(inst.c, inst.m, units):
        pref *= _ratio(base, [cj / b, cj * b / a], [cj, cj / a], mj, st)
    B = b * b / a
    theta_B = theta_den([B], nome)
    rhs = []
    for k in range(L + 1):
        t = _th([B * qs(2 * Y * k)], nome) / theta_B * qs(Y * k)
        t *= _ratio(base, [B, qs(-Y * L), b, b * qs(-Y * N) / a],
                    [q, qs(Y * (L + 1)) * B, b * q / a, b * qs(Y * (N + 1))], k, Y)
        for cj, mj, yj, st in zip(inst.c, inst.m, inst.y, units):
            t *= _ratio(base, [b * cj * qs(st * mj) / a, b * qs(st) / cj],
                        [b * qs(st * (1 - mj)) / cj, b * cj / a], yj * k, st)
        rhs.append(pref * t)
    return _km_lhs(inst, L), rhs


def trc_residual(inst: TwoTermInstance) -> Residual:
    return Residual.between(*trc_terms(inst))


# ------------------------------------------------------ akmt / akms (section 5)

def akmt_terms(inst: TwoTermInstance) -> tuple[list[complex], list[complex]]:
    inst.validate("akmt")
    base, b, N, L = inst.base, inst.b, inst.N, inst.L
    Y, qs, q = base.Y, base.qs, base.q
    units = [base.unit(yj) for yj in inst.y]
    lhs = []
    for k in range(N + 1):
        t = _ratio(base, [qs(-Y * N), b], [q, b * qs(Y * (L + 1))], k, Y)
        for cj, mj, yj, st in zip(inst.c, inst.m, inst.y, units):
            t *= _ratio(base, [cj * qs(st * mj)], [cj], yj * k, st)
        lhs.append(t)
    pref = _ratio_chain(base, [([q], [b * q], N, Y), ([b * q], [q], L, Y),
                               *[([cj / b], [cj], mj, st) for cj, mj, st in zip(inst.c, inst.m, units)]],
                        [b] * (N + 1))
    rhs = []
    for k in range(L + 1):
        t = _ratio(base, [qs(-Y * L), b], [q, b * qs(Y * (N + 1))], k, Y)
        for cj, mj, yj, st in zip(inst.c, inst.m, inst.y, units):
            t *= _ratio(base, [b * qs(st) / cj], [b * qs(st * (1 - mj)) / cj], yj * k, st)
        rhs.append(pref * t)
    return lhs, rhs


def akmt_residual(inst: TwoTermInstance) -> Residual:
    return Residual.between(*akmt_terms(inst))


def akms_b(N: int, c: Sequence[complex], m: Sequence[int], y: Sequence[int], base: RefinedBase) -> complex:
    return solve_balance("akms_b", {"c": list(c), "m": list(m), "y": list(y), "N": N}, base).principal


def akms_terms(N: int, c: Sequence[complex], m: Sequence[int], y: Sequence[int],
               base: RefinedBase) -> tuple[list[complex], list[complex]]:
    """Summation with b fixed by the balancing condition; no q^k in the summand."""
    if not len(c) == len(m) == len(y):
        raise BadArity("c, m and y must have equal length")
    if sum(m) != N + 2 or N < 0 or any(mj < 0 for mj in m):
        raise ConstraintViolated("akms needs |m| = N + 2")
    units = _check_units(base, y)
    b = akms_b(N, c, m, y, base)
    Y, qs, q = base.Y, base.qs, base.q
    lhs = []
    for k in range(N + 1):
        t = _ratio(base, [qs(-Y * N), b], [q, b * q], k, Y)
        for cj, mj, yj, st in zip(c, m, y, units):
            t *= _ratio(base, [cj * qs(st * mj)], [cj], yj * k, st)
        lhs.append(t)
    rhs = _ratio_chain(base, [([q], [b * q], N, Y),
                              *[([cj / b], [cj], mj, st) for cj, mj, st in zip(c, m, units)]],
                       [b] * (N + 1))
    return lhs, [rhs]


def akms_residual(N: int, c: Sequence[complex], m: Sequence[int], y: Sequence[int],
                  base: RefinedBase) -> Residual:
    return Residual.between(*akms_terms(N, c, m, y, base))


# ------------------------------------------------------ appendix: induction on N

def theta_split_terms(inst: TwoTermInstance, k: int) -> list[complex]:
    """theta(aq^{k+N+1}, q^{k-N-1}, c q^{m-1}, aq^{1-m}/c)
       - q^{-N-1} theta(aq^k, q^k, c q^{m+N}, aq^{2-m+N}/c)
       - theta(aq^{N+1}, q^{-N-1}, c q^{m+k-1}, aq^{1-m+k}/c)   with c = c_r, m = m_r."""
    base, a, N = inst.base, inst.a, inst.N
    nome, Y, qs = base.nome, base.Y, base.qs
    cr, mr = inst.c[-1], inst.m[-1]
    Q = lambda e: qs(Y * e)  # noqa: E731  integer powers of q
    t1 = _th([a * Q(k + N + 1), Q(k - N - 1), cr * Q(mr - 1), a * Q(1 - mr) / cr], nome)
    t2 = Q(-N - 1) * _th([a * Q(k), Q(k), cr * Q(mr + N), a * Q(2 - mr + N) / cr], nome)
    t3 = _th([a * Q(N + 1), Q(-N - 1), cr * Q(mr + k - 1), a * Q(1 - mr + k) / cr], nome)
    return [t1, -t2, -t3]


def theta_split_residual(inst: TwoTermInstance, k: int) -> Residual:
    return Residual.of_terms(theta_split_terms(inst, k))


def _step_setup(inst: TwoTermInstance):
    if inst.L != 0:
        raise ConstraintViolated("the induction step works at L = 0")
    if any(yj != 1 for yj in inst.y):
        raise ConstraintViolated("the induction step is stated for y_j = 1")
    if not inst.m or inst.m[-1] < 1:
        raise ConstraintViolated("need m_r >= 1")
    if sum(inst.m) != inst.N + 1:
        raise ConstraintViolated("the step from N to N+1 needs |m| = N + 1")
    m_low = (*inst.m[:-1], inst.m[-1] - 1)
    return inst.a, inst.b, list(inst.c), list(inst.m), m_low


def bracket_terms(inst: TwoTermInstance) -> list[complex]:
    """1 - theta(b, a/b, c q^{N+m}, aq^{N+2-m}/c) / theta(bq^{N+1}, aq^{N+1}/b, c q^{m-1}, aq^{1-m}/c)
    against theta(q^{N+1}, aq^{N+1}, q^{m-1}c/b, q^{m-1}cb/a) / theta(bq^{N+1}, aq^{N+1}/b, q^{m-1}c, q^{m-1}c/a)."""
    base, a, b, N = inst.base, inst.a, inst.b, inst.N
    nome, Q = base.nome, (lambda e: base.qs(base.Y * e))
    cr, mr = inst.c[-1], inst.m[-1]
    ratio = (_th([b, a / b, cr * Q(N + mr), a * Q(N + 2 - mr) / cr], nome)
             / theta_den([b * Q(N + 1), a * Q(N + 1) / b, cr * Q(mr - 1), a * Q(1 - mr) / cr], nome))
    simplified = (_th([Q(N + 1), a * Q(N + 1), Q(mr - 1) * cr / b, Q(mr - 1) * cr * b / a], nome)
                  / theta_den([b * Q(N + 1), a * Q(N + 1) / b, Q(mr - 1) * cr, Q(mr - 1) * cr / a], nome))
    return [1.0, -ratio, -simplified]


def bracket_residual(inst: TwoTermInstance) -> Residual:
    return Residual.of_terms(bracket_terms(inst))


def induction_stages(inst: TwoTermInstance) -> dict[str, Residual]:
    """Residual of every link in the step from N to N+1.

    ``split``      S equals the two shifted sums after multiplying by one
    ``hypothesis`` both shifted sums equal their closed forms at level N
    ``combine``    the closed forms combine into prefactor * {1 - ratio}
    ``bracket``    the braces simplify to a single theta quotient
    ``closure``    the result is the closed form at level N+1
    ``routes``     S summed directly against the full chain
    """
    a, b, c, m, m_low = _step_setup(inst)
    base, N = inst.base, inst.N
    nome, Y = base.nome, base.Y
    Q = lambda e: base.qs(Y * e)  # noqa: E731
    q = base.q
    cr, mr = c[-1], m[-1]

    S = kmsi_lhs_terms(a, b, c, m, N + 1, base)
    first = kmsi_lhs_terms(a, b, c, m_low, N, base)
    a2, b2, c2 = a * q * q, b * q, [cj * q for cj in c]
    second = kmsi_lhs_terms(a2, b2, c2, m_low, N, base)

    coef = Q(-N) * _th([a * q, a * q * q, b, a / b, cr * Q(mr + N), a * q / cr, a * Q(2 - mr + N) / cr], nome)
    coef /= theta_den([a * q / b, b * q, a * Q(N + 1), a * Q(N + 2), a * Q(1 - mr) / cr, a * Q(2 - mr) / cr, cr], nome)
    for cj, mj in zip(c[:-1], m[:-1]):
        coef *= _th([cj * Q(mj), a * q / cj], nome) / theta_den([a * Q(1 - mj) / cj, cj], nome)

    r1 = kmsi_rhs(a, b, c, m_low, N, base)
    r2 = kmsi_rhs(a2, b2, c2, m_low, N, base)
    _, ratio, simplified = bracket_terms(inst)
    ratio, simplified = -ratio, -simplified
    chain = r1 * simplified  # r1 is the common prefactor
    closed = kmsi_rhs(a, b, c, m, N + 1, base)

    return {
        "split": Residual.between(S, first + [-coef * t for t in second]),
        "hypothesis": worst([Residual.between(first, [r1]), Residual.between(second, [r2])]),
        "combine": Residual.between([r1, -coef * r2], [r1, -r1 * ratio]),
        "bracket": Residual.of_terms([1.0, -ratio, -simplified]),
        "closure": Residual.between([chain], [closed]),
        "routes": Residual.between(S, [chain]),
    }


def induction_step_residual(inst: TwoTermInstance) -> Residual:
    """Direct sum at level N+1 against the inductive chain; worst link reported."""
    return worst(induction_stages(inst).values())


def kmsi_instance(inst: TwoTermInstance) -> tuple:
    """Arguments of ``kmsi_residual`` for an L = 0, y = 1 instance."""
    return inst.a, inst.b, list(inst.c), list(inst.m), inst.N, inst.base


def with_b(inst: TwoTermInstance, b: complex) -> TwoTermInstance:
    return replace(inst, b=b)


# ------------------------------------------------------------ cross-route checks

def _termwise(xs: Sequence[complex], ys: Sequence[complex]) -> Residual:
    if len(xs) != len(ys):
        raise BadArity("term lists differ in length")
    return worst([Residual.between([x], [y]) for x, y in zip(xs, ys)])


def wbb_mbkms_agreement(inst: WbbInstance) -> Residual:
    """Both sides of the s-step sum against the r = 1 summation over q^s."""
    lhs, rhs = wbb_terms(inst)
    lhs2, rhs2 = mbkms_terms(wbb_as_mbkms(inst))
    return worst([_termwise(lhs, lhs2), _termwise(rhs, rhs2)])


def trc_mbkms_agreement(inst: TwoTermInstance) -> Residual:
    if inst.L != 0:
        raise ConstraintViolated("comparison needs L = 0")
    lhs, rhs = trc_terms(inst)
    lhs2, rhs2 = mbkms_terms(inst)
    return worst([_termwise(lhs, lhs2), _termwise(rhs, rhs2)])


def akmt_akms_agreement(inst: TwoTermInstance) -> Residual:
    if inst.L != 0:
        raise ConstraintViolated("comparison needs L = 0")
    lhs, rhs = akmt_terms(inst)
    lhs2, rhs2 = akms_terms(inst.N, inst.c, inst.m, inst.y, inst.base)
    return worst([_termwise(lhs, lhs2), _termwise(rhs, rhs2)])


def akmt_root_sweep(inst: TwoTermInstance) -> Residual:
    """akmt for every (L+1)-th root b of the npc constraint."""
    sol = solve_balance("npc", npc_params(inst), inst.base)
    return worst([akmt_residual(with_b(inst, b)) for b in sol.roots])


def kmt_dpf_agreement(inst: KmInstance) -> Residual:
    return _termwise(kmt_terms(inst), kmt_gustafson_terms(inst))


def kmt_unit_y_agreement(inst: KmInstance) -> Residual:
    return _termwise(kmt_terms(inst), kmt_terms(unit_y_instance(inst)))


def atr_apf_agreement(inst: KmInstance) -> Residual:
    return _termwise(atr_terms(inst), atr_tannery_molk_terms(inst))


def kmsi_mbkms_agreement(inst: TwoTermInstance) -> Residual:
    """kmsi and mbkms evaluate the same y = 1 data through separate code paths."""
    inst.validate("kmsi")
    lhs, rhs = mbkms_terms(inst)
    args = kmsi_instance(inst)
    return worst([_termwise(kmsi_lhs_terms(*args), lhs), _termwise([kmsi_rhs(*args)], rhs)])
