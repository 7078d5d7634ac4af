"""Cancellation-aware residuals.

A vanishing sum of terms is judged against the total magnitude that had to
cancel: ``|sum| / sum(|term|)``. Identities ``lhs == rhs`` are flattened
into one list with the right-hand terms negated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable


def csum(terms: Iterable[complex]) -> complex:
    """Compensated complex sum (real and imaginary parts through fsum)."""
    terms = [complex(t) for t in terms]
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


@dataclass(frozen=True)
class Residual:
    value: complex
    scale: float

    @property
    def relative(self) -> float:
        if self.scale == 0.0:
            return 0.0
        return abs(self.value) / self.scale

    def __float__(self) -> float:
        return self.relative

    @classmethod
    def of_terms(cls, terms: Iterable[complex], target: complex = 0.0) -> Residual:
        terms = [complex(t) for t in terms]
        value = csum(terms) - target
        scale = math.fsum(abs(t) for t in terms) + abs(target)
        return cls(value, scale)

    @classmethod
    def between(cls, lhs: Iterable[complex], rhs: Iterable[complex]) -> Residual:
        return cls.of_terms(list(lhs) + [-complex(t) for t in rhs])


def worst(residuals: Iterable[Residual]) -> Residual:
    """Residual with the largest relative value; an empty input gives zero."""
    best = Residual(0j, 0.0)
    for r in residuals:
        if r.relative >= best.relative:
            best = r
    return best


def _scaled(values: Iterable[complex]) -> tuple[complex, int]:
    """Product as mantissa * 2**exponent, renormalized after every factor
    so no intermediate under- or overflows. Scaling by powers of two is exact."""
    m, e = 1.0 + 0j, 0
    for v in values:
        m *= complex(v)
        if m == 0 or not (math.isfinite(m.real) and math.isfinite(m.imag)):
            return m, 0
        s = math.frexp(max(abs(m.real), abs(m.imag)))[1]
        m = complex(math.ldexp(m.real, -s), math.ldexp(m.imag, -s))
        e += s
    return m, e


def _ldexp1(x: float, e: int) -> float:
    try:
        return math.ldexp(x, e)
    except OverflowError:  # saturate like IEEE multiplication
        return math.copysign(math.inf, x)


def _ldexp(m: complex, e: int) -> complex:
    return complex(_ldexp1(m.real, e), _ldexp1(m.imag, e))


def prod(values: Iterable[complex]) -> complex:
    """Product whose intermediates never leave the double range."""
    return _ldexp(*_scaled(values))


def quotient(num: Iterable[complex], den: Iterable[complex]) -> complex:
    """prod(num) / prod(den), each side kept in scaled form until the end."""
    m1, e1 = _scaled(num)
    m2, e2 = _scaled(den)
    if m1 == 0:
        return 0j
    return _ldexp(m1 / m2, e1 - e2)
