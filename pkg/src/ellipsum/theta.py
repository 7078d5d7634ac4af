"""Modified Jacobi theta function by truncated infinite product.

    theta(x; p) = prod_{j >= 0} (1 - x p^j) (1 - p^{j+1} / x)

The product is cut at the first index J with |p|^(J+1) * max(|x|, 1/|x|, 1)
below ``epsilon``; every omitted factor then differs from one by less than
that bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DivisionByZeroTheta, NomeOutOfRange, TruncationFailure, ZeroArgument
from .residual import Residual

DEFAULT_DELTA = 1e-6


@dataclass(frozen=True)
class TruncationPolicy:
    epsilon: float = 1e-18
    max_terms: int = 2048

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be at least 1")


@dataclass(frozen=True)
class Nome:
    """The elliptic nome ``p`` together with evaluation policy.

    ``delta`` is the relative distance from the zero set {p^k} below which a
    theta value may not be used as a divisor.
    """

    p: complex
    policy: TruncationPolicy = field(default_factory=TruncationPolicy)
    guard: float = 0.9
    delta: float = DEFAULT_DELTA

    def __post_init__(self):
        object.__setattr__(self, "p", complex(self.p))
        if not 0 <= self.guard < 1:
            raise NomeOutOfRange(f"guard {self.guard} must lie in [0, 1)")
        if abs(self.p) > self.guard:
            raise NomeOutOfRange(f"|p| = {abs(self.p):.6g} exceeds guard {self.guard}")
        if not self.delta > 0:
            raise ValueError("delta must be positive")

    @cached_property
    def _log_abs_p(self) -> float:
        return math.log(abs(self.p))

    def n_factors(self, magnitude: float) -> int:
        """Number of factor pairs J+1 needed for an argument of the given
        ``max(|x|, 1/|x|, 1)``."""
        if self.p == 0:
            return 1
        ratio = self.policy.epsilon / magnitude
        if ratio >= 1:
            return 1
        j = max(0, math.floor(math.log(ratio) / self._log_abs_p))
        if j + 1 > self.policy.max_terms:
            raise TruncationFailure(
                f"theta product needs {j + 1} factors, cap is {self.policy.max_terms}"
            )
        return j + 1

    def powers(self, n: int) -> np.ndarray:
        """p^0, ..., p^(n-1)."""
        cache = self.__dict__.setdefault("_powers", np.ones(1, dtype=complex))
        if len(cache) < n:
            # sequential products keep p^0 == 1 and p^1 == p bit-exact
            steps = np.full(max(n, 2 * len(cache)), self.p, dtype=complex)
            steps[0] = 1.0
            cache = np.cumprod(steps)
            self.__dict__["_powers"] = cache
        return cache[:n]


def theta(x, nome: Nome):
    """theta(x; p) for a nonzero complex scalar or an array of them."""
    arr = np.asarray(x, dtype=complex)
    if np.any(arr == 0):
        raise ZeroArgument("theta is undefined at x = 0")
    if nome.p == 0:
        out = 1 - arr
        return complex(out) if out.ndim == 0 else out
    mag = np.abs(arr)
    worst_mag = float(max(np.max(mag), np.max(1 / mag), 1.0))
    n = nome.n_factors(worst_mag)
    pw = nome.powers(n + 1)
    xs = arr[..., None]
    factors = (1 - xs * pw[:n]) * (1 - pw[1 : n + 1] / xs)
    out = np.prod(factors, axis=-1)
    return complex(out) if out.ndim == 0 else out


def theta_multi(xs: Sequence[complex], nome: Nome) -> complex:
    """theta(x_1, ..., x_n) := theta(x_1) ... theta(x_n); 1 for an empty list."""
    if len(xs) == 0:
        return 1.0 + 0j
    return complex(np.prod(theta(np.asarray(xs, dtype=complex), nome)))


def near_zero(x: complex, nome: Nome, delta: float | None = None) -> bool:
    """True when x is within relative distance delta of some p^k."""
    delta = nome.delta if delta is None else delta
    x = complex(x)
    if x == 0:
        return True
    p = nome.p
    if p == 0:
        return abs(x - 1) < delta
    k0 = round(math.log(abs(x)) / math.log(abs(p)))
    for k in (k0 - 1, k0, k0 + 1):
        if abs(x * p ** (-k) - 1) < delta:
            return True
    return False


def check_off_zeros(xs: Iterable[complex], nome: Nome, delta: float | None = None) -> None:
    for x in xs:
        if near_zero(x, nome, delta):
            raise DivisionByZeroTheta(f"theta argument {x!r} is within delta of the zero set")


def theta_den(xs: Sequence[complex], nome: Nome) -> complex:
    """theta_multi for use as a divisor: every argument is checked first."""
    check_off_zeros(xs, nome)
    return theta_multi(xs, nome)


def residual_inversion(x: complex, nome: Nome) -> Residual:
    """theta(x) + x theta(1/x) = 0."""
    if x == 0:
        raise ZeroArgument("x must be nonzero")
    t = theta(np.array([x, 1 / x]), nome)
    return Residual.of_terms([t[0], x * t[1]])


def residual_addition(x: complex, y: complex, u: complex, v: complex, nome: Nome) -> Residual:
    """theta(xy, x/y, uv, u/v) - theta(xv, x/v, uy, u/y) = (u/y) theta(yv, y/v, xu, x/u)."""
    if 0 in (x, y, u, v):
        raise ZeroArgument("all arguments must be nonzero")
    args = np.array(
        [x * y, x / y, u * v, u / v, x * v, x / v, u * y, u / y, y * v, y / v, x * u, x / u]
    )
    t = theta(args, nome)
    first = t[0] * t[1] * t[2] * t[3]
    second = t[4] * t[5] * t[6] * t[7]
    third = (u / y) * t[8] * t[9] * t[10] * t[11]
    return Residual.between([first, -second], [third])


def residual_quasiperiod(x: complex, nome: Nome) -> Residual:
    """x theta(px) + theta(x) = 0."""
    if x == 0:
        raise ZeroArgument("x must be nonzero")
    if nome.p == 0:
        raise ValueError("quasi-periodicity needs p != 0")
    t = theta(np.array([nome.p * x, x]), nome)
    return Residual.of_terms([x * t[0], t[1]])
