"""Operator method for the elliptic inverse pair, on finite
windows of formal Laurent series.

A formal Laurent series is bounded below, so a window stores the exact
coefficients from ``lo`` upward; everything below ``lo`` is zero. The top of
the window is a truncation: coefficients above ``hi - margin`` are not
trusted, and every shift by ``z`` widens the margin by one.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import DegenerateSpectrum, IndexOutOfSequenceWindow, InsufficientWindow
from .inversion import SequencePair, f_entry, f_window, g_entry
from .residual import Residual, worst
from .theta import Nome, check_off_zeros, residual_addition, theta

SPECTRUM_SEPARATION = 1e-8


@dataclass(frozen=True)
class LaurentWindow:
    lo: int
    coeffs: np.ndarray
    margin: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=complex))
        if self.margin < 0:
            raise ValueError("margin must be nonnegative")

    @classmethod
    def from_dict(cls, coeffs: dict[int, complex], margin: int = 0) -> LaurentWindow:
        lo, hi = min(coeffs), max(coeffs)
        return cls(lo, np.array([coeffs.get(i, 0j) for i in range(lo, hi + 1)]), margin)

    @classmethod
    def monomial(cls, k: int, coeff: complex = 1.0) -> LaurentWindow:
        return cls(k, np.array([coeff]))

    @property
    def hi(self) -> int:
        return self.lo + len(self.coeffs) - 1

    @property
    def trusted_hi(self) -> int:
        return self.hi - self.margin

    def trusted(self, i: int) -> bool:
        return i <= self.trusted_hi

    def __getitem__(self, i: int) -> complex:
        if i < self.lo:
            return 0j
        if i > self.trusted_hi:
            raise InsufficientWindow(f"coefficient {i} is above the trusted range (<= {self.trusted_hi})")
        return complex(self.coeffs[i - self.lo])

    def trimmed(self) -> LaurentWindow:
        """Drop the untrusted top coefficients."""
        keep = self.trusted_hi - self.lo + 1
        return LaurentWindow(self.lo, self.coeffs[: max(keep, 0)], 0)

    def scaled(self, factor: complex) -> LaurentWindow:
        return LaurentWindow(self.lo, factor * self.coeffs, self.margin)

    def as_dict(self) -> dict[int, complex]:
        return {self.lo + i: complex(v) for i, v in enumerate(self.coeffs) if self.lo + i <= self.trusted_hi}


def pair(a: LaurentWindow, b: LaurentWindow) -> complex:
    """<a, b> = [z^0] a(z) b(z)."""
    # contributing m satisfy lo_a <= m <= -lo_b; both ends must be trusted
    if -b.lo > a.trusted_hi or -a.lo > b.trusted_hi:
        raise InsufficientWindow("z^0 coefficient of the product touches untrusted coefficients")
    return complex(sum(a[m] * b[-m] for m in range(a.lo, -b.lo + 1)))


def apply_shift(w: LaurentWindow) -> LaurentWindow:
    """Multiplication by z (self-adjoint for the pairing)."""
    return LaurentWindow(w.lo + 1, w.coeffs.copy(), w.margin + 1)


@dataclass(frozen=True)
class DiagonalSpec:
    """Diagonal operator z^k -> weight(s_k) z^k, s = a ('A') or c ('C')."""

    symbol: str
    weight: Callable[[complex], complex]

    def __post_init__(self):
        if self.symbol not in ("A", "C"):
            raise ValueError("symbol must be 'A' or 'C'")


def theta_weight(w: complex, nome: Nome) -> Callable[[complex], complex]:
    """x -> theta(x w) theta(x / w)."""
    def weight(x: complex) -> complex:
        t = theta(np.array([x * w, x / w]), nome)
        return complex(t[0] * t[1])
    return weight


@dataclass(frozen=True)
class OperatorContext:
    seq: SequencePair
    u: complex
    v: complex

    @property
    def nome(self) -> Nome:
        return self.seq.nome

    def __post_init__(self):
        u, v = self.u, self.v
        args = [u * v, u / v]
        for ck in self.seq.c.values():
            args += [u * ck, u / ck, ck * v, ck / v]
        check_off_zeros(args, self.nome)

    def w(self, k: int) -> complex:
        """Eigenvalue u theta(v c_k, c_k/v) / (c_k theta(u c_k, u/c_k))."""
        ck = self.seq.c[k]
        t = theta(np.array([self.v * ck, ck / self.v, self.u * ck, self.u / ck]), self.nome)
        return complex(self.u * t[0] * t[1] / (ck * t[2] * t[3]))

    def check_spectrum(self) -> None:
        ws = [self.w(k) for k in range(self.seq.j_min, self.seq.j_max + 1)]
        for i, wi in enumerate(ws):
            if abs(wi) <= SPECTRUM_SEPARATION:
                raise DegenerateSpectrum("w_k must be nonzero")
            for wj in ws[i + 1 :]:
                if abs(wi - wj) <= SPECTRUM_SEPARATION * max(abs(wi), abs(wj)):
                    raise DegenerateSpectrum("w_k must be pairwise distinct")

    def diag(self, symbol: str, w: complex) -> DiagonalSpec:
        return DiagonalSpec(symbol, theta_weight(w, self.nome))


def apply_diagonal(spec: DiagonalSpec, ctx: OperatorContext, w: LaurentWindow,
                   adjoint: bool = False) -> LaurentWindow:
    """Scale the coefficient of z^k (adjoint: of z^{-k}) by weight(s_k)."""
    seq = ctx.seq
    src = seq.a if spec.symbol == "A" else seq.c
    out = w.coeffs.copy()
    for i in range(len(out)):
        idx = w.lo + i
        k = -idx if adjoint else idx
        if k not in src:
            raise IndexOutOfSequenceWindow(f"no sequence entry for index {k}")
        out[i] *= spec.weight(src[k])
    return LaurentWindow(w.lo, out, w.margin)


def add(*parts: tuple[complex, LaurentWindow]) -> LaurentWindow:
    """Linear combination; trusted only up to the lowest trusted top."""
    lo = min(p.lo for _, p in parts)
    hi = max(p.hi for _, p in parts)
    trusted_hi = min(p.trusted_hi for _, p in parts)
    out = np.zeros(hi - lo + 1, dtype=complex)
    for coef, p in parts:
        out[p.lo - lo : p.hi - lo + 1] += coef * p.coeffs
    return LaurentWindow(lo, out, hi - trusted_hi)


def _coefficient_residuals(parts: Iterable[tuple[complex, LaurentWindow]],
                           indices: Iterable[int]) -> list[Residual]:
    parts = list(parts)
    out = []
    for i in indices:
        out.append(Residual.of_terms([coef * p[i] for coef, p in parts]))
    return out


def f_column(ctx: OperatorContext, k: int, n_max: int | None = None) -> LaurentWindow:
    """f_k(z) = sum_{n >= k} f_{nk} z^n, truncated at n_max."""
    seq = ctx.seq
    n_max = seq.j_max if n_max is None else n_max
    seq.require(k, n_max)
    return LaurentWindow(k, np.array([f_entry(seq, n, k) for n in range(k, n_max + 1)]))


def column_recurrence_residual(ctx: OperatorContext, k: int, n_range: Iterable[int]) -> Residual:
    """theta(c_n c_k, c_n/c_k) f_{nk} = theta(a_{n-1} c_k, a_{n-1}/c_k) f_{n-1,k}."""
    seq, nome = ctx.seq, ctx.nome
    ck = seq.c[k]
    res = []
    for n in n_range:
        if n < k:
            raise ValueError("need n >= k")
        lhs = theta_weight(ck, nome)(seq.c[n]) * f_entry(seq, n, k)
        rhs = theta_weight(ck, nome)(seq.a[n - 1]) * f_entry(seq, n - 1, k) if n > k else 0j
        res.append(Residual.between([lhs], [rhs]))
    return worst(res)


def _functional_eq_parts(ctx: OperatorContext, f: LaurentWindow, wk: complex):
    """Summands of U f - w_k V f, as (coefficient, window) pairs.

    U = theta(C v, C/v) - z theta(A v, A/v),  V = z theta(A u, A/u) - theta(C u, C/u).
    """
    Cv, Av = ctx.diag("C", ctx.v), ctx.diag("A", ctx.v)
    Cu, Au = ctx.diag("C", ctx.u), ctx.diag("A", ctx.u)
    return [
        (1.0, apply_diagonal(Cv, ctx, f)),
        (-1.0, apply_shift(apply_diagonal(Av, ctx, f))),
        (-wk, apply_shift(apply_diagonal(Au, ctx, f))),
        (wk, apply_diagonal(Cu, ctx, f)),
    ]


def functional_eq_residual(ctx: OperatorContext, k: int) -> Residual:
    """Worst trusted coefficient of U f_k - w_k V f_k."""
    f = f_column(ctx, k)
    parts = _functional_eq_parts(ctx, f, ctx.w(k))
    top = min(p.trusted_hi for _, p in parts)
    if top < k:
        raise InsufficientWindow("window too short for any trusted coefficient")
    return worst(_coefficient_residuals(parts, range(k, top + 1)))


def functional_eq_addition_residual(ctx: OperatorContext, k: int) -> Residual:
    """Addition-formula step that turns the multiplied recurrence into U f = w V f.

    For each n the two theta expansions (with c_n and with a_{n-1}) are checked
    through ``residual_addition``.
    """
    seq, nome = ctx.seq, ctx.nome
    ck = seq.c[k]
    res = []
    for n in range(k, seq.j_max + 1):
        res.append(residual_addition(seq.c[n], ck, ctx.u, ctx.v, nome))
        if n > k:
            res.append(residual_addition(seq.a[n - 1], ck, ctx.u, ctx.v, nome))
    return worst(res)


def h_closed_form(ctx: OperatorContext, k: int, l: int) -> complex:
    """h_{kl} = prod_{j=l}^{k-1} theta(a_j c_k, a_j/c_k) / theta(c_j c_k, c_j/c_k)."""
    if l > k:
        return 0j
    seq, nome = ctx.seq, ctx.nome
    seq.require(k, l)
    ck = seq.c[k]
    out = 1.0 + 0j
    for j in range(l, k):
        args = [seq.c[j] * ck, seq.c[j] / ck]
        check_off_zeros(args, nome)
        t = theta(np.array([seq.a[j] * ck, seq.a[j] / ck, *args]), nome)
        out *= t[0] * t[1] / (t[2] * t[3])
    return complex(out)


def h_series(ctx: OperatorContext, k: int, l_min: int | None = None) -> LaurentWindow:
    """h_k(z) = sum_{l <= k} h_{kl} z^{-l}, truncated at l_min."""
    l_min = ctx.seq.j_min if l_min is None else l_min
    return LaurentWindow(-k, np.array([h_closed_form(ctx, k, -i) for i in range(-k, -l_min + 1)]))


def _shift_trim(w: LaurentWindow) -> LaurentWindow:
    return apply_shift(w).trimmed()


def _dual_eq_parts(ctx: OperatorContext, h: LaurentWindow, wk: complex):
    """Summands of U* h - w_k V* h with the adjoint diagonals acting after z."""
    Cv, Av = ctx.diag("C", ctx.v), ctx.diag("A", ctx.v)
    Cu, Au = ctx.diag("C", ctx.u), ctx.diag("A", ctx.u)
    zh = _shift_trim(h)
    return [
        (1.0, apply_diagonal(Cv, ctx, h, adjoint=True)),
        (-1.0, apply_diagonal(Av, ctx, zh, adjoint=True)),
        (-wk, apply_diagonal(Au, ctx, zh, adjoint=True)),
        (wk, apply_diagonal(Cu, ctx, h, adjoint=True)),
    ]


def dual_eq_residual(ctx: OperatorContext, k: int) -> Residual:
    """Worst trusted coefficient of U* h_k - w_k V* h_k."""
    h = h_series(ctx, k)
    parts = _dual_eq_parts(ctx, h, ctx.w(k))
    top = min(p.trusted_hi for _, p in parts)
    return worst(_coefficient_residuals(parts, range(-k, top + 1)))


def dual_recurrence_residual(ctx: OperatorContext, k: int) -> Residual:
    """Coefficient recurrence for h obtained from the dual equation after the
    addition formula and division by theta(uv, u/v)."""
    seq, nome = ctx.seq, ctx.nome
    ck, u, v, wk = seq.c[k], ctx.u, ctx.v, ctx.w(k)
    wt = theta_weight(ck, nome)
    wu, wv = theta_weight(u, nome), theta_weight(v, nome)
    uv = complex(np.prod(theta(np.array([u * v, u / v]), nome)))
    uck = wt(u)
    res = []
    for l in range(seq.j_min, k + 1):
        if l < k:
            # at l = k the left side is theta(c_k/c_k) h_kk, a rounding-level zero
            lhs = wt(seq.c[l]) * h_closed_form(ctx, k, l)
            rhs = wt(seq.a[l]) * h_closed_form(ctx, k, l + 1)
            res.append(Residual.between([lhs], [rhs]))
        # operator coefficients of h_{kl} and h_{k,l+1} against the recurrence ones
        for s in (seq.c[l], seq.a[l]):
            res.append(Residual.between([wv(s) * uck, wk * wu(s) * uck], [uv * wt(s)]))
    return worst(res)


def _v_adjoint_parts(ctx: OperatorContext, k: int):
    h = h_series(ctx, k)
    Cu, Au = ctx.diag("C", ctx.u), ctx.diag("A", ctx.u)
    return [
        (1.0, apply_diagonal(Au, ctx, _shift_trim(h), adjoint=True)),
        (-1.0, apply_diagonal(Cu, ctx, h, adjoint=True)),
    ]


def v_adjoint_h(ctx: OperatorContext, k: int) -> LaurentWindow:
    """V* h_k = [theta(A* u, A*/u) z - theta(C* u, C*/u)] h_k."""
    return add(*_v_adjoint_parts(ctx, k))


def v_adjoint_h_closed(ctx: OperatorContext, k: int, l: int) -> complex:
    """Coefficient of z^{-l} in V* h_k after the addition formula:

        theta(c_k u, c_k/u) a_l theta(a_l c_l, c_l/a_l) / (c_k theta(a_l c_k, a_l/c_k)) h_{kl}.
    """
    seq, nome = ctx.seq, ctx.nome
    ck, al, cl, u = seq.c[k], seq.a[l], seq.c[l], ctx.u
    check_off_zeros([al * ck, al / ck], nome)
    t = theta(np.array([ck * u, ck / u, al * cl, cl / al, al * ck, al / ck]), nome)
    return complex(t[0] * t[1] * al * t[2] * t[3] / (ck * t[4] * t[5]) * h_closed_form(ctx, k, l))


def v_adjoint_h_residual(ctx: OperatorContext, k: int) -> Residual:
    """Both displayed forms of the z^{-l} coefficient of V* h_k agree."""
    parts = _v_adjoint_parts(ctx, k)
    res = []
    for l in range(ctx.seq.j_min, k + 1):
        res.append(Residual.between([c * p[-l] for c, p in parts], [v_adjoint_h_closed(ctx, k, l)]))
    return worst(res)


def reconstruct_g(ctx: OperatorContext, k: int, l_range: Iterable[int] | None = None) -> dict[int, complex]:
    """g_{kl} read off from g_k(z) = V* h_k(z) / <f_k, V* h_k>.

    Since f_kk = 1 the pairing is the z^{-k} coefficient of V* h_k, which
    equals -theta(c_k u, c_k/u).
    """
    ctx.check_spectrum()
    vh = v_adjoint_h(ctx, k)
    f = f_column(ctx, k, k)
    norm = pair(f, vh)
    check_off_zeros([ctx.seq.c[k] * ctx.u, ctx.seq.c[k] / ctx.u], ctx.nome)
    l_range = range(ctx.seq.j_min, k + 1) if l_range is None else l_range
    out = {}
    for l in l_range:
        if l > k:
            out[l] = 0j
            continue
        if not vh.trusted(-l) or l < ctx.seq.j_min:
            raise InsufficientWindow(f"z^{-l} coefficient of V* h_k is not available")
        out[l] = vh[-l] / norm
    return out


def _g_pieces(ctx: OperatorContext, k: int, l: int) -> list[complex]:
    """The two operator summands of the z^{-l} coefficient of g_k(z)."""
    parts = _v_adjoint_parts(ctx, k)
    norm = pair(f_column(ctx, k, k), add(*parts))
    return [c * p[-l] / norm for c, p in parts]


def reconstruct_g_residual(ctx: OperatorContext, k: int) -> Residual:
    """Operator reconstruction of column k of g against ``g_entry``.

    The coefficient is a difference of two operator summands, so the scale
    is their magnitude sum rather than |g_kl| alone.
    """
    ctx.check_spectrum()
    res = []
    for l in range(ctx.seq.j_min, k + 1):
        res.append(Residual.between(_g_pieces(ctx, k, l), [g_entry(ctx.seq, k, l)]))
    return worst(res)


def reconstruct_g_uv_residual(ctx1: OperatorContext, ctx2: OperatorContext, k: int) -> Residual:
    """Reconstructions from two auxiliary (u, v) choices agree."""
    if ctx1.seq is not ctx2.seq and ctx1.seq != ctx2.seq:
        raise ValueError("contexts must share the sequence pair")
    res = []
    for l in range(ctx1.seq.j_min, k + 1):
        res.append(Residual.between(_g_pieces(ctx1, k, l), _g_pieces(ctx2, k, l)))
    return worst(res)


def reconstruct_orthogonality_residual(ctx: OperatorContext) -> Residual:
    """sum_k f_nk g_kl = delta_nl with every g column taken from the operator
    reconstruction; each g_kl enters as its two operator summands."""
    ctx.check_spectrum()
    seq = ctx.seq
    lo, hi = seq.j_min, seq.j_max
    F = f_window(seq, lo, hi)
    pieces = {(k, l): _g_pieces(ctx, k, l) for k in range(lo, hi + 1) for l in range(lo, k + 1)}
    res = []
    for n in range(lo, hi + 1):
        for l in range(lo, n + 1):
            terms = [F[n, k] * piece for k in range(l, n + 1) for piece in pieces[k, l]]
            res.append(Residual.of_terms(terms, target=1.0 if n == l else 0.0))
    return worst(res)
