"""Elliptic inverse pair on finite index windows, and the two
elliptic partial-fraction identities behind it."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import BadArity, ConstraintViolated, IndexOutOfSequenceWindow
from .residual import Residual, worst
from .theta import Nome, check_off_zeros, theta, theta_den


def _pair(x: complex, y: complex, nome: Nome) -> complex:
    """theta(x y) theta(x / y)."""
    t = theta(np.array([x * y, x / y]), nome)
    return complex(t[0] * t[1])


def _pair_den(x: complex, y: complex, nome: Nome) -> complex:
    return theta_den([x * y, x / y], nome)


@dataclass(frozen=True)
class SequencePair:
    """Finite windows of the sequences (a_j) and (c_j), j_min <= j <= j_max."""

    a: Mapping[int, complex]
    c: Mapping[int, complex]
    nome: Nome

    def __post_init__(self):
        if set(self.a) != set(self.c) or not self.a:
            raise BadArity("a and c must be given on the same nonempty index window")
        idx = sorted(self.a)
        if idx != list(range(idx[0], idx[-1] + 1)):
            raise BadArity("index window must be contiguous")
        if any(v == 0 for v in (*self.a.values(), *self.c.values())):
            raise ValueError("sequence entries must be nonzero")
        for j in idx:
            for k in idx:
                if j != k:
                    check_off_zeros([self.c[j] * self.c[k], self.c[j] / self.c[k]], self.nome)

    @classmethod
    def from_lists(cls, a: Sequence[complex], c: Sequence[complex], nome: Nome,
                   start: int = 0) -> SequencePair:
        if len(a) != len(c):
            raise BadArity("a and c must have equal length")
        return cls({start + i: complex(v) for i, v in enumerate(a)},
                   {start + i: complex(v) for i, v in enumerate(c)}, nome)

    @property
    def j_min(self) -> int:
        return min(self.a)

    @property
    def j_max(self) -> int:
        return max(self.a)

    def require(self, *indices: int) -> None:
        for j in indices:
            if j not in self.a:
                raise IndexOutOfSequenceWindow(f"index {j} outside [{self.j_min}, {self.j_max}]")


@dataclass(frozen=True)
class MatrixWindow:
    """Lower-triangular block (row, col) with lo <= col <= row <= hi."""

    lo: int
    hi: int
    entries: np.ndarray

    def __getitem__(self, rc: tuple[int, int]) -> complex:
        r, c = rc
        return complex(self.entries[r - self.lo, c - self.lo])


def f_entry(seq: SequencePair, n: int, k: int) -> complex:
    if n < k:
        return 0j
    seq.require(n, k)
    nome, ck = seq.nome, seq.c[k]
    num = 1.0 + 0j
    for j in range(k, n):
        num *= _pair(seq.a[j], ck, nome)
    den = 1.0 + 0j
    for j in range(k + 1, n + 1):
        den *= _pair_den(seq.c[j], ck, nome)
    return num / den


def g_entry(seq: SequencePair, k: int, l: int) -> complex:
    if k < l:
        return 0j
    if k == l:
        seq.require(k)
        return 1.0 + 0j
    seq.require(k, l)
    nome, a, c = seq.nome, seq.a, seq.c
    ck = c[k]
    pre = c[l] * _pair(a[l], c[l], nome) / (ck * _pair_den(a[k], ck, nome))
    num = 1.0 + 0j
    for j in range(l + 1, k + 1):
        num *= _pair(a[j], ck, nome)
    den = 1.0 + 0j
    for j in range(l, k):
        den *= _pair_den(c[j], ck, nome)
    return pre * num / den


def _tables(seq: SequencePair, lo: int, hi: int):
    """theta(a_j c_k, a_j/c_k) and theta(c_j c_k, c_j/c_k) for j, k in [lo, hi]."""
    seq.require(lo, hi)
    idx = range(lo, hi + 1)
    a = np.array([seq.a[j] for j in idx])
    c = np.array([seq.c[j] for j in idx])
    ta = theta(a[:, None] * c[None, :], seq.nome) * theta(a[:, None] / c[None, :], seq.nome)
    offdiag = ~np.eye(len(c), dtype=bool)
    cc_args = np.concatenate([(c[:, None] * c[None, :])[offdiag], (c[:, None] / c[None, :])[offdiag]])
    check_off_zeros(cc_args, seq.nome)
    tc = np.ones((len(c), len(c)), dtype=complex)
    tc[offdiag] = (theta(c[:, None] * c[None, :], seq.nome)[offdiag]
                   * theta(c[:, None] / c[None, :], seq.nome)[offdiag])
    return a, c, ta, tc


def f_window(seq: SequencePair, lo: int, hi: int) -> MatrixWindow:
    _, _, ta, tc = _tables(seq, lo, hi)
    size = hi - lo + 1
    F = np.zeros((size, size), dtype=complex)
    for k in range(size):
        F[k, k] = 1.0
        for n in range(k + 1, size):
            F[n, k] = F[n - 1, k] * ta[n - 1, k] / tc[n, k]
    return MatrixWindow(lo, hi, F)


def g_window(seq: SequencePair, lo: int, hi: int) -> MatrixWindow:
    a, c, ta, tc = _tables(seq, lo, hi)
    check_off_zeros(np.concatenate([a * c, a / c]), seq.nome)
    size = hi - lo + 1
    G = np.zeros((size, size), dtype=complex)
    for k in range(size):
        G[k, k] = 1.0
        for l in range(k):
            num = np.prod(ta[l + 1 : k + 1, k])
            den = np.prod(tc[l:k, k])
            G[k, l] = c[l] * ta[l, l] / (c[k] * ta[k, k]) * num / den
    return MatrixWindow(lo, hi, G)


def orthogonality_residual(seq: SequencePair, l0: int, n0: int, which: str = "wmi") -> Residual:
    """Worst deviation of F G (``wmi``) or G F (``pmi``) from the identity on [l0, n0]."""
    if which not in ("wmi", "pmi"):
        raise ValueError("which must be 'wmi' or 'pmi'")
    F = f_window(seq, l0, n0).entries
    G = g_window(seq, l0, n0).entries
    left, right = (F, G) if which == "wmi" else (G, F)
    size = n0 - l0 + 1
    out = []
    for n in range(size):
        for l in range(n + 1):
            terms = [left[n, k] * right[k, l] for k in range(l, n + 1)]
            out.append(Residual.of_terms(terms, target=1.0 if n == l else 0.0))
    return worst(out)


def gustafson_terms(a: Sequence[complex], b: Sequence[complex], nome: Nome) -> list[complex]:
    n = len(a)
    if n < 2 or len(b) != n - 2:
        raise BadArity(f"need n >= 2 a-parameters and n-2 b-parameters, got {n} and {len(b)}")
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    terms = []
    for k in range(n):
        others = np.delete(a, k)
        den_args = np.concatenate([a[k] * others, a[k] / others])
        den = theta_den(den_args, nome)
        num = np.prod(theta(np.concatenate([a[k] * b, a[k] / b]), nome)) if len(b) else 1.0
        terms.append(complex(a[k] * num / den))
    return terms


def gustafson_residual(a: Sequence[complex], b: Sequence[complex], nome: Nome) -> Residual:
    """sum_k a_k prod_j theta(a_k b_j, a_k/b_j) / prod_{j != k} theta(a_k a_j, a_k/a_j) = 0."""
    return Residual.of_terms(gustafson_terms(a, b, nome))


def mipf_terms(seq: SequencePair, l: int, n: int) -> list[complex]:
    if n <= l:
        raise ValueError("need n > l")
    seq.require(l, n)
    nome = seq.nome
    terms = []
    for k in range(l, n + 1):
        ck = seq.c[k]
        num = 1.0 + 0j
        for j in range(l + 1, n):
            num *= _pair(seq.a[j], ck, nome)
        den = 1.0 + 0j
        for j in range(l, n + 1):
            if j != k:
                den *= _pair_den(seq.c[j], ck, nome)
        terms.append(num / (ck * den))
    return terms


def mipf_residual(seq: SequencePair, l: int, n: int) -> Residual:
    return Residual.of_terms(mipf_terms(seq, l, n))


def mipf_as_gustafson(seq: SequencePair, l: int, n: int):
    """Relabel the reduced orthogonality sum as a Gustafson sum.

    Returns (a_list, b_list, factor) with
    mipf term k == factor * gustafson term k for every k.
    """
    a_list = [seq.c[j] for j in range(l, n + 1)]
    b_list = [seq.a[j] for j in range(l + 1, n)]
    factor = -np.prod(b_list) / np.prod(a_list) if b_list else -1.0 / np.prod(a_list)
    return a_list, b_list, complex(factor)


def tannery_molk_terms(a: Sequence[complex], b: Sequence[complex], nome: Nome,
                       rtol: float = 1e-12) -> list[complex]:
    n = len(a)
    if n < 1 or len(b) != n:
        raise BadArity("a and b must be nonempty lists of equal length")
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    pa, pb = np.prod(a), np.prod(b)
    if abs(pa - pb) > rtol * max(abs(pa), abs(pb)):
        raise ConstraintViolated("prod(a) != prod(b)")
    terms = []
    for k in range(n):
        others = np.delete(a, k)
        den = theta_den(a[k] / others, nome) if len(others) else 1.0
        num = np.prod(theta(a[k] / b, nome))
        terms.append(complex(num / den))
    return terms


def tannery_molk_residual(a: Sequence[complex], b: Sequence[complex], nome: Nome) -> Residual:
    """sum_k prod_j theta(a_k/b_j) / prod_{j != k} theta(a_k/a_j) = 0 when prod a = prod b."""
    return Residual.of_terms(tannery_molk_terms(a, b, nome))


def balance_last(a: Sequence[complex], b_head: Sequence[complex]) -> list[complex]:
    """Complete b_1..b_{n-1} with b_n = prod(a) / prod(b_head)."""
    return [*b_head, complex(np.prod(a) / np.prod(b_head))] if len(b_head) else [complex(np.prod(a))]
