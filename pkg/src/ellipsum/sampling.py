"""Deterministic sampling of admissible identity instances.

Each (seed, identity, trial) triple keys its own Philox stream, so trials can
be drawn in any order or in parallel and still reproduce bit for bit.
"""
from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import inversion as inv
from . import km
from . import operator_method as om
from . import pochhammer as pc
from . import theta as th
from .errors import BadShape, DegenerateSpectrum, DivisionByZeroTheta, NotApplicable, Unsampleable
from .residual import Residual, worst


@dataclass(frozen=True)
class ShapeBounds:
    """Upper limits used when a shape is drawn rather than given."""

    s: int = 3
    r: int = 3
    l: int = 3
    m: int = 4
    y: int = 3
    N: int = 5
    L: int = 3
    window: int = 8
    n: int = 6


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 0
    trials: int = 10
    p_values: tuple[complex, ...] = (0.0, 0.1, 0.4)
    annulus: tuple[float, float] = (0.3, 2.0)
    delta: float = th.DEFAULT_DELTA
    retry_cap: int = 200
    shapes: dict[str, tuple[dict, ...]] = field(default_factory=dict)
    bounds: ShapeBounds = ShapeBounds()

    def __post_init__(self):
        object.__setattr__(self, "p_values", tuple(complex(p) for p in self.p_values))
        object.__setattr__(self, "annulus", tuple(float(x) for x in self.annulus))
        object.__setattr__(self, "shapes", {k: tuple(v) for k, v in self.shapes.items()})
        r_min, r_max = self.annulus
        if not 0 < r_min < r_max:
            raise ValueError("annulus needs 0 < r_min < r_max")
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if self.trials < 1 or self.retry_cap < 1:
            raise ValueError("trials and retry_cap must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not self.p_values:
            raise ValueError("p_values must not be empty")
        for p in self.p_values:
            th.Nome(p)  # guard check


@dataclass
class Instance:
    identity: str
    trial: int
    shape: dict
    p: complex
    params: dict
    residual: Residual


def rng_for(seed: int, identity: str, trial: int) -> np.random.Generator:
    ss = np.random.SeedSequence([seed, zlib.crc32(identity.encode()), trial])
    return np.random.Generator(np.random.Philox(ss))


class _Draw:
    """Parameter source that logs every value it hands out."""

    def __init__(self, rng: np.random.Generator, annulus: tuple[float, float]):
        self.rng = rng
        self.annulus = annulus
        self.log: dict[str, Any] = {}

    def z(self, name: str | None = None, annulus: tuple[float, float] | None = None) -> complex:
        r = self.rng.uniform(*(annulus or self.annulus))
        val = complex(r * np.exp(2j * math.pi * self.rng.uniform()))
        if name:
            self.log[name] = val
        return val

    def zs(self, name: str, n: int) -> list[complex]:
        vals = [self.z() for _ in range(n)]
        self.log[name] = vals
        return vals

    def base(self, Y: int, nome: th.Nome) -> pc.RefinedBase:
        """q from the annulus; q_star a random Y-th root of it."""
        r = self.rng.uniform(*self.annulus)
        q_star = complex(r ** (1 / Y) * np.exp(2j * math.pi * self.rng.uniform()))
        self.log["q_star"] = q_star
        self.log["Y"] = Y
        return pc.RefinedBase(q_star, Y, nome)

    def integer(self, lo: int, hi: int) -> int:
        return int(self.rng.integers(lo, hi + 1))


def _compose(rng: np.random.Generator, total: int, parts: int, cap: int) -> list[int] | None:
    """Random composition of ``total`` into ``parts`` entries in [0, cap]."""
    if total < 0 or total > parts * cap or (parts == 0 and total):
        return None
    out = [0] * parts
    for _ in range(total):
        open_slots = [j for j in range(parts) if out[j] < cap]
        out[int(rng.choice(open_slots))] += 1
    return out


def _lcm(ys) -> int:
    return math.lcm(*ys) if ys else 1


# --------------------------------------------------------------- shape logic
# each entry: draw(rng, bounds) -> shape, check(shape) -> None (BadShape),
# build(draw, shape, nome) -> Residual

def _need(shape: dict, *keys: str) -> None:
    missing = [k for k in keys if k not in shape]
    if missing:
        raise BadShape(f"shape lacks {missing}")


def _nonneg(*vals) -> None:
    if any(v < 0 for v in vals):
        raise BadShape("shape entries must be nonnegative")


def _check_y(y) -> None:
    if any(v < 1 for v in y):
        raise BadShape("y_j must be positive")


def _no_shape(rng, b):
    return {}


def _no_check(shape):
    return None


# theta -------------------------------------------------------------------

def _b_inversion(d: _Draw, shape, nome):
    return th.residual_inversion(d.z("x"), nome)


def _b_quasiperiod(d: _Draw, shape, nome):
    if nome.p == 0:
        raise NotApplicable("quasi-periodicity needs p != 0")
    return th.residual_quasiperiod(d.z("x"), nome)


def _b_addition(d: _Draw, shape, nome):
    return th.residual_addition(d.z("x"), d.z("y"), d.z("u"), d.z("v"), nome)


# pochhammer --------------------------------------------------------------

def _s_epdi(rng, b):
    n = int(rng.integers(0, b.n + 1))
    return {"n": n, "k": int(rng.integers(0, n + 1))}


def _c_epdi(shape):
    _need(shape, "n", "k")
    if not 0 <= shape["k"] <= shape["n"]:
        raise BadShape("need 0 <= k <= n")


def _b_epdi(d: _Draw, shape, nome):
    base = d.base(1, nome)
    return pc.residual_epdi(d.z("a"), d.z("b"), shape["n"], shape["k"], base)


def _s_epi(rng, b):
    return {"n": int(rng.integers(0, b.n + 1))}


def _c_epi(shape):
    _need(shape, "n")
    _nonneg(shape["n"])


def _b_epi(d: _Draw, shape, nome):
    return pc.residual_epi(d.z("a"), d.z("b"), shape["n"], d.base(1, nome))


def _s_xsk(rng, b):
    return {"s": int(rng.integers(1, b.s + 1)), "k": int(rng.integers(0, b.m + 1))}


def _c_xsk(shape):
    _need(shape, "s", "k")
    if shape["s"] < 1 or shape["k"] < 0:
        raise BadShape("need s >= 1 and k >= 0")


def _b_xsk(d: _Draw, shape, nome):
    return pc.residual_xsk(d.z("x"), shape["s"], shape["k"], d.base(1, nome))


# inverse pair ------------------------------------------------------------

def _s_window(rng, b):
    return {"start": int(rng.integers(-3, 4)), "size": int(rng.integers(2, b.window + 1))}


def _c_window(shape):
    _need(shape, "start", "size")
    if shape["size"] < 2:
        raise BadShape("window needs at least two indices")


def _seq(d: _Draw, shape, nome) -> inv.SequencePair:
    size = shape["size"]
    return inv.SequencePair.from_lists(d.zs("a", size), d.zs("c", size), nome, start=shape["start"])


def _orth(which):
    def build(d: _Draw, shape, nome):
        seq = _seq(d, shape, nome)
        return inv.orthogonality_residual(seq, seq.j_min, seq.j_max, which)
    return build


def _b_mipf(d: _Draw, shape, nome):
    seq = _seq(d, shape, nome)
    return inv.mipf_residual(seq, seq.j_min, seq.j_max)


def _b_mipf_dpf(d: _Draw, shape, nome):
    seq = _seq(d, shape, nome)
    terms = inv.mipf_terms(seq, seq.j_min, seq.j_max)
    a_list, b_list, factor = inv.mipf_as_gustafson(seq, seq.j_min, seq.j_max)
    other = [factor * t for t in inv.gustafson_terms(a_list, b_list, nome)]
    return worst([Residual.between([x], [y]) for x, y in zip(terms, other)])


def _s_dpf(rng, b):
    return {"n": int(rng.integers(2, b.n + 1))}


def _c_dpf(shape):
    _need(shape, "n")
    if shape["n"] < 2:
        raise BadShape("dpf needs n >= 2")


def _b_dpf(d: _Draw, shape, nome):
    n = shape["n"]
    return inv.gustafson_residual(d.zs("a", n), d.zs("b", n - 2), nome)


def _s_apf(rng, b):
    # n = 1 is the single vanishing term theta(1); never informative
    return {"n": int(rng.integers(2, b.n + 1))}


def _c_apf(shape):
    _need(shape, "n")
    if shape["n"] < 1:
        raise BadShape("apf needs n >= 1")


def _numerators_off_zeros(a, b, nome) -> None:
    """A theta(a_k/b_j) on the zero set makes the partial-fraction sum
    vanish term by term; such draws carry no information and are redrawn."""
    th.check_off_zeros([x / y for x in a for y in b], nome)


def _b_apf(d: _Draw, shape, nome):
    n = shape["n"]
    a = d.zs("a", n)
    b = inv.balance_last(a, d.zs("b_head", n - 1))
    d.log["b"] = b
    _numerators_off_zeros(a, b, nome)
    return inv.tannery_molk_residual(a, b, nome)


# operator method ---------------------------------------------------------

def _s_operator(rng, b):
    size = int(rng.integers(2, min(b.window, 6) + 1))
    start = int(rng.integers(-3, 4))
    return {"start": start, "size": size, "k": start + int(rng.integers(0, size))}


def _c_operator(shape):
    _c_window(shape)
    _need(shape, "k")
    if not shape["start"] <= shape["k"] < shape["start"] + shape["size"]:
        raise BadShape("k must lie in the window")


UV_ANNULUS = (0.5, 1.5)


def _context(d: _Draw, seq, tag=""):
    ctx = om.OperatorContext(seq, d.z("u" + tag, UV_ANNULUS), d.z("v" + tag, UV_ANNULUS))
    ctx.check_spectrum()
    return ctx


def _b_functional(d: _Draw, shape, nome):
    ctx = _context(d, _seq(d, shape, nome))
    return worst([om.functional_eq_residual(ctx, shape["k"]),
                  om.functional_eq_addition_residual(ctx, shape["k"])])


def _b_dual(d: _Draw, shape, nome):
    ctx = _context(d, _seq(d, shape, nome))
    return worst([om.dual_eq_residual(ctx, shape["k"]), om.dual_recurrence_residual(ctx, shape["k"]),
                  om.v_adjoint_h_residual(ctx, shape["k"])])


def _b_reconstruct(d: _Draw, shape, nome):
    seq = _seq(d, shape, nome)
    ctx1, ctx2 = _context(d, seq, "1"), _context(d, seq, "2")
    k = shape["k"]
    return worst([om.reconstruct_g_residual(ctx1, k), om.reconstruct_g_uv_residual(ctx1, ctx2, k)])


# Karlsson--Minton ---------------------------------------------------------

def _draw_until(rng, make, tries=1000):
    for _ in range(tries):
        shape = make()
        if shape is not None:
            return shape
    raise BadShape("no admissible shape within the bounds")


def _s_kmt_like(offset: int):
    def draw(rng, b):
        def make():
            s = int(rng.integers(1, b.s + 1))
            l = [int(rng.integers(0, b.l + 1)) for _ in range(s)]
            r = int(rng.integers(0, b.r + 1))
            if offset == 0 and sum(l) + s == 1:
                return None  # apc forces a_1 = b_1: the lone term is theta(1)
            m = _compose(rng, sum(l) + s - offset, r, b.m)
            if m is None:
                return None
            return {"l": l, "m": m, "y": [int(rng.integers(1, b.y + 1)) for _ in range(r)]}
        return _draw_until(rng, make)
    return draw


def _c_kmt_like(offset: int):
    def check(shape):
        _need(shape, "l", "m", "y")
        l, m, y = shape["l"], shape["m"], shape["y"]
        _nonneg(*l, *m)
        _check_y(y)
        if not l or len(m) != len(y):
            raise BadShape("need s >= 1 and len(m) == len(y)")
        if sum(l) + len(l) != sum(m) + offset:
            raise BadShape(f"need |l| + s = |m| + {offset}")
    return check


def _km_instance(d: _Draw, shape, nome) -> km.KmInstance:
    base = d.base(_lcm(shape["y"]), nome)
    return km.KmInstance(d.zs("a", len(shape["l"])), d.zs("b", len(shape["m"])),
                         shape["l"], shape["m"], shape["y"], base)


def _b_kmt(d: _Draw, shape, nome):
    return km.kmt_residual(_km_instance(d, shape, nome))


def _b_kmt_dpf(d: _Draw, shape, nome):
    return km.kmt_dpf_agreement(_km_instance(d, shape, nome))


def _b_kmt_unit_y(d: _Draw, shape, nome):
    inst = _km_instance(d, shape, nome)
    return worst([km.kmt_unit_y_agreement(inst), km.kmt_residual(km.unit_y_instance(inst))])


def _atr_instance(d: _Draw, shape, nome) -> km.KmInstance:
    l, m, y = shape["l"], shape["m"], shape["y"]
    base = d.base(_lcm(y), nome)
    a_head = d.zs("a_head", len(l) - 1)
    b = d.zs("b", len(m))
    params = {"a": [*a_head, None], "b": b, "l": l, "m": m, "y": y}
    roots = km.solve_balance("apc", params, base).roots
    a_last = roots[d.integer(0, len(roots) - 1)]
    d.log["a_last"] = a_last
    inst = km.KmInstance([*a_head, a_last], b, l, m, y, base)
    _numerators_off_zeros(*km.substituted_lists(inst), nome)
    return inst


def _b_atr(d: _Draw, shape, nome):
    return km.atr_residual(_atr_instance(d, shape, nome))


def _b_atr_apf(d: _Draw, shape, nome):
    return km.atr_apf_agreement(_atr_instance(d, shape, nome))


def _s_sum(L_fixed: int | None, extra: int, unit_y: bool = False, min_r: int = 0):
    """Shapes with |m| = N + L + extra."""
    def draw(rng, b):
        def make():
            N = int(rng.integers(0, b.N + 1))
            L = L_fixed if L_fixed is not None else int(rng.integers(0, b.L + 1))
            r = int(rng.integers(min_r, b.r + 1))
            m = _compose(rng, N + L + extra, r, b.m)
            if m is None:
                return None
            y = [1] * r if unit_y else [int(rng.integers(1, b.y + 1)) for _ in range(r)]
            return {"N": N, "L": L, "m": m, "y": y}
        return _draw_until(rng, make)
    return draw


def _c_sum(L_fixed: int | None, extra: int, unit_y: bool = False, name: str = ""):
    def check(shape):
        _need(shape, "N", "m")
        shape.setdefault("L", 0)
        shape.setdefault("y", [1] * len(shape["m"]))
        N, L, m, y = shape["N"], shape["L"], shape["m"], shape["y"]
        _nonneg(N, L, *m)
        _check_y(y)
        if len(m) != len(y):
            raise BadShape("len(m) must equal len(y)")
        if L_fixed is not None and L != L_fixed:
            raise BadShape(f"{name} needs L = {L_fixed}")
        if unit_y and any(v != 1 for v in y):
            raise BadShape(f"{name} needs y_j = 1")
        if sum(m) != N + L + extra:
            raise BadShape(f"{name} needs |m| = N + L + {extra}" if extra else f"{name} needs |m| = N + L")
    return check


def _two_term(d: _Draw, shape, nome, b_value=None) -> km.TwoTermInstance:
    base = d.base(_lcm(shape["y"]), nome)
    alpha = d.z("alpha")
    c = d.zs("c", len(shape["m"]))
    b = d.z("b") if b_value is None else b_value
    return km.TwoTermInstance(alpha, b, shape["N"], shape["L"], c, shape["m"], shape["y"], base)


def _b_kmsi(d: _Draw, shape, nome):
    return km.kmsi_residual(*km.kmsi_instance(_two_term(d, shape, nome)))


def _b_kmsi_mbkms(d: _Draw, shape, nome):
    return km.kmsi_mbkms_agreement(_two_term(d, shape, nome))


def _b_trc(d: _Draw, shape, nome):
    return km.trc_residual(_two_term(d, shape, nome))


def _b_mbkms(d: _Draw, shape, nome):
    return km.mbkms_residual(_two_term(d, shape, nome))


def _b_trc_mbkms(d: _Draw, shape, nome):
    return km.trc_mbkms_agreement(_two_term(d, shape, nome))


def _akmt_instance(d: _Draw, shape, nome) -> km.TwoTermInstance:
    inst = _two_term(d, shape, nome, b_value=1.0)
    roots = km.solve_balance("npc", km.npc_params(inst), inst.base).roots
    b = roots[d.integer(0, len(roots) - 1)]
    d.log["b"] = b
    return km.with_b(inst, b)


def _b_akmt(d: _Draw, shape, nome):
    inst = _akmt_instance(d, shape, nome)
    return worst([km.akmt_residual(inst), km.akmt_root_sweep(inst)])


def _b_akmt_akms(d: _Draw, shape, nome):
    return km.akmt_akms_agreement(_akmt_instance(d, shape, nome))


def _b_akms(d: _Draw, shape, nome):
    base = d.base(_lcm(shape["y"]), nome)
    c = d.zs("c", len(shape["m"]))
    return km.akms_residual(shape["N"], c, shape["m"], shape["y"], base)


def _s_wbb(rng, b):
    return {"s": int(rng.integers(1, b.s + 1)), "N": int(rng.integers(0, b.N + 1))}


def _c_wbb(shape):
    _need(shape, "s", "N")
    if shape["s"] < 1 or shape["N"] < 0:
        raise BadShape("wbb needs s >= 1 and N >= 0")


def _wbb_instance(d: _Draw, shape, nome) -> km.WbbInstance:
    base = d.base(1, nome)
    return km.WbbInstance(d.z("a"), d.z("b"), d.z("c"), shape["s"], shape["N"], base)


def _b_wbb(d: _Draw, shape, nome):
    return km.wbb_residual(_wbb_instance(d, shape, nome))


def _b_wbb_mbkms(d: _Draw, shape, nome):
    return km.wbb_mbkms_agreement(_wbb_instance(d, shape, nome))


def _s_step(rng, b):
    def make():
        N = int(rng.integers(0, b.N + 1))
        r = int(rng.integers(1, b.r + 1))
        m = _compose(rng, N + 1, r, b.m)
        if m is None or m[-1] < 1:
            return None
        return {"N": N, "m": m, "y": [1] * r}
    return _draw_until(rng, make)


def _c_step(shape):
    _c_sum(0, 1, unit_y=True, name="induction step")(shape)
    if not shape["m"] or shape["m"][-1] < 1:
        raise BadShape("need m_r >= 1")


def _s_split(rng, b):
    shape = _s_step(rng, b)
    shape["k"] = int(rng.integers(0, shape["N"] + 2))
    return shape


def _c_split(shape):
    _need(shape, "N", "m")
    shape.setdefault("k", 0)
    shape.setdefault("y", [1] * len(shape["m"]))
    shape.setdefault("L", 0)
    _nonneg(shape["N"], *shape["m"])
    if not shape["m"] or shape["m"][-1] < 1:
        raise BadShape("need m_r >= 1")


def _b_split(d: _Draw, shape, nome):
    return km.theta_split_residual(_two_term(d, shape, nome), shape["k"])


def _b_step(d: _Draw, shape, nome):
    return km.induction_step_residual(_two_term(d, shape, nome))


def _b_bracket(d: _Draw, shape, nome):
    return km.bracket_residual(_two_term(d, shape, nome))


@dataclass(frozen=True)
class IdentitySpec:
    draw_shape: Callable
    check_shape: Callable
    build: Callable


def _plain(build) -> IdentitySpec:
    return IdentitySpec(_no_shape, _no_check, build)


REGISTRY: dict[str, IdentitySpec] = {
    "inversion": _plain(_b_inversion),
    "quasiperiod": _plain(_b_quasiperiod),
    "addition": _plain(_b_addition),
    "epdi": IdentitySpec(_s_epdi, _c_epdi, _b_epdi),
    "epi": IdentitySpec(_s_epi, _c_epi, _b_epi),
    "xsk": IdentitySpec(_s_xsk, _c_xsk, _b_xsk),
    "wmi": IdentitySpec(_s_window, _c_window, _orth("wmi")),
    "pmi": IdentitySpec(_s_window, _c_window, _orth("pmi")),
    "dpf": IdentitySpec(_s_dpf, _c_dpf, _b_dpf),
    "apf": IdentitySpec(_s_apf, _c_apf, _b_apf),
    "mipf": IdentitySpec(_s_window, _c_window, _b_mipf),
    "mipf_dpf": IdentitySpec(_s_window, _c_window, _b_mipf_dpf),
    "functional_eq": IdentitySpec(_s_operator, _c_operator, _b_functional),
    "dual_eq": IdentitySpec(_s_operator, _c_operator, _b_dual),
    "reconstruct_g": IdentitySpec(_s_operator, _c_operator, _b_reconstruct),
    "kmt": IdentitySpec(_s_kmt_like(2), _c_kmt_like(2), _b_kmt),
    "kmt_dpf": IdentitySpec(_s_kmt_like(2), _c_kmt_like(2), _b_kmt_dpf),
    "kmt_unit_y": IdentitySpec(_s_kmt_like(2), _c_kmt_like(2), _b_kmt_unit_y),
    "kmsi": IdentitySpec(_s_sum(0, 0, unit_y=True), _c_sum(0, 0, True, "kmsi"), _b_kmsi),
    "kmsi_mbkms": IdentitySpec(_s_sum(0, 0, unit_y=True), _c_sum(0, 0, True, "kmsi"), _b_kmsi_mbkms),
    "wbb": IdentitySpec(_s_wbb, _c_wbb, _b_wbb),
    "wbb_mbkms": IdentitySpec(_s_wbb, _c_wbb, _b_wbb_mbkms),
    "trc": IdentitySpec(_s_sum(None, 0), _c_sum(None, 0, name="trc"), _b_trc),
    "mbkms": IdentitySpec(_s_sum(0, 0), _c_sum(0, 0, name="mbkms"), _b_mbkms),
    "trc_mbkms": IdentitySpec(_s_sum(0, 0), _c_sum(0, 0, name="trc_mbkms"), _b_trc_mbkms),
    "atr": IdentitySpec(_s_kmt_like(0), _c_kmt_like(0), _b_atr),
    "atr_apf": IdentitySpec(_s_kmt_like(0), _c_kmt_like(0), _b_atr_apf),
    "akmt": IdentitySpec(_s_sum(None, 2, min_r=1), _c_sum(None, 2, name="akmt"), _b_akmt),
    "akms": IdentitySpec(_s_sum(0, 2, min_r=1), _c_sum(0, 2, name="akms"), _b_akms),
    "akmt_akms": IdentitySpec(_s_sum(0, 2, min_r=1), _c_sum(0, 2, name="akmt_akms"), _b_akmt_akms),
    "theta_split": IdentitySpec(_s_split, _c_split, _b_split),
    "bracket": IdentitySpec(_s_step, _c_step, _b_bracket),
    "induction_step": IdentitySpec(_s_step, _c_step, _b_step),
}

IDENTITIES = tuple(REGISTRY)


def _spec(identity: str) -> IdentitySpec:
    try:
        return REGISTRY[identity]
    except KeyError:
        raise BadShape(f"unknown identity {identity!r}") from None


def check_shape(identity: str, shape: dict) -> dict:
    shape = dict(shape)
    _spec(identity).check_shape(shape)
    return shape


def shape_for(cfg: SamplerConfig, identity: str, trial: int, rng: np.random.Generator) -> dict:
    given = cfg.shapes.get(identity)
    if given:
        return check_shape(identity, given[trial % len(given)])
    return check_shape(identity, _spec(identity).draw_shape(rng, cfg.bounds))


def sample_instance(cfg: SamplerConfig, identity: str, trial: int) -> Instance:
    """Draw and evaluate one admissible instance.

    Parameter draws hitting the delta-neighbourhood of a theta zero, a nearly
    degenerate spectrum (operator identities) or overflowing theta values are
    redrawn up to ``retry_cap`` times.
    """
    spec = _spec(identity)
    rng = rng_for(cfg.seed, identity, trial)
    p = cfg.p_values[trial % len(cfg.p_values)]
    nome = th.Nome(p, delta=cfg.delta)
    shape = shape_for(cfg, identity, trial, rng)
    for _ in range(cfg.retry_cap):
        draw = _Draw(rng, cfg.annulus)
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                residual = spec.build(draw, shape, nome)
        except (DivisionByZeroTheta, DegenerateSpectrum):
            continue
        if not (math.isfinite(residual.scale) and math.isfinite(abs(residual.value))):
            continue  # theta values beyond double range
        return Instance(identity, trial, shape, p, draw.log, residual)
    exc = Unsampleable(f"{identity}: no admissible parameters after {cfg.retry_cap} draws")
    exc.shape = shape
    raise exc
