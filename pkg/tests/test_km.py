import cmath

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from ellipsum import km
from ellipsum.errors import BadArity, ConstraintViolated, DegenerateConstraint, DivisionByZeroTheta
from ellipsum.km import KmInstance, TwoTermInstance, WbbInstance
from ellipsum.pochhammer import RefinedBase
from ellipsum.theta import Nome

from _support import rand_annulus


def base(p, Y=1, seed=0):
    rng = np.random.default_rng(seed)
    return RefinedBase(rand_annulus(rng, lo=0.6, hi=1.4), Y, Nome(p))


def two_term(seed, N, L, m, y=None, p=0.3, b=None):
    rng = np.random.default_rng(seed)
    y = [1] * len(m) if y is None else y
    bb = base(p, np.lcm.reduce(y) if y else 1, seed)
    b = rand_annulus(rng) if b is None else b
    return TwoTermInstance(rand_annulus(rng), b, N, L, rand_annulus(rng, len(m)), m, y, bb)


def apc_instance(seed, l, m, y, p=0.4, scale=1.0, root=0):
    rng = np.random.default_rng(seed)
    bb = base(p, int(np.lcm.reduce(y)), seed)
    a_head = [scale * z for z in rand_annulus(rng, len(l) - 1)]
    b = [scale * z for z in rand_annulus(rng, len(m))]
    sol = km.solve_balance("apc", {"a": [*a_head, None], "b": b, "l": l, "m": m, "y": y}, bb)
    return KmInstance([*a_head, sol.roots[root]], b, l, m, y, bb)


# ----------------------------------------------------------------- kmt


def test_kmt_two_term():
    rng = np.random.default_rng(1)
    inst = KmInstance(rand_annulus(rng, 2), [], [0, 0], [], [], base(0.4))
    terms = km.kmt_terms(inst)
    assert len(terms) == 2
    assert km.kmt_residual(inst).relative < 1e-12
    assert km.kmt_dpf_agreement(inst).relative < 1e-12


def test_kmt_mixed_steps():
    rng = np.random.default_rng(2)
    inst = KmInstance(rand_annulus(rng, 2), rand_annulus(rng, 2), [1, 1], [1, 1], [1, 2], base(0.4, 2))
    assert km.kmt_residual(inst).relative < 1e-9
    assert km.kmt_dpf_agreement(inst).relative < 1e-11


def test_kmt_unit_y_route():
    rng = np.random.default_rng(3)
    inst = KmInstance(rand_annulus(rng, 3), rand_annulus(rng, 2), [1, 0, 2], [2, 2], [2, 3], base(0.3, 6))
    assert km.kmt_residual(inst).relative < 1e-9
    assert km.kmt_residual(km.unit_y_instance(inst)).relative < 1e-9
    assert km.kmt_unit_y_agreement(inst).relative < 1e-11


def test_kmt_validation():
    rng = np.random.default_rng(4)
    with pytest.raises(ConstraintViolated):
        km.kmt_residual(KmInstance(rand_annulus(rng, 2), [1.1], [0, 0], [1], [1], base(0.2)))
    with pytest.raises(ConstraintViolated):  # y_j must divide Y
        km.kmt_residual(KmInstance(rand_annulus(rng, 2), [1.1], [1, 0], [1], [2], base(0.2)))
    with pytest.raises(BadArity):
        KmInstance([1.1, 0.7], [0.5], [0], [1], [1], base(0.2))
    with pytest.raises(BadArity):
        KmInstance([], [], [], [], [], base(0.2))


# ------------------------------------------------------------- kmsi / wbb


def test_kmsi_examples():
    b0 = base(0.3)
    assert km.kmsi_residual(0.7, 1.3j, [], [], 0, b0).relative == 0
    rng = np.random.default_rng(5)
    a, b = rand_annulus(rng, 2)
    assert km.kmsi_residual(a, b, rand_annulus(rng, 2), [2, 1], 3, b0).relative < 1e-9
    with pytest.raises(ConstraintViolated):
        km.kmsi_residual(a, b, rand_annulus(rng, 2), [2, 2], 3, b0)


def test_kmsi_equals_mbkms_exactly():
    inst = two_term(6, 3, 0, [2, 1])
    assert km.kmsi_mbkms_agreement(inst).relative == 0


def test_wbb_examples():
    rng = np.random.default_rng(7)
    a, b, c = rand_annulus(rng, 3)
    assert km.wbb_residual(WbbInstance(a, b, c, 2, 0, base(0.35))).relative == 0
    inst = WbbInstance(a, b, c, 3, 2, base(0.35))
    assert km.wbb_residual(inst).relative < 1e-9
    assert km.wbb_mbkms_agreement(inst).relative < 1e-9
    with pytest.raises(ConstraintViolated):
        WbbInstance(a, b, c, 0, 2, base(0.35))


def test_wbb_unit_step_is_kmsi():
    rng = np.random.default_rng(8)
    a, b, c = rand_annulus(rng, 3)
    bb = base(0.3)
    w = km.wbb_residual(WbbInstance(a, b, c, 1, 2, bb))
    k = km.kmsi_residual(a, b, [c], [2], 2, bb)
    assert w.relative < 1e-12 and k.relative < 1e-12
    lhs, rhs = km.wbb_terms(WbbInstance(a, b, c, 1, 2, bb))
    assert abs(sum(lhs) - km.kmsi_rhs(a, b, [c], [2], 2, bb)) <= 1e-12 * sum(map(abs, lhs))


# ------------------------------------------------------------ trc / mbkms


def test_trc_examples():
    inst = two_term(9, 3, 0, [2, 1])
    assert km.trc_residual(inst).relative < 1e-9
    assert km.trc_mbkms_agreement(inst).relative < 1e-11
    single = two_term(10, 0, 2, [2])
    assert len(km.trc_terms(single)[0]) == 1
    assert km.trc_residual(single).relative < 1e-10
    assert km.trc_residual(two_term(11, 2, 1, [2, 1], [1, 2], p=0.4)).relative < 1e-9
    with pytest.raises(ConstraintViolated):
        km.trc_mbkms_agreement(single)


def test_mbkms_examples():
    assert km.mbkms_residual(two_term(12, 0, 0, [])).relative == 0
    assert km.mbkms_residual(two_term(13, 4, 0, [1, 1, 2])).relative < 1e-9
    with pytest.raises(ConstraintViolated):
        km.mbkms_residual(two_term(14, 1, 1, [2]))


def test_zero_multiplicities_allowed():
    inst = two_term(15, 3, 0, [0, 3, 0])
    assert km.mbkms_residual(inst).relative < 1e-9


# ----------------------------------------------------------------- atr


def test_atr_examples():
    inst = apc_instance(16, [0, 0], [1, 1], [1, 1])
    assert km.atr_residual(inst).relative < 1e-10
    assert km.atr_apf_agreement(inst).relative < 1e-11
    # one row: apc reads a^2 = b^2; at a = b every term carries theta(1) = 0
    trivial = apc_instance(17, [1], [2], [1], root=0)
    assert trivial.a[0] == pytest.approx(trivial.b[0], rel=1e-14)
    assert max(map(abs, km.atr_terms(trivial))) < 1e-15
    one_row = apc_instance(17, [1], [2], [1], root=1)
    assert min(map(abs, km.atr_terms(one_row))) > 1e-3
    assert km.atr_residual(one_row).relative < 1e-10


def test_atr_scale_invariance():
    inst = apc_instance(18, [1, 0], [2, 1], [1, 2])
    lam = 0.8 * cmath.exp(0.4j)
    scaled = KmInstance([lam * x for x in inst.a], [lam * x for x in inst.b], inst.l, inst.m, inst.y, inst.base)
    assert km.atr_residual(inst).relative < 1e-9
    assert km.atr_residual(scaled).relative < 1e-9


def test_atr_needs_apc():
    inst = apc_instance(19, [0, 0], [1, 1], [1, 1])
    broken = KmInstance([inst.a[0], inst.a[1] * 1.01], inst.b, inst.l, inst.m, inst.y, inst.base)
    with pytest.raises(ConstraintViolated):
        km.atr_residual(broken)


# ----------------------------------------------------------- akmt / akms


def test_akms_trivial_case():
    bb = base(0.3, seed=20)
    c = 0.9 + 0.4j
    assert km.akms_b(0, [c], [2], [1], bb) == pytest.approx(bb.q * c * c, rel=1e-14)
    lhs, rhs = km.akms_terms(0, [c], [2], [1], bb)
    assert lhs == [1] and rhs[0] == pytest.approx(1, rel=1e-12)
    assert km.akms_residual(0, [c], [2], [1], bb).relative < 1e-12


def test_akms_examples():
    rng = np.random.default_rng(21)
    assert km.akms_residual(1, [rand_annulus(rng)], [3], [1], base(0.4, seed=21)).relative < 1e-10
    for seed in range(5):
        c = rand_annulus(rng, 2)
        assert km.akms_residual(2, c, [3, 1], [1, 1], base(0.0, seed=seed)).relative < 1e-12
    with pytest.raises(ConstraintViolated):
        km.akms_residual(1, [0.5], [2], [1], base(0.2))


def npc_instance(seed, N, L, m, y=None, p=0.3):
    inst = two_term(seed, N, L, m, y, p=p, b=1.0)
    return km.with_b(inst, km.solve_balance("npc", km.npc_params(inst), inst.base).principal)


def test_akmt_examples():
    inst = npc_instance(22, 1, 1, [4])
    assert km.akmt_residual(inst).relative < 1e-9
    assert km.akmt_root_sweep(inst).relative < 1e-9
    roots = km.solve_balance("npc", km.npc_params(inst), inst.base).roots
    assert len(roots) == 2
    for b in roots:
        assert km.akmt_residual(km.with_b(inst, b)).relative < 1e-9


def test_akmt_reduces_to_akms():
    inst = npc_instance(23, 2, 0, [3, 1], [1, 2])
    assert km.akmt_akms_agreement(inst).relative < 1e-11


def test_akmt_rejects_off_constraint_b():
    inst = npc_instance(24, 1, 1, [4])
    with pytest.raises(ConstraintViolated):
        km.akmt_residual(km.with_b(inst, inst.b * (1 + 1e-6)))


# ------------------------------------------------------------- balancing


def test_solve_balance_akms():
    bb = base(0.2, seed=25)
    c = 1.2 - 0.3j
    sol = km.solve_balance("akms_b", {"c": [c], "m": [2], "y": [1], "N": 0}, bb)
    assert sol.principal == pytest.approx(bb.q * c * c, rel=1e-14)
    km.verify_balance("akms_b", {"c": [c], "m": [2], "y": [1], "N": 0}, sol.principal, bb)


def test_solve_balance_apc_single_row():
    bb = base(0.2, seed=26)
    params = {"a": [None], "b": [0.7 + 0.2j, 1.3j], "l": [2], "m": [2, 1], "y": [1, 1]}
    sol = km.solve_balance("apc", params, bb)
    assert len(sol.roots) == 3
    for root in sol.roots:
        km.verify_balance("apc", params, root, bb, rtol=1e-13)


def test_solve_balance_free_b():
    bb = base(0.2, seed=27)
    params = {"a": [0.8, 1.1j], "b": [None, 0.6], "l": [1, 0], "m": [2, 1], "y": [1, 1], "free": ("b", 0)}
    sol = km.solve_balance("apc", params, bb)
    km.verify_balance("apc", params, sol.principal, bb)


def test_balance_errors():
    bb = base(0.2, seed=28)
    with pytest.raises(ConstraintViolated):
        km.verify_balance("akms_b", {"c": [1.2], "m": [2], "y": [1], "N": 0}, bb.q * 1.44 * (1 + 1e-6), bb)
    with pytest.raises(DegenerateConstraint):
        km.solve_balance("apc", {"a": [0.5], "b": [None], "l": [0], "m": [0], "y": [1], "free": ("b", 0)}, bb)
    with pytest.raises(ValueError):
        km.solve_balance("other", {}, bb)


# ------------------------------------------------------------- appendix


def split_instance(seed, N, m, p=0.5):
    return two_term(seed, N, 0, m, p=p)


@pytest.mark.parametrize("N", range(4))
def test_theta_split_endpoints(N):
    inst = split_instance(30 + N, N, [N + 1])
    for k in (0, N + 1):
        assert km.theta_split_residual(inst, k).relative < 1e-12
    t = km.theta_split_terms(inst, N + 1)
    assert t[0] == 0  # theta(q^0) = theta(1) vanishes exactly


@given(st.integers(0, 5), st.integers(0, 7), st.integers(0, 2**32 - 1))
def test_theta_split_interior(N, k, seed):
    assume(k <= N + 1)
    assert km.theta_split_residual(split_instance(seed, N, [1, N]), k).relative < 1e-11


def test_bracket():
    for seed in range(5):
        assert km.bracket_residual(two_term(40 + seed, 2, 0, [2, 1])).relative < 1e-11


def test_induction_step_examples():
    assert km.induction_step_residual(two_term(50, 0, 0, [1])).relative < 1e-11
    inst = two_term(51, 2, 0, [2, 1], p=0.3)
    stages = km.induction_stages(inst)
    assert set(stages) == {"split", "hypothesis", "combine", "bracket", "closure", "routes"}
    assert max(r.relative for r in stages.values()) < 1e-9
    assert km.induction_step_residual(inst).relative < 1e-9


def test_induction_chain_from_zero():
    # each level N -> N+1 is checked by the step; together they rebuild kmsi up to N = 5
    for N in range(6):
        inst = two_term(60 + N, N, 0, [N // 2, N + 1 - N // 2])
        assert km.induction_step_residual(inst).relative < 1e-8
        a, b, c, m, _, bb = km.kmsi_instance(inst)
        assert km.kmsi_residual(a, b, c, m, N + 1, bb).relative < 1e-9


def test_induction_step_preconditions():
    with pytest.raises(ConstraintViolated):
        km.induction_step_residual(two_term(70, 2, 0, [2, 0]))
    with pytest.raises(ConstraintViolated):
        km.induction_step_residual(two_term(71, 2, 0, [2, 2]))
    with pytest.raises(ConstraintViolated):
        km.induction_step_residual(two_term(72, 2, 0, [2, 1], [1, 2]))


def test_p_zero_reductions():
    for seed in range(3):
        assert km.trc_residual(two_term(80 + seed, 2, 1, [2, 1], [1, 2], p=0.0)).relative < 1e-11
        assert km.akmt_residual(npc_instance(83 + seed, 1, 1, [2, 2], p=0.0)).relative < 1e-11
        assert km.kmt_residual(KmInstance([0.7, 1.3j], [0.6], [1, 0], [1], [1], base(0.0))).relative < 1e-11


def test_division_by_theta_zero_is_reported():
    bb = base(0.2)
    with pytest.raises(DivisionByZeroTheta):
        km.kmsi_residual(0.7, 1 / bb.q, [1.1], [1], 1, bb)  # (bq)_1 = theta(1)
