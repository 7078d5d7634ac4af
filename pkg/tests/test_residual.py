import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ellipsum.residual import Residual, csum, prod, quotient, worst

from _support import annulus


def test_relative_and_zero_scale():
    assert Residual(0j, 0.0).relative == 0
    r = Residual.between([1.0, 2.0], [3.0 + 1e-12])
    assert r.scale == pytest.approx(6.0)
    assert r.relative == pytest.approx(1e-12 / 6, rel=1e-3)
    assert Residual.of_terms([0.5], target=1.0).relative == pytest.approx(1 / 3)


def test_compensated_sum():
    assert csum([1e16, 1.0, -1e16]) == 1.0
    assert csum([]) == 0


def test_worst():
    a, b = Residual(1e-3j, 1.0), Residual(1e-9, 1.0)
    assert worst([b, a]) is a
    assert worst([]).relative == 0


@given(st.lists(annulus(0.1, 10.0), max_size=8))
def test_prod_matches_plain_product(values):
    ref = complex(np.prod(values)) if values else 1.0
    assert abs(prod(values) - ref) <= 1e-14 * len(values) * abs(ref)


def test_prod_survives_intermediate_range():
    vals = [1e200, 1e200, 1e-250, 1e-140]
    assert prod(vals) == pytest.approx(1e10, rel=1e-14)
    assert quotient([1e300, 1e300], [1e300, 1e299]) == pytest.approx(10, rel=1e-14)
    assert quotient([0.0, 1e300], [2.0]) == 0


def test_prod_saturates():
    assert math.isinf(prod([1e300, 1e300]).real)
    assert prod([1e-300, 1e-300]) == 0
