import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quasicheck.vecmath import inner, pnorm, pnorm_batch, segment_point

finite_floats = st.floats(min_value=-1e6, max_value=1e6,
                          allow_nan=False, allow_infinity=False)
vectors = st.lists(finite_floats, min_size=1, max_size=6).map(np.array)


def paired(draw_dim=st.integers(1, 6)):
    return draw_dim.flatmap(
        lambda n: st.tuples(
            st.lists(finite_floats, min_size=n, max_size=n).map(np.array),
            st.lists(finite_floats, min_size=n, max_size=n).map(np.array),
        )
    )


def test_inner_examples():
    assert inner([1, 2], [3, 4]) == 11
    assert inner([0, 0], [5, 7]) == 0
    assert inner([1, 0, 0], [0, 1, 0]) == 0


def test_inner_dim_mismatch():
    with pytest.raises(ValueError):
        inner([1, 2], [1, 2, 3])


def test_inner_rejects_nonfinite():
    with pytest.raises(ValueError):
        inner([1, math.nan], [1, 2])


def test_pnorm_examples():
    assert pnorm([3, 4], 2) == 5
    assert pnorm([3, 4], 1) == 7
    assert pnorm([3, -4], "inf") == 4
    assert pnorm([3, -4], math.inf) == 4


def test_pnorm_bad_selector():
    with pytest.raises(ValueError):
        pnorm([1.0], 3)


def test_segment_endpoints_exact():
    x = np.array([0.1, 0.7])
    y = np.array([2.3, -1.9])
    assert np.array_equal(segment_point(x, y, 1.0), x)
    assert np.array_equal(segment_point(x, y, 0.0), y)
    assert np.allclose(segment_point([0, 0], [2, 4], 0.5), [1, 2])


def test_segment_lambda_range():
    with pytest.raises(ValueError):
        segment_point([0.0], [1.0], 1.5)
    with pytest.raises(ValueError):
        segment_point([0.0], [1.0], -0.1)


@given(paired(), st.floats(0, 1))
def test_segment_swap_symmetry(xy, lam):
    x, y = xy
    a = segment_point(x, y, lam)
    b = segment_point(y, x, 1.0 - lam)
    scale = max(1.0, float(np.max(np.abs(np.concatenate([x, y])))))
    assert np.all(np.abs(a - b) <= 1e-15 * scale * 10)


@given(paired())
def test_pnorm_triangle_inequality(xy):
    a, b = xy
    for p in (1, 2, "inf"):
        assert pnorm(a + b, p) <= pnorm(a, p) + pnorm(b, p) + 1e-12 * (
            1 + pnorm(a, p) + pnorm(b, p))


@given(paired())
def test_inner_symmetry(xy):
    a, b = xy
    scale = 1.0 + abs(inner(a, a)) + abs(inner(b, b))
    assert abs(inner(a, b) - inner(b, a)) <= 1e-12 * scale


@given(paired(), finite_floats, finite_floats)
def test_inner_bilinearity(xy, alpha, beta):
    a, b = xy
    lhs = inner(alpha * a + beta * a, b)
    rhs = (alpha + beta) * inner(a, b)
    scale = 1.0 + abs(lhs) + abs(rhs)
    assert abs(lhs - rhs) <= 1e-9 * scale


def test_pnorm_zero_iff_zero():
    assert pnorm(np.zeros(4)) == 0
    assert pnorm(np.array([0, 0, 1e-300])) > 0


def test_pnorm_batch_matches_scalar(rng):
    A = rng.normal(size=(20, 3))
    for p in (1, 2, "inf"):
        batch = pnorm_batch(A, p)
        for i, row in enumerate(A):
            assert batch[i] == pytest.approx(pnorm(row, p), rel=1e-15)
