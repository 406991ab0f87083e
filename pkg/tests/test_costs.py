import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from dropdtw.costs import (
    DropCostPolicy,
    asymmetric_cost,
    build_drop_costs,
    cost_matrix,
    nearest_rank_percentile,
    symmetric_cost,
)
from dropdtw.types import INF, AlignmentError, NonPositiveGamma, ZeroNormElement

vectors = hnp.arrays(float, st.tuples(st.integers(1, 5), st.just(3)),
                     elements=st.floats(-3, 3, allow_nan=False)).filter(
    lambda a: np.all(np.linalg.norm(a, axis=1) > 1e-3))


def test_symmetric_cost_reference_values():
    z = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]])
    x = np.array([[1.0, 0.0]])
    np.testing.assert_allclose(symmetric_cost(z, x)[:, 0], [0.0, 1.0, 2.0], atol=1e-15)


def test_symmetric_cost_zero_norm():
    with pytest.raises(ZeroNormElement):
        symmetric_cost(np.array([[0.0, 0.0]]), np.array([[1.0, 0.0]]))


def test_asymmetric_cost_single_row_is_zero():
    x = np.random.default_rng(0).normal(size=(4, 3))
    np.testing.assert_array_equal(asymmetric_cost(np.ones((1, 3)), x), 0.0)


def test_asymmetric_cost_dedupes_repeated_rows():
    rng = np.random.default_rng(1)
    step, x = rng.normal(size=(1, 3)), rng.normal(size=(5, 3))
    doubled = asymmetric_cost(np.vstack([step, step]), x, gamma=0.5)
    np.testing.assert_allclose(doubled, 0.0, atol=1e-12)
    # without dedupe each copy only gets half the mass
    plain = asymmetric_cost(np.vstack([step, step]), x, gamma=0.5, unique_denominator=False)
    np.testing.assert_allclose(plain, math.log(2), atol=1e-12)


def test_asymmetric_cost_hand_value():
    c = asymmetric_cost(np.array([[1.0, 0.0], [0.0, 1.0]]), np.array([[1.0, 0.0]]), gamma=1.0)
    assert c[0, 0] == pytest.approx(-math.log(math.e / (math.e + 1)), abs=1e-12)
    assert c[0, 0] == pytest.approx(0.3133, abs=1e-4)


def test_asymmetric_cost_is_stable_for_tiny_gamma():
    z = np.array([[1.0, 0.0], [0.0, 1.0]])
    c = asymmetric_cost(z, np.array([[1.0, 0.2]]), gamma=1e-4)
    assert np.all(np.isfinite(c))
    assert c[0, 0] == pytest.approx(0.0, abs=1e-12)
    assert c[1, 0] == pytest.approx(0.8 / 1e-4)


def test_asymmetric_cost_gamma_checked():
    with pytest.raises(NonPositiveGamma):
        asymmetric_cost(np.ones((2, 2)), np.ones((2, 2)), gamma=0.0)


def test_percentile_nearest_rank():
    c = np.array([[4.0, 2.0], [3.0, 1.0]])
    assert nearest_rank_percentile(c, 50) == 2.0
    assert nearest_rank_percentile(c, 100) == 4.0
    assert nearest_rank_percentile(c, 0) == 1.0
    assert nearest_rank_percentile(c, 26) == 2.0


def test_build_drop_costs_policies():
    c = np.array([[1.0, 2.0], [3.0, 4.0]])
    dz, dx = build_drop_costs(c, DropCostPolicy.constant(0.3))
    np.testing.assert_array_equal(dz, [0.3, 0.3])
    np.testing.assert_array_equal(dx, [0.3, 0.3])
    dz, dx = build_drop_costs(c, DropCostPolicy.percentile(50))
    np.testing.assert_array_equal(dx, [2.0, 2.0])
    dz, dx = build_drop_costs(c, DropCostPolicy.infinite())
    assert np.all(dz == INF) and np.all(dx == INF)
    dz, dx = build_drop_costs(c, DropCostPolicy.constant(0.3), one_sided=True)
    assert np.all(dz == INF) and np.all(dx == 0.3)


def test_parameterized_drop_costs():
    z = np.array([[1.0, 0.0], [0.0, 2.0]])
    x = np.array([[1.0, 1.0], [-1.0, 0.0], [2.0, 0.0]])
    wx, wz = np.eye(2), 2 * np.eye(2)
    dz, dx = build_drop_costs(symmetric_cost(z, x), DropCostPolicy.parameterized(wx, wz), z=z, x=x)
    z_bar, x_bar = z.mean(axis=0), x.mean(axis=0)
    np.testing.assert_allclose(dx, np.maximum(x @ z_bar, 0))
    np.testing.assert_allclose(dz, np.maximum(z @ (2 * x_bar), 0))
    assert dx[1] == 0.0


def test_policy_validation():
    with pytest.raises(AlignmentError):
        DropCostPolicy.constant(-0.1)
    with pytest.raises(AlignmentError):
        DropCostPolicy.percentile(101)
    with pytest.raises(AlignmentError):
        DropCostPolicy.parameterized(np.eye(2), np.eye(3))
    with pytest.raises(AlignmentError):
        cost_matrix(np.ones((1, 2)), np.ones((1, 2)), kind="l2")


@given(vectors, vectors)
def test_symmetric_cost_transpose_symmetry(z, x):
    np.testing.assert_allclose(symmetric_cost(z, x), symmetric_cost(x, z).T, atol=1e-12)


@given(vectors, vectors, st.floats(0.01, 100))
def test_symmetric_cost_scale_invariant_and_bounded(z, x, lam):
    c = symmetric_cost(z, x)
    assert np.all((c >= 0) & (c <= 2))
    np.testing.assert_allclose(symmetric_cost(lam * z, x), c, atol=1e-9)


@given(vectors, vectors, st.floats(0.05, 5),
       hnp.arrays(float, 3, elements=st.floats(-2, 2, allow_nan=False)))
def test_asymmetric_cost_common_offset(z, x, gamma, v):
    c = asymmetric_cost(z, x, gamma)
    assert np.all(c >= 0)
    # a common offset of every z_k adds v . x_j to the whole column of logits,
    # which the column softmax cancels, orthogonal to x_j or not
    np.testing.assert_allclose(asymmetric_cost(z + v, x, gamma), c, atol=1e-7)


def test_asymmetric_cost_row_dependent_changes_matter():
    z = np.array([[1.0, 0.0], [0.0, 1.0]])
    x = np.array([[1.0, 0.5]])
    base = asymmetric_cost(z, x, 1.0)
    assert not np.allclose(asymmetric_cost(2 * z, x, 1.0), base)
    moved = z.copy()
    moved[0] += [0.0, 3.0]
    assert not np.allclose(asymmetric_cost(moved, x, 1.0), base)


@given(hnp.arrays(float, st.tuples(st.integers(1, 6), st.integers(1, 6)), elements=st.floats(0, 2)),
       st.floats(0, 100), st.randoms())
def test_percentile_permutation_invariant(c, p, rnd):
    flat = c.ravel().tolist()
    rnd.shuffle(flat)
    assert nearest_rank_percentile(c, p) == nearest_rank_percentile(np.reshape(flat, c.shape), p)
    assert c.min() <= nearest_rank_percentile(c, p) <= c.max()
