import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dropdtw.types import (
    INF,
    AlignmentError,
    CostMatrix,
    DimensionMismatch,
    EmbeddedSequence,
    EmptySequence,
    NonFiniteValue,
    alignment_objective,
    is_feasible_alignment,
    make_result,
    validate_pair,
)


def seq(n, d):
    return EmbeddedSequence(np.ones((n, d)))


def test_validate_pair_accepts_matching_dims():
    validate_pair(seq(3, 2), seq(2, 2))


def test_validate_pair_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        validate_pair(seq(3, 2), seq(2, 3))


def test_validate_pair_empty():
    with pytest.raises(EmptySequence):
        validate_pair(np.zeros((0, 2)), seq(2, 2))
    with pytest.raises(EmptySequence):
        EmbeddedSequence(np.zeros((0, 2)))


def test_validate_pair_non_finite():
    with pytest.raises(NonFiniteValue):
        validate_pair(np.array([[1.0, np.nan]]), seq(1, 2))


def test_sequence_is_read_only():
    s = seq(2, 2)
    with pytest.raises(ValueError):
        s.elements[0, 0] = 5.0
    assert len(s) == 2 and s.dim == 2


def test_cost_matrix_defaults_and_broadcast():
    cm = CostMatrix(np.zeros((2, 3)), drop_x=0.5)
    assert np.all(cm.drop_z == INF)
    np.testing.assert_array_equal(cm.drop_x, [0.5, 0.5, 0.5])
    with pytest.raises(DimensionMismatch):
        CostMatrix(np.zeros((2, 3)), drop_z=np.ones(3))
    with pytest.raises(AlignmentError):
        CostMatrix(np.zeros((2, 3)), drop_x=-1.0)
    with pytest.raises(NonFiniteValue):
        CostMatrix(np.array([[np.inf]]))


def test_transposed_swaps_drop_vectors():
    cm = CostMatrix(np.arange(6.0).reshape(2, 3), [1, 2], [3, 4, 5])
    t = cm.transposed()
    assert t.shape == (3, 2)
    np.testing.assert_array_equal(t.drop_z, [3, 4, 5])
    np.testing.assert_array_equal(t.drop_x, [1, 2])


def test_feasible_identity_with_flag():
    assert is_feasible_alignment(np.eye(3), True)


def test_crossing_pair_infeasible():
    m = np.zeros((2, 3))
    m[0, 2] = m[1, 0] = 1
    assert not is_feasible_alignment(m)


def test_non_contiguous_row_is_feasible():
    assert is_feasible_alignment(np.array([[1, 0, 1]]), True)


def test_flag_requires_every_row():
    m = np.array([[1, 0], [0, 0]])
    assert is_feasible_alignment(m)
    assert not is_feasible_alignment(m, True)


def test_objective_counts_drops_once():
    cm = CostMatrix(np.array([[1.0, 9.0, 1.0]]), [7.0], [0.5, 0.5, 0.5])
    assert alignment_objective(cm, np.array([[1, 0, 0]])) == pytest.approx(2.0)
    assert alignment_objective(cm, np.zeros((1, 3))) == pytest.approx(8.5)


def test_make_result_complements():
    r = make_result(1.0, [(1, 2), (0, 0)], 3, 4)
    assert r.matches == ((0, 0), (1, 2))
    assert r.dropped_rows == (2,)
    assert r.dropped_cols == (1, 3)


def _pairwise_chain(m):
    cells = list(zip(*np.nonzero(m)))
    return all((a <= c and b <= d) or (a >= c and b >= d) for a, b in cells for c, d in cells)


@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_feasibility_matches_pairwise_definition(k, n, data):
    bits = data.draw(st.lists(st.booleans(), min_size=k * n, max_size=k * n))
    m = np.array(bits).reshape(k, n)
    assert is_feasible_alignment(m) == _pairwise_chain(m)
