import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dropdtw.alignment import MinOperator, align
from dropdtw.costs import DropCostPolicy
from dropdtw.tasks import (
    AlignConfig,
    LabeledTimeline,
    assign_step_labels,
    attention_pool,
    build_costs,
    interval_mask,
    labels_from_alignment,
    localization_scores,
    localize_subsequences,
    loss_clustering,
    loss_drop_dtw,
    loss_margin,
    matched_runs,
    metric_framewise_acc,
    metric_iou,
    metric_recall,
    recall_at_1_from_scores,
    retrieval_score,
)
from dropdtw.types import FewerRunsThanRequested, NonPositiveGamma, make_result

E = np.eye(8)


def unit_rows(rng, n, d):
    v = rng.standard_normal((n, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


# ---------------------------------------------------------------- retrieval


def test_identical_pair_scores_zero():
    z = unit_rows(np.random.default_rng(0), 5, 4)
    assert retrieval_score(z, z, AlignConfig(algorithm="dtw")) == pytest.approx(0.0, abs=1e-12)


def test_identical_pair_beats_orthogonal_pair():
    z = E[:3]
    far = E[3:6]
    for algo in ("dtw", "one", "two"):
        cfg = AlignConfig(algorithm=algo)
        assert retrieval_score(z, z, cfg) < retrieval_score(z, far, cfg)


def test_recall_gallery_of_one():
    assert recall_at_1_from_scores([[3.0]]) == 1.0


def test_recall_correct_always_second_best():
    scores = np.array([[1.0, 0.5, 2.0], [3.0, 1.0, 0.2], [0.1, 2.0, 1.0]])
    assert recall_at_1_from_scores(scores) == 0.0


def test_recall_ties_go_to_lowest_index():
    assert recall_at_1_from_scores([[1.0, 1.0], [1.0, 1.0]]) == 0.5


def test_recall_with_class_ids():
    scores = np.array([[0.0, 1.0], [0.0, 1.0]])
    assert recall_at_1_from_scores(scores, [7, 7], [7, 8]) == 1.0


# ---------------------------------------------------------------- localization


def test_matched_runs():
    r = make_result(0.0, [(0, 0), (0, 1), (1, 3), (2, 4), (2, 6)], 3, 7)
    assert matched_runs(r) == [(0, 1), (3, 4), (6, 6)]


def test_localize_target_noise_target():
    target = E[:4]
    noise = E[4:7]
    signal = np.vstack([target, noise, target])
    query = np.vstack([target, target])
    assert localize_subsequences(query, signal, 2) == [(0, 3), (7, 10)]


def test_localize_query_equals_signal():
    z = unit_rows(np.random.default_rng(1), 6, 5)
    assert localize_subsequences(z, z, 1) == [(0, 5)]


def test_localize_keeps_longest_runs_ordered_by_start():
    # three occurrences of different length; the two longest are kept
    blocks = [E[:2], E[6:7], E[:4], E[7:8], E[:3]]
    signal = np.vstack(blocks)
    query = np.vstack([E[:4], E[:4]])
    assert localize_subsequences(query, signal, 2) == [(3, 6), (8, 10)]


def test_localize_too_few_runs():
    z = E[:3]
    with pytest.raises(FewerRunsThanRequested) as info:
        localize_subsequences(z, z, 2)
    assert info.value.runs == [(0, 2)]
    with pytest.raises(ValueError):
        localize_subsequences(z, z, 0)


def test_localization_scores():
    assert interval_mask([(1, 2)], 4).tolist() == [False, True, True, False]
    acc, iou = localization_scores([(0, 1)], [(1, 2)], 4)
    assert acc == 0.5 and iou == pytest.approx(1 / 3)


# ---------------------------------------------------------------- step labels


def test_single_step_identical_clips():
    step = np.array([[0.6, 0.8, 0.0]])
    out = assign_step_labels(np.repeat(step, 5, axis=0), step, drop=DropCostPolicy.constant(0.1))
    assert out.labels.tolist() == [1] * 5
    assert out.intervals == [[(0, 4)]]


def test_single_step_percentile_drop_ties():
    # all costs are 0, so the percentile drop is 0 too; the tie order keeps
    # a single match on the last clip
    step = np.array([[0.6, 0.8, 0.0]])
    out = assign_step_labels(np.repeat(step, 5, axis=0), step)
    assert out.result.total_cost == 0.0
    assert out.labels.tolist() == [0, 0, 0, 0, 1]


def test_constructed_three_step_video():
    # each clip leans towards the next step, which puts the mismatched
    # costs strictly between the matched cost and the background cost log 3
    steps = E[:3]
    truth = [1, 1, 1, 0, 1, 1, 1, 2, 2, 2, 2, 2, 2, 0, 3, 3, 3, 3, 3, 3, 0]
    bg = iter(E[4:7])
    video = np.array([steps[k - 1] + 0.97 * steps[k % 3] if k else next(bg) for k in truth])
    out = assign_step_labels(video, steps)
    assert out.labels.tolist() == truth
    assert out.intervals == [[(0, 2), (4, 6)], [(7, 12)], [(14, 19)]]
    assert metric_framewise_acc(out, LabeledTimeline(truth, 3)) == 1.0


def test_labels_follow_alignment():
    c = np.array([[0.1, 0.5, 0.9], [0.9, 0.2, 0.1]])
    r = make_result(0.0, [(0, 0), (0, 1), (1, 1)], 2, 3)
    assert labels_from_alignment(r, c).tolist() == [1, 2, 0]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.integers(1, 12))
def test_step_labels_monotone_over_matched(seed, k, n):
    rng = np.random.default_rng(seed)
    out = assign_step_labels(unit_rows(rng, n, 6), unit_rows(rng, k, 6))
    lab = out.labels[out.labels > 0]
    assert np.all(np.diff(lab) >= 0)
    matched = {j for _, j in out.result.matches}
    assert all((out.labels[j] > 0) == (j in matched) for j in range(n))


# ---------------------------------------------------------------- metrics


def test_timeline_from_intervals_and_overlap():
    t = LabeledTimeline.from_intervals([[(0, 1)], [(3, 3)]], 5)
    assert t.labels.tolist() == [1, 1, 0, 2, 0]
    with pytest.raises(ValueError):
        LabeledTimeline.from_intervals([[(0, 2)], [(2, 3)]], 5)
    with pytest.raises(ValueError):
        LabeledTimeline([0, 3], 2)


def test_metric_examples():
    truth = LabeledTimeline([1, 1, 0, 2, 2, 0], 2)
    assert metric_recall(truth, truth) == 1.0
    assert metric_framewise_acc(truth, truth) == 1.0
    assert metric_iou(truth, truth) == 1.0
    bg = np.zeros(6, dtype=int)
    assert metric_recall(bg, truth) == 0.0
    assert metric_iou(bg, truth) == 0.0
    assert metric_recall([1, 0, 0, 0, 0, 0], truth) == 0.5


def test_framewise_examples():
    assert metric_framewise_acc([0, 1, 0, 1], [1, 0, 1, 0]) == 0.0
    assert metric_framewise_acc([1, 1, 0, 0], [1, 0, 0, 1]) == 0.5
    with pytest.raises(ValueError):
        metric_framewise_acc([1, 0], [1, 0, 0])


def test_iou_examples():
    truth = LabeledTimeline([1, 1, 0, 0, 2, 2, 0, 0], 2)
    assert metric_iou([0, 0, 1, 1, 0, 0, 2, 2], truth) == 0.0
    # each step: one shared element, union of three
    assert metric_iou([0, 1, 1, 0, 0, 2, 2, 0], truth) == pytest.approx(1 / 3)
    assert metric_iou([0, 0], [0, 0]) == 1.0


def test_recall_needs_steps():
    with pytest.raises(ValueError):
        metric_recall([0, 0], LabeledTimeline([0, 0], 0))


label_pairs = st.integers(1, 20).flatmap(
    lambda n: st.tuples(arrays(np.int64, n, elements=st.integers(0, 4)),
                        arrays(np.int64, n, elements=st.integers(0, 4)),
                        st.permutations(range(1, 5)))
)


@settings(max_examples=200, deadline=None)
@given(label_pairs)
def test_metrics_invariant_to_relabeling(pair):
    pred, truth, perm = pair
    relabel = np.array([0, *perm])
    t1, t2 = LabeledTimeline(truth, 4), LabeledTimeline(relabel[truth], 4)
    assert metric_iou(relabel[pred], t2) == metric_iou(pred, t1)
    assert metric_recall(relabel[pred], t2) == metric_recall(pred, t1)
    assert metric_framewise_acc(relabel[pred], t2) == metric_framewise_acc(pred, t1)


@settings(max_examples=200, deadline=None)
@given(arrays(np.int64, st.integers(1, 20), elements=st.integers(0, 4)))
def test_metric_edge_cases(labels):
    truth = LabeledTimeline(labels, 4)
    assert metric_iou(truth, truth) == 1.0 and metric_framewise_acc(truth, truth) == 1.0
    bg = np.zeros_like(labels)
    present = np.any(labels > 0)
    assert metric_iou(bg, truth) == (0.0 if present else 1.0)
    if present:
        assert metric_recall(bg, truth) == 0.0


# ---------------------------------------------------------------- losses


def smooth_config(gamma, algorithm="two"):
    return AlignConfig(drop=DropCostPolicy.constant(0.3), algorithm=algorithm,
                       min_op=MinOperator("smooth", gamma))


@pytest.mark.parametrize("algorithm", ["one", "two"])
def test_drop_dtw_loss_converges_to_hard(algorithm):
    rng = np.random.default_rng(3)
    z, x = unit_rows(rng, 3, 4), unit_rows(rng, 5, 4)
    hard = align(build_costs(z, x, AlignConfig(algorithm=algorithm)), algorithm).total_cost
    gaps = [abs(loss_drop_dtw(z, x, smooth_config(g, algorithm)) - hard) for g in (1.0, 0.1, 0.001)]
    assert gaps[-1] < 1e-2 and gaps[-1] <= gaps[0]


def test_drop_dtw_loss_identical_sequences():
    z = unit_rows(np.random.default_rng(4), 3, 4)
    gamma = 0.05
    value = loss_drop_dtw(z, z, smooth_config(gamma))
    # each smoothed cell sits within gamma * log(#candidates) of its hard min
    assert abs(value) <= gamma * np.log(4) * z.shape[0] ** 2


def test_drop_dtw_loss_single_cell_is_exact():
    # with infinite drops the match is the only finite candidate
    z, x = np.array([[1.0, 0.0]]), np.array([[0.6, 0.8]])
    for algorithm in ("one", "two"):
        cfg = AlignConfig(drop=DropCostPolicy.infinite(), algorithm=algorithm,
                          min_op=MinOperator("smooth", 1.0))
        assert loss_drop_dtw(z, x, cfg) == pytest.approx(0.4, abs=1e-12)


def test_drop_dtw_loss_rejects_baselines():
    with pytest.raises(ValueError):
        loss_drop_dtw(E[:2], E[:2], AlignConfig(algorithm="nw"))


def test_clustering_zero_and_sqrt_k():
    # sharp attention onto matching one-hot clips gives X_hat Z^T = I
    z = E[:3]
    assert loss_clustering(z, np.vstack([E[:3], E[:3]]), gamma=1e-3) == pytest.approx(0.0, abs=1e-9)
    # video orthogonal to every step gives X_hat Z^T = 0
    assert loss_clustering(z, E[4:7], gamma=0.1) == pytest.approx(np.sqrt(3))


def test_clustering_matches_two_step_evaluation():
    rng = np.random.default_rng(5)
    z, x = rng.standard_normal((3, 4)), rng.standard_normal((6, 4))
    logits = z @ x.T / 0.7
    w = np.exp(logits - logits.max(axis=1, keepdims=True))
    pooled = (w / w.sum(axis=1, keepdims=True)) @ x
    np.testing.assert_allclose(attention_pool(z, x, 0.7), pooled, atol=1e-12)
    expected = np.sqrt(np.sum((np.eye(3) - pooled @ z.T) ** 2))
    assert loss_clustering(z, x, 0.7) == pytest.approx(expected, abs=1e-9)
    with pytest.raises(NonPositiveGamma):
        loss_clustering(z, x, 0.0)


def test_margin_examples():
    assert loss_margin(2.0, 2.0) == 0.5
    assert loss_margin(0.1, 1.0, beta=0.5) == 0.0
    assert loss_margin(1.0, 0.2, beta=0.5) == pytest.approx(1.3)
    with pytest.raises(ValueError):
        loss_margin(0, 0, beta=-1)
