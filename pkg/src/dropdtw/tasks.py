"""Downstream procedures on top of the aligners.

Retrieval scoring, subsequence localization, step-label assignment, the
loss values and the step-localization metrics. All indices are 0-based;
step labels are ``1..K`` with ``0`` for background.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np
from scipy.special import softmax

from . import baselines
from .alignment import HARD, MinOperator, align, compute_tables
from .costs import DropCostPolicy, build_drop_costs, cost_matrix
from .types import (
    AlignmentResult,
    CostMatrix,
    FewerRunsThanRequested,
    NonPositiveGamma,
    as_sequence,
    validate_pair,
)

ALGORITHMS = ("dtw", "one", "two", "greedy", "nw", "lcss", "otam")
_ALIASES = {"dropdtw1": "one", "dropdtw2": "two", "dropdtw": "two"}


@dataclass(frozen=True)
class AlignConfig:
    """Cost kind, drop policy, aligner and min operator for one comparison.

    ``algorithm`` is one of :data:`ALGORITHMS`; ``dropdtw1`` and ``dropdtw2``
    are accepted as aliases of ``one`` and ``two``.
    """

    cost: str = "sym"
    gamma: float = 0.1
    drop: DropCostPolicy = field(default_factory=lambda: DropCostPolicy.constant(0.3))
    algorithm: str = "two"
    min_op: MinOperator = HARD

    def __post_init__(self):
        algo = _ALIASES.get(self.algorithm, self.algorithm)
        if algo not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        object.__setattr__(self, "algorithm", algo)
        if self.cost not in ("sym", "asym"):
            raise ValueError(f"unknown cost kind {self.cost!r}")
        if not self.gamma > 0:
            raise NonPositiveGamma(f"gamma must be positive, got {self.gamma}")


def build_costs(z, x, config: AlignConfig = AlignConfig()) -> CostMatrix:
    """Match costs and drop costs of ``(z, x)`` under ``config``."""
    z, x = as_sequence(z), as_sequence(x)
    validate_pair(z, x)
    c = cost_matrix(z, x, config.cost, config.gamma)
    dz, dx = build_drop_costs(c, config.drop, z=z, x=x, one_sided=config.algorithm == "one")
    return CostMatrix(c, dz, dx)


def run_aligner(costs: CostMatrix, config: AlignConfig = AlignConfig()) -> AlignmentResult:
    """Dispatch ``costs`` to the configured aligner."""
    algo = config.algorithm
    if algo in ("dtw", "one", "two"):
        return align(costs, algo, config.min_op)
    if algo == "greedy":
        return baselines.greedy_drop_then_dtw(costs)
    if algo == "nw":
        return baselines.needleman_wunsch(costs)
    if algo == "lcss":
        return baselines.lcss(costs)[1]
    return baselines.otam_boundary_skip(costs)


# --------------------------------------------------------------------------
# retrieval


def retrieval_score(query, candidate, config: AlignConfig = AlignConfig()) -> float:
    """Alignment cost of ``query`` against ``candidate``; lower is more similar.

    No length normalization is applied.
    """
    costs = build_costs(query, candidate, config)
    if config.algorithm in ("dtw", "one", "two"):
        # the value alone needs no traceback
        return compute_tables(costs, config.algorithm, config.min_op).value
    return run_aligner(costs, config).total_cost


def score_matrix(queries, gallery, config: AlignConfig = AlignConfig()) -> np.ndarray:
    """Scores of every query (rows) against every gallery item (columns)."""
    return np.array([[retrieval_score(q, g, config) for g in gallery] for q in queries])


def recall_at_1_from_scores(scores, query_classes=None, gallery_classes=None) -> float:
    """Fraction of rows whose minimum-score column has the row's class.

    Ties go to the lowest gallery index. Classes default to the positions,
    i.e. query ``q`` is correct only against gallery item ``q``.
    """
    scores = np.asarray(scores, dtype=float)
    nq, ng = scores.shape
    qc = np.arange(nq) if query_classes is None else np.asarray(query_classes)
    gc = np.arange(ng) if gallery_classes is None else np.asarray(gallery_classes)
    best = np.argmin(scores, axis=1)
    return float(np.mean(gc[best] == qc))


def recall_at_1(queries, gallery, config: AlignConfig = AlignConfig(),
                query_classes=None, gallery_classes=None) -> float:
    """Recall@1 of ``queries`` against ``gallery`` under ``config``."""
    return recall_at_1_from_scores(score_matrix(queries, gallery, config),
                                   query_classes, gallery_classes)


# --------------------------------------------------------------------------
# subsequence localization


def matched_runs(result: AlignmentResult) -> List[Tuple[int, int]]:
    """Maximal runs of consecutive matched columns as inclusive intervals."""
    cols = sorted({j for _, j in result.matches})
    runs: List[List[int]] = []
    for j in cols:
        if runs and j == runs[-1][1] + 1:
            runs[-1][1] = j
        else:
            runs.append([j, j])
    return [(a, b) for a, b in runs]


def localize_subsequences(query, signal, n: int,
                          config: AlignConfig = AlignConfig()) -> List[Tuple[int, int]]:
    """Intervals of ``signal`` where ``n`` occurrences of ``query`` sit.

    Two-sided Drop-DTW aligns the pair and the ``n`` longest runs of
    consecutively matched signal elements are kept. Ties on length go to the
    earlier run. The intervals come back ordered by start.

    Raises
    ------
    FewerRunsThanRequested
        When fewer than ``n`` runs exist; ``err.runs`` holds all of them.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if config.algorithm != "two":
        config = AlignConfig(config.cost, config.gamma, config.drop, "two", HARD)
    result = align(build_costs(query, signal, config), "two")
    runs = matched_runs(result)
    if len(runs) < n:
        raise FewerRunsThanRequested(f"alignment has {len(runs)} runs, {n} requested", runs)
    longest = sorted(runs, key=lambda r: (r[0] - r[1], r[0]))[:n]
    return sorted(longest)


def interval_mask(intervals, length: int) -> np.ndarray:
    mask = np.zeros(length, dtype=bool)
    for a, b in intervals:
        mask[a : b + 1] = True
    return mask


def localization_scores(pred, truth, length: int) -> Tuple[float, float]:
    """Framewise accuracy and IoU of predicted against true interval sets."""
    p, t = interval_mask(pred, length), interval_mask(truth, length)
    union = (p | t).sum()
    iou = 1.0 if union == 0 else (p & t).sum() / union
    return float((p == t).mean()), float(iou)


# --------------------------------------------------------------------------
# step localization


def intervals_from_labels(labels, n_steps: int) -> List[List[Tuple[int, int]]]:
    """Maximal same-label runs per step; ``out[k - 1]`` lists step ``k``."""
    labels = np.asarray(labels)
    out: List[List[Tuple[int, int]]] = [[] for _ in range(n_steps)]
    start = 0
    for j in range(1, labels.size + 1):
        if j == labels.size or labels[j] != labels[start]:
            if labels[start] > 0:
                out[int(labels[start]) - 1].append((start, j - 1))
            start = j
    return out


@dataclass(frozen=True)
class LabeledTimeline:
    """Per-element step labels (0 = background, 1..K) with their intervals."""

    labels: np.ndarray
    n_steps: int
    intervals: List[List[Tuple[int, int]]] = None

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=int)
        if labels.ndim != 1:
            raise ValueError("labels must be one-dimensional")
        if labels.size and (labels.min() < 0 or labels.max() > self.n_steps):
            raise ValueError(f"labels must lie in 0..{self.n_steps}")
        object.__setattr__(self, "labels", labels)
        if self.intervals is None:
            object.__setattr__(self, "intervals", intervals_from_labels(labels, self.n_steps))

    @property
    def length(self) -> int:
        return self.labels.size

    @classmethod
    def from_intervals(cls, intervals: Sequence[Sequence[Tuple[int, int]]], length: int):
        """Build from ``intervals[k - 1]`` (inclusive ranges of step ``k``)."""
        labels = np.zeros(length, dtype=int)
        for k, spans in enumerate(intervals, start=1):
            for a, b in spans:
                if np.any(labels[a : b + 1]):
                    raise ValueError("intervals of distinct steps overlap")
                labels[a : b + 1] = k
        return cls(labels, len(intervals), [list(s) for s in intervals])


@dataclass(frozen=True)
class StepLocalizationOutput(LabeledTimeline):
    """Predicted labels; ``result`` is the alignment they came from."""

    result: AlignmentResult = None


def labels_from_alignment(result: AlignmentResult, c) -> np.ndarray:
    """Label matched columns by their cheapest matched row (1-based), others 0.

    Ties between rows go to the lower row.
    """
    c = np.asarray(c)
    labels = np.zeros(c.shape[1], dtype=int)
    best = np.full(c.shape[1], np.inf)
    for i, j in result.matches:
        if c[i, j] < best[j]:
            best[j] = c[i, j]
            labels[j] = i + 1
    return labels


def assign_step_labels(video, steps, gamma: float = 0.1, p: float = 30.0,
                       cost: str = "asym", algorithm: str = "one",
                       drop: DropCostPolicy = None) -> StepLocalizationOutput:
    """Label every clip of ``video`` with a step of ``steps`` or background.

    The asymmetric cost of steps (rows) against clips (columns) gets a
    ``p``-percentile drop cost on the clips, and one-sided Drop-DTW makes
    every step occur. A clip matched to several steps takes the cheapest.
    For comparisons, ``algorithm`` swaps in another aligner and ``drop``
    replaces the percentile policy.
    """
    steps, video = as_sequence(steps), as_sequence(video)
    drop = DropCostPolicy.percentile(p) if drop is None else drop
    config = AlignConfig(cost, gamma, drop, algorithm)
    costs = build_costs(steps, video, config)
    result = run_aligner(costs, config)
    labels = labels_from_alignment(result, costs.values)
    return StepLocalizationOutput(labels, len(steps), result=result)


def _labels(t) -> np.ndarray:
    return t.labels if isinstance(t, LabeledTimeline) else np.asarray(t, dtype=int)


def _check_same_length(pred, truth):
    p, t = _labels(pred), _labels(truth)
    if p.shape != t.shape:
        raise ValueError(f"length mismatch: {p.size} predicted vs {t.size} true labels")
    return p, t


def metric_recall(pred, truth: LabeledTimeline) -> float:
    """Fraction of steps with at least one predicted element inside their truth.

    Steps are ``1..truth.n_steps``.
    """
    p, t = _check_same_length(pred, truth)
    n_steps = truth.n_steps if isinstance(truth, LabeledTimeline) else int(t.max(initial=0))
    if n_steps == 0:
        raise ValueError("recall needs at least one step")
    hit = sum(bool(np.any((p == k) & (t == k))) for k in range(1, n_steps + 1))
    return hit / n_steps


def metric_framewise_acc(pred, truth) -> float:
    """Per-element label agreement, background included."""
    p, t = _check_same_length(pred, truth)
    return float(np.mean(p == t))


def metric_iou(pred, truth) -> float:
    """Summed per-step intersections over summed per-step unions.

    Background is excluded; returns 1.0 when both sums are zero.
    """
    p, t = _check_same_length(pred, truth)
    inter = union = 0
    for k in np.union1d(p[p > 0], t[t > 0]):
        pk, tk = p == k, t == k
        inter += int(np.sum(pk & tk))
        union += int(np.sum(pk | tk))
    return 1.0 if union == 0 else inter / union


# --------------------------------------------------------------------------
# losses


def loss_drop_dtw(z, x, config: AlignConfig = AlignConfig(min_op=MinOperator("smooth", 0.1))) -> float:
    """Smoothed Drop-DTW value of the pair under ``config``.

    The variant is ``config.algorithm`` (``one`` or ``two``) and the min is
    ``config.min_op``; a hard min yields the exact cost.
    """
    if config.algorithm not in ("one", "two"):
        raise ValueError("the Drop-DTW loss needs algorithm 'one' or 'two'")
    return compute_tables(build_costs(z, x, config), config.algorithm, config.min_op).value


def attention_pool(z, x, gamma: float = 0.1) -> np.ndarray:
    """``x_hat[i] = sum_j softmax(X z_i / gamma)_j x_j`` for every row of ``z``."""
    if not gamma > 0:
        raise NonPositiveGamma(f"gamma must be positive, got {gamma}")
    z, x = as_sequence(z), as_sequence(x)
    weights = softmax(z.elements @ x.elements.T / gamma, axis=1)
    return weights @ x.elements


def loss_clustering(z, x, gamma: float = 0.1) -> float:
    """Frobenius norm of ``I - X_hat Z^T`` with attention-pooled ``X_hat``."""
    z = as_sequence(z)
    pooled = attention_pool(z, x, gamma)
    return float(np.linalg.norm(np.eye(len(z)) - pooled @ z.elements.T))


def loss_margin(d_pos: float, d_neg: float, beta: float = 0.5) -> float:
    """Hinge ``max(d_pos - d_neg + beta, 0)``."""
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    return max(float(d_pos) - float(d_neg) + beta, 0.0)


__all__ = [
    "ALGORITHMS", "AlignConfig", "build_costs", "run_aligner", "retrieval_score",
    "score_matrix", "recall_at_1", "recall_at_1_from_scores", "matched_runs",
    "localize_subsequences", "interval_mask", "localization_scores",
    "intervals_from_labels", "LabeledTimeline", "StepLocalizationOutput",
    "labels_from_alignment", "assign_step_labels", "metric_recall",
    "metric_framewise_acc", "metric_iou", "loss_drop_dtw", "attention_pool",
    "loss_clustering", "loss_margin",
]
