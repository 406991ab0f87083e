"""Benchmark suites on synthetic data.

* ``retrieval_noise``: Recall@1 of DTW and Drop-DTW on the 80-class
  trajectory gallery as the query contamination grows.
* ``localization``: accuracy and IoU of subsequence localization with two
  target occurrences among five to seven clips.
* ``inference_baselines``: step localization with every aligner on videos
  with interspersed outlier clips.

Each suite returns rows ``{"suite", "setting", "algorithm", "metric",
"value", "stderr", "trials"}`` ready for CSV output.
"""
from __future__ import annotations

from typing import Dict, List, Sequence

import numpy as np

from .costs import DropCostPolicy
from .synth import (
    SynthConfig,
    TrajectoryClass,
    all_classes,
    build_localization_instance,
    retrieval_dataset,
)
from .tasks import (
    AlignConfig,
    LabeledTimeline,
    assign_step_labels,
    localization_scores,
    localize_subsequences,
    metric_framewise_acc,
    metric_iou,
    recall_at_1_from_scores,
    score_matrix,
)
from .types import EmbeddedSequence, FewerRunsThanRequested

RETRIEVAL_RATES = tuple(round(0.1 * r, 1) for r in range(8))
# longer query windows than the generator default so that clean queries are
# unambiguous for plain DTW too
RETRIEVAL_FRACTIONS = (0.5, 0.9)
RETRIEVAL_DROP = 0.3
LOCALIZATION_DROP = 0.3
BASELINE_ALGORITHMS = ("dtw", "otam", "lcss", "nw", "greedy", "dropdtw")

_LOC_KEY = 5


def _row(suite, setting, algorithm, metric, value, stderr, trials) -> Dict:
    return {
        "suite": suite,
        "setting": setting,
        "algorithm": algorithm,
        "metric": metric,
        "value": float(value),
        "stderr": float(stderr),
        "trials": int(trials),
    }


def _mean_se(values):
    v = np.asarray(values, dtype=float)
    se = v.std(ddof=1) / np.sqrt(v.size) if v.size > 1 else 0.0
    return float(v.mean()), float(se)


# --------------------------------------------------------------------------
# retrieval


def retrieval_recall(noise_rate: float, seed: int = 0, drop: float = RETRIEVAL_DROP,
                     fractions=RETRIEVAL_FRACTIONS) -> Dict[str, float]:
    """Recall@1 of ``dtw`` and ``dropdtw`` for one contamination level."""
    config = SynthConfig(seed=seed, noise_rate=noise_rate, part_fraction_range=tuple(fractions))
    queries, gallery, classes = retrieval_dataset(config)
    out = {}
    for name, algo in (("dtw", "dtw"), ("dropdtw", "two")):
        align_config = AlignConfig("sym", drop=DropCostPolicy.constant(drop), algorithm=algo)
        scores = score_matrix(queries, gallery, align_config)
        out[name] = recall_at_1_from_scores(scores, classes, classes)
    return out


def retrieval_noise_sweep(rates: Sequence[float] = RETRIEVAL_RATES,
                          seeds: Sequence[int] = (0,), drop: float = RETRIEVAL_DROP) -> List[Dict]:
    rows = []
    for rate in rates:
        runs = [retrieval_recall(rate, seed, drop) for seed in seeds]
        for algo in ("dtw", "dropdtw"):
            mean, se = _mean_se([r[algo] for r in runs])
            rows.append(_row("retrieval_noise", rate, algo, "recall_at_1", mean, se, len(runs)))
    return rows


# --------------------------------------------------------------------------
# subsequence localization


def localization_instance(instance: int, seed: int = 0, n: int = 2, m_range=(5, 7)):
    """Draw the target class and clip count of ``instance``, then build it."""
    rng = np.random.default_rng([seed, _LOC_KEY, instance])
    target = TrajectoryClass.from_id(int(rng.integers(len(all_classes()))))
    m = int(rng.integers(m_range[0], m_range[1] + 1))
    return build_localization_instance(target, n, m, SynthConfig(seed=seed), instance=instance)


def localization_trial(instance: int, seed: int = 0, n: int = 2, m_range=(5, 7),
                       drop: float = LOCALIZATION_DROP):
    """Accuracy and IoU of one randomly drawn localization instance."""
    inst = localization_instance(instance, seed, n, m_range)
    config = AlignConfig("sym", drop=DropCostPolicy.constant(drop), algorithm="two")
    try:
        pred = localize_subsequences(inst.query, inst.signal, n, config)
    except FewerRunsThanRequested as err:
        pred = err.runs
    return localization_scores(pred, inst.truth, len(inst.signal))


def localization_benchmark(n_instances: int = 1000, seed: int = 0,
                           drop: float = LOCALIZATION_DROP) -> List[Dict]:
    scores = np.array([localization_trial(i, seed, drop=drop) for i in range(n_instances)])
    rows = []
    for col, metric in enumerate(("accuracy", "iou")):
        mean, se = _mean_se(scores[:, col])
        rows.append(_row("localization", "n=2,m=5..7", "dropdtw", metric, mean, se, n_instances))
    return rows


# --------------------------------------------------------------------------
# step localization with interspersed outliers


def outlier_step_instance(seed: int, n_steps: int = 4, seg_range=(6, 10), outlier_rate: float = 0.3,
                          n_revisits: int = 2, dim: int = 32, noise: float = 0.05):
    """A video of ordered step segments with interspersed outlier clips.

    Step embeddings are random unit vectors. Clips of step ``k`` are noisy
    copies of it. Generic outliers are fresh random directions, so their
    match cost to every step is near 1. Revisits are noisy copies of the
    first step placed inside the last step's segment: they look like a step
    but break the order, so their truth label is background too.

    Returns
    -------
    video, steps : EmbeddedSequence
    truth : LabeledTimeline
    """
    rng = np.random.default_rng([seed, 6])

    def unit(v):
        return v / np.linalg.norm(v, axis=-1, keepdims=True)

    steps = unit(rng.standard_normal((n_steps, dim)))
    clips, labels = [], []
    for k in range(n_steps):
        seg = int(rng.integers(seg_range[0], seg_range[1] + 1))
        for _ in range(seg):
            clips.append(unit(steps[k] + noise * rng.standard_normal(dim)))
            labels.append(k + 1)
    clips, labels = np.array(clips), np.array(labels)
    last = np.flatnonzero(labels == n_steps)
    spots = np.sort(rng.choice(last[1:-1], size=min(n_revisits, last.size - 2), replace=False))
    for s in spots[::-1]:
        clips = np.insert(clips, s, unit(steps[0] + noise * rng.standard_normal(dim)), axis=0)
        labels = np.insert(labels, s, 0)
    n_out = int(round(outlier_rate * len(labels) / (1 - outlier_rate)))
    for _ in range(n_out):
        s = int(rng.integers(0, len(labels) + 1))
        clips = np.insert(clips, s, unit(rng.standard_normal(dim)), axis=0)
        labels = np.insert(labels, s, 0)
    return EmbeddedSequence(clips), EmbeddedSequence(steps), LabeledTimeline(labels, n_steps)


def step_labels(video, steps, algorithm: str, drop: float = 0.5):
    """Step labels of ``video`` from ``algorithm`` with symmetric costs."""
    algo = "one" if algorithm == "dropdtw" else algorithm
    return assign_step_labels(video, steps, cost="sym", algorithm=algo,
                              drop=DropCostPolicy.constant(drop))


def inference_baselines(n_instances: int = 100, seed: int = 0, drop: float = 0.5) -> List[Dict]:
    """Framewise accuracy and IoU of every aligner on :func:`outlier_step_instance` videos."""
    scores = {a: [] for a in BASELINE_ALGORITHMS}
    for i in range(n_instances):
        video, steps, truth = outlier_step_instance(seed * 100003 + i)
        for algo in BASELINE_ALGORITHMS:
            pred = step_labels(video, steps, algo, drop)
            scores[algo].append((metric_framewise_acc(pred, truth), metric_iou(pred, truth)))
    rows = []
    for algo in BASELINE_ALGORITHMS:
        arr = np.array(scores[algo])
        for col, metric in enumerate(("accuracy", "iou")):
            mean, se = _mean_se(arr[:, col])
            rows.append(_row("inference_baselines", "outliers=0.3", algo, metric, mean, se, n_instances))
    return rows


SUITES = {
    "retrieval_noise": retrieval_noise_sweep,
    "localization": localization_benchmark,
    "inference_baselines": inference_baselines,
}
