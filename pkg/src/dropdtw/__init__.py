"""Drop-DTW: dynamic time warping that can drop outlier elements.

The aligners take a :class:`CostMatrix` holding match costs and per-element
drop costs. Hard-min tables are compiled with numba; smoothed variants and
their gradients run through a reference interpreter of the same recursion.
"""
from .alignment import (
    HARD,
    GradientResult,
    MinOperator,
    align,
    compute_tables,
    drop_dtw_one_sided,
    drop_dtw_smooth_grad,
    drop_dtw_two_sided,
    dtw,
    dtw_smooth_grad,
    smooth_min,
    soft_min,
    traceback,
)
from .baselines import greedy_drop_then_dtw, lcss, needleman_wunsch, otam_boundary_skip
from .costs import (
    DropCostPolicy,
    asymmetric_cost,
    build_drop_costs,
    cost_matrix,
    nearest_rank_percentile,
    symmetric_cost,
)
from .oracle import brute_force_cost, brute_force_dtw, enumerate_feasible
from .tasks import (
    AlignConfig,
    LabeledTimeline,
    StepLocalizationOutput,
    assign_step_labels,
    localize_subsequences,
    loss_clustering,
    loss_drop_dtw,
    loss_margin,
    metric_framewise_acc,
    metric_iou,
    metric_recall,
    recall_at_1,
    retrieval_score,
)
from .types import (
    INF,
    AlignmentError,
    AlignmentResult,
    CostMatrix,
    DpTables,
    EmbeddedSequence,
    alignment_objective,
    is_feasible_alignment,
)

__version__ = "0.1.0"
