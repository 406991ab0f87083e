"""
Step localization among interspersed outliers
=============================================

A video is a sequence of clips. Most clips belong to one of four ordered
steps; the rest are background. Some background clips look exactly like
the first step but appear out of order. Every aligner labels each clip
with a step or with background, and the labels are scored against the
construction.
"""

from dropdtw.bench import BASELINE_ALGORITHMS, outlier_step_instance, step_labels
from dropdtw.tasks import metric_framewise_acc, metric_iou

video, steps, truth = outlier_step_instance(seed=0)
print("truth    ", "".join(str(k) for k in truth.labels))

for algo in BASELINE_ALGORITHMS:
    pred = step_labels(video, steps, algo)
    print(f"{algo:<9}", "".join(str(k) for k in pred.labels),
          f" acc {metric_framewise_acc(pred, truth):.2f}  IoU {metric_iou(pred, truth):.2f}")

# %%
# DTW and OTAM must give a label to every clip inside their window. LCSS
# and Needleman-Wunsch match at most one clip per step. Greedy dropping
# removes clips that match no step well, but it keeps the out-of-order
# revisits. Drop-DTW drops both kinds because the order constraint makes
# the revisits expensive to match.
