"""
Aligning sequences that contain outliers
========================================

Two short sequences of unit vectors describe the same three-step process.
The second one has two foreign elements pushed into it. Plain DTW has to
match every element, so it pays for the outliers. Drop-DTW can drop them
instead, for a fixed price each.
"""

import numpy as np

from dropdtw import CostMatrix, align, dtw
from dropdtw.costs import symmetric_cost

rng = np.random.default_rng(0)


def unit(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


steps = unit(rng.standard_normal((3, 8)))
z = steps
x = np.vstack([steps[0], steps[0], unit(rng.standard_normal(8)), steps[1],
               steps[2], unit(rng.standard_normal(8)), steps[2]])
x = unit(x + 0.05 * rng.standard_normal(x.shape))

# %%
# Match costs are one minus cosine similarity. Columns 2 and 5 (0-based)
# are the outliers; every row is expensive there.

c = symmetric_cost(z, x)
np.set_printoptions(precision=2, suppress=True)
print(c)

# %%
# DTW matches every column, outliers included.

plain = dtw(c)
print("DTW cost     ", round(plain.total_cost, 3), "matches", plain.matches)

# %%
# Two-sided Drop-DTW with a constant drop cost of 0.3 per element skips the
# two outliers and keeps the clean correspondences.

costs = CostMatrix(c, drop_z=0.3, drop_x=0.3)
robust = align(costs, "two")
print("Drop-DTW cost", round(robust.total_cost, 3), "matches", robust.matches)
print("dropped columns", robust.dropped_cols)

# %%
# The one-sided variant never drops rows of ``z``: every step must be
# matched somewhere. Here it finds the same alignment.

one = align(costs, "one")
print("one-sided    ", round(one.total_cost, 3), "dropped columns", one.dropped_cols)

# %%
# Infinite drop costs switch dropping off and give back DTW exactly.

print("sentinel drops == DTW:", align(CostMatrix(c), "two").total_cost == plain.total_cost)
