"""DTW and Drop-DTW dynamic programs, smoothed variants and their gradients.

Three recursions are implemented:

* ``dtw``: classic warping path from (1, 1) to (K, N).
* ``one``: drops allowed only on the columns (``x`` side); every row of ``z``
  must be matched. Tables ``D+`` (ends in a match), ``D-`` (ends by dropping
  ``x_j``) and ``D`` (their min).
* ``two``: drops on both sides. Tables ``zx`` (z_i matched to x_j), ``z-``
  (x_j dropped, z_i matched earlier), ``-x`` (z_i dropped, x_j matched
  earlier), ``--`` (both dropped) and ``D`` (their min).

Hard-min tables come from compiled kernels. Smoothed tables, and all
gradients, come from a small interpreter over the candidate sets returned
by :func:`_cell_program`; traceback replays the same candidate sets, so the
tie-breaking order lives in one place.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .types import (
    INF,
    AlignmentResult,
    CostMatrix,
    DpTables,
    EmptyCandidateSet,
    NonPositiveGamma,
    TracebackOnSmoothTables,
    make_result,
)

VARIANTS = ("dtw", "one", "two")


@dataclass(frozen=True)
class MinOperator:
    """The min used inside the recursion.

    ``hard`` is the exact minimum. ``smooth`` is the softmax-weighted average
    ``x . softmax(-x / gamma)``; ``soft`` is ``-gamma * logsumexp(-x / gamma)``.
    """

    variant: str = "hard"
    gamma: float = 1.0

    def __post_init__(self):
        if self.variant not in ("hard", "smooth", "soft"):
            raise ValueError(f"unknown min operator {self.variant!r}")
        if self.variant != "hard" and not self.gamma > 0:
            raise NonPositiveGamma(f"gamma must be positive, got {self.gamma}")

    @classmethod
    def parse(cls, text: str) -> "MinOperator":
        """Parse ``hard``, ``smooth:G`` or ``soft:G``."""
        name, _, g = text.partition(":")
        if name == "hard":
            return cls("hard")
        if not g:
            raise ValueError(f"min operator {text!r} needs a gamma, e.g. {name}:0.1")
        return cls(name, float(g))

    @property
    def is_hard(self) -> bool:
        return self.variant == "hard"


HARD = MinOperator("hard")


@dataclass
class GradientResult:
    value: float
    grad_c: np.ndarray
    grad_drop_z: np.ndarray
    grad_drop_x: np.ndarray


# --------------------------------------------------------------------------
# min operators on candidate lists


def _finite(xs):
    return [x for x in xs if x != INF]


def smooth_min(x, gamma: float) -> float:
    """Softmax-weighted average ``sum_k x_k exp(-x_k/gamma) / sum_j exp(-x_j/gamma)``.

    Infinite entries are ignored.

    Raises
    ------
    NonPositiveGamma
    EmptyCandidateSet
        If every entry is infinite.
    """
    if not gamma > 0:
        raise NonPositiveGamma(f"gamma must be positive, got {gamma}")
    xs = _finite(np.asarray(x, dtype=float).ravel().tolist())
    if not xs:
        raise EmptyCandidateSet("no finite candidates")
    return _smooth_min_grad(xs, gamma)[0]


def soft_min(x, gamma: float) -> float:
    """``-gamma * log(sum exp(-x / gamma))`` over the finite entries."""
    if not gamma > 0:
        raise NonPositiveGamma(f"gamma must be positive, got {gamma}")
    xs = _finite(np.asarray(x, dtype=float).ravel().tolist())
    if not xs:
        raise EmptyCandidateSet("no finite candidates")
    return _soft_min_grad(xs, gamma)[0]


def _softmax_neg(xs, gamma):
    lo = min(xs)
    e = [math.exp(-(x - lo) / gamma) for x in xs]
    s = sum(e)
    return [v / s for v in e], lo, s


def _smooth_min_grad(xs, gamma):
    p, _, _ = _softmax_neg(xs, gamma)
    v = sum(pk * xk for pk, xk in zip(p, xs))
    # d/dx_k of x . softmax(-x/gamma)
    g = [pk * (1.0 - (xk - v) / gamma) for pk, xk in zip(p, xs)]
    return v, g


def _soft_min_grad(xs, gamma):
    p, lo, s = _softmax_neg(xs, gamma)
    return lo - gamma * math.log(s), p


def _hard_min_grad(xs, gamma=None):
    best = 0
    for k in range(1, len(xs)):
        if xs[k] < xs[best]:
            best = k
    g = [0.0] * len(xs)
    g[best] = 1.0
    return xs[best], g


_OPS = {"hard": _hard_min_grad, "smooth": _smooth_min_grad, "soft": _soft_min_grad}


def _apply_min(op: MinOperator, xs):
    """Value and local gradient over the candidates; infinities get weight 0."""
    idx = [k for k, x in enumerate(xs) if x != INF]
    if not idx:
        return INF, [0.0] * len(xs)
    v, g_fin = _OPS[op.variant]([xs[k] for k in idx], op.gamma)
    g = [0.0] * len(xs)
    for k, gk in zip(idx, g_fin):
        g[k] = gk
    return v, g


# --------------------------------------------------------------------------
# recursion definitions
#
# A candidate is (source table, i, j, added terms). Added terms are
# ("c", i, j), ("dx", j) or ("dz", i) with 0-based cost indices. Candidate
# order is the tie-breaking order of the hard min.


@lru_cache(maxsize=1 << 16)
def _cell_program(variant, i, j):
    c = (("c", i - 1, j - 1),)
    dx = (("dx", j - 1),)
    dz = (("dz", i - 1),)
    if variant == "dtw":
        return (
            ("D", (("D", i - 1, j - 1, c), ("D", i, j - 1, c), ("D", i - 1, j, c))),
        )
    if variant == "one":
        return (
            ("D+", (("D", i - 1, j - 1, c), ("D", i, j - 1, c), ("D+", i - 1, j, c))),
            ("D-", (("D", i, j - 1, dx),)),
            # match preferred over drop
            ("D", (("D+", i, j, ()), ("D-", i, j, ()))),
        )
    diag = tuple((t, i - 1, j - 1, c) for t in ("zx", "z-", "-x", "--"))
    left_with_z = (("zx", i, j - 1), ("z-", i, j - 1))
    top_with_x = (("zx", i - 1, j), ("-x", i - 1, j))
    left_without_z = (("-x", i, j - 1), ("--", i, j - 1))
    top_without_x = (("z-", i - 1, j), ("--", i - 1, j))
    return (
        ("zx", diag + tuple(s + (c,) for s in left_with_z) + tuple(s + (c,) for s in top_with_x)),
        ("z-", tuple(s + (dx,) for s in left_with_z)),
        ("-x", tuple(s + (dz,) for s in top_with_x)),
        ("--", tuple(s + (dz,) for s in top_without_x) + tuple(s + (dx,) for s in left_without_z)),
        ("D", tuple((t, i, j, ()) for t in ("zx", "z-", "-x", "--"))),
    )


_TABLE_NAMES = {
    "dtw": ("D",),
    "one": ("D+", "D-", "D"),
    "two": ("zx", "z-", "-x", "--", "D"),
}

# Tables whose first row / first column are cumulative drop costs.
_ROW0_DX = {"dtw": (), "one": ("D-", "D"), "two": ("z-", "--", "D")}
_COL0_DZ = {"dtw": (), "one": (), "two": ("-x", "--", "D")}


def _init_tables(variant, costs: CostMatrix):
    k, n = costs.shape
    tabs = {}
    for name in _TABLE_NAMES[variant]:
        t = np.full((k + 1, n + 1), INF)
        t[0, 0] = 0.0
        tabs[name] = t
    cdx = np.cumsum(costs.drop_x)
    cdz = np.cumsum(costs.drop_z)
    for name in _ROW0_DX[variant]:
        tabs[name][0, 1:] = cdx
    for name in _COL0_DZ[variant]:
        tabs[name][1:, 0] = cdz
    return tabs


def _term_value(costs, term):
    if term[0] == "c":
        return costs.values[term[1], term[2]]
    if term[0] == "dx":
        return costs.drop_x[term[1]]
    return costs.drop_z[term[1]]


def _candidate_value(tabs, costs, cand):
    src, si, sj, terms = cand
    v = tabs[src][si, sj]
    for t in terms:
        v = v + _term_value(costs, t)
    return float(v)


def _run_program(variant, costs: CostMatrix, op: MinOperator, record=False):
    """Fill all tables with the interpreter; optionally keep local gradients."""
    costs = _effective_costs(variant, costs)
    k, n = costs.shape
    tabs = _init_tables(variant, costs)
    tape = [] if record else None
    for i in range(1, k + 1):
        for j in range(1, n + 1):
            for target, cands in _cell_program(variant, i, j):
                xs = [_candidate_value(tabs, costs, cand) for cand in cands]
                v, g = _apply_min(op, xs)
                tabs[target][i, j] = v
                if record:
                    tape.append((target, i, j, cands, g))
    return tabs, tape, costs


def _effective_costs(variant, costs: CostMatrix) -> CostMatrix:
    if variant == "dtw":
        return CostMatrix(costs.values)
    if variant == "one":
        return CostMatrix(costs.values, None, costs.drop_x)
    return costs


def _backward(variant, tabs, tape, costs):
    k, n = costs.shape
    adj = {name: np.zeros_like(t) for name, t in tabs.items()}
    adj["D"][k, n] = 1.0
    grad_c = np.zeros((k, n))
    grad_dz = np.zeros(k)
    grad_dx = np.zeros(n)
    sinks = {"c": grad_c, "dx": grad_dx, "dz": grad_dz}
    for target, i, j, cands, g in reversed(tape):
        a = adj[target][i, j]
        if a == 0.0:
            continue
        for (src, si, sj, terms), gk in zip(cands, g):
            if gk == 0.0:
                continue
            w = a * gk
            adj[src][si, sj] += w
            for t in terms:
                sinks[t[0]][t[1:]] += w
    # first row / column hold cumulative drop costs
    for name in _ROW0_DX[variant]:
        row = adj[name][0, 1:]
        grad_dx += np.cumsum(row[::-1])[::-1]
    for name in _COL0_DZ[variant]:
        col = adj[name][1:, 0]
        grad_dz += np.cumsum(col[::-1])[::-1]
    return grad_c, grad_dz, grad_dx


def _hard_tables(variant, costs: CostMatrix):
    c = np.ascontiguousarray(costs.values)
    if variant == "dtw":
        return {"D": _kernels.dtw_table(c)}
    if variant == "one":
        d, dp, dm = _kernels.one_sided_tables(c, np.ascontiguousarray(costs.drop_x))
        return {"D+": dp, "D-": dm, "D": d}
    zx, zm, mx, mm, d = _kernels.two_sided_tables(
        c, np.ascontiguousarray(costs.drop_z), np.ascontiguousarray(costs.drop_x)
    )
    return {"zx": zx, "z-": zm, "-x": mx, "--": mm, "D": d}


def compute_tables(costs: CostMatrix, variant: str, min_op: MinOperator = HARD) -> DpTables:
    """Fill the DP tables of ``variant`` (``"dtw"``, ``"one"`` or ``"two"``)."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    costs = _effective_costs(variant, costs)
    if min_op.is_hard:
        tabs = _hard_tables(variant, costs)
    else:
        tabs, _, _ = _run_program(variant, costs, min_op)
    return DpTables(variant, tabs, costs, smooth=not min_op.is_hard)


# --------------------------------------------------------------------------
# traceback


def traceback(tables: DpTables, variant: str = None) -> AlignmentResult:
    """Recover one optimal alignment from hard-min tables.

    Ties resolve in candidate order: match before drop; diagonal, then left,
    then up; and ``zx``, ``z-``, ``-x``, ``--`` when combining the two-sided
    tables.

    Raises
    ------
    TracebackOnSmoothTables
        Smoothed tables carry no discrete path; rerun with the hard min.
    """
    if tables.smooth:
        raise TracebackOnSmoothTables("traceback needs tables from a hard-min run")
    variant = variant or tables.variant
    tabs, costs = tables.tables, tables.costs
    k, n = costs.shape
    matches = []
    name, i, j = "D", k, n
    while i > 0 and j > 0:
        program = dict(_cell_program(variant, i, j))
        cands = program[name]
        xs = [_candidate_value(tabs, costs, cand) for cand in cands]
        _, g = _hard_min_grad(xs)
        src, si, sj, _terms = cands[g.index(1.0)]
        if name in ("zx", "D+") or (variant == "dtw" and name == "D"):
            matches.append((i - 1, j - 1))
        name, i, j = src, si, sj
    return make_result(tables.value, matches[::-1], k, n)


# --------------------------------------------------------------------------
# public aligners


def _align(variant, costs, min_op):
    tables = compute_tables(costs, variant, HARD)
    result = traceback(tables)
    if min_op.is_hard:
        return result, tables
    smooth = compute_tables(costs, variant, min_op)
    return (
        AlignmentResult(smooth.value, result.matches, result.dropped_rows, result.dropped_cols),
        smooth,
    )


def dtw(c, min_op: MinOperator = HARD) -> AlignmentResult:
    """Classic DTW over a K x N cost matrix.

    With a smoothed ``min_op`` the returned ``total_cost`` is the smoothed
    value; the path is still the hard optimum.
    """
    costs = c if isinstance(c, CostMatrix) else CostMatrix(c)
    return _align("dtw", costs, min_op)[0]


def drop_dtw_one_sided(costs: CostMatrix, min_op: MinOperator = HARD):
    """Drop-DTW where only columns (elements of ``x``) may be dropped.

    ``costs.drop_z`` is ignored: every row is matched to at least one column.

    Returns
    -------
    result : AlignmentResult
    tables : DpTables
        Tables ``D``, ``D+``, ``D-``. Smoothed when ``min_op`` is not hard,
        in which case ``result.total_cost`` is the smoothed value and the
        alignment is the hard optimum.
    """
    return _align("one", costs, min_op)


def drop_dtw_two_sided(costs: CostMatrix, min_op: MinOperator = HARD):
    """Drop-DTW where rows and columns may both be dropped.

    Entries of :data:`INF` in a drop vector forbid dropping that element.
    Returns ``(result, tables)`` like :func:`drop_dtw_one_sided`.
    """
    return _align("two", costs, min_op)


def drop_dtw_smooth_grad(costs: CostMatrix, gamma: float, two_sided: bool = True,
                         min_variant: str = "smooth") -> GradientResult:
    """Smoothed Drop-DTW value and its gradient w.r.t. match and drop costs.

    Every min of the recursion, including the final table combination, is
    replaced by the smoothed operator. Gradients are accumulated in reverse
    from the terminal cell; cells that do not feed it get zero.
    """
    if not gamma > 0:
        raise NonPositiveGamma(f"gamma must be positive, got {gamma}")
    variant = "two" if two_sided else "one"
    tabs, tape, eff = _run_program(variant, costs, MinOperator(min_variant, gamma), record=True)
    gc, gdz, gdx = _backward(variant, tabs, tape, eff)
    return GradientResult(float(tabs["D"][-1, -1]), gc, gdz, gdx)


def dtw_smooth_grad(c, gamma: float, min_variant: str = "smooth") -> GradientResult:
    """Smoothed DTW value and its gradient w.r.t. the cost matrix."""
    costs = c if isinstance(c, CostMatrix) else CostMatrix(c)
    tabs, tape, eff = _run_program("dtw", costs, MinOperator(min_variant, gamma), record=True)
    gc, gdz, gdx = _backward("dtw", tabs, tape, eff)
    return GradientResult(float(tabs["D"][-1, -1]), gc, gdz, gdx)


def align(costs: CostMatrix, algorithm: str = "two", min_op: MinOperator = HARD) -> AlignmentResult:
    """Run ``dtw``, ``one`` or ``two`` and return only the result."""
    return _align(algorithm, costs, min_op)[0]
