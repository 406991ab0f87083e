"""Comparison aligners sharing the :class:`AlignmentResult` contract.

All of them read match costs and drop costs from a :class:`CostMatrix`;
drop costs act as gap penalties (Needleman-Wunsch), thresholds (greedy
drop) or boundary-skip charges (OTAM-style windowing).
"""
from __future__ import annotations

import numpy as np
from numba import njit

from ._kernels import dtw_table
from .alignment import dtw
from .types import INF, AlignmentResult, AllColumnsDropped, CostMatrix, make_result


def greedy_drop_then_dtw(costs: CostMatrix) -> AlignmentResult:
    """Drop every column whose cheapest match exceeds its drop cost, then DTW.

    Raises
    ------
    AllColumnsDropped
        If no column survives the threshold.
    """
    c, dx = costs.values, costs.drop_x
    keep = np.flatnonzero(~(c.min(axis=0) > dx))
    if keep.size == 0:
        raise AllColumnsDropped("every column costs more to match than to drop")
    inner = dtw(c[:, keep])
    matches = [(i, int(keep[j])) for i, j in inner.matches]
    dropped = np.setdiff1d(np.arange(c.shape[1]), keep)
    total = inner.total_cost + float(dx[dropped].sum())
    return make_result(total, matches, *c.shape)


@njit(cache=True)
def _nw_table(c, dz, dx):
    k, n = c.shape
    d = np.full((k + 1, n + 1), np.inf)
    d[0, 0] = 0.0
    for j in range(1, n + 1):
        d[0, j] = d[0, j - 1] + dx[j - 1]
    for i in range(1, k + 1):
        d[i, 0] = d[i - 1, 0] + dz[i - 1]
        for j in range(1, n + 1):
            best = d[i - 1, j - 1] + c[i - 1, j - 1]
            v = d[i - 1, j] + dz[i - 1]
            if v < best:
                best = v
            v = d[i, j - 1] + dx[j - 1]
            if v < best:
                best = v
            d[i, j] = best
    return d


def needleman_wunsch(costs: CostMatrix) -> AlignmentResult:
    """Global one-to-one alignment with per-element gap penalties.

    Gaps in ``z`` cost ``drop_z[i]`` and gaps in ``x`` cost ``drop_x[j]``.
    Ties prefer a match, then a row gap, then a column gap.
    """
    c = np.ascontiguousarray(costs.values)
    dz, dx = costs.drop_z, costs.drop_x
    d = _nw_table(c, np.ascontiguousarray(dz), np.ascontiguousarray(dx))
    i, j = c.shape
    matches = []
    while i > 0 and j > 0:
        cands = (
            d[i - 1, j - 1] + c[i - 1, j - 1],
            d[i - 1, j] + dz[i - 1],
            d[i, j - 1] + dx[j - 1],
        )
        move = int(np.argmin(cands))
        if move == 0:
            matches.append((i - 1, j - 1))
            i, j = i - 1, j - 1
        elif move == 1:
            i -= 1
        else:
            j -= 1
    return make_result(d[-1, -1], matches[::-1], *c.shape)


def lcss(costs: CostMatrix, epsilon: float = None):
    """Longest chain of admissible pairs ``C[i, j] < epsilon``.

    Parameters
    ----------
    costs : CostMatrix
    epsilon : float, optional
        Admissibility threshold. Defaults to the first finite column drop
        cost, i.e. the instance's (constant or percentile) drop cost.

    Returns
    -------
    length : int
    result : AlignmentResult
        One-to-one, order-preserving matches; ``total_cost = -length``.
    """
    c = costs.values
    if epsilon is None:
        finite = costs.drop_x[np.isfinite(costs.drop_x)]
        if finite.size == 0:
            raise ValueError("lcss needs epsilon when the drop costs are infinite")
        epsilon = float(finite[0])
    adm = c < epsilon
    k, n = c.shape
    L = np.zeros((k + 1, n + 1), dtype=int)
    for i in range(1, k + 1):
        for j in range(1, n + 1):
            if adm[i - 1, j - 1]:
                L[i, j] = L[i - 1, j - 1] + 1
            else:
                L[i, j] = max(L[i - 1, j], L[i, j - 1])
    i, j = k, n
    matches = []
    while i > 0 and j > 0:
        if adm[i - 1, j - 1] and L[i, j] == L[i - 1, j - 1] + 1:
            matches.append((i - 1, j - 1))
            i, j = i - 1, j - 1
        elif L[i - 1, j] >= L[i, j - 1]:
            i -= 1
        else:
            j -= 1
    length = int(L[k, n])
    return length, make_result(-length, matches[::-1], k, n)


def otam_boundary_skip(costs: CostMatrix, charge_boundary_drops: bool = False) -> AlignmentResult:
    """DTW on the best contiguous column window ``a..b``; outside columns skipped.

    Skipped boundary columns are free unless ``charge_boundary_drops``, in
    which case each pays its drop cost. Interior columns are always matched.
    Ties prefer the earliest start, then the earliest end.
    """
    c, dx = costs.values, costs.drop_x
    k, n = c.shape
    if charge_boundary_drops:
        if not np.all(np.isfinite(dx)):
            raise ValueError("charged boundary drops need finite drop_x")
        pen = dx
    else:
        pen = np.zeros(n)
    prefix = np.concatenate([[0.0], np.cumsum(pen)])
    best, best_win = INF, None
    for a in range(n):
        # one DTW table per start column serves every end column
        table = dtw_table(np.ascontiguousarray(c[:, a:]))
        for b in range(a, n):
            total = prefix[a] + table[k, b - a + 1] + (prefix[n] - prefix[b + 1])
            if total < best:
                best, best_win = total, (a, b)
    a, b = best_win
    inner = dtw(c[:, a : b + 1])
    matches = [(i, j + a) for i, j in inner.matches]
    return make_result(best, matches, k, n)
