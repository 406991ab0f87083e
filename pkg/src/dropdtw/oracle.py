"""Exhaustive reference solvers used as ground truth in differential tests.

Exponential by design; sizes are capped.
"""
from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .types import CostMatrix, InstanceTooLarge, is_feasible_alignment

MAX_CELLS = 25
MAX_DTW_SIDE = 6


def _check_size(k, n):
    if k < 1 or n < 1:
        raise ValueError("k and n must be positive")
    if k * n > MAX_CELLS:
        raise InstanceTooLarge(f"{k}x{n} exceeds the enumeration bound of {MAX_CELLS} cells")


@lru_cache(maxsize=None)
def _chains(k, n):
    """All chains of grid cells under the componentwise order, as tuples."""
    cells = [(i, j) for i in range(k) for j in range(n)]
    out = [()]

    def extend(chain):
        i0, j0 = chain[-1]
        for i, j in cells:
            if i >= i0 and j >= j0 and (i, j) != (i0, j0):
                nxt = chain + ((i, j),)
                out.append(nxt)
                extend(nxt)

    for cell in cells:
        out.append((cell,))
        extend((cell,))
    return tuple(out)


@lru_cache(maxsize=None)
def _feasible_stack(k, n, require_all_rows):
    masks = []
    for chain in _chains(k, n):
        m = np.zeros((k, n), dtype=bool)
        for cell in chain:
            m[cell] = True
        if require_all_rows and not m.any(axis=1).all():
            continue
        masks.append(m)
    stack = np.array(masks, dtype=bool).reshape(len(masks), k, n)
    stack.setflags(write=False)
    return stack


def enumerate_feasible(k: int, n: int, require_all_rows: bool = False):
    """Yield every feasible K x N alignment matrix exactly once.

    Chains are generated directly instead of filtering all ``2**(k*n)``
    binary matrices; :func:`enumerate_feasible_by_filter` is the slow
    independent route.

    Raises
    ------
    InstanceTooLarge
        If ``k * n > 25``.
    """
    _check_size(k, n)
    for m in _feasible_stack(k, n, require_all_rows):
        yield m.copy()


def enumerate_feasible_by_filter(k: int, n: int, require_all_rows: bool = False):
    """Filter all binary matrices through the feasibility predicate."""
    if k * n > 16:
        raise InstanceTooLarge("filtering enumerator is limited to 16 cells")
    for bits in itertools.product((False, True), repeat=k * n):
        m = np.array(bits, dtype=bool).reshape(k, n)
        if is_feasible_alignment(m, require_all_rows):
            yield m


def brute_force_cost(costs: CostMatrix, require_all_rows: bool = False):
    """Minimum of the drop-aware objective over every feasible alignment.

    Infinite drop costs make the corresponding empty rows or columns
    infeasible.

    Returns
    -------
    best : float
    minimizers : list of np.ndarray
        All boolean alignment matrices reaching ``best`` (within 1e-12).
    """
    k, n = costs.shape
    _check_size(k, n)
    stack = _feasible_stack(k, n, require_all_rows)
    matched = np.where(stack, costs.values[None], 0.0).sum(axis=(1, 2))
    empty_rows = ~stack.any(axis=2)
    empty_cols = ~stack.any(axis=1)
    row_pen = np.where(empty_rows, costs.drop_z[None], 0.0).sum(axis=1)
    col_pen = np.where(empty_cols, costs.drop_x[None], 0.0).sum(axis=1)
    total = matched + row_pen + col_pen
    best = float(total.min())
    arg = np.flatnonzero(total <= best + 1e-12)
    return best, [stack[a].copy() for a in arg]


def brute_force_dtw(c) -> float:
    """Minimum cost over all warping paths from (0, 0) to (K-1, N-1)."""
    c = np.asarray(c, dtype=float)
    k, n = c.shape
    if k > MAX_DTW_SIDE or n > MAX_DTW_SIDE:
        raise InstanceTooLarge(f"brute-force DTW is limited to {MAX_DTW_SIDE}x{MAX_DTW_SIDE}")

    def paths(i, j):
        if (i, j) == (k - 1, n - 1):
            yield c[i, j]
            return
        for di, dj in ((1, 1), (0, 1), (1, 0)):
            if i + di < k and j + dj < n:
                for rest in paths(i + di, j + dj):
                    yield c[i, j] + rest

    return float(min(paths(0, 0)))
