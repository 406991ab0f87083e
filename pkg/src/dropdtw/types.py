"""Shared domain types, validation and the alignment objective.

Indices are 0-based in storage. Everything user facing that prints indices
(the CLI, reprs meant for humans) converts to 1-based at the boundary.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

# Dropping is forbidden on a side whose drop costs are this value.
INF = np.inf


class AlignmentError(ValueError):
    """Base class for input contract violations."""


class DimensionMismatch(AlignmentError):
    pass


class EmptySequence(AlignmentError):
    pass


class NonFiniteValue(AlignmentError):
    pass


class ZeroNormElement(AlignmentError):
    pass


class NonPositiveGamma(AlignmentError):
    pass


class EmptyCandidateSet(AlignmentError):
    pass


class TracebackOnSmoothTables(AlignmentError):
    pass


class InstanceTooLarge(AlignmentError):
    pass


class AllColumnsDropped(AlignmentError):
    pass


class FewerRunsThanRequested(AlignmentError):
    """Raised by subsequence localization; ``runs`` holds what was found."""

    def __init__(self, msg, runs):
        super().__init__(msg)
        self.runs = runs


@dataclass(frozen=True)
class EmbeddedSequence:
    """An ordered sequence of ``N`` feature vectors of dimension ``d``.

    Parameters
    ----------
    elements : array_like, shape (N, d)
    labels : array_like of int, shape (N,), optional
        Per-element class id; only the synthetic harness fills this in.
    """

    elements: np.ndarray
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        arr = np.array(self.elements, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2:
            raise DimensionMismatch(f"elements must be 2-D, got ndim={arr.ndim}")
        if arr.shape[0] == 0:
            raise EmptySequence("sequence has no elements")
        if arr.shape[1] == 0:
            raise DimensionMismatch("elements have zero feature dimensions")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteValue("sequence contains NaN or infinite entries")
        arr.setflags(write=False)
        object.__setattr__(self, "elements", arr)
        if self.labels is not None:
            lab = np.array(self.labels, dtype=int).reshape(-1)
            if lab.shape[0] != arr.shape[0]:
                raise DimensionMismatch("labels length differs from sequence length")
            lab.setflags(write=False)
            object.__setattr__(self, "labels", lab)

    def __len__(self):
        return self.elements.shape[0]

    @property
    def dim(self) -> int:
        return self.elements.shape[1]

    def mean(self) -> np.ndarray:
        return self.elements.mean(axis=0)


def as_sequence(seq) -> EmbeddedSequence:
    if isinstance(seq, EmbeddedSequence):
        return seq
    return EmbeddedSequence(np.asarray(seq, dtype=float))


@dataclass(frozen=True)
class CostMatrix:
    """Match costs ``values`` (K x N) with row and column drop costs.

    A drop vector entry equal to :data:`INF` forbids dropping that element.
    ``drop_z=None`` / ``drop_x=None`` mean "forbidden on that whole side".
    """

    values: np.ndarray
    drop_z: Optional[np.ndarray] = None
    drop_x: Optional[np.ndarray] = None

    def __post_init__(self):
        c = np.array(self.values, dtype=float)
        if c.ndim != 2 or c.shape[0] == 0 or c.shape[1] == 0:
            raise DimensionMismatch(f"cost matrix must be non-empty 2-D, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise NonFiniteValue("match costs must be finite")
        k, n = c.shape
        dz = _drop_vector(self.drop_z, k, "drop_z")
        dx = _drop_vector(self.drop_x, n, "drop_x")
        for a in (c, dz, dx):
            a.setflags(write=False)
        object.__setattr__(self, "values", c)
        object.__setattr__(self, "drop_z", dz)
        object.__setattr__(self, "drop_x", dx)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    def scaled(self, lam: float) -> "CostMatrix":
        return CostMatrix(self.values * lam, self.drop_z * lam, self.drop_x * lam)

    def transposed(self) -> "CostMatrix":
        """Swap the roles of the two sequences."""
        return CostMatrix(self.values.T, self.drop_x, self.drop_z)


def _drop_vector(d, length, name):
    if d is None:
        return np.full(length, INF)
    d = np.array(d, dtype=float)
    if d.ndim == 0:
        d = np.full(length, float(d))
    if d.shape != (length,):
        raise DimensionMismatch(f"{name} must have length {length}, got {d.shape}")
    if np.any(np.isnan(d)) or np.any(d == -np.inf):
        raise NonFiniteValue(f"{name} contains NaN or -inf")
    if np.any(d < 0):
        raise AlignmentError(f"{name} must be nonnegative")
    return d


@dataclass(frozen=True)
class AlignmentResult:
    """Outcome of an aligner: cost, matched pairs and dropped indices (0-based)."""

    total_cost: float
    matches: Tuple[Tuple[int, int], ...]
    dropped_rows: Tuple[int, ...] = ()
    dropped_cols: Tuple[int, ...] = ()

    def matrix(self, k: int, n: int) -> np.ndarray:
        m = np.zeros((k, n), dtype=bool)
        for i, j in self.matches:
            m[i, j] = True
        return m


def make_result(cost, matches, k, n):
    """Build an :class:`AlignmentResult` whose drop sets are the unmatched indices."""
    matches = tuple(sorted(set((int(i), int(j)) for i, j in matches)))
    rows = {i for i, _ in matches}
    cols = {j for _, j in matches}
    dropped_rows = tuple(i for i in range(k) if i not in rows)
    dropped_cols = tuple(j for j in range(n) if j not in cols)
    return AlignmentResult(float(cost), matches, dropped_rows, dropped_cols)


@dataclass
class DpTables:
    """DP value tables of one aligner run, each of shape (K+1, N+1).

    ``tables`` maps names to arrays: ``D``, ``D+``, ``D-`` for the one-sided
    recursion and ``zx``, ``z-``, ``-x``, ``--``, ``D`` for the two-sided one.
    ``costs`` is kept so that traceback can replay the candidate sets.
    """

    variant: str
    tables: dict
    costs: CostMatrix
    smooth: bool = False

    @property
    def value(self) -> float:
        return float(self.tables["D"][-1, -1])

    def __getitem__(self, name):
        return self.tables[name]


def validate_pair(z, x) -> None:
    """Check that two sequences can be aligned; raise on the first problem.

    Raises
    ------
    EmptySequence, NonFiniteValue, DimensionMismatch
    """
    arrs = []
    for s in (z, x):
        a = s.elements if isinstance(s, EmbeddedSequence) else np.asarray(s, dtype=float)
        if a.ndim == 1:
            a = a[:, None]
        if a.shape[0] == 0:
            raise EmptySequence("sequence has no elements")
        if not np.all(np.isfinite(a)):
            raise NonFiniteValue("sequence contains NaN or infinite entries")
        arrs.append(a)
    if arrs[0].shape[1] != arrs[1].shape[1]:
        raise DimensionMismatch(
            f"feature dimensions differ: {arrs[0].shape[1]} vs {arrs[1].shape[1]}"
        )


def is_feasible_alignment(m, require_all_rows_matched: bool = False) -> bool:
    """Whether a binary K x N matrix is an order-preserving alignment.

    Every pair of set entries must be comparable componentwise (a chain).
    With ``require_all_rows_matched`` every row also needs a set entry.
    """
    m = np.asarray(m, dtype=bool)
    ii, jj = np.nonzero(m)
    # row-major order sorts by i then j; a chain then needs non-decreasing j
    if len(jj) > 1 and np.any(np.diff(jj) < 0):
        return False
    if require_all_rows_matched and not np.all(m.any(axis=1)):
        return False
    return True


def alignment_objective(costs: CostMatrix, m) -> float:
    """Matched costs plus drop costs of every empty row and column."""
    m = np.asarray(m, dtype=bool)
    total = float(costs.values[m].sum())
    empty_rows = ~m.any(axis=1)
    empty_cols = ~m.any(axis=0)
    if empty_rows.any():
        total += float(costs.drop_z[empty_rows].sum())
    if empty_cols.any():
        total += float(costs.drop_x[empty_cols].sum())
    return total
