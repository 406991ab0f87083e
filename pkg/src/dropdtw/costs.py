"""Match-cost matrices and drop-cost vectors."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from .types import (
    INF,
    AlignmentError,
    EmbeddedSequence,
    NonPositiveGamma,
    ZeroNormElement,
    as_sequence,
    validate_pair,
)

_NORM_EPS = 1e-12
_DEDUPE_TOL = 1e-12


def symmetric_cost(z, x) -> np.ndarray:
    """One minus the cosine similarity between every ``z_i`` and ``x_j``.

    Returns
    -------
    np.ndarray, shape (K, N), entries in [0, 2]
    """
    z, x = as_sequence(z), as_sequence(x)
    validate_pair(z, x)
    zn = np.linalg.norm(z.elements, axis=1)
    xn = np.linalg.norm(x.elements, axis=1)
    if np.any(zn < _NORM_EPS) or np.any(xn < _NORM_EPS):
        raise ZeroNormElement("cosine cost is undefined for zero-norm elements")
    cos = (z.elements / zn[:, None]) @ (x.elements / xn[:, None]).T
    return np.clip(1.0 - cos, 0.0, 2.0)


def unique_rows(a: np.ndarray, tol: float = _DEDUPE_TOL) -> np.ndarray:
    """Rows of ``a`` with near-exact duplicates removed (first occurrence kept)."""
    kept = []
    for row in a:
        if not any(np.all(np.abs(row - k) <= tol) for k in kept):
            kept.append(row)
    return np.array(kept)


def asymmetric_cost(z, x, gamma: float = 0.1, unique_denominator: bool = True) -> np.ndarray:
    """Negative log of the column-wise softmax of ``z_i . x_j / gamma``.

    Each column ``j`` is a distribution over the rows of ``z``. With
    ``unique_denominator`` the normaliser sums over distinct rows of ``z``
    only, so repeated steps do not dilute each other.
    """
    z, x = as_sequence(z), as_sequence(x)
    validate_pair(z, x)
    if not gamma > 0:
        raise NonPositiveGamma(f"gamma must be positive, got {gamma}")
    logits = z.elements @ x.elements.T / gamma
    basis = unique_rows(z.elements) if unique_denominator else z.elements
    log_norm = logsumexp(basis @ x.elements.T / gamma, axis=0)
    return np.maximum(log_norm[None, :] - logits, 0.0)


@dataclass(frozen=True)
class DropCostPolicy:
    """How to derive drop costs for an instance.

    Use the constructors :meth:`constant`, :meth:`percentile`,
    :meth:`parameterized` and :meth:`infinite` rather than the raw fields.
    """

    variant: str
    s: float = 0.0
    p: float = 50.0
    weights_x: Optional[np.ndarray] = None
    weights_z: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.variant not in ("constant", "percentile", "parameterized", "infinite"):
            raise AlignmentError(f"unknown drop policy {self.variant!r}")
        if self.variant == "constant" and not (self.s >= 0 and math.isfinite(self.s)):
            raise AlignmentError(f"constant drop cost must be finite and >= 0, got {self.s}")
        if self.variant == "percentile" and not (0 <= self.p <= 100):
            raise AlignmentError(f"percentile must lie in [0, 100], got {self.p}")
        if self.variant == "parameterized":
            if self.weights_x is None or self.weights_z is None:
                raise AlignmentError("parameterized drop costs need weights_x and weights_z")
            wx, wz = np.asarray(self.weights_x, float), np.asarray(self.weights_z, float)
            if wx.ndim != 2 or wx.shape[0] != wx.shape[1] or wz.shape != wx.shape:
                raise AlignmentError("drop-cost weights must be square d x d matrices")
            object.__setattr__(self, "weights_x", wx)
            object.__setattr__(self, "weights_z", wz)

    @classmethod
    def constant(cls, s):
        return cls("constant", s=float(s))

    @classmethod
    def percentile(cls, p):
        return cls("percentile", p=float(p))

    @classmethod
    def parameterized(cls, weights_x, weights_z):
        return cls("parameterized", weights_x=weights_x, weights_z=weights_z)

    @classmethod
    def infinite(cls):
        return cls("infinite")


def nearest_rank_percentile(values, p: float) -> float:
    """Nearest-rank percentile: the ceil(p/100 * n)-th smallest value.

    ``p = 0`` gives the minimum and ``p = 100`` the maximum.
    """
    v = np.sort(np.asarray(values, dtype=float).ravel())
    rank = math.ceil(p / 100.0 * v.size)
    return float(v[max(rank, 1) - 1])


def build_drop_costs(c, policy: DropCostPolicy, z_mean=None, x_mean=None, z=None, x=None,
                     one_sided: bool = False):
    """Drop-cost vectors ``(drop_z, drop_x)`` for a cost matrix ``c``.

    Parameters
    ----------
    c : array_like, shape (K, N)
    policy : DropCostPolicy
    z_mean, x_mean : array_like, shape (d,), optional
        Row means of ``z`` and ``x``; computed from the sequences when omitted.
        Only the parameterized policy uses them.
    z, x : EmbeddedSequence, optional
        Required by the parameterized policy.
    one_sided : bool
        Forbid dropping rows (``drop_z`` is all :data:`INF`).
    """
    c = np.asarray(c, dtype=float)
    k, n = c.shape
    if policy.variant == "constant":
        dz, dx = np.full(k, policy.s), np.full(n, policy.s)
    elif policy.variant == "percentile":
        s = nearest_rank_percentile(c, policy.p)
        dz, dx = np.full(k, s), np.full(n, s)
    elif policy.variant == "infinite":
        dz, dx = np.full(k, INF), np.full(n, INF)
    else:
        if z is None or x is None:
            raise AlignmentError("parameterized drop costs need both sequences")
        z, x = as_sequence(z), as_sequence(x)
        z_mean = z.mean() if z_mean is None else np.asarray(z_mean, float)
        x_mean = x.mean() if x_mean is None else np.asarray(x_mean, float)
        # bilinear forward map of the drop-cost network, clamped to stay a penalty
        dx = np.maximum(x.elements @ (policy.weights_x @ z_mean), 0.0)
        dz = np.maximum(z.elements @ (policy.weights_z @ x_mean), 0.0)
    if one_sided:
        dz = np.full(k, INF)
    return dz, dx


def cost_matrix(z, x, kind: str = "sym", gamma: float = 0.1) -> np.ndarray:
    """Dispatch on ``kind`` in ``{"sym", "asym"}``."""
    if kind == "sym":
        return symmetric_cost(z, x)
    if kind == "asym":
        return asymmetric_cost(z, x, gamma=gamma)
    raise AlignmentError(f"unknown cost kind {kind!r}")
