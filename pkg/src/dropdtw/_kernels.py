"""Compiled hard-min table fills.

Candidates are compared in tie-breaking order with strict ``<`` so the
earliest minimiser wins.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def dtw_table(c):
    k, n = c.shape
    d = np.full((k + 1, n + 1), np.inf)
    d[0, 0] = 0.0
    for i in range(1, k + 1):
        for j in range(1, n + 1):
            best = d[i - 1, j - 1]
            if d[i, j - 1] < best:
                best = d[i, j - 1]
            if d[i - 1, j] < best:
                best = d[i - 1, j]
            d[i, j] = c[i - 1, j - 1] + best
    return d


@njit(cache=True)
def one_sided_tables(c, dx):
    k, n = c.shape
    dp = np.full((k + 1, n + 1), np.inf)
    dm = np.full((k + 1, n + 1), np.inf)
    d = np.full((k + 1, n + 1), np.inf)
    dp[0, 0] = 0.0
    dm[0, 0] = 0.0
    d[0, 0] = 0.0
    acc = 0.0
    for j in range(1, n + 1):
        acc += dx[j - 1]
        dm[0, j] = acc
        d[0, j] = acc
    for i in range(1, k + 1):
        for j in range(1, n + 1):
            best = d[i - 1, j - 1]
            if d[i, j - 1] < best:
                best = d[i, j - 1]
            if dp[i - 1, j] < best:
                best = dp[i - 1, j]
            dp[i, j] = c[i - 1, j - 1] + best
            dm[i, j] = dx[j - 1] + d[i, j - 1]
            if dm[i, j] < dp[i, j]:
                d[i, j] = dm[i, j]
            else:
                d[i, j] = dp[i, j]
    return d, dp, dm


@njit(cache=True)
def two_sided_tables(c, dz, dx):
    k, n = c.shape
    zx = np.full((k + 1, n + 1), np.inf)
    zm = np.full((k + 1, n + 1), np.inf)
    mx = np.full((k + 1, n + 1), np.inf)
    mm = np.full((k + 1, n + 1), np.inf)
    d = np.full((k + 1, n + 1), np.inf)
    zx[0, 0] = 0.0
    zm[0, 0] = 0.0
    mx[0, 0] = 0.0
    mm[0, 0] = 0.0
    d[0, 0] = 0.0
    acc = 0.0
    for j in range(1, n + 1):
        acc += dx[j - 1]
        zm[0, j] = acc
        mm[0, j] = acc
        d[0, j] = acc
    acc = 0.0
    for i in range(1, k + 1):
        acc += dz[i - 1]
        mx[i, 0] = acc
        mm[i, 0] = acc
        d[i, 0] = acc
    for i in range(1, k + 1):
        for j in range(1, n + 1):
            cij = c[i - 1, j - 1]
            dzi = dz[i - 1]
            dxj = dx[j - 1]
            # diag cells, then left cells with z, then top cells with x
            m = zx[i - 1, j - 1]
            if zm[i - 1, j - 1] < m:
                m = zm[i - 1, j - 1]
            if mx[i - 1, j - 1] < m:
                m = mx[i - 1, j - 1]
            if mm[i - 1, j - 1] < m:
                m = mm[i - 1, j - 1]
            left_z = zx[i, j - 1]
            if zm[i, j - 1] < left_z:
                left_z = zm[i, j - 1]
            top_x = zx[i - 1, j]
            if mx[i - 1, j] < top_x:
                top_x = mx[i - 1, j]
            if left_z < m:
                m = left_z
            if top_x < m:
                m = top_x
            zx[i, j] = cij + m
            zm[i, j] = dxj + left_z
            mx[i, j] = dzi + top_x
            best = zm[i - 1, j] + dzi
            v = mm[i - 1, j] + dzi
            if v < best:
                best = v
            v = mx[i, j - 1] + dxj
            if v < best:
                best = v
            v = mm[i, j - 1] + dxj
            if v < best:
                best = v
            mm[i, j] = best
            best = zx[i, j]
            if zm[i, j] < best:
                best = zm[i, j]
            if mx[i, j] < best:
                best = mx[i, j]
            if mm[i, j] < best:
                best = mm[i, j]
            d[i, j] = best
    return zx, zm, mx, mm, d
