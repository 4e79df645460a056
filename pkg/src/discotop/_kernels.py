"""Compiled inner loops for ball-diameter scans."""

from __future__ import annotations

import math

import numba
import numpy as np
from numba import njit, prange

# Geodesic diameters never exceed pi; a ball within this of pi ends the search.
PI_SLACK = 1e-12

# the system TBB is too old for numba; avoid the warning it triggers
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]


@njit(cache=True, inline="always")
def _pair_distance(values, a, b, geodesic):
    m = values.shape[1]
    minus = 0.0
    plus = 0.0
    for k in range(m):
        u = values[a, k]
        v = values[b, k]
        minus += (u - v) * (u - v)
        plus += (u + v) * (u + v)
    if geodesic:
        return 2.0 * math.atan2(math.sqrt(minus), math.sqrt(plus))
    return math.sqrt(minus)


@njit(cache=True, parallel=True)
def ball_diameters(cfg, keys_sorted, ids_sorted, radix, nb_ptr, nb_idx, values, geodesic):
    """Image diameter of every product ball in a configuration sample.

    ``cfg[c]`` holds domain indices; the ball of ``c`` consists of all sampled
    configurations whose i-th entry lies in the domain ball of ``cfg[c, i]``
    (CSR lists ``nb_ptr``/``nb_idx``). Sampled configurations are located by
    their mixed-radix key in ``keys_sorted``.
    """
    m, r = cfg.shape
    diam = np.zeros(m)
    size = np.zeros(m, dtype=np.int64)
    nkeys = keys_sorted.shape[0]
    for c in prange(m):
        sizes = np.empty(r, dtype=np.int64)
        pos = np.zeros(r, dtype=np.int64)
        total = 1
        for i in range(r):
            p = cfg[c, i]
            sizes[i] = nb_ptr[p + 1] - nb_ptr[p]
            total *= sizes[i]
        members = np.empty(total, dtype=np.int64)
        cnt = 0
        for _ in range(total):
            key = 0
            for i in range(r):
                key += nb_idx[nb_ptr[cfg[c, i]] + pos[i]] * radix[i]
            j = np.searchsorted(keys_sorted, key)
            if j < nkeys and keys_sorted[j] == key:
                members[cnt] = ids_sorted[j]
                cnt += 1
            i = 0
            while i < r:
                pos[i] += 1
                if pos[i] < sizes[i]:
                    break
                pos[i] = 0
                i += 1
        best = 0.0
        for a in range(cnt):
            for b in range(a + 1, cnt):
                d = _pair_distance(values, members[a], members[b], geodesic)
                if d > best:
                    best = d
        diam[c] = best
        size[c] = cnt
    return diam, size


def set_threads(n: int) -> None:
    numba.set_num_threads(max(1, min(n, numba.config.NUMBA_NUM_THREADS)))


@njit(cache=True)
def _members(c, cfg, keys_sorted, ids_sorted, radix, nb_ptr, nb_idx, out):
    r = cfg.shape[1]
    nkeys = keys_sorted.shape[0]
    sizes = np.empty(r, dtype=np.int64)
    pos = np.zeros(r, dtype=np.int64)
    total = 1
    for i in range(r):
        p = cfg[c, i]
        sizes[i] = nb_ptr[p + 1] - nb_ptr[p]
        total *= sizes[i]
    cnt = 0
    for _ in range(total):
        key = 0
        for i in range(r):
            key += nb_idx[nb_ptr[cfg[c, i]] + pos[i]] * radix[i]
        j = np.searchsorted(keys_sorted, key)
        if j < nkeys and keys_sorted[j] == key:
            out[cnt] = ids_sorted[j]
            cnt += 1
        i = 0
        while i < r:
            pos[i] += 1
            if pos[i] < sizes[i]:
                break
            pos[i] = 0
            i += 1
    return cnt


@njit(cache=True, parallel=True)
def _radii(cfg, keys_sorted, ids_sorted, radix, nb_ptr, nb_idx, values, geodesic, cap):
    m, r = cfg.shape
    rad = np.zeros(m)
    for c in prange(m):
        buf = np.empty(cap, dtype=np.int64)
        cnt = _members(c, cfg, keys_sorted, ids_sorted, radix, nb_ptr, nb_idx, buf)
        best = 0.0
        for a in range(cnt):
            d = _pair_distance(values, c, buf[a], geodesic)
            if d > best:
                best = d
        rad[c] = best
    return rad


@njit(cache=True)
def max_ball_diameter(cfg, keys_sorted, ids_sorted, radix, nb_ptr, nb_idx, values, geodesic, cap):
    """Largest image diameter over all product balls, and a ball attaining it.

    The image radius about the ball's own center bounds its diameter below
    by the radius and above by twice the radius (capped at pi on spheres);
    balls are examined exactly in order of decreasing upper bound until no
    remaining ball can beat the best diameter found. On spheres the search
    also stops once the best diameter is within PI_SLACK of pi.
    """
    m = cfg.shape[0]
    rad = _radii(cfg, keys_sorted, ids_sorted, radix, nb_ptr, nb_idx, values, geodesic, cap)
    upper = 2.0 * rad
    if geodesic:
        upper = np.minimum(upper, math.pi)
    order = np.argsort(-upper, kind="mergesort")
    best = -1.0
    arg = 0
    buf = np.empty(cap, dtype=np.int64)
    for t in range(m):
        c = order[t]
        if upper[c] <= best or (geodesic and best >= math.pi - PI_SLACK):
            break
        cnt = _members(c, cfg, keys_sorted, ids_sorted, radix, nb_ptr, nb_idx, buf)
        diam = 0.0
        for a in range(cnt):
            for b in range(a + 1, cnt):
                d = _pair_distance(values, buf[a], buf[b], geodesic)
                if d > diam:
                    diam = d
        if diam > best:
            best = diam
            arg = c
    return max(best, 0.0), arg
