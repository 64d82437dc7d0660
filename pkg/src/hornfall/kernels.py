"""Hot loops, each with a numba kernel and a pure-numpy twin.

The public wrappers take a ``backend`` argument (``None`` means the process
default from :mod:`hornfall._accel`).  Both paths must return identical
results; ``tests/test_kernels.py`` holds them to that.
"""

from __future__ import annotations

import numpy as np

from ._accel import njit, resolve

# ---------------------------------------------------------------------------------
# occurrence lists: for each variable, the clauses where it appears negated


@njit(cache=True)
def _occurrences_nb(n, body_ptr, body):
    occ_ptr = np.zeros(n + 2, np.int64)
    for i in range(body.size):
        occ_ptr[body[i] + 1] += 1
    for v in range(1, n + 2):
        occ_ptr[v] += occ_ptr[v - 1]
    fill = occ_ptr[: n + 1].copy()
    occ = np.empty(body.size, np.int32)
    m = body_ptr.size - 1
    for c in range(m):
        for p in range(body_ptr[c], body_ptr[c + 1]):
            v = body[p]
            occ[fill[v]] = c
            fill[v] += 1
    return occ_ptr, occ


def _occurrences_np(n, body_ptr, body):
    owner = np.repeat(np.arange(body_ptr.size - 1, dtype=np.int32), np.diff(body_ptr))
    order = np.argsort(body, kind="stable")
    occ = owner[order]
    occ_ptr = np.zeros(n + 2, np.int64)
    np.cumsum(np.bincount(body, minlength=n + 1), out=occ_ptr[1:])
    return occ_ptr, occ


def occurrences(n, body_ptr, body, backend=None):
    if resolve(backend) == "numba":
        return _occurrences_nb(n, body_ptr, body)
    return _occurrences_np(n, body_ptr, body)


# ---------------------------------------------------------------------------------
# counter-based positive unit propagation


@njit(cache=True)
def _propagate_nb(n, heads, body_ptr, occ_ptr, occ, shuffle_seed, count):
    # count: scratch array of length m; uint8 when every clause is short, which
    # keeps the randomly-decremented counters cache resident for longer
    m = heads.size
    implied = np.zeros(n + 1, np.uint8)
    depth = np.zeros(n + 1, np.int32)
    queue = np.empty(n + 1, np.int32)
    tail = 0
    conflict = False
    for c in range(m):
        count[c] = body_ptr[c + 1] - body_ptr[c]
        if count[c] == 0:
            h = heads[c]
            if h == 0:
                conflict = True
            elif implied[h] == 0:
                implied[h] = 1
                depth[h] = 1
                queue[tail] = h
                tail += 1
    shuffle = shuffle_seed >= 0
    if shuffle:
        np.random.seed(shuffle_seed)
    head = 0
    rounds = 0
    while head < tail:
        if shuffle:
            r = np.random.randint(head, tail)
            queue[head], queue[r] = queue[r], queue[head]
        v = queue[head]
        head += 1
        if depth[v] > rounds:
            rounds = depth[v]
        for p in range(occ_ptr[v], occ_ptr[v + 1]):
            c = occ[p]
            count[c] -= 1
            if count[c] == 0:
                h = heads[c]
                if h == 0:
                    conflict = True
                elif implied[h] == 0:
                    implied[h] = 1
                    depth[h] = depth[v] + 1
                    queue[tail] = h
                    tail += 1
    return implied, tail, rounds, conflict


def _gather(ptr, idx, values):
    """Concatenate ``values[ptr[i]:ptr[i+1]]`` for every ``i`` in ``idx``."""
    starts = ptr[idx]
    lens = ptr[idx + 1] - starts
    total = int(lens.sum())
    if total == 0:
        return values[:0]
    offsets = np.repeat(starts - np.concatenate(([0], np.cumsum(lens)[:-1])), lens)
    return values[np.arange(total) + offsets]


def _propagate_np(n, heads, body_ptr, occ_ptr, occ, shuffle_seed):
    # level-synchronous: every variable implied in round r is expanded together
    m = heads.size
    count = np.diff(body_ptr).astype(np.int64)
    implied = np.zeros(n + 1, np.uint8)
    ready = count == 0
    conflict = bool(np.any(ready & (heads == 0)))
    frontier = np.unique(heads[ready & (heads > 0)])
    implied[frontier] = 1
    total = frontier.size
    rounds = 0
    while frontier.size:
        rounds += 1
        touched = _gather(occ_ptr, frontier, occ)
        count -= np.bincount(touched, minlength=m)
        fired = touched[count[touched] == 0]
        if fired.size == 0:
            break
        fired = np.unique(fired)
        h = heads[fired]
        if np.any(h == 0):
            conflict = True
        h = h[h > 0]
        frontier = np.unique(h[implied[h] == 0])
        implied[frontier] = 1
        total += frontier.size
    return implied, total, rounds, conflict


def propagate(n, heads, body_ptr, body, backend=None, shuffle_seed=-1):
    """Least fixpoint of positive unit propagation.

    Returns ``(implied, size, rounds, conflict)``: ``implied`` is a uint8 mask of
    length ``n + 1`` (index 0 unused), ``size`` its popcount, ``rounds`` the
    number of propagation generations, and ``conflict`` whether some clause
    without a positive literal had all of its variables implied.

    ``shuffle_seed >= 0`` pops the pending queue in random order (numba only);
    the fixpoint does not depend on it, only ``rounds`` may.
    """
    b = resolve(backend)
    if b == "numba":
        occ_ptr, occ = _occurrences_nb(n, body_ptr, body)
        m = heads.size
        short = m == 0 or int(np.diff(body_ptr).max()) < 256
        count = np.empty(m, np.uint8 if short else np.int32)
        return _propagate_nb(n, heads, body_ptr, occ_ptr, occ, shuffle_seed, count)
    if shuffle_seed >= 0:
        raise ValueError("randomized queue order is only implemented in the numba kernel")
    occ_ptr, occ = _occurrences_np(n, body_ptr, body)
    return _propagate_np(n, heads, body_ptr, occ_ptr, occ, shuffle_seed)


# ---------------------------------------------------------------------------------
# first sign change of ln((1-t)/(1-d1)) + sum_j d_j t^(j-1) on a uniform grid


@njit(cache=True)
def _lhs_nb(t, log1m_d1, coeffs):
    # coeffs[i] multiplies t^(i+1), i.e. coeffs = (d2, d3, ..., dk)
    acc = 0.0
    for i in range(coeffs.size - 1, -1, -1):
        acc = acc * t + coeffs[i]
    return np.log1p(-t) - log1m_d1 + acc * t


@njit(cache=True)
def _scan_nb(log1m_d1, coeffs, step, graze):
    """Return ``(i_cross, i_dip)`` over grid points t_i = i*step, i=0..N-1.

    ``i_cross`` is the first index with value <= 0 (or -1).  ``i_dip`` is the
    interior local minimum before ``i_cross`` with the smallest value, provided
    that value is below ``graze`` (else -1).
    """
    npts = int(round(1.0 / step))
    prev2 = _lhs_nb(0.0, log1m_d1, coeffs)
    if prev2 <= 0.0:
        return 0, -1
    prev1 = _lhs_nb(step, log1m_d1, coeffs)
    if prev1 <= 0.0:
        return 1, -1
    i_dip = -1
    best = graze
    for i in range(2, npts):
        cur = _lhs_nb(i * step, log1m_d1, coeffs)
        if cur <= 0.0:
            return i, i_dip
        if prev1 < prev2 and prev1 <= cur and prev1 < best:
            i_dip = i - 1
            best = prev1
        prev2 = prev1
        prev1 = cur
    return -1, i_dip


def _lhs_np(t, log1m_d1, coeffs):
    acc = np.zeros_like(t)
    for c in coeffs[::-1]:
        acc = acc * t + c
    return np.log1p(-t) - log1m_d1 + acc * t


def _scan_np(log1m_d1, coeffs, step, graze):
    npts = int(round(1.0 / step))
    t = np.arange(npts) * step
    v = _lhs_np(t, log1m_d1, coeffs)
    nonpos = np.flatnonzero(v <= 0.0)
    i_cross = int(nonpos[0]) if nonpos.size else -1
    limit = i_cross if i_cross >= 0 else npts
    i_dip = -1
    if limit >= 3:
        w = v[:limit]
        mid = w[1:-1]
        cand = np.flatnonzero((mid < w[:-2]) & (mid <= w[2:]) & (mid < graze))
        if cand.size:
            i_dip = int(cand[np.argmin(mid[cand])]) + 1
    return i_cross, i_dip


def scan_first_crossing(log1m_d1, coeffs, step, graze, backend=None):
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    if resolve(backend) == "numba":
        i, g = _scan_nb(float(log1m_d1), coeffs, float(step), float(graze))
        return int(i), int(g)
    return _scan_np(float(log1m_d1), coeffs, float(step), float(graze))


__all__ = ["occurrences", "propagate", "scan_first_crossing"]
