"""Compiled inner loop for fixed-strategy runs.

Mirrors :func:`realitygame.core.apply_outcome` and the reality maps in
:mod:`realitygame.maps`; the tests hold the two paths together.
"""

import math

import numpy as np
from numba import njit

from .core import UNDERFLOW_FLOOR
from .maps import (KIND_ARCTAN, KIND_CONSTANT, KIND_IDENTITY, KIND_MULTIMODAL,
                   KIND_SELF_DEFEATING, KIND_TABLE)


@njit(cache=True, nogil=True)
def reality(code, a, xs, ys, p):
    if code == KIND_CONSTANT:
        return a
    if code == KIND_SELF_DEFEATING:
        return 1.0 - p
    if code == KIND_ARCTAN:
        q = 0.5 + math.atan2(0.25 * math.pi * a * (p - 0.5), p * (1.0 - p)) / math.pi
    elif code == KIND_IDENTITY:
        q = p
    elif code == KIND_MULTIMODAL:
        q = 1.0 if p >= 1.0 else (3.0 * p) % 1.0
    else:
        q = np.interp(p, xs, ys)
    return min(max(q, 0.0), 1.0)


@njit(cache=True, nogil=True)
def kl_bernoulli(q, p):
    """KL(q || p) for two coins, with 0 log 0 = 0 and clamped at zero."""
    r = 0.0
    if q > 0.0:
        if p <= 0.0:
            return math.inf
        r += q * math.log(q / p)
    if q < 1.0:
        if p >= 1.0:
            return math.inf
        r += (1.0 - q) * math.log((1.0 - q) / (1.0 - p))
    return max(r, 0.0)


@njit(cache=True, nogil=True)
def simulate(s, w0, code, a, xs, ys, u, stride, record_wealth):
    """Play ``u.size`` tosses from wealths ``w0``.

    Returns (p, q, heads, r, snapshots, final_w, failed_at). ``p`` and ``q``
    are taken before each toss; ``failed_at`` is the toss index where the
    realized side had an empty pool, or -1.
    """
    n = s.size
    steps = u.size
    w = w0.copy()
    p_out = np.empty(steps)
    q_out = np.empty(steps)
    r_out = np.empty(steps)
    heads_out = np.zeros(steps, dtype=np.bool_)
    n_snap = steps // stride + 1 if record_wealth else 0
    snaps = np.zeros((n_snap, n))
    if record_wealth:
        snaps[0, :] = w
    k_snap = 1
    failed_at = -1

    p = 0.0
    for i in range(n):
        p += s[i] * w[i]

    for t in range(steps):
        p = min(max(p, 0.0), 1.0)
        q = reality(code, a, xs, ys, p)
        p_out[t] = p
        q_out[t] = q
        r_out[t] = kl_bernoulli(q, p)
        heads = u[t] < q
        heads_out[t] = heads

        pool = 0.0
        if heads:
            for i in range(n):
                w[i] *= s[i]
                pool += w[i]
        else:
            for i in range(n):
                w[i] *= 1.0 - s[i]
                pool += w[i]
        if not pool > 0.0:
            failed_at = t
            break

        inv = 1.0 / pool
        clamped = False
        total = 0.0
        p = 0.0
        for i in range(n):
            wi = w[i] * inv
            if wi < UNDERFLOW_FLOOR:
                wi = 0.0
                clamped = True
            w[i] = wi
            total += wi
            p += s[i] * wi
        if clamped:
            inv = 1.0 / total
            p *= inv
            for i in range(n):
                w[i] *= inv

        if record_wealth and (t + 1) % stride == 0:
            snaps[k_snap, :] = w
            k_snap += 1

    return p_out, q_out, heads_out, r_out, snaps, w, failed_at
