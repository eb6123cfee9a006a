"""Real-coded variation: simulated binary crossover and polynomial mutation.

Both follow the bounded formulations used in Deb's reference NSGA-II code
and accept either single genomes or stacks of genomes (one row per pair or
individual). Every call consumes a fixed number of draws from ``rng``
regardless of which branches fire, so results depend only on the
generator state.
"""
from __future__ import annotations

import numpy as np


def sbx_crossover(a, b, xl, xu, rng, prob=0.9, eta=15.0, prob_var=0.5):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"parent length mismatch: {a.shape} vs {b.shape}")
    single = a.ndim == 1
    A, B = np.atleast_2d(a), np.atleast_2d(b)
    k, n = A.shape
    lo = np.broadcast_to(np.asarray(xl, dtype=float), (k, n))
    hi = np.broadcast_to(np.asarray(xu, dtype=float), (k, n))

    do_pair = rng.random((k, 1)) < prob
    per_var = rng.random((k, n)) < prob_var
    u = rng.random((k, n))
    swap = rng.random((k, n)) < 0.5

    y1, y2 = np.minimum(A, B), np.maximum(A, B)
    gap = y2 - y1
    mask = do_pair & per_var & (gap > 1e-14)
    safe_gap = np.where(mask, gap, 1.0)
    expo = 1.0 / (eta + 1.0)

    def betaq(beta):
        alpha = 2.0 - beta ** -(eta + 1.0)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return np.where(u <= 1.0 / alpha, (u * alpha) ** expo, (1.0 / (2.0 - u * alpha)) ** expo)

    with np.errstate(over="ignore", invalid="ignore"):
        k1 = 0.5 * ((y1 + y2) - betaq(1.0 + 2.0 * (y1 - lo) / safe_gap) * gap)
        k2 = 0.5 * ((y1 + y2) + betaq(1.0 + 2.0 * (hi - y2) / safe_gap) * gap)
    k1 = np.clip(k1, lo, hi)
    k2 = np.clip(k2, lo, hi)
    c1 = np.where(mask, np.where(swap, k2, k1), A)
    c2 = np.where(mask, np.where(swap, k1, k2), B)
    return (c1[0], c2[0]) if single else (c1, c2)


def polynomial_mutation(g, xl, xu, rng, prob=None, eta=20.0):
    g = np.asarray(g, dtype=float)
    single = g.ndim == 1
    G = np.atleast_2d(g)
    k, n = G.shape
    prob = 1.0 / n if prob is None else prob
    lo = np.broadcast_to(np.asarray(xl, dtype=float), (k, n))
    hi = np.broadcast_to(np.asarray(xu, dtype=float), (k, n))
    hit = rng.random((k, n)) < prob
    r = rng.random((k, n))
    width = hi - lo
    mask = hit & (width > 0)
    w = np.where(mask, width, 1.0)
    d1 = (G - lo) / w
    d2 = (hi - G) / w
    pw = 1.0 / (eta + 1.0)
    with np.errstate(invalid="ignore"):
        val_l = 2.0 * r + (1.0 - 2.0 * r) * (1.0 - d1) ** (eta + 1.0)
        val_r = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * (1.0 - d2) ** (eta + 1.0)
        dq = np.where(r < 0.5, val_l**pw - 1.0, 1.0 - val_r**pw)
    out = np.where(mask, np.clip(G + dq * width, lo, hi), G)
    return out[0] if single else out
