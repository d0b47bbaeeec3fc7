import numpy as np


def bisect_quantile(cdf, p, lo, hi, tol=1e-10, max_iter=200):
    """Vectorized ``inf{x : cdf(x) >= p}`` for a nondecreasing ``cdf`` on ``[lo, hi]``."""
    p = np.asarray(p, dtype=float)
    lo = np.broadcast_to(np.asarray(lo, dtype=float), p.shape).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), p.shape).copy()
    for _ in range(max_iter):
        if np.all(hi - lo <= tol):
            break
        mid = 0.5 * (lo + hi)
        up = cdf(mid) >= p
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
    return hi
