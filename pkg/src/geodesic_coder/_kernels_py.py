"""Pure numpy versions of the hot loops.  Same signatures as ``_kernels``."""
import numpy as np

TWO_PI = 2.0 * np.pi


def _ccw(a, x):
    d = np.mod(x - a, TWO_PI)
    d[d >= TWO_PI] = 0.0
    return d


def strip_index(x, base, offsets, tol):
    """1-based index ``k`` with ``x`` in the arc ``[A_k, A_{k+1})``.

    ``offsets[k-1]`` is the counter-clockwise distance from ``base = A_1`` to
    ``A_k``.  Points within ``tol`` below ``A_{k+1}`` are assigned to ``k+1``.
    """
    x = np.asarray(x, dtype=float)
    n = offsets.shape[0]
    d = _ccw(base, np.atleast_1d(x))
    k = np.searchsorted(offsets, d, side="right")  # 1..n
    nxt = np.where(k < n, offsets[np.minimum(k, n - 1)], TWO_PI)
    bump = nxt - d < tol
    k = np.where(bump, k % n + 1, k)
    return k.astype(np.int64)


def _apply(ta, tb, k, theta):
    z = np.exp(1j * theta)
    a = ta[k - 1]
    b = tb[k - 1]
    img = (a * z + b) / (np.conj(b) * z + np.conj(a))
    return np.mod(np.angle(img), TWO_PI)


def extension_orbit(u, w, ta, tb, base, offsets, tol, steps):
    """Apply the natural extension ``steps`` times; returns new arrays."""
    u = np.array(u, dtype=float)
    w = np.array(w, dtype=float)
    for _ in range(steps):
        k = strip_index(w, base, offsets, tol)
        u = _apply(ta, tb, k, u)
        w = _apply(ta, tb, k, w)
    return u, w


def extension_occupancy(u, w, ta, tb, base, offsets, tol, steps, window, bins):
    """Iterate and count visits on a ``bins x bins`` grid over the last ``window`` steps.

    ``counts[r, c]`` counts points with ``w`` in row ``r`` and ``u`` in column ``c``.
    """
    u = np.array(u, dtype=float)
    w = np.array(w, dtype=float)
    counts = np.zeros((bins, bins), dtype=np.int64)
    scale = bins / TWO_PI
    for step in range(steps):
        k = strip_index(w, base, offsets, tol)
        u = _apply(ta, tb, k, u)
        w = _apply(ta, tb, k, w)
        if step >= steps - window:
            r = np.minimum((w * scale).astype(np.int64), bins - 1)
            c = np.minimum((u * scale).astype(np.int64), bins - 1)
            np.add.at(counts, (r, c), 1)
    return u, w, counts


def step_member(u, w, base, breaks, lo, span, tol):
    """Membership in a region ``{(u, w): u in [lo_k, lo_k + span_k]}`` over w-pieces.

    ``breaks`` are increasing counter-clockwise offsets from ``base`` at which
    the pieces start.  Boundaries count as inside (within ``tol``).
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    w = np.atleast_1d(np.asarray(w, dtype=float))
    d = _ccw(base, w)
    k = np.searchsorted(breaks, d, side="right") - 1
    k[k < 0] = breaks.shape[0] - 1
    du = _ccw(lo[k], u)
    inside = (du <= span[k] + tol) | (du >= TWO_PI - tol)
    # a point on a w-break belongs to both neighbouring pieces
    m = breaks.shape[0]
    near_lo = d - breaks[k] <= tol
    prev = (k - 1) % m
    du_p = _ccw(lo[prev], u)
    inside |= near_lo & ((du_p <= span[prev] + tol) | (du_p >= TWO_PI - tol))
    nxt_off = np.where(k + 1 < m, breaks[(k + 1) % m], TWO_PI + breaks[0])
    near_hi = nxt_off - d <= tol
    nxt = (k + 1) % m
    du_n = _ccw(lo[nxt], u)
    inside |= near_hi & ((du_n <= span[nxt] + tol) | (du_n >= TWO_PI - tol))
    return inside
