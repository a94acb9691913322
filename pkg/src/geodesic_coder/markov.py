"""Markov partitions over the extended alphabet and their sofic amalgamation.

Each strip ``w in [A_i, A_{i+1}]`` of a short-cycle attractor splits into
three rectangles ``R_{i,1..3}`` at the levels ``B_i`` and ``C_i``.  When every
cycle end ``U_i^{-1} A_i`` is one of the levels ``A_j, B_j, C_j`` the images
of these rectangles cross the partition transversally, and the incidence
matrix is a subshift of finite type over the symbols ``i_k``.
"""
from dataclasses import dataclass, field
import json

import numpy as np

from . import tolerance
from .boundary import cycle_report, strip_layout
from .errors import GeodesicCoderError, NoAttractor, NotMarkov
from .moebius import TWO_PI, arc_dist, ccw, norm_angle

AREA_TOL = 1e-9  # overlaps thinner than this in either direction count as touching


class DegenerateRectangle(GeodesicCoderError):
    """A fine-partition rectangle of zero height (``B_i = C_i`` or a level on ``A_i``)."""


@dataclass(frozen=True)
class Witness:
    i: int
    j: int
    which: str  # "A", "B" or "C"
    error: float


def markov_condition(s, part, report=None, tol=None):
    """For each ``i``, a :class:`Witness` with ``U_i^{-1} A_i`` equal to ``A_j``, ``B_j`` or ``C_j``.

    Entries are ``None`` where no level matches.  The search starts at
    ``j = i`` and moves forward, trying ``A`` before ``B`` before ``C``.
    """
    report = report or cycle_report(s, part)
    tol = tolerance.angle_tol() if tol is None else tol
    levels = {"A": part.A, "B": report.B, "C": report.C}
    out = []
    for i in range(1, s.n + 1):
        end = report.cycle_end[i]
        found = None
        for step in range(s.n):
            j = (i - 1 + step) % s.n + 1
            for which in "ABC":
                err = arc_dist(end, levels[which][j])
                if err <= tol:
                    found = Witness(i, j, which, err)
                    break
            if found:
                break
        out.append(found)
    return out


def is_markov(witnesses):
    return all(w is not None for w in witnesses)


# ---------------------------------------------------------------------------
# rectangles


@dataclass(frozen=True)
class FineRect:
    """``[u_lo, u_lo + u_len] x [w_lo, w_lo + w_len]`` with arcs read counter-clockwise."""

    u_lo: float
    u_len: float
    w_lo: float
    w_len: float

    @property
    def u_hi(self):
        return norm_angle(self.u_lo + self.u_len)

    @property
    def w_hi(self):
        return norm_angle(self.w_lo + self.w_len)

    @classmethod
    def between(cls, u_lo, u_hi, w_lo, w_hi):
        return cls(norm_angle(u_lo), ccw(u_lo, u_hi), norm_angle(w_lo), ccw(w_lo, w_hi))

    def image(self, m):
        """Image under a Moebius map (orientation preserving, so arcs map to arcs)."""
        return FineRect.between(m(self.u_lo), m(self.u_hi), m(self.w_lo), m(self.w_hi))

    def contains(self, u, w, tol=0.0):
        du = (np.asarray(u) - self.u_lo) % TWO_PI
        dw = (np.asarray(w) - self.w_lo) % TWO_PI
        ok_u = (du <= self.u_len + tol) | (du >= TWO_PI - tol)
        ok_w = (dw <= self.w_len + tol) | (dw >= TWO_PI - tol)
        return ok_u & ok_w

    def to_list(self):
        return [self.u_lo, self.u_hi, self.w_lo, self.w_hi]


def arc_overlap(a_lo, a_len, b_lo, b_len):
    """Total length of the intersection of two counter-clockwise arcs."""
    d = ccw(a_lo, b_lo)
    total = 0.0
    for start in (d, d - TWO_PI):
        lo = max(0.0, start)
        hi = min(a_len, start + b_len)
        if hi > lo:
            total += hi - lo
    return total


def arc_inside(inner_lo, inner_len, outer_lo, outer_len, tol):
    d = ccw(outer_lo, inner_lo)
    if d > TWO_PI - tol:
        d -= TWO_PI
    return d >= -tol and d + inner_len <= outer_len + tol


@dataclass(frozen=True, eq=False)
class FinePartition:
    """Rectangles ``R_{i,k}`` keyed by ``(i, k)`` with the level order of every strip.

    ``order[i]`` is ``"CB"`` when ``C_i`` comes first in the strip (ties
    included) and ``"BC"`` otherwise.  ``degenerate`` lists the keys of
    rectangles with no height.
    """

    n: int
    rects: dict
    order: dict
    degenerate: tuple

    def keys(self):
        return [(i, k) for i in range(1, self.n + 1) for k in (1, 2, 3)]

    def locate(self, u, w):
        """Key of the rectangle holding each point, ``None`` where none does."""
        u = np.atleast_1d(u)
        w = np.atleast_1d(w)
        out = [None] * len(u)
        for key in self.keys():
            if key in self.degenerate:
                continue
            hit = self.rects[key].contains(u, w)
            for idx in np.flatnonzero(hit):
                if out[idx] is None:
                    out[idx] = key
        return out

    def to_dict(self):
        return {
            "rectangles": [{"i": i, "k": k, "u": [r.u_lo, r.u_hi], "w": [r.w_lo, r.w_hi]}
                           for (i, k), r in sorted(self.rects.items())],
            "order": {str(i): o for i, o in sorted(self.order.items())},
            "degenerate": [list(key) for key in self.degenerate],
        }


def fine_partition(s, part, attr=None, report=None, strict=False):
    """Split every strip of the attractor into ``R_{i,1}, R_{i,2}, R_{i,3}``.

    Zero-height rectangles are kept and listed as degenerate; with
    ``strict=True`` they raise :class:`DegenerateRectangle` instead.  When
    ``attr`` is given the rectangles are checked against it: sampled points
    of each rectangle must lie in the attractor.
    """
    report = report or cycle_report(s, part)
    if not report.all_short:
        bad = [i for i in range(1, s.n + 1) if not report.short_cycle[i]]
        raise NoAttractor(f"short cycle property fails at {bad}: no rectangle levels")
    tol = tolerance.angle_tol()
    rects, order, degenerate = {}, {}, []
    for i in range(1, s.n + 1):
        o_b, o_c, width = strip_layout(s, part, report, i)
        a0 = part.A[i]
        lv_b = norm_angle(a0 + o_b)
        lv_c = norm_angle(a0 + o_c)
        if o_c <= o_b + tol:
            order[i] = "CB"
            rows = [(s.Q[i + 1], s.P[i - 1], a0, lv_c),
                    (s.Q[i + 2], s.P[i - 1], lv_c, lv_b),
                    (s.Q[i + 2], s.P[i], lv_b, part.A[i + 1])]
            heights = [o_c, max(o_b - o_c, 0.0), width - o_b]
        else:
            order[i] = "BC"
            rows = [(s.Q[i + 1], s.P[i - 1], a0, lv_b),
                    (s.Q[i + 1], s.P[i], lv_b, lv_c),
                    (s.Q[i + 2], s.P[i], lv_c, part.A[i + 1])]
            heights = [o_b, o_c - o_b, width - o_c]
        for k, (row, h) in enumerate(zip(rows, heights), start=1):
            ul, uh, wl, wh = row
            if h <= tol:
                if strict:
                    raise DegenerateRectangle(f"R_{i},{k} has height {h:.3g}")
                degenerate.append((i, k))
                rects[(i, k)] = FineRect(norm_angle(ul), ccw(ul, uh), norm_angle(wl), 0.0)
            else:
                rects[(i, k)] = FineRect.between(ul, uh, wl, wh)
    fine = FinePartition(s.n, rects, order, tuple(degenerate))
    if attr is not None:
        bad = tiling_defects(fine, attr)
        if bad:
            raise GeodesicCoderError(f"fine rectangles leave the attractor: {bad[:4]}")
    return fine


def tiling_defects(fine, attr, samples=64, seed=0):
    """Keys of rectangles with sampled interior points outside the attractor."""
    rng = np.random.default_rng(seed)
    bad = []
    for key in fine.keys():
        if key in fine.degenerate:
            continue
        r = fine.rects[key]
        # keep clear of the edges: the step function is closed on one side only
        fu = 1e-6 + (1 - 2e-6) * rng.random(samples)
        fw = 1e-6 + (1 - 2e-6) * rng.random(samples)
        u = r.u_lo + fu * r.u_len
        w = r.w_lo + fw * r.w_len
        if not np.all(attr.contains(u % TWO_PI, w % TWO_PI)):
            bad.append(key)
    return bad


def images(s, fine):
    """``F_A(R_{i,k})``: the rectangle pushed forward by ``T_i``."""
    return {key: fine.rects[key].image(s.T[key[0]]) for key in fine.keys()}


# ---------------------------------------------------------------------------
# transitions


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """0/1 incidence between extended symbols ``i_k``.

    Row and column ``3 (i - 1) + (k - 1)`` belong to ``i_k``.  ``strip``
    amalgamates ``i_k`` to ``i``; ``symbol`` is the code symbol ``sigma(i)``
    emitted while the orbit sits in strip ``i``.
    """

    matrix: np.ndarray
    keys: tuple
    strip: tuple
    symbol: tuple
    active: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def size(self):
        return self.matrix.shape[0]

    def index(self, key):
        return self.keys.index(tuple(key))

    def stranded(self):
        """Active symbols with an empty row or column."""
        m = self.matrix
        out = []
        for r, key in enumerate(self.keys):
            if self.active[r] and (not m[r].any() or not m[:, r].any()):
                out.append(key)
        return out

    def perron_root(self, iters=2000, tol=1e-13):
        return perron_root(self.matrix[np.ix_(self.active, self.active)], iters, tol)

    def to_dict(self):
        return {
            "symbols": [f"{i}_{k}" for i, k in self.keys],
            "matrix": self.matrix.astype(int).tolist(),
            "active": [bool(x) for x in self.active],
            "meta": self.meta,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def perron_root(m, iters=2000, tol=1e-13):
    """Spectral radius of a nonnegative matrix.

    The radius is the largest over the strongly connected components, and on
    each component power iteration runs on ``I + M``: the shift makes the
    block primitive, so the iteration converges geometrically even for
    periodic blocks.
    """
    from scipy.sparse.csgraph import connected_components

    m = np.asarray(m, dtype=float)
    if m.size == 0:
        return 0.0
    _, comp = connected_components(m > 0, directed=True, connection="strong")
    best = 0.0
    for c in np.unique(comp):
        idx = np.flatnonzero(comp == c)
        block = m[np.ix_(idx, idx)]
        if not block.any():
            continue  # a single node without a self-loop
        best = max(best, _power_root(block, iters, tol))
    return best


def _power_root(m, iters, tol):
    x = np.ones(m.shape[0])
    shifted = m + np.eye(m.shape[0])
    lam = 0.0
    for _ in range(iters):
        y = shifted @ x
        norm = y.max()
        y /= norm
        if np.abs(y - x).max() < tol:
            lam = norm
            break
        x, lam = y, norm
    return lam - 1.0


def transition_matrix(s, part, fine, area_tol=AREA_TOL, check=True):
    """Incidence of ``F_A(R_{i,k})`` with ``R_{j,l}``, verifying transversality.

    An entry is 1 when the overlap is wider than ``area_tol`` in both
    directions.  With ``check=True`` every such overlap must run the full
    height of ``R_{j,l}`` and the full width of the image, else
    :class:`NotMarkov` is raised with the offending pair.
    """
    keys = tuple(fine.keys())
    size = len(keys)
    imgs = images(s, fine)
    tol = 10 * tolerance.angle_tol()
    mat = np.zeros((size, size), dtype=np.int8)
    active = np.array([key not in fine.degenerate for key in keys])
    for r, src in enumerate(keys):
        if not active[r]:
            continue
        im = imgs[src]
        for c, dst in enumerate(keys):
            if not active[c]:
                continue
            rect = fine.rects[dst]
            ov_u = arc_overlap(im.u_lo, im.u_len, rect.u_lo, rect.u_len)
            ov_w = arc_overlap(im.w_lo, im.w_len, rect.w_lo, rect.w_len)
            if ov_u <= area_tol or ov_w <= area_tol:
                continue
            mat[r, c] = 1
            if not check:
                continue
            horiz = arc_inside(rect.w_lo, rect.w_len, im.w_lo, im.w_len, tol)
            vert = arc_inside(im.u_lo, im.u_len, rect.u_lo, rect.u_len, tol)
            if not (horiz and vert):
                raise NotMarkov(f"F(R_{src[0]},{src[1]}) meets R_{dst[0]},{dst[1]} "
                                f"without crossing it", pair=(src, dst))
    meta = {
        "area_tol": area_tol,
        "boundary_contacts": "ignored as measure zero",
        "degenerate": [f"{i}_{k}" for i, k in fine.degenerate],
    }
    return TransitionMatrix(mat, keys, tuple(i for i, _ in keys),
                            tuple(int(s.sigma[i]) for i, _ in keys), active, meta)


# ---------------------------------------------------------------------------
# sofic presentation


@dataclass(frozen=True, eq=False)
class SoficGraph:
    """Labelled graph on the active extended symbols.

    The edge ``i_k -> j_l`` carries the code symbol of strip ``j``, so a path
    spells the code of an orbit from its second point on.
    """

    nodes: tuple
    node_label: dict
    edges: tuple
    alphabet: tuple

    def _adjacency(self):
        idx = {v: t for t, v in enumerate(self.nodes)}
        a = np.zeros((len(self.nodes), len(self.nodes)), dtype=bool)
        for src, dst, _ in self.edges:
            a[idx[src], idx[dst]] = True
        return a

    def _mask(self, label):
        return np.array([self.node_label[v] == label for v in self.nodes])

    def accepts(self, word):
        """Whether some path visits nodes labelled ``word`` in order."""
        a = self._adjacency()
        cur = self._mask(word[0])
        for sym in word[1:]:
            cur = (cur.astype(int) @ a.astype(int) > 0) & self._mask(sym)
            if not cur.any():
                return False
        return bool(cur.any())

    def accepts_periodic(self, repetend):
        """Whether the bi-infinite repetition of ``repetend`` labels a path.

        Such a path exists exactly when the boolean transfer matrix of one
        period is not nilpotent.
        """
        a = self._adjacency().astype(int)
        size = len(self.nodes)
        step = np.diag(self._mask(repetend[0]).astype(int))
        for sym in list(repetend[1:]) + [repetend[0]]:
            step = ((step @ a) > 0).astype(int) @ np.diag(self._mask(sym).astype(int))
        power = np.eye(size, dtype=int)
        for _ in range(size):
            power = ((power @ step) > 0).astype(int)
            if not power.any():
                return False
        return True

    def to_dict(self):
        return {
            "nodes": [{"id": v, "label": self.node_label[v]} for v in self.nodes],
            "edges": [{"from": a, "to": b, "label": lab} for a, b, lab in self.edges],
            "alphabet": list(self.alphabet),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_dot(self, name="sofic"):
        lines = [f"digraph {name} {{"]
        for v in self.nodes:
            lines.append(f'  "{v}" [label="{v}"];')
        for a, b, lab in self.edges:
            lines.append(f'  "{a}" -> "{b}" [label="{lab}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def sofic_presentation(tm):
    nodes, label = [], {}
    for r, (i, k) in enumerate(tm.keys):
        if tm.active[r]:
            name = f"{i}_{k}"
            nodes.append(name)
            label[name] = tm.symbol[r]
    edges = []
    for r, c in zip(*np.nonzero(tm.matrix)):
        i, k = tm.keys[r]
        j, l = tm.keys[c]
        edges.append((f"{i}_{k}", f"{j}_{l}", tm.symbol[c]))
    return SoficGraph(tuple(nodes), label, tuple(edges), tuple(sorted(set(tm.symbol))))


def markov_failure_rate(s, draws=100, seed=0):
    """Fraction of random short-cycle partitions failing the level condition."""
    from .boundary import random_short_cycle_partition

    rng = np.random.default_rng(seed)
    fails = 0
    for _ in range(draws):
        part = random_short_cycle_partition(s, rng)
        if not is_markov(markov_condition(s, part)):
            fails += 1
    return fails / draws


__all__ = [
    "AREA_TOL", "DegenerateRectangle", "FinePartition", "FineRect", "SoficGraph",
    "TransitionMatrix", "Witness", "arc_overlap", "fine_partition", "images", "is_markov",
    "markov_condition", "markov_failure_rate", "perron_root", "sofic_presentation",
    "tiling_defects", "transition_matrix",
]
