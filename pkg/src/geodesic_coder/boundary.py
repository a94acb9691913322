"""Partitions, the boundary map f_A, its natural extension F_A and attractors.

A point of the torus is a pair ``(u, w)`` of angles: ``u`` is the backward end
of a geodesic, ``w`` its forward end.  Attractors are stored as cyclic step
functions: the circle of ``w`` values is cut into pieces, and over each piece
``u`` ranges over a fixed counter-clockwise arc.
"""
from dataclasses import dataclass, field
import io
import math

import numpy as np

from . import kernels, tolerance
from .errors import (
    FixedPointNotInInterval,
    InvalidPattern,
    MaxStepsExceeded,
    NoAttractor,
    NoFiniteStructure,
    NotInAttractor,
    RelationFailure,
)
from .moebius import (
    TWO_PI,
    arc_dist,
    ccw,
    fixed_points,
    in_arc,
    norm_angle,
    norm_angles,
    product,
)
from .surface import Cyclic, GroupWord

KINDS = ("midpoints", "product-fixed-points", "mixed", "endpoints-P", "endpoints-Q",
         "endpoints-pattern", "custom")


# ---------------------------------------------------------------------------
# partitions


@dataclass(frozen=True, eq=False)
class Partition:
    A: Cyclic
    kind: str
    pattern: str = None

    @property
    def n(self):
        return len(self.A)

    @property
    def base(self):
        return self.A[1]

    @property
    def offsets(self):
        """Counter-clockwise offsets of ``A_1..A_n`` from ``A_1``."""
        return np.array([ccw(self.A[1], a) for a in self.A])

    def label(self):
        if self.kind == "endpoints-pattern":
            return f"endpoints:{self.pattern}"
        return self.kind

    def to_dict(self):
        return {"kind": self.kind, "pattern": self.pattern, "A": list(self.A)}


def _endpoint_word(s, pattern):
    pattern = pattern.upper()
    if not pattern or set(pattern) - {"P", "Q"} or s.n % len(pattern):
        raise InvalidPattern(f"pattern {pattern!r} must be a P/Q word whose length divides {s.n}")
    word = pattern * (s.n // len(pattern))
    return Cyclic(s.P[i] if c == "P" else s.Q[i] for i, c in enumerate(word, start=1))


def make_partition(s, kind, pattern=None, points=None):
    """Build one of the standard partitions of the circle."""
    n = s.n
    if kind == "midpoints":
        A = Cyclic(s.M)
    elif kind == "product-fixed-points":
        A = []
        for i in range(1, n + 1):
            prod = product(s.U[i + k] for k in range(n))
            a = fixed_points(prod).attracting.angle
            b_i, a_i = short_cycle_interval(s, i)
            if not in_arc(a, b_i, a_i, tol=10 * tolerance.angle_tol()):
                raise FixedPointNotInInterval(f"fixed point for index {i} outside [b_i, a_i]")
            A.append(a)
        A = Cyclic(A)
    elif kind == "mixed":
        A = Cyclic(s.M[i] if i % 2 else s.U[i](s.M[i + 1]) for i in range(1, n + 1))
    elif kind == "endpoints-P":
        A = Cyclic(s.P)
    elif kind == "endpoints-Q":
        A = Cyclic(s.Q)
    elif kind == "endpoints-pattern":
        if pattern is None:
            raise InvalidPattern("endpoints-pattern needs a pattern")
        A = _endpoint_word(s, pattern)
        pattern = pattern.upper()
    elif kind == "custom":
        if points is None or len(points) != n:
            raise ValueError(f"custom partition needs {n} points")
        A = Cyclic(norm_angle(float(p)) for p in points)
    else:
        raise ValueError(f"unknown partition kind {kind!r}")
    part = Partition(A, kind, pattern)
    validate_partition(s, part)
    return part


def parse_partition(s, text):
    """Partition from a short name: ``midpoints``, ``product``, ``mixed``, ``endpoints:PQ``..."""
    text = text.strip()
    aliases = {"product": "product-fixed-points", "P": "endpoints-P", "Q": "endpoints-Q"}
    if text.startswith("endpoints:"):
        pat = text.split(":", 1)[1].upper()
        if pat in ("P", "Q"):
            return make_partition(s, "endpoints-" + pat)
        return make_partition(s, "endpoints-pattern", pattern=pat)
    return make_partition(s, aliases.get(text, text))


def with_point(s, part, i, angle):
    """Copy of ``part`` with ``A_i`` replaced."""
    pts = list(part.A)
    pts[i - 1] = norm_angle(angle)
    out = Partition(Cyclic(pts), "custom")
    validate_partition(s, out)
    return out


def validate_partition(s, part):
    tol = tolerance.angle_tol()
    if part.n != s.n:
        raise ValueError(f"partition has {part.n} points, surface needs {s.n}")
    for i in range(1, s.n + 1):
        if not in_arc(part.A[i], s.P[i], s.Q[i], tol=tol):
            raise ValueError(f"A_{i} is not in [P_{i}, Q_{i}]")
    off = part.offsets
    if np.any(np.diff(off) <= 0.0):
        raise ValueError("partition points are not in strict cyclic order")


def short_cycle_interval(s, i):
    """The interval ``[b_i, a_i]`` of points with the short cycle property, both formulas checked."""
    a1 = s.T[s.sigma[i]](s.P[s.rho[i] + 1])
    a2 = s.U[i](s.P[s.tau[i] - 2])
    b1 = s.T[s.sigma[i - 1]](s.Q[s.theta[i - 1]])
    b2 = s.U[i](s.Q[s.tau[i] + 2])
    tol = 10 * tolerance.angle_tol()
    if arc_dist(a1, a2) > tol or arc_dist(b1, b2) > tol:
        raise RelationFailure(f"short cycle interval formulas disagree at index {i}")
    return b1, a1


def random_short_cycle_partition(s, rng):
    """Partition with each ``A_i`` drawn uniformly from the open interval ``(b_i, a_i)``."""
    pts = []
    for i in range(1, s.n + 1):
        b_i, a_i = short_cycle_interval(s, i)
        pts.append(b_i + rng.uniform(0.0, 1.0) * ccw(b_i, a_i))
    return make_partition(s, "custom", points=pts)


# ---------------------------------------------------------------------------
# the maps


def strip_of(part, x):
    """Index ``i`` with ``x`` in ``[A_i, A_{i+1})`` (scalar or array)."""
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    k = kernels.strip_index(x_arr, part.base, part.offsets, tolerance.angle_tol())
    return int(k[0]) if np.ndim(x) == 0 else k


def boundary_step(s, part, x):
    """One step of the boundary map: ``(T_i x, i)``."""
    i = strip_of(part, float(x))
    return s.T[i](float(x)), i


def natural_extension_step(s, part, u, w):
    i = strip_of(part, float(w))
    T = s.T[i]
    return T(float(u)), T(float(w)), i


def generator_arrays(s):
    ta = np.array([t.a for t in s.T], dtype=complex)
    tb = np.array([t.b for t in s.T], dtype=complex)
    return ta, tb


def extension_orbit(s, part, u, w, steps):
    """Vectorised ``F_A^steps``."""
    ta, tb = generator_arrays(s)
    return kernels.extension_orbit(np.atleast_1d(u), np.atleast_1d(w), ta, tb, part.base,
                                   part.offsets, tolerance.angle_tol(), int(steps))


def apply_indexed(s, idx, theta):
    """Apply ``T_{idx[k]}`` to ``theta[k]`` elementwise."""
    ta, tb = generator_arrays(s)
    a = ta[np.asarray(idx) - 1]
    b = tb[np.asarray(idx) - 1]
    z = np.exp(1j * np.asarray(theta, dtype=float))
    return norm_angles(np.angle((a * z + b) / (np.conj(b) * z + np.conj(a))))


def inverse_step_many(s, part, attr, u, w):
    """Preimages under ``F_A`` inside the attractor.

    Returns ``(u', w', j, margin)`` where ``j`` is the branch used and
    ``margin`` is the membership margin of the preimage (negative when no
    branch lands in the attractor).
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    w = np.atleast_1d(np.asarray(w, dtype=float))
    best = np.full(u.shape, -np.inf)
    bu = np.zeros_like(u)
    bw = np.zeros_like(w)
    bj = np.zeros(u.shape, dtype=np.int64)
    for j in range(1, s.n + 1):
        inv = s.T[j].inverse()
        pu = inv.apply_angles(u)
        pw = inv.apply_angles(w)
        width = ccw(part.A[j], part.A[j + 1])
        dw = norm_angles(pw - part.A[j])
        w_margin = np.where(dw <= width, np.minimum(dw, width - dw),
                            -np.minimum(dw - width, TWO_PI - dw))
        score = np.minimum(attr.margin(pu, pw), w_margin)
        better = score > best
        best = np.where(better, score, best)
        bu = np.where(better, pu, bu)
        bw = np.where(better, pw, bw)
        bj = np.where(better, j, bj)
    return bu, bw, bj, best


def inverse_step(s, part, attr, u, w):
    """The preimage of ``(u, w)`` under ``F_A`` lying in the attractor."""
    tol = tolerance.angle_tol()
    if not attr.contains(u, w):
        raise NotInAttractor(f"({u}, {w}) is not in the attractor")
    pu, pw, j, margin = inverse_step_many(s, part, attr, [u], [w])
    if margin[0] < -10 * tol:
        raise NotInAttractor(f"no preimage of ({u}, {w}) in the attractor")
    return float(pu[0]), float(pw[0]), int(j[0])


# ---------------------------------------------------------------------------
# cycles


@dataclass(frozen=True)
class CycleReport:
    B: Cyclic
    C: Cyclic
    short_cycle: Cyclic
    cycle_end: Cyclic
    admissible_interval: Cyclic
    images: Cyclic  # (f(T_i A_i), f(T_{i-1} A_i)) per index

    @property
    def all_short(self):
        return all(self.short_cycle)

    def to_dict(self):
        rows = []
        for i in range(1, len(self.B) + 1):
            rows.append({
                "i": i,
                "B": self.B[i],
                "C": self.C[i],
                "short_cycle": bool(self.short_cycle[i]),
                "cycle_end": self.cycle_end[i],
                "interval": list(self.admissible_interval[i]),
            })
        return rows


def cycle_report(s, part):
    n = s.n
    tol = 10 * tolerance.angle_tol()
    B, C, short, ends, intervals, images = [], [], [], [], [], []
    for i in range(1, n + 1):
        right = s.T[i](part.A[i])
        left = s.T[i - 1](part.A[i])
        f_right, _ = boundary_step(s, part, right)
        f_left, _ = boundary_step(s, part, left)
        images.append((f_right, f_left))
        short.append(arc_dist(f_right, f_left) <= tol)
        ends.append(s.U[i].inverse()(part.A[i]))
        B.append(s.T[s.sigma[i - 1]](part.A[s.sigma[i - 1]]))
        C.append(s.T[s.sigma[i + 1]](part.A[s.sigma[i + 1] + 1]))
        intervals.append(short_cycle_interval(s, i))
    return CycleReport(Cyclic(B), Cyclic(C), Cyclic(short), Cyclic(ends), Cyclic(intervals),
                       Cyclic(images))


# ---------------------------------------------------------------------------
# attractors


@dataclass(frozen=True, eq=False)
class Attractor:
    """Cyclic step-function region ``{(u, w): u in [lo_k, lo_k + span_k] for w in piece k}``.

    Piece ``k`` covers ``w`` offsets ``[breaks[k], breaks[k+1]]`` measured
    counter-clockwise from ``base``; ``breaks[0]`` is 0.
    """

    base: float
    breaks: np.ndarray
    lo: np.ndarray
    span: np.ndarray
    strip: np.ndarray
    provenance: str
    meta: dict = field(default_factory=dict)

    @property
    def pieces(self):
        return len(self.breaks)

    def piece_bounds(self, k):
        start = norm_angle(self.base + self.breaks[k])
        end_off = self.breaks[k + 1] if k + 1 < self.pieces else TWO_PI
        return start, norm_angle(self.base + end_off), end_off - self.breaks[k]

    def contains(self, u, w, tol=None):
        tol = tolerance.angle_tol() if tol is None else tol
        scalar = np.ndim(u) == 0 and np.ndim(w) == 0
        out = kernels.step_member(np.atleast_1d(np.asarray(u, dtype=float)),
                                  np.atleast_1d(np.asarray(w, dtype=float)),
                                  self.base, self.breaks, self.lo, self.span, tol)
        return bool(out[0]) if scalar else out

    def piece_of(self, w):
        d = norm_angles(np.atleast_1d(w) - self.base)
        k = np.searchsorted(self.breaks, d, side="right") - 1
        k[k < 0] = self.pieces - 1
        return k

    def margin(self, u, w):
        """Signed u-distance to the boundary of the piece's arc (positive inside)."""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        k = self.piece_of(w)
        d = norm_angles(u - self.lo[k])
        sp = self.span[k]
        return np.where(d <= sp, np.minimum(d, sp - d), -np.minimum(d - sp, TWO_PI - d))

    def arc_at(self, w):
        """``(L, R)``: the u-arc over ``w``."""
        k = int(self.piece_of(w)[0])
        return self.lo[k], norm_angle(self.lo[k] + self.span[k])

    def sample(self, size, rng):
        """``size`` points drawn uniformly (in angle area) from the region."""
        w_len = np.diff(np.append(self.breaks, TWO_PI))
        area = w_len * self.span
        k = rng.choice(self.pieces, size=size, p=area / area.sum())
        w = norm_angles(self.base + self.breaks[k] + rng.random(size) * w_len[k])
        u = norm_angles(self.lo[k] + rng.random(size) * self.span[k])
        return u, w

    def rectangles(self):
        """One ``(u_lo, u_hi, w_lo, w_hi, strip)`` per piece, arcs read counter-clockwise."""
        out = []
        for k in range(self.pieces):
            w_lo, w_hi, _ = self.piece_bounds(k)
            out.append((float(self.lo[k]), norm_angle(self.lo[k] + self.span[k]), w_lo, w_hi,
                        int(self.strip[k])))
        return out

    def plane_rectangles(self):
        """Rectangles cut at the seam ``0 = 2 pi`` so they sit in ``[0, 2 pi]^2``.

        Each carries the tag ``above`` (w > u) or ``below``, the two components
        of the picture split by the diagonal.
        """
        out = []
        for k in range(self.pieces):
            w_lo, _, w_len = self.piece_bounds(k)
            for wa, wb in _unwrap(w_lo, w_len):
                for ua, ub in _unwrap(self.lo[k], self.span[k]):
                    tag = "above" if wa + wb > ua + ub else "below"
                    out.append((ua, ub, wa, wb, int(self.strip[k]), tag))
        out.sort(key=lambda r: (r[2], r[0]))
        return out

    def corners(self):
        """Corner points ``(kind, u, w)`` where a boundary step function jumps.

        A lower corner sits at the level the left boundary leaves, an upper
        corner at the level the right boundary reaches.
        """
        pts = []
        tol = tolerance.angle_tol()
        for k in range(self.pieces):
            prev = (k - 1) % self.pieces
            w0, _, _ = self.piece_bounds(k)
            if arc_dist(self.lo[k], self.lo[prev]) > tol:
                pts.append(("lower", float(self.lo[prev]), w0))
            hi_k = norm_angle(self.lo[k] + self.span[k])
            hi_p = norm_angle(self.lo[prev] + self.span[prev])
            if arc_dist(hi_k, hi_p) > tol:
                pts.append(("upper", hi_k, w0))
        return pts

    def min_diagonal_gap(self):
        """Smallest angular distance from the region to the diagonal."""
        gap = math.inf
        for k in range(self.pieces):
            w0, w1, _ = self.piece_bounds(k)
            hi = norm_angle(self.lo[k] + self.span[k])
            # u-arc [lo, hi] never contains w; closest approach at the piece ends
            for w in (w0, w1):
                gap = min(gap, ccw(w, self.lo[k]), ccw(hi, w))
        return gap

    def to_csv(self):
        buf = io.StringIO()
        buf.write("u_lo,u_hi,w_lo,w_hi,strip,component\n")
        for ua, ub, wa, wb, strip, tag in self.plane_rectangles():
            buf.write(f"{ua:.12f},{ub:.12f},{wa:.12f},{wb:.12f},{strip},{tag}\n")
        return buf.getvalue()

    def to_svg(self, size=600, title=None):
        scale = size / TWO_PI
        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
               f'viewBox="0 0 {size} {size}">',
               f'<rect x="0" y="0" width="{size}" height="{size}" fill="white" stroke="black"/>']
        if title:
            out.append(f"<title>{title}</title>")
        for ua, ub, wa, wb, _, tag in self.plane_rectangles():
            colour = "#4a7ab5" if tag == "above" else "#b5654a"
            x = ua * scale
            y = size - wb * scale  # w upward
            out.append(f'<rect x="{x:.3f}" y="{y:.3f}" width="{(ub - ua) * scale:.3f}" '
                       f'height="{(wb - wa) * scale:.3f}" fill="{colour}" stroke="none"/>')
        out.append(f'<line x1="0" y1="{size}" x2="{size}" y2="0" stroke="black" stroke-width="0.8"/>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def to_dict(self):
        return {
            "provenance": self.provenance,
            "base": self.base,
            "pieces": [
                {"w_start": r[2], "w_end": r[3], "u_lo": r[0], "u_hi": r[1], "strip": r[4]}
                for r in self.rectangles()
            ],
            "meta": {k: v for k, v in self.meta.items() if not isinstance(v, np.ndarray)},
        }


def _unwrap(start, length):
    """Split the arc ``[start, start + length]`` into pieces inside ``[0, 2 pi]``."""
    end = start + length
    if end <= TWO_PI + 1e-15:
        return [(start, min(end, TWO_PI))]
    return [(start, TWO_PI), (0.0, end - TWO_PI)]


def _from_pieces(part, starts, lo, hi, strips, provenance, meta=None):
    base = part.base
    breaks = np.array([ccw(base, x) for x in starts])
    strips = np.asarray(strips)
    # where two pieces start at the same w keep the one labelled with the strip there
    home = strip_of(part, np.asarray(starts, dtype=float) + 1e-12)
    order = np.lexsort((strips != home, breaks))
    keep = []
    for k in order:
        if keep and abs(breaks[k] - breaks[keep[-1]]) <= 1e-12:
            continue
        keep.append(k)
    keep = np.array(keep)
    lo = np.array(lo, dtype=float)[keep]
    hi = np.array(hi, dtype=float)[keep]
    span = norm_angles(hi - lo)
    return Attractor(base, breaks[keep], lo, span, strips[keep], provenance, meta or {})


def compare_attractors(a, b, samples=4096, margin=None):
    """Largest gap between the boundary levels of two attractors.

    Levels are compared at ``samples`` evenly spaced ``w`` values, skipping
    those within ``margin`` of a break of either region (where a one-cell
    shift in the break position would dominate).
    """
    cells = [x.meta.get("bins") for x in (a, b) if x.meta.get("bins")]
    cell = TWO_PI / max(cells) if cells else 0.0
    margin = 2 * cell if margin is None else margin
    ws = (np.arange(samples) + 0.5) * TWO_PI / samples
    brk = np.concatenate([norm_angles(a.base + a.breaks), norm_angles(b.base + b.breaks)])
    dist = np.abs((ws[:, None] - brk[None, :] + np.pi) % TWO_PI - np.pi).min(axis=1)
    ws = ws[dist > margin]
    ka = a.piece_of(ws)
    kb = b.piece_of(ws)
    lo_gap = np.abs((a.lo[ka] - b.lo[kb] + np.pi) % TWO_PI - np.pi)
    hi_gap = np.abs((a.lo[ka] + a.span[ka] - b.lo[kb] - b.span[kb] + np.pi) % TWO_PI - np.pi)
    return float(max(lo_gap.max(initial=0.0), hi_gap.max(initial=0.0))), cell


def _clamp_in_strip(x, start, width):
    """Offset of ``x`` inside a strip of the given width, clamped to the strip."""
    d = ccw(start, x)
    tol = tolerance.angle_tol()
    if d <= tol or d >= TWO_PI - tol:
        return 0.0
    if abs(d - width) <= tol:
        return width
    if d <= width:
        return d
    # outside: clamp to whichever end is nearer
    return width if d - width < TWO_PI - d else 0.0


def strip_layout(s, part, report, i):
    """Offsets ``(o_B, o_C, width)`` of ``B_i`` and ``C_i`` inside strip ``i``."""
    width = ccw(part.A[i], part.A[i + 1])
    return (_clamp_in_strip(report.B[i], part.A[i], width),
            _clamp_in_strip(report.C[i], part.A[i], width), width)


def closed_form_attractor(s, part, report=None):
    """Attractor assembled from the corner points ``(P_i, B_i)`` and ``(Q_{i+1}, C_i)``."""
    report = report or cycle_report(s, part)
    if not report.all_short:
        bad = [i for i in range(1, s.n + 1) if not report.short_cycle[i]]
        raise NoAttractor(f"short cycle property fails at {bad}; use the numeric path")
    starts, lo, hi, strips = [], [], [], []
    tol = tolerance.angle_tol()
    for i in range(1, s.n + 1):
        o_b, o_c, width = strip_layout(s, part, report, i)
        cuts = [0.0]
        for c in sorted((o_b, o_c)):
            if cuts[-1] + tol < c < width - tol:
                cuts.append(c)
        ends = cuts[1:] + [width]
        for c, e in zip(cuts, ends):
            mid = 0.5 * (c + e)  # decide each side from the piece interior
            starts.append(norm_angle(part.A[i] + c))
            lo.append(s.Q[i + 1] if mid < o_c else s.Q[i + 2])
            hi.append(s.P[i - 1] if mid < o_b else s.P[i])
            strips.append(i)
    return _from_pieces(part, starts, lo, hi, strips, "closed-form",
                        {"B": list(report.B), "C": list(report.C)})


def level_candidates(s, part, depth=3):
    """Angles that attractor boundaries are expected to snap to."""
    pts = list(s.P) + list(s.Q) + list(part.A)
    front = []
    for i in range(1, s.n + 1):
        front.append(s.T[i](part.A[i]))
        front.append(s.T[i - 1](part.A[i]))
    pts += front
    for _ in range(depth):
        front = [boundary_step(s, part, x)[0] for x in front]
        pts += front
    return np.array(sorted(set(round(norm_angle(p), 14) for p in pts)))


def _snap(values, candidates, radius):
    if candidates is None or len(candidates) == 0:
        return values, np.zeros(len(values), dtype=bool)
    diff = np.abs(((values[:, None] - candidates[None, :]) + np.pi) % TWO_PI - np.pi)
    j = np.argmin(diff, axis=1)
    ok = diff[np.arange(len(values)), j] <= radius
    return np.where(ok, candidates[j], values), ok


def occupancy_levels(counts, threshold=1):
    """Per-row u-arc ``(L, R)`` in cell units, scanning out from the diagonal cell."""
    bins = counts.shape[0]
    occ = counts >= threshold
    L = np.full(bins, -1, dtype=np.int64)
    R = np.full(bins, -1, dtype=np.int64)
    for r in range(bins):
        row = occ[r]
        if not row.any():
            continue
        fwd = np.roll(row, -r)  # fwd[k] is cell r + k
        nz = np.flatnonzero(fwd)
        L[r] = (r + nz[0]) % bins
        R[r] = (r + nz[-1]) % bins
    return L, R


def _grid_seed(grid):
    """Grid of starting pairs; every point gets its own ``w`` so orbits stay distinct.

    Inside each cell ``w`` is shifted by a golden-ratio sequence in the column
    index, since ``u`` contracts under iteration and points sharing ``w``
    would merge.
    """
    h = TWO_PI / grid
    idx = np.arange(grid)
    u, w = np.meshgrid((idx + 0.5) * h, idx * h, indexing="xy")
    jitter = np.mod(np.arange(grid) * 0.6180339887498949 + 0.5, 1.0)
    w = w + jitter[None, :] * h
    u = u.ravel()
    w = w.ravel()
    gap = np.abs((u - w + np.pi) % TWO_PI - np.pi)
    keep = gap > 1.5 * h
    return u[keep], w[keep]


def _pieces_from_levels(s, part, L, R, bins, snap):
    h = TWO_PI / bins
    rows = np.arange(bins)
    strips = kernels.strip_index((rows + 0.5) * h, part.base, part.offsets, 0.0)
    # a row holding a strip boundary mixes two strips' fibres; leave it out
    mixed = (kernels.strip_index(rows * h, part.base, part.offsets, 0.0)
             != kernels.strip_index((rows + 1) * h, part.base, part.offsets, 0.0))
    lo = L * h
    hi = (R + 1) * h
    cand = level_candidates(s, part) if snap else None
    if snap:
        lo, _ = _snap(lo, cand, 1.5 * h)
        hi, _ = _snap(hi, cand, 1.5 * h)
    lo = norm_angles(lo)
    hi = norm_angles(hi)
    # runs of constant (strip, lo, hi) in cyclic row order starting at the row of A_1
    start_row = int(part.base / h) + 1
    order = (np.arange(bins) + start_row) % bins
    runs = []
    for r in order:
        if mixed[r]:
            continue
        key = (int(strips[r]), lo[r], hi[r])
        if runs and runs[-1][0][0] == key[0] and arc_dist(runs[-1][0][1], key[1]) < 0.5 * h \
                and arc_dist(runs[-1][0][2], key[2]) < 0.5 * h:
            runs[-1][1].append(r)
        else:
            runs.append((key, [r]))
    # single-row runs at jumps inside a strip are mixtures of their neighbours
    cleaned = []
    for idx, (key, members) in enumerate(runs):
        if len(members) == 1:
            if cleaned and cleaned[-1][0][0] == key[0]:
                cleaned[-1][1].extend(members)
                continue
            nxt = runs[(idx + 1) % len(runs)]
            if nxt[0][0] == key[0] and len(nxt[1]) > 1:
                continue  # the next run starts at the strip boundary anyway
        cleaned.append((key, members))
    starts, los, his, strs = [], [], [], []
    for idx, (key, members) in enumerate(cleaned):
        first = members[0]
        if key[0] != cleaned[idx - 1][0][0] or len(cleaned) == 1:
            w0 = part.A[key[0]]  # strip boundaries are exact
        else:
            w0 = first * h
            if snap:
                w0 = float(_snap(np.array([w0]), cand, 1.5 * h)[0][0])
        starts.append(norm_angle(w0))
        los.append(key[1])
        his.append(key[2])
        strs.append(key[0])
    return starts, los, his, strs


def _levels_close(a, b, cell):
    if a.pieces != b.pieces:
        return False
    worst = 0.0
    for k in range(a.pieces):
        worst = max(worst, arc_dist(a.breaks[k], b.breaks[k]), arc_dist(a.lo[k], b.lo[k]),
                    arc_dist(a.lo[k] + a.span[k], b.lo[k] + b.span[k]))
    return worst <= cell + 1e-12


_NUMERIC_CACHE = {}  # results are immutable and deterministic, so reuse them


def numeric_attractor(s, part, grid=1024, steps=64, window=16, bins=None, max_steps=1000,
                      snap=True, threshold=1):
    """Attractor found by iterating a grid of ``(u, w)`` pairs.

    The first pass runs ``steps`` iterations; visits during its last
    ``window`` steps are binned on a ``bins x bins`` grid and the boundary
    step functions are read off row by row.  Further passes of ``window``
    steps refresh the histogram until two consecutive passes agree to one
    cell.
    """
    bins = bins or max(64, grid // 2)
    key = (s.genus, tuple(round(a, 13) for a in part.A), grid, steps, window, bins, max_steps,
           snap, threshold, tolerance.angle_tol())
    if key in _NUMERIC_CACHE:
        return _NUMERIC_CACHE[key]
    ta, tb = generator_arrays(s)
    tol = tolerance.angle_tol()
    u, w = _grid_seed(grid)
    cell = TWO_PI / bins
    prev = None
    done = 0
    history = []
    run = steps
    while done + run <= max_steps:
        u, w, counts = kernels.extension_occupancy(u, w, ta, tb, part.base, part.offsets, tol,
                                                   run, window, bins)
        done += run
        run = window
        L, R = occupancy_levels(counts, threshold)
        if (L < 0).any():
            raise NoFiniteStructure("some rows of the torus were never visited")
        starts, lo, hi, strips = _pieces_from_levels(s, part, L, R, bins, snap)
        cur = _from_pieces(part, starts, lo, hi, strips, "numeric",
                           {"grid": grid, "bins": bins, "steps": done})
        history.append(cur.pieces)
        if prev is not None and _levels_close(prev, cur, cell):
            cur.meta["passes"] = len(history)
            cur.meta["piece_counts"] = history
            _NUMERIC_CACHE[key] = cur
            return cur
        prev = cur
    raise NoFiniteStructure(f"step functions kept changing after {done} steps (pieces {history})")


_NUMERIC_KINDS = ("endpoints-P", "endpoints-Q", "endpoints-pattern")


def attractor(s, part, method="auto", **kwargs):
    """Attractor of ``F_A``: closed form under short cycles, numeric otherwise."""
    if method == "closed-form":
        return closed_form_attractor(s, part)
    if method == "numeric":
        return numeric_attractor(s, part, **kwargs)
    if part.kind in _NUMERIC_KINDS:
        return numeric_attractor(s, part, **kwargs)
    report = cycle_report(s, part)
    if report.all_short:
        return closed_form_attractor(s, part, report)
    return numeric_attractor(s, part, **kwargs)


# ---------------------------------------------------------------------------
# reduction


def is_reduced(attr, u, w):
    return attr.contains(float(u), float(w))


def reduce(s, part, attr, u, w, max_steps=1000):
    """Iterate ``F_A`` until ``(u, w)`` lands in the attractor.

    Returns ``(u', w', word)`` where ``s.maps(word)`` sends the input geodesic
    to the reduced one.
    """
    u = float(u)
    w = float(w)
    if arc_dist(u, w) <= tolerance.angle_tol():
        raise ValueError("endpoints coincide")
    applied = []
    orbit = [(u, w)]
    for _ in range(max_steps + 1):
        if is_reduced(attr, u, w):
            return u, w, GroupWord(tuple(reversed(applied)))
        if len(applied) == max_steps:
            break
        u, w, i = natural_extension_step(s, part, u, w)
        applied.append(i)
        orbit.append((u, w))
    raise MaxStepsExceeded(f"not reduced after {max_steps} steps", orbit=orbit)


def reduce_many(s, part, attr, u, w, max_steps=50):
    """Number of ``F_A`` steps each pair needs to enter the attractor (-1 if more than max)."""
    u = np.array(u, dtype=float)
    w = np.array(w, dtype=float)
    need = np.full(u.shape, -1, dtype=np.int64)
    for k in range(max_steps + 1):
        inside = attr.contains(u, w) & (need < 0)
        need[inside] = k
        if (need >= 0).all():
            break
        u, w = extension_orbit(s, part, u, w, 1)
    return need
