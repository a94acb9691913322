"""The geometric map F_G, bulges and corners, the conjugacy Phi, coding
sequences and cross-section return times.

Points of the torus are pairs ``(u, w)`` as in ``boundary``.  A geodesic that
meets the fundamental polygon is coded by the sides it leaves through; a
reduced geodesic is coded by the strips its forward endpoint visits.
"""
from dataclasses import dataclass, field
from functools import lru_cache
import json

import numpy as np

from . import kernels, tolerance
from .boundary import inverse_step_many, reduce
from .errors import NoIntersection, NotReduced, Unclassifiable
from .moebius import TWO_PI, Geodesic, arc_dist, norm_angles
from .surface import chord_arclength, chord_point, clip_chords

O, LOWER_BULGE, UPPER_BULGE, LOWER_CORNER, UPPER_CORNER = range(5)
KIND_NAMES = ("O", "lower-bulge", "upper-bulge", "lower-corner", "upper-corner")


@dataclass(frozen=True)
class RegionTag:
    kind: str
    index: int = 0

    def __str__(self):
        return self.kind if self.kind == "O" else f"{self.kind}({self.index})"


# ---------------------------------------------------------------------------
# vectorised group actions


def _coeffs(maps):
    return (np.array([m.a for m in maps], dtype=complex),
            np.array([m.b for m in maps], dtype=complex))


def _moebius(a, b, z):
    return (a * z + b) / (np.conj(b) * z + np.conj(a))


def _on_angles(a, b, theta):
    return norm_angles(np.angle(_moebius(a, b, np.exp(1j * np.asarray(theta, dtype=float)))))


@lru_cache(maxsize=None)
def _tables(s):
    ta, tb = _coeffs(s.T)
    ua, ub = _coeffs(s.U)
    va, vb = _coeffs([m.inverse() for m in s.U])
    return {
        "T": (ta, tb),
        "Tinv": _coeffs([m.inverse() for m in s.T]),
        "U": (ua, ub),
        "Uinv": (va, vb),
        "P": np.array(list(s.P)),
        "Q": np.array(list(s.Q)),
        "sigma": np.array(list(s.sigma)),
        "tau": np.array(list(s.tau)),
    }


def _act(s, name, idx, u, w):
    """Apply map ``name[idx]`` (1-based) to both coordinates."""
    a, b = _tables(s)[name]
    k = np.asarray(idx) - 1
    return _on_angles(a[k], b[k], u), _on_angles(a[k], b[k], w)


def _act_disk(s, name, idx, z):
    a, b = _tables(s)[name]
    k = np.asarray(idx) - 1
    return _moebius(a[k], b[k], z)


def _wrap(i, n):
    return (np.asarray(i) - 1) % n + 1


def _arc_index(points, x):
    """1-based ``j`` with ``x`` in ``[points_j, points_{j+1})``; points run counter-clockwise."""
    off = norm_angles(points - points[0])
    return np.searchsorted(off, norm_angles(np.asarray(x) - points[0]), side="right")


def _pair(g):
    if isinstance(g, Geodesic):
        return g.u.angle, g.w.angle
    u, w = g
    return float(u), float(w)


# ---------------------------------------------------------------------------
# the geometric map


def geometric_step_many(s, u, w):
    """``F_G`` on arrays.  Returns ``(u', w', side, hit)``; misses keep their input."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    w = np.atleast_1d(np.asarray(w, dtype=float))
    _, _, _, side, hit = clip_chords(s, u, w)
    side = np.where(hit, side, 1)
    u2, w2 = _act(s, "T", side, u, w)
    return np.where(hit, u2, u), np.where(hit, w2, w), np.where(hit, side, 0), hit


def geometric_step(s, u, w):
    """Apply ``T_i`` where ``i`` is the side through which ``uw`` leaves the polygon."""
    u2, w2, side, hit = geometric_step_many(s, [u], [w])
    if not hit[0]:
        raise NoIntersection(f"geodesic ({u}, {w}) misses the polygon")
    return float(u2[0]), float(w2[0]), int(side[0])


def geometric_inverse_step(s, u, w):
    """Undo ``F_G``: the previous segment is ``T_j`` of this one, ``j`` the entry side."""
    _, _, side, _, hit = clip_chords(s, [u], [w])
    if not hit[0]:
        raise NoIntersection(f"geodesic ({u}, {w}) misses the polygon")
    j = int(side[0])
    u2, w2 = _act(s, "T", [j], [u], [w])
    return float(u2[0]), float(w2[0]), j


# ---------------------------------------------------------------------------
# bulges, corners and the conjugacy


def classify_many(s, attr, u, w):
    """Region codes (see ``KIND_NAMES``) and indices; kind -1 means neither set."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    w = np.atleast_1d(np.asarray(w, dtype=float))
    tb = _tables(s)
    in_g = clip_chords(s, u, w)[4]
    in_a = attr.contains(u, w)
    lower = norm_angles(u - w) < np.pi  # u just counter-clockwise of w
    low_i = _wrap(_arc_index(tb["Q"], u) - 1, s.n)  # u in [Q_{i+1}, Q_{i+2})
    up_i = _wrap(_arc_index(tb["P"], u) + 1, s.n)  # u in [P_{i-1}, P_i)
    index = np.where(lower, low_i, up_i)
    kind = np.full(u.shape, -1, dtype=np.int64)
    kind[in_g & in_a] = O
    only_g = in_g & ~in_a
    only_a = in_a & ~in_g
    kind[only_g] = np.where(lower[only_g], LOWER_BULGE, UPPER_BULGE)
    kind[only_a] = np.where(lower[only_a], LOWER_CORNER, UPPER_CORNER)
    index = np.where((kind == O) | (kind < 0), 0, index)
    return kind, index


def classify(s, attr, u, w):
    kind, index = classify_many(s, attr, [u], [w])
    if kind[0] < 0:
        raise Unclassifiable(f"({u}, {w}) lies in neither Omega_G nor the attractor")
    return RegionTag(KIND_NAMES[kind[0]], int(index[0]))


def phi_index(s, kind, index):
    """Index ``j`` of the map ``U_j`` by which Phi acts (0 for the identity)."""
    tau = _tables(s)["tau"]
    safe = np.clip(index, 1, s.n) - 1
    j = np.zeros(np.shape(kind), dtype=np.int64)
    j = np.where(kind == LOWER_BULGE, _wrap(tau[safe] + 1, s.n), j)
    j = np.where(kind == UPPER_BULGE, tau[safe], j)
    return j


def corner_index(s, kind, index):
    """Index ``j`` with the corner point's geodesic meeting ``U_j`` of the polygon."""
    j = np.zeros(np.shape(kind), dtype=np.int64)
    j = np.where(kind == UPPER_CORNER, index, j)
    j = np.where(kind == LOWER_CORNER, _wrap(index + 1, s.n), j)
    return j


def phi_many(s, attr, u, w):
    """Phi on arrays: identity on O, ``U_{tau(i)+1}`` on lower bulge i, ``U_{tau(i)}`` on upper."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    w = np.atleast_1d(np.asarray(w, dtype=float))
    kind, index = classify_many(s, attr, u, w)
    if ((kind < 0) | (kind >= LOWER_CORNER)).any():
        raise Unclassifiable("phi needs points of Omega_G")
    j = phi_index(s, kind, index)
    moved = j > 0
    u2, w2 = u.copy(), w.copy()
    if moved.any():
        u2[moved], w2[moved] = _act(s, "U", j[moved], u[moved], w[moved])
    return u2, w2


def phi_inverse_many(s, attr, u, w):
    """Phi^-1: ``U_i^-1`` on upper corner i and ``U_{i+1}^-1`` on lower corner i."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    w = np.atleast_1d(np.asarray(w, dtype=float))
    kind, index = classify_many(s, attr, u, w)
    if ((kind < 0) | ((kind > O) & (kind < LOWER_CORNER))).any():
        raise Unclassifiable("phi_inverse needs points of the attractor")
    j = corner_index(s, kind, index)
    moved = j > 0
    u2, w2 = u.copy(), w.copy()
    if moved.any():
        u2[moved], w2[moved] = _act(s, "Uinv", j[moved], u[moved], w[moved])
    return u2, w2


def phi(s, attr, u, w):
    u2, w2 = phi_many(s, attr, [u], [w])
    return float(u2[0]), float(w2[0])


def phi_inverse(s, attr, u, w):
    u2, w2 = phi_inverse_many(s, attr, [u], [w])
    return float(u2[0]), float(w2[0])


def conjugacy_error(s, part, attr, u, w):
    """Angular gap between ``F_A(Phi(x))`` and ``Phi(F_G(x))`` for points of Omega_G."""
    pu, pw = phi_many(s, attr, u, w)
    i = kernels.strip_index(pw, part.base, part.offsets, tolerance.angle_tol())
    au, aw = _act(s, "T", i, pu, pw)
    gu, gw, _, hit = geometric_step_many(s, u, w)
    if not hit.all():
        raise NoIntersection("conjugacy check needs points of Omega_G")
    bu, bw = phi_many(s, attr, gu, gw)
    return np.maximum(_gap(au, bu), _gap(aw, bw))


def _gap(a, b):
    return np.abs((np.asarray(a) - np.asarray(b) + np.pi) % TWO_PI - np.pi)


def conjugacy_cases(s, part, attr, u, w):
    """Case numbers 1-4 for points of upper corners, 0 elsewhere.

    For ``(u, w)`` in upper corner ``i`` the cases combine whether ``F_A``
    acts by ``T_i`` or ``T_{i+1}`` with whether ``U_i^-1`` of the geodesic
    leaves the polygon through side ``tau(i)-1`` or ``tau(i)-2``.  Points
    matching none of the four get -1.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    w = np.atleast_1d(np.asarray(w, dtype=float))
    kind, index = classify_many(s, attr, u, w)
    case = np.zeros(u.shape, dtype=np.int64)
    up = kind == UPPER_CORNER
    if not up.any():
        return case
    i = index[up]
    k = kernels.strip_index(w[up], part.base, part.offsets, tolerance.angle_tol())
    pu, pw = _act(s, "Uinv", i, u[up], w[up])
    _, _, _, exit_side, hit = clip_chords(s, pu, pw)
    tau = _tables(s)["tau"][i - 1]
    same = k == i
    nxt = k == _wrap(i + 1, s.n)
    e1 = hit & (exit_side == _wrap(tau - 1, s.n))
    e2 = hit & (exit_side == _wrap(tau - 2, s.n))
    c = np.full(i.shape, -1, dtype=np.int64)
    c[same & e1] = 1
    c[same & e2] = 2
    c[nxt & e1] = 3
    c[nxt & e2] = 4
    case[up] = c
    return case


def bulge_vertices(s, report, i):
    """Straight-edge and curved-edge end points of lower bulge i and upper bulge i."""
    P, Q, B, C = s.P, s.Q, report.B, report.C
    lower = [(Q[i + 1], C[i]), (Q[i + 2], C[i]), (Q[i + 2], P[i + 1]), (Q[i + 1], P[i])]
    upper = [(P[i - 1], B[i]), (P[i], B[i]), (P[i], Q[i + 1]), (P[i - 1], Q[i])]
    return lower, upper


def bulge_corner_errors(s, report, samples=32):
    """Check ``U_{tau(i)+1}`` (lower) and ``U_{tau(i)}`` (upper) carry bulges onto corners.

    Vertices must land on the vertices of upper corner ``tau(i)+1`` and of
    lower corner ``tau(i)-1``, and the curved edge, a pencil of geodesics
    through one polygon vertex, must land on the pencil through the vertex of
    the target corner.  Returns the worst vertex and pencil errors.
    """
    worst_vertex = 0.0
    worst_pencil = 0.0
    for i in range(1, s.n + 1):
        lo_src, up_src = bulge_vertices(s, report, i)
        j = s.tau[i] + 1
        lo_dst = [(s.P[j - 1], report.B[j]), (s.P[j], report.B[j]),
                  (s.P[j], s.Q[j + 1]), (s.P[j - 1], s.Q[j])]
        k = s.tau[i] - 1
        up_dst = [(s.Q[k + 1], report.C[k]), (s.Q[k + 2], report.C[k]),
                  (s.Q[k + 2], s.P[k + 1]), (s.Q[k + 1], s.P[k])]
        for src, dst, U in ((lo_src, lo_dst, s.U[j]), (up_src, up_dst, s.U[s.tau[i]])):
            for x in src:
                img = (U(x[0]), U(x[1]))
                err = min(max(arc_dist(img[0], d[0]), arc_dist(img[1], d[1])) for d in dst)
                worst_vertex = max(worst_vertex, err)
        # curved edges: geodesics through V_{i+1} (lower) and V_i (upper)
        for vertex, target, U, ends in ((s.V[i + 1], s.V[j], s.U[j], (s.Q[i + 1], s.Q[i + 2])),
                                        (s.V[i], s.V[s.tau[i]], s.U[s.tau[i]],
                                         (s.P[i - 1], s.P[i]))):
            for t in np.linspace(0.0, 1.0, samples):
                u = ends[0] + t * norm_angles(ends[1] - ends[0])
                w = _through(vertex, u)
                worst_pencil = max(worst_pencil, _miss(target, U(u), U(w)))
    return worst_vertex, worst_pencil


def _through(z, u):
    """Forward end of the geodesic from ``e^{iu}`` through the disk point ``z``."""
    m = (np.exp(1j * u) - z) / (1.0 - np.conj(z) * np.exp(1j * u))  # move z to 0
    back = -m
    return float(np.angle((back + z) / (1.0 + np.conj(z) * back)) % TWO_PI)


def _miss(z, u, w):
    """Zero exactly when the geodesic ``uw`` passes through ``z``."""
    eu = (np.exp(1j * u) - z) / (1.0 - np.conj(z) * np.exp(1j * u))
    ew = (np.exp(1j * w) - z) / (1.0 - np.conj(z) * np.exp(1j * w))
    return float(abs(eu + ew) / 2.0)


# ---------------------------------------------------------------------------
# coding sequences


@dataclass(frozen=True)
class CodingSequence:
    """Two-sided symbol sequence.

    ``future`` holds ``n_0, n_1, ...`` and ``past`` holds ``n_-1, n_-2, ...``.
    For periodic codes ``period`` is the length of the repetend
    ``future[:period]``, kept in the order it was read.
    """

    flavor: str
    genus: int
    partition_kind: object
    past: tuple
    future: tuple
    period: object = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "past", tuple(int(x) for x in self.past))
        object.__setattr__(self, "future", tuple(int(x) for x in self.future))
        n = 8 * self.genus - 4
        bad = [x for x in self.past + self.future if not 1 <= x <= n]
        if bad:
            raise ValueError(f"symbols out of range 1..{n}: {bad[:5]}")

    @property
    def repetend(self):
        return self.future[:self.period] if self.period else None

    def canonical(self):
        """Lexicographically least rotation of the repetend."""
        r = self.repetend
        if r is None:
            return None
        return min(r[k:] + r[:k] for k in range(len(r)))

    def same_cycle(self, word):
        """Whether the repetend equals ``word`` up to rotation."""
        r = self.repetend
        word = tuple(word)
        if r is None or len(word) != len(r):
            return False
        return any(r[k:] + r[:k] == word for k in range(len(r)))

    def symbol(self, k):
        return self.future[k] if k >= 0 else self.past[-k - 1]

    def window(self, m):
        """Symbols ``n_-m .. n_m``."""
        return tuple(self.symbol(k) for k in range(-m, m + 1))

    def shift(self):
        """The left shift: the code of ``F`` applied to the geodesic."""
        return CodingSequence(self.flavor, self.genus, self.partition_kind,
                              (self.future[0],) + self.past, self.future[1:], self.period,
                              dict(self.meta))

    def to_dict(self):
        out = {"flavor": self.flavor, "genus": self.genus,
               "partition_kind": self.partition_kind,
               "past": list(self.past), "future": list(self.future)}
        if self.period:
            out["period"] = self.period
            out["repetend"] = list(self.repetend)
        out.update({k: v for k, v in self.meta.items() if k not in out})
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _periodic(flavor, genus, kind, rep, n_future, n_past, meta):
    p = len(rep)
    future = [rep[k % p] for k in range(max(n_future, p))]
    past = [rep[(-k - 1) % p] for k in range(n_past)]
    return CodingSequence(flavor, genus, kind, past, future, p, meta)


def _close(u, w, u0, w0, tol):
    return arc_dist(u, u0) <= tol and arc_dist(w, w0) <= tol


def arithmetic_code(s, part, attr, g, n_future=24, n_past=24, auto_reduce=True,
                    period_tol=1e-8, max_period=64):
    """Arithmetic code of a geodesic: ``n_k = sigma(i)`` when ``w_k`` is in strip ``i``.

    An unreduced geodesic is first reduced (the reducing word goes into
    ``meta``).  When the orbit returns to its start the repetend is returned
    and the rest of the sequence repeats it.
    """
    u, w = _pair(g)
    meta = {"reducing_word": ""}
    if not attr.contains(u, w):
        if not auto_reduce:
            raise NotReduced(f"({u}, {w}) is not reduced")
        u, w, word = reduce(s, part, attr, u, w)
        meta["reducing_word"] = str(word)
    meta["start"] = [u, w]
    tol = tolerance.angle_tol()
    sig = _tables(s)["sigma"]
    u0, w0 = u, w
    future = []
    steps = max(n_future, max_period if period_tol else 0)
    for k in range(steps):
        i = int(kernels.strip_index(np.array([w]), part.base, part.offsets, tol)[0])
        future.append(int(sig[i - 1]))
        u, w = s.T[i](u), s.T[i](w)
        if period_tol and k < max_period and _close(u, w, u0, w0, period_tol):
            return _periodic("arithmetic", s.genus, part.label(), future, n_future, n_past, meta)
    future = future[:n_future]
    past = []
    pu, pw = np.array([u0]), np.array([w0])
    for _ in range(n_past):
        pu, pw, j, _ = inverse_step_many(s, part, attr, pu, pw)
        past.append(int(sig[j[0] - 1]))
    return CodingSequence("arithmetic", s.genus, part.label(), past, future, None, meta)


def geometric_code(s, g, n_future=24, n_past=24, part=None, attr=None, period_tol=1e-8,
                   max_period=64):
    """Geometric code: ``sigma`` of the exit side along the ``F_G`` orbit.

    The past reads entry sides, since a segment entering through side ``j``
    came from one leaving through ``sigma(j)``.  A geodesic missing the
    polygon is moved there by reduction and ``Phi^-1`` when a partition and
    attractor are given.
    """
    u, w = _pair(g)
    meta = {"reducing_word": ""}
    if not clip_chords(s, [u], [w])[4][0]:
        if part is None or attr is None:
            raise NoIntersection(f"geodesic ({u}, {w}) misses the polygon")
        u, w, word = reduce(s, part, attr, u, w)
        u, w = phi_inverse(s, attr, u, w)
        meta["reducing_word"] = str(word)
    meta["start"] = [u, w]
    sig = _tables(s)["sigma"]
    u0, w0 = u, w
    future = []
    steps = max(n_future, max_period if period_tol else 0)
    kind = part.label() if part is not None else None
    for k in range(steps):
        u, w, side = geometric_step(s, u, w)
        future.append(int(sig[side - 1]))
        if period_tol and k < max_period and _close(u, w, u0, w0, period_tol):
            return _periodic("geometric", s.genus, kind, future, n_future, n_past, meta)
    future = future[:n_future]
    past = []
    u, w = u0, w0
    for _ in range(n_past):
        u, w, j = geometric_inverse_step(s, u, w)
        past.append(j)
    return CodingSequence("geometric", s.genus, kind, past, future, None, meta)


def future_symbols(s, part, w, count):
    """Forward expansion of endpoints ``w``: array of shape ``(len(w), count)``."""
    w = np.atleast_1d(np.asarray(w, dtype=float))
    tol = tolerance.angle_tol()
    sig = _tables(s)["sigma"]
    out = np.empty((w.shape[0], count), dtype=np.int64)
    for k in range(count):
        i = kernels.strip_index(w, part.base, part.offsets, tol)
        out[:, k] = sig[i - 1]
        w = _act(s, "T", i, w, w)[1]
    return out


def past_symbols(s, part, attr, u, w, count):
    """Past symbols ``n_-1 .. n_-count`` of reduced pairs, shape ``(len(u), count)``."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    w = np.atleast_1d(np.asarray(w, dtype=float))
    sig = _tables(s)["sigma"]
    out = np.empty((u.shape[0], count), dtype=np.int64)
    for k in range(count):
        u, w, j, _ = inverse_step_many(s, part, attr, u, w)
        out[:, k] = sig[j - 1]
    return out


# ---------------------------------------------------------------------------
# cross-sections and return times


def _klein_param(u, w, z):
    """Klein chord parameter of the disk point ``z`` on the chord from ``u`` to ``w``."""
    k = 2.0 * z / (1.0 + np.abs(z) ** 2)
    eu = np.exp(1j * np.asarray(u))
    d = np.exp(1j * np.asarray(w)) - eu
    return np.real((k - eu) * np.conj(d)) / np.abs(d) ** 2


def position(u, w, z):
    """Signed hyperbolic arclength of ``z`` along ``uw`` from the chord's Euclidean midpoint."""
    t = _klein_param(u, w, z)
    return 0.5 * np.log(t / (1.0 - t))


def tangent(u, w, z):
    """Unit tangent at ``z`` of the geodesic from ``u`` towards ``w``."""
    ew = np.exp(1j * np.asarray(w))
    m = (ew - z) / (1.0 - np.conj(z) * ew)
    return m / np.abs(m)


def cross_section_many(s, attr, u, w):
    """Cross-section points of reduced pairs.

    Returns ``(z, j)``: the entry point to the polygon when the geodesic meets
    it (``j = 0``), otherwise the first entry point to ``U_j`` of the polygon
    for the corner's index ``j``.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    w = np.atleast_1d(np.asarray(w, dtype=float))
    t_in, _, _, _, hit = clip_chords(s, u, w)
    z = chord_point(u, w, np.clip(t_in, 0.0, 1.0))
    j = np.zeros(u.shape, dtype=np.int64)
    miss = ~hit
    if miss.any():
        kind, index = classify_many(s, attr, u[miss], w[miss])
        if ((kind != LOWER_CORNER) & (kind != UPPER_CORNER)).any():
            raise NotReduced("cross-section points need reduced geodesics")
        jj = corner_index(s, kind, index)
        pu, pw = _act(s, "Uinv", jj, u[miss], w[miss])
        t2, _, _, _, hit2 = clip_chords(s, pu, pw)
        if not hit2.all():
            raise NoIntersection("corner geodesic misses its polygon image")
        z[miss] = _act_disk(s, "U", jj, chord_point(pu, pw, t2))
        j[miss] = jj
    return z, j


def return_times(s, part, attr, u, w):
    """Hyperbolic length along each reduced geodesic between successive cross-section points."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    w = np.atleast_1d(np.asarray(w, dtype=float))
    z0, _ = cross_section_many(s, attr, u, w)
    i = kernels.strip_index(w, part.base, part.offsets, tolerance.angle_tol())
    u1, w1 = _act(s, "T", i, u, w)
    z1, _ = cross_section_many(s, attr, u1, w1)
    back = _act_disk(s, "Tinv", i, z1)
    return position(u, w, back) - position(u, w, z0)


def return_time(s, part, attr, u, w):
    if not attr.contains(u, w):
        raise NotReduced(f"({u}, {w}) is not reduced")
    return float(return_times(s, part, attr, [u], [w])[0])


def geometric_return_times(s, u, w):
    """Length of the segment of each geodesic inside the polygon."""
    t_in, t_out, _, _, hit = clip_chords(s, u, w)
    if not np.all(hit):
        raise NoIntersection("geometric return time needs geodesics meeting the polygon")
    return chord_arclength(t_in, t_out)


def first_return_errors(s, part, attr, u, w):
    """Compare first returns to the geometric and arithmetic cross-sections.

    For points of Omega_G, the geometric side follows the geodesic from its
    entry point to the entry point of ``F_G`` of it.  The arithmetic side
    starts from ``Phi`` of the point, applies ``F_A`` and pulls the new
    cross-section vector back into the polygon.  Returns the largest gaps in
    base point, tangent direction and return time.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    w = np.atleast_1d(np.asarray(w, dtype=float))
    # geometric side
    gu, gw, _, hit = geometric_step_many(s, u, w)
    if not hit.all():
        raise NoIntersection("first-return check needs points of Omega_G")
    t_in, _, _, _, _ = clip_chords(s, gu, gw)
    zg = chord_point(gu, gw, t_in)
    vg = tangent(gu, gw, zg)
    tg = geometric_return_times(s, u, w)
    # arithmetic side
    au, aw = phi_many(s, attr, u, w)
    ta = return_times(s, part, attr, au, aw)
    i = kernels.strip_index(aw, part.base, part.offsets, tolerance.angle_tol())
    bu, bw = _act(s, "T", i, au, aw)
    za, j = cross_section_many(s, attr, bu, bw)
    kind, index = classify_many(s, attr, bu, bw)
    jj = corner_index(s, kind, index)
    za = np.where(jj > 0, _act_disk(s, "Uinv", np.where(jj > 0, jj, 1), za), za)
    pu, pw = bu.copy(), bw.copy()
    if (jj > 0).any():
        pu[jj > 0], pw[jj > 0] = _act(s, "Uinv", jj[jj > 0], bu[jj > 0], bw[jj > 0])
    va = tangent(pu, pw, za)
    return {"point": float(np.abs(za - zg).max()), "tangent": float(np.abs(va - vg).max()),
            "time": float(np.abs(ta - tg).max())}


# ---------------------------------------------------------------------------
# continuity of the coding map


def _agreement(a, b):
    """Largest ``m`` with columns ``0..m`` equal (-1 if column 0 differs)."""
    same = a == b
    first_bad = np.where(same.all(axis=1), same.shape[1], np.argmin(same, axis=1))
    return first_bad - 1


def continuity_profile(s, part, attr, ms, samples=20000, seed=0, metric="endpoints"):
    """Largest distance among sampled pairs whose codes agree on ``|k| <= m``.

    Pairs are a random reduced point and a perturbation of it with size spread
    log-uniformly over ``1e-12 .. 1``, so every agreement length is sampled.
    ``metric="endpoints"`` measures the larger arc gap between matching
    endpoints, which is the quantity the geometric decay bound controls.
    ``metric="tangent"`` measures the Euclidean gap between cross-section base
    points plus the gap between unit tangents; it is continuous too, but its
    local Lipschitz constant blows up for geodesics grazing a polygon vertex,
    so its sampled maxima decay less regularly.  Returns ``{m: distance}``.
    """
    if metric not in ("endpoints", "tangent"):
        raise ValueError(f"unknown metric {metric!r}")
    rng = np.random.default_rng(seed)
    top = max(ms) + 1
    u, w = attr.sample(samples, rng)
    scale = 10.0 ** rng.uniform(-12.0, 0.0, samples)
    ang = rng.uniform(0.0, TWO_PI, samples)
    u2 = norm_angles(u + scale * np.cos(ang))
    w2 = norm_angles(w + scale * np.sin(ang))
    keep = attr.contains(u2, w2) & (arc_dist_many(u2, w2) > 1e-6)
    u, w, u2, w2 = u[keep], w[keep], u2[keep], w2[keep]
    fa, fb = future_symbols(s, part, w, top), future_symbols(s, part, w2, top)
    pa, pb = past_symbols(s, part, attr, u, w, top), past_symbols(s, part, attr, u2, w2, top)
    agree = np.minimum(_agreement(fa, fb), _agreement(pa, pb) + 1)
    if metric == "endpoints":
        dist = np.maximum(arc_dist_many(u, u2), arc_dist_many(w, w2))
    else:
        za, _ = cross_section_many(s, attr, u, w)
        zb, _ = cross_section_many(s, attr, u2, w2)
        dist = np.abs(za - zb) + np.abs(tangent(u, w, za) - tangent(u2, w2, zb))
    out = {}
    for m in ms:
        sel = agree >= m
        out[m] = float(dist[sel].max()) if sel.any() else 0.0
    return out


def arc_dist_many(a, b):
    return _gap(a, b)


def code_continuity_probe(s, part, attr, m, samples=20000, seed=0, metric="endpoints"):
    """Largest distance for sampled codes agreeing on ``|k| <= m``."""
    if m < 1:
        raise ValueError("m must be at least 1")
    return continuity_profile(s, part, attr, [m], samples, seed, metric)[m]


__all__ = [
    "CodingSequence", "RegionTag", "arithmetic_code", "classify", "classify_many",
    "code_continuity_probe", "conjugacy_cases", "conjugacy_error", "continuity_profile",
    "cross_section_many", "first_return_errors", "geometric_code", "geometric_step",
    "geometric_step_many", "phi", "phi_inverse", "phi_many", "phi_inverse_many",
    "return_time", "return_times",
]
