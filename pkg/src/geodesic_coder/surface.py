"""The regular (8g-4)-gon, its side pairings and the generators T_i, U_i.

Indices are 1-based and cyclic throughout: ``s.P[0]`` is ``P_n`` and
``s.P[n + 1]`` is ``P_1``.

Placement: the isometric circle of side ``k`` is centred on the ray at angle
``-pi/2 + 2*pi*(k-1)/n``.  Side ``k`` joins ``V_k`` to ``V_{k+1}`` and its
geodesic extension runs from ``P_k`` to ``Q_{k+1}``.
"""
from dataclasses import dataclass
import math

import numpy as np

from . import tolerance
from .errors import IndexOutOfRange, NoIntersection, RelationFailure
from .moebius import (
    TWO_PI,
    CirclePoint,
    Geodesic,
    MoebiusMap,
    arc_dist,
    fixed_points,
    from_boundary_triple,
    midpoint,
    norm_angle,
    poincare_to_klein,
    product,
)


class Cyclic(tuple):
    """Tuple indexed 1..n with wraparound; iteration runs over items 1..n."""

    def __getitem__(self, i):
        if isinstance(i, slice):
            return tuple.__getitem__(self, i)
        return tuple.__getitem__(self, (i - 1) % len(self))


def wrap(i, n):
    return (i - 1) % n + 1


def side_pairing(genus):
    n = 8 * genus - 4
    return Cyclic(wrap(4 * genus - i, n) if i % 2 else wrap(2 - i, n) for i in range(1, n + 1))


@dataclass(frozen=True)
class GroupWord:
    """The product ``T_{letters[0]} T_{letters[1]} ...``."""

    letters: tuple

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(x) for x in self.letters))

    @classmethod
    def parse(cls, text):
        return cls(tuple(int(x) for x in str(text).replace(" ", "").split(",") if x))

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return ",".join(str(i) for i in self.letters)


@dataclass(frozen=True, eq=False)
class Surface:
    genus: int
    n: int
    V: Cyclic
    P: Cyclic
    Q: Cyclic
    M: Cyclic
    T: Cyclic
    U: Cyclic
    sigma: Cyclic
    rho: Cyclic
    theta: Cyclic
    tau: Cyclic
    klein: np.ndarray  # vertices in the Klein model, row k-1 is V_k

    def maps(self, word):
        """The group element represented by ``word`` (GroupWord or sequence)."""
        letters = word.letters if isinstance(word, GroupWord) else tuple(word)
        if not letters:
            return MoebiusMap.identity()
        return product(self.T[i] for i in letters)

    def table(self):
        rows = []
        for i in range(1, self.n + 1):
            rows.append({
                "i": i,
                "V": [self.V[i].real, self.V[i].imag],
                "P": self.P[i],
                "Q": self.Q[i],
                "M": self.M[i],
                "sigma": self.sigma[i],
                "rho": self.rho[i],
                "theta": self.theta[i],
                "tau": self.tau[i],
            })
        return rows


def polygon_geometry(genus):
    """Centre angles, isometric-circle radius and vertex radius of the polygon."""
    n = 8 * genus - 4
    s = math.sin(math.pi / n)
    radius = math.sqrt(2.0 * s * s / math.cos(2.0 * math.pi / n))
    cosh_r = 1.0 / math.tan(math.pi / n)
    vertex_radius = math.tanh(0.5 * math.acosh(cosh_r))
    centres = [-0.5 * math.pi + TWO_PI * (k - 1) / n for k in range(1, n + 1)]
    return centres, radius, vertex_radius


def build(genus):
    """Construct the surface of the given genus and check its relations."""
    genus = int(genus)
    if genus < 2:
        raise ValueError("genus must be at least 2")
    n = 8 * genus - 4
    centres, radius, vertex_radius = polygon_geometry(genus)
    half = math.atan(radius)
    step = TWO_PI / n

    P = Cyclic(norm_angle(centres[k] - half) for k in range(n))
    Q = Cyclic(norm_angle(centres[k] - step + half) for k in range(n))
    M = Cyclic(midpoint(P[i], Q[i]) for i in range(1, n + 1))
    V = Cyclic(vertex_radius * complex(math.cos(m), math.sin(m)) for m in M)

    sigma = side_pairing(genus)
    rho = Cyclic(wrap(sigma[i] + 1, n) for i in range(1, n + 1))
    theta = Cyclic(wrap(sigma[i] - 1, n) for i in range(1, n + 1))
    tau = Cyclic(wrap(i + 4 * genus - 2, n) for i in range(1, n + 1))

    T = []
    for i in range(1, n + 1):
        j = sigma[i]
        T.append(from_boundary_triple((P[i - 1], P[i], Q[i]), (P[j + 1], Q[j + 1], Q[j + 2])))
    T = Cyclic(T)
    U = Cyclic(T[sigma[i]] @ T[tau[i - 1]] for i in range(1, n + 1))

    klein = np.array([[poincare_to_klein(v).real, poincare_to_klein(v).imag] for v in V])
    surf = Surface(genus, n, V, P, Q, M, T, U, sigma, rho, theta, tau, klein)
    check_relations(surf)
    return surf


def relation_errors(s):
    """Largest deviation in each defining relation of the surface."""
    n = s.n
    ident = MoebiusMap.identity()
    err = {"r11": 0.0, "r12": 0.0, "r13": 0.0, "T_images": 0.0, "U": 0.0, "U_inverse": 0.0,
           "U_vertex": 0.0, "order": 0.0}
    for i in range(1, n + 1):
        j = s.sigma[i]
        err["r11"] = max(err["r11"], (s.T[j] @ s.T[i]).distance(ident))
        err["r12"] = max(err["r12"], abs(s.T[i](s.V[i]) - s.V[s.rho[i]]))
        r = s.rho
        chain = s.T[r[r[r[i]]]] @ s.T[r[r[i]]] @ s.T[r[i]] @ s.T[i]
        err["r13"] = max(err["r13"], chain.distance(ident))
        src = (s.P[i - 1], s.P[i], s.Q[i], s.P[i + 1], s.Q[i + 1], s.Q[i + 2])
        dst = (s.P[j + 1], s.Q[j + 1], s.Q[j + 2], s.P[j - 1], s.P[j], s.Q[j])
        for a, b in zip(src, dst):
            err["T_images"] = max(err["T_images"], arc_dist(s.T[i](a), b))
        alt = s.T[s.sigma[i - 1]] @ s.T[s.tau[i]]
        err["U"] = max(err["U"], s.U[i].distance(alt))
        err["U_inverse"] = max(err["U_inverse"], s.U[i].inverse().distance(s.U[s.tau[i]]))
        err["U_vertex"] = max(err["U_vertex"], abs(s.U[i](s.V[s.tau[i]]) - s.V[i]))
        # cyclic order P_1 < Q_1 < P_2 < ...
        nxt = s.P[i + 1]
        if not (0.0 < (s.Q[i] - s.P[i]) % TWO_PI < (nxt - s.P[i]) % TWO_PI):
            err["order"] = math.inf
    return err


def check_relations(s, tol=None):
    tol = 10 * tolerance.EPS_MATRIX if tol is None else tol
    bad = {k: v for k, v in relation_errors(s).items() if v > tol}
    if bad:
        raise RelationFailure(f"relations violated for genus {s.genus}: {bad}")


_TABLES = ("sigma", "rho", "theta", "tau")


def index_maps(s, which, i):
    """Look up one of the index maps sigma, rho, theta, tau."""
    names = {"σ": "sigma", "ρ": "rho", "θ": "theta", "τ": "tau"}
    which = names.get(which, which)
    if which not in _TABLES:
        raise ValueError(f"unknown index map {which!r}")
    if not 1 <= int(i) <= s.n:
        raise IndexOutOfRange(f"index {i} outside 1..{s.n}")
    return getattr(s, which)[int(i)]


# ---------------------------------------------------------------------------
# polygon clipping in the Klein model, where geodesics are straight chords


def _edges(s):
    k = s.klein
    a = k
    b = np.roll(k, -1, axis=0)
    d = b - a
    normal = np.stack([d[:, 1], -d[:, 0]], axis=1)  # outward for a ccw polygon
    return a, normal


def clip_chords(s, u, w, tol=None):
    """Clip the chords from ``e^{iu}`` to ``e^{iw}`` against the polygon.

    Returns ``(t_in, t_out, side_in, side_out, hit)`` as arrays.  The chord is
    ``x(t) = e^{iu} + t (e^{iw} - e^{iu})`` with ``t`` in ``[0, 1]``.  Sides
    are 1-based; a chord leaving through vertex ``V_i`` leaves through side
    ``i``, and one entering there enters through side ``i - 1``.
    """
    tol = tolerance.angle_tol() if tol is None else tol
    u = np.atleast_1d(np.asarray(u, dtype=float))
    w = np.atleast_1d(np.asarray(w, dtype=float))
    a, normal = _edges(s)
    x0 = np.stack([np.cos(u), np.sin(u)], axis=1)
    d = np.stack([np.cos(w), np.sin(w)], axis=1) - x0
    num = np.einsum("ek,mek->me", normal, a[None, :, :] - x0[:, None, :])
    den = d @ normal.T
    with np.errstate(divide="ignore", invalid="ignore"):
        t = num / den
    entering = den < 0.0
    leaving = den > 0.0
    t_enter = np.where(entering, t, -np.inf)
    t_leave = np.where(leaving, t, np.inf)
    t_in = t_enter.max(axis=1)
    t_out = t_leave.min(axis=1)
    parallel_out = ((den == 0.0) & (num < 0.0)).any(axis=1)
    hit = (t_in <= t_out + tol) & ~parallel_out
    vtol = tolerance.vertex_tol()
    side_in = _pick_side(t_enter, t_in, vtol, s.n, later=False)
    side_out = _pick_side(t_leave, t_out, vtol, s.n)
    return t_in, t_out, side_in, side_out, hit


def _pick_side(tv, best, tol, n, later=True):
    """Index of the side attaining ``best``.

    Two adjacent matches ``(k-1, k)`` mean the chord runs through vertex
    ``V_k``.  Exits there belong to side ``k`` and entries to side ``k-1``,
    which is the side ``T_k`` carries side ``k`` onto.
    """
    close = np.abs(tv - best[:, None]) <= tol
    count = close.sum(axis=1)
    side = np.argmax(close, axis=1) + 1  # first match
    wrap_pair = close[:, 0] & close[:, n - 1]
    two = count >= 2
    if later:
        side = np.where(two & ~wrap_pair, _last_true(close) + 1, side)
        side = np.where(two & wrap_pair, 1, side)
    else:
        side = np.where(two & wrap_pair, n, side)
    return side


def _last_true(mask):
    n = mask.shape[1]
    return n - 1 - np.argmax(mask[:, ::-1], axis=1)


def _clip_one(s, g, tol=None):
    g = g if isinstance(g, Geodesic) else Geodesic(*g)
    t_in, t_out, side_in, side_out, hit = clip_chords(s, g.u.angle, g.w.angle, tol)
    return float(t_in[0]), float(t_out[0]), int(side_in[0]), int(side_out[0]), bool(hit[0])


def meets_polygon(s, u, w):
    """Vectorised membership in Omega_G: does the geodesic ``uw`` meet the polygon?"""
    return clip_chords(s, u, w)[4]


def exit_side(s, g):
    """Side through which the oriented geodesic leaves the fundamental polygon."""
    t_in, t_out, _, side_out, hit = _clip_one(s, g)
    if not hit:
        raise NoIntersection(f"geodesic misses the polygon (gap {t_in - t_out:.3g})")
    return side_out


def entry_side(s, g):
    t_in, t_out, side_in, _, hit = _clip_one(s, g)
    if not hit:
        raise NoIntersection(f"geodesic misses the polygon (gap {t_in - t_out:.3g})")
    return side_in


def chord_arclength(t1, t2):
    """Hyperbolic distance between chord parameters ``t1 < t2`` of an ideal chord."""
    return 0.5 * (np.log(t2 / (1.0 - t2)) - np.log(t1 / (1.0 - t1)))


def chord_point(u, w, t):
    """Poincare-disk point at Klein chord parameter ``t`` on the geodesic ``uw``."""
    eu = np.exp(1j * np.asarray(u, dtype=float))
    ew = np.exp(1j * np.asarray(w, dtype=float))
    k = eu + np.asarray(t) * (ew - eu)
    return k / (1.0 + np.sqrt(np.maximum(0.0, 1.0 - np.abs(k) ** 2)))


def axis(s, word):
    """Oriented axis (repelling -> attracting) of a hyperbolic word in the generators."""
    word = word if isinstance(word, GroupWord) else GroupWord(tuple(word))
    if not word.letters:
        raise ValueError("empty word")
    for i in word.letters:
        if not 1 <= i <= s.n:
            raise IndexOutOfRange(f"letter {i} outside 1..{s.n}")
    fp = fixed_points(s.maps(word))
    return Geodesic(fp.repelling, fp.attracting)


def reflection_generator(s, i):
    """T_i rebuilt as inversion in its isometric circle followed by a reflection.

    The reflection is in the diameter that swaps the centres of the isometric
    circles of sides ``i`` and ``sigma(i)``.  Serves as an independent check of
    the three-point construction.
    """
    centres, radius, _ = polygon_geometry(s.genus)
    dist = math.sqrt(1.0 + radius * radius)
    phi_i = centres[i - 1]
    phi_j = centres[s.sigma[i] - 1]
    c = dist * complex(math.cos(phi_i), math.sin(phi_i))
    rot = complex(math.cos(phi_i + phi_j), math.sin(phi_i + phi_j))
    # z -> rot * conj(c + r^2 / conj(z - c)) = rot (conj(c) z - 1) / (z - c)
    return MoebiusMap.from_matrix([[rot * c.conjugate(), -rot], [1.0, -c]])
