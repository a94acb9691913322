"""Moebius transformations of the unit disk and cyclic arithmetic on its boundary.

Boundary points are stored as angles in ``[0, 2*pi)``.  Disk-preserving maps are
elements of SU(1,1), ``z -> (a z + b) / (conj(b) z + conj(a))`` with
``|a|^2 - |b|^2 = 1``, identified up to sign.
"""
from dataclasses import dataclass
import math

import numpy as np

from . import tolerance
from .errors import (
    DegenerateMap,
    IsRotation,
    NotHyperbolic,
    NumericallySingular,
    OrientationMismatch,
)

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# cyclic interval algebra on angles


def norm_angle(theta):
    """Reduce an angle to ``[0, 2*pi)``."""
    t = math.fmod(theta, TWO_PI)
    if t < 0.0:
        t += TWO_PI
    if t >= TWO_PI:
        t = 0.0
    return t


def norm_angles(theta):
    """Array version of ``norm_angle``."""
    t = np.mod(np.asarray(theta, dtype=float), TWO_PI)
    return np.where(t >= TWO_PI, 0.0, t)


def ccw(a, b):
    """Counter-clockwise arc length from ``a`` to ``b``, in ``[0, 2*pi)``."""
    return norm_angle(b - a)


def arc_dist(a, b):
    """Unsigned angular distance between two boundary points."""
    d = ccw(a, b)
    return min(d, TWO_PI - d)


def in_arc(x, a, b, closed=True, tol=0.0):
    """Whether ``x`` lies on the counter-clockwise arc from ``a`` to ``b``.

    ``closed=False`` gives the half-open arc ``[a, b)``.
    """
    span = ccw(a, b)
    d = ccw(a, x)
    if tol and d >= TWO_PI - tol:
        return True
    if closed:
        return d <= span + tol
    return d < span


def cyclic_order(x, y, z):
    """True when ``x, y, z`` are met in this order going counter-clockwise."""
    return ccw(x, y) < ccw(x, z)


def midpoint(a, b):
    """Midpoint of the counter-clockwise arc from ``a`` to ``b``."""
    return norm_angle(a + 0.5 * ccw(a, b))


@dataclass(frozen=True, eq=False)
class CirclePoint:
    """A point ``e^{i angle}`` of the boundary circle."""

    angle: float

    def __post_init__(self):
        if not math.isfinite(self.angle):
            raise ValueError("angle must be finite")
        object.__setattr__(self, "angle", norm_angle(float(self.angle)))

    @classmethod
    def from_complex(cls, z):
        return cls(math.atan2(z.imag, z.real))

    @property
    def z(self):
        return complex(math.cos(self.angle), math.sin(self.angle))

    def distance(self, other):
        return arc_dist(self.angle, _angle(other))

    def __eq__(self, other):
        if isinstance(other, (CirclePoint, float, int)):
            return self.distance(other) < tolerance.angle_tol()
        return NotImplemented

    __hash__ = None

    def __float__(self):
        return self.angle

    def __repr__(self):
        return f"CirclePoint({self.angle!r})"


def _angle(p):
    return p.angle if isinstance(p, CirclePoint) else norm_angle(float(p))


@dataclass(frozen=True)
class Geodesic:
    """Oriented geodesic from ``u`` (backward end) to ``w`` (forward end)."""

    u: CirclePoint
    w: CirclePoint

    def __post_init__(self):
        u, w = self.u, self.w
        if not isinstance(u, CirclePoint):
            object.__setattr__(self, "u", CirclePoint(u))
        if not isinstance(w, CirclePoint):
            object.__setattr__(self, "w", CirclePoint(w))
        if self.u.distance(self.w) <= tolerance.angle_tol():
            raise ValueError("geodesic endpoints coincide")

    @property
    def pair(self):
        return self.u.angle, self.w.angle

    def reversed(self):
        return Geodesic(self.w, self.u)


@dataclass(frozen=True)
class FixedPointPair:
    attracting: CirclePoint
    repelling: CirclePoint
    trace_class: str = "hyperbolic"


# ---------------------------------------------------------------------------
# SU(1,1)


class MoebiusMap:
    """Disk automorphism ``[[a, b], [conj(b), conj(a)]]`` with unit determinant."""

    __slots__ = ("a", "b")

    def __init__(self, a, b, normalize=True):
        a = complex(a)
        b = complex(b)
        det = abs(a) ** 2 - abs(b) ** 2
        if normalize:
            if det <= 0.0:
                raise DegenerateMap(f"|a|^2 - |b|^2 = {det} is not positive")
            s = math.sqrt(det)
            a /= s
            b /= s
        elif abs(det - 1.0) > tolerance.EPS_MATRIX:
            raise DegenerateMap(f"determinant {det} deviates from 1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __setattr__(self, name, value):
        raise AttributeError("MoebiusMap is immutable")

    @classmethod
    def identity(cls):
        return cls(1.0, 0.0)

    @classmethod
    def rotation(cls, alpha):
        return cls(complex(math.cos(alpha / 2), math.sin(alpha / 2)), 0.0)

    @classmethod
    def from_matrix(cls, m):
        """Build from a 2x2 complex matrix representing a disk automorphism."""
        m = np.asarray(m, dtype=complex)
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if abs(det) == 0.0:
            raise NumericallySingular("singular matrix")
        m = m / np.sqrt(det)
        a = 0.5 * (m[0, 0] + np.conj(m[1, 1]))
        b = 0.5 * (m[0, 1] + np.conj(m[1, 0]))
        resid = max(abs(m[0, 0] - np.conj(m[1, 1])), abs(m[0, 1] - np.conj(m[1, 0])))
        scale = max(abs(a), abs(b), 1.0)
        if resid > 1e-6 * scale:
            # matrix is i times an SU(1,1)-shaped matrix: it swaps inside and outside
            raise OrientationMismatch("matrix does not preserve the unit disk")
        return cls(a, b)

    @property
    def matrix(self):
        a, b = self.a, self.b
        return np.array([[a, b], [b.conjugate(), a.conjugate()]])

    @property
    def det_error(self):
        """Deviation of the determinant from 1, relative to the entry size."""
        return abs(abs(self.a) ** 2 - abs(self.b) ** 2 - 1.0) / max(1.0, abs(self.a) ** 2)

    @property
    def trace(self):
        return 2.0 * self.a.real

    def __matmul__(self, other):
        return compose(self, other)

    def inverse(self):
        return MoebiusMap(self.a.conjugate(), -self.b, normalize=False)

    def apply_disk(self, z):
        a, b = self.a, self.b
        return (a * z + b) / (b.conjugate() * z + a.conjugate())

    def apply_angle(self, theta):
        z = complex(math.cos(theta), math.sin(theta))
        img = self.apply_disk(z)
        return norm_angle(math.atan2(img.imag, img.real))

    def apply_angles(self, theta):
        z = np.exp(1j * np.asarray(theta, dtype=float))
        img = self.apply_disk(z)
        return norm_angles(np.angle(img))

    def __call__(self, z):
        if isinstance(z, CirclePoint):
            return CirclePoint(self.apply_angle(z.angle))
        if isinstance(z, Geodesic):
            return Geodesic(self(z.u), self(z.w))
        if isinstance(z, complex):
            return self.apply_disk(z)
        return self.apply_angle(float(z))

    def projectively_equal(self, other, tol=1e-10):
        d_plus = max(abs(self.a - other.a), abs(self.b - other.b))
        d_minus = max(abs(self.a + other.a), abs(self.b + other.b))
        return min(d_plus, d_minus) <= tol * max(1.0, abs(self.a))

    def distance(self, other):
        """Projective matrix distance (max-entry, up to overall sign)."""
        d_plus = max(abs(self.a - other.a), abs(self.b - other.b))
        d_minus = max(abs(self.a + other.a), abs(self.b + other.b))
        return min(d_plus, d_minus)

    def is_identity(self, tol=1e-10):
        return self.projectively_equal(MoebiusMap.identity(), tol)

    def trace_class(self, tol=1e-12):
        t = abs(self.trace)
        if abs(self.b) <= tol and abs(abs(self.a.real) - 1.0) <= tol:
            return "identity"
        if t > 2.0 + tol:
            return "hyperbolic"
        if t < 2.0 - tol:
            return "elliptic"
        return "parabolic"

    def __repr__(self):
        return f"MoebiusMap(a={self.a!r}, b={self.b!r})"


def apply(m, z):
    """Image of a boundary point under ``m``."""
    if m.det_error > tolerance.EPS_MATRIX:
        raise DegenerateMap("map is not normalized")
    return m(z)


def compose(m1, m2):
    """Matrix product ``m1 * m2`` (apply ``m2`` first), renormalized."""
    a = m1.a * m2.a + m1.b * m2.b.conjugate()
    b = m1.a * m2.b + m1.b * m2.a.conjugate()
    if abs(a) > 1e6:
        # |a|^2 - |b|^2 cancels catastrophically here; the product of unit
        # determinant maps has unit determinant, so keep the entries as they are
        out = object.__new__(MoebiusMap)
        object.__setattr__(out, "a", a)
        object.__setattr__(out, "b", b)
        return out
    return MoebiusMap(a, b)


def product(maps):
    """Left-to-right product ``maps[0] * maps[1] * ...``."""
    out = MoebiusMap.identity()
    for m in maps:
        out = compose(out, m)
    return out


def inverse(m):
    return m.inverse()


def from_boundary_triple(src, dst):
    """The disk automorphism sending ``src[k]`` to ``dst[k]`` for k = 0, 1, 2.

    Points are angles or :class:`CirclePoint`.  Both triples must have the same
    cyclic orientation.
    """
    src = [_angle(p) for p in src]
    dst = [_angle(p) for p in dst]
    tol = tolerance.angle_tol()
    for pts in (src, dst):
        for i in range(3):
            for j in range(i + 1, 3):
                if arc_dist(pts[i], pts[j]) <= tol:
                    raise NumericallySingular("boundary triple has coincident points")
    if cyclic_order(*src) != cyclic_order(*dst):
        raise OrientationMismatch("triples have opposite cyclic order")
    p1, p2, p3 = (complex(math.cos(t), math.sin(t)) for t in src)
    q1, q2, q3 = (complex(math.cos(t), math.sin(t)) for t in dst)
    # Cross-ratio solve: rows encode q*(c p + d) = a p + b.
    a = np.linalg.det(np.array(((p1 * q1, q1, 1), (p2 * q2, q2, 1), (p3 * q3, q3, 1))))
    b = np.linalg.det(np.array(((p1 * q1, p1, q1), (p2 * q2, p2, q2), (p3 * q3, p3, q3))))
    c = np.linalg.det(np.array(((p1, q1, 1), (p2, q2, 1), (p3, q3, 1))))
    d = np.linalg.det(np.array(((p1 * q1, p1, 1), (p2 * q2, p2, 1), (p3 * q3, p3, 1))))
    det = a * d - b * c
    scale = max(abs(a), abs(b), abs(c), abs(d)) ** 2
    if scale == 0.0 or abs(det) < 1e-14 * scale:
        raise NumericallySingular("ill-conditioned boundary triple")
    m = MoebiusMap.from_matrix([[a, b], [c, d]])
    for s, t in zip(src, dst):
        if arc_dist(m.apply_angle(s), t) > 1e3 * tol:
            raise NumericallySingular("three-point map failed verification")
    return m


def fixed_points(m):
    """Attracting and repelling boundary fixed points of a hyperbolic map."""
    kind = m.trace_class()
    if kind != "hyperbolic":
        raise NotHyperbolic(f"map is {kind}")
    a, b = m.a, m.b
    root = math.sqrt(a.real * a.real - 1.0)
    bc = b.conjugate()
    z1 = (1j * a.imag + root) / bc
    z2 = (1j * a.imag - root) / bc
    p1 = CirclePoint.from_complex(z1)
    p2 = CirclePoint.from_complex(z2)
    # |m'| = 1/|conj(b) z + conj(a)|^2: compare denominators, which stay finite
    if abs(bc * p1.z + a.conjugate()) > abs(bc * p2.z + a.conjugate()):
        return FixedPointPair(attracting=p1, repelling=p2)
    return FixedPointPair(attracting=p2, repelling=p1)


def derivative_modulus(m, z):
    """``|m'(e^{i theta})|``, the stretching factor of ``m`` along the circle."""
    theta = _angle(z)
    e = complex(math.cos(theta), math.sin(theta))
    den = abs(m.b.conjugate() * e + m.a.conjugate()) ** 2
    return math.inf if den == 0.0 else 1.0 / den


def isometric_circle(m):
    """Center and radius of the circle ``|conj(b) z + conj(a)| = 1``."""
    if abs(m.b) <= tolerance.EPS_MATRIX:
        raise IsRotation("rotations have no isometric circle")
    center = -m.a.conjugate() / m.b.conjugate()
    return center, 1.0 / abs(m.b)


def translation_length(m):
    """Hyperbolic translation length ``2 arccosh(|tr|/2)``."""
    return 2.0 * math.acosh(max(1.0, abs(m.trace) / 2.0))


def disk_distance(z1, z2):
    """Hyperbolic distance for the metric ``2|dz|/(1-|z|^2)``."""
    r = abs(z1 - z2) / abs(1.0 - z1.conjugate() * z2)
    return 2.0 * math.atanh(min(r, 1.0 - 1e-16))


def poincare_to_klein(z):
    return 2.0 * z / (1.0 + abs(z) ** 2)


def klein_to_poincare(k):
    return k / (1.0 + np.sqrt(np.maximum(0.0, 1.0 - np.abs(k) ** 2)))
