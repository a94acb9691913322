"""The invariant measure ``dnu = |du| |dw| / |u - w|^2``, total mass and entropy.

With ``|e^{iu} - e^{iw}|^2 = 4 sin^2((u - w) / 2)`` the density has the
mixed antiderivative ``log|sin((u - w) / 2)|``, so a rectangle's mass is a
log cross ratio of its corners.  The Monte-Carlo route never uses that
formula: it draws the gap ``u - w`` with density proportional to the
integrand and counts hits.
"""
from dataclasses import asdict, dataclass
import json
import math

import numpy as np

from . import tolerance
from .coding import return_times
from .errors import TouchesDiagonal
from .moebius import TWO_PI, ccw, norm_angle


def _touches(a, la, c, lc, tol):
    # do the arcs [a, a + la] and [c, c + lc] share a point (within tol)?
    return ccw(a, c) <= la + tol or ccw(c, a) <= lc + tol


def rect_mass(rect):
    """Mass of ``[a, b] x [c, d]`` (u-arc, then w-arc, both counter-clockwise).

    Raises :class:`TouchesDiagonal` when the two arcs share a point.
    """
    a, b, c, d = (float(x) for x in rect)
    la, lc = ccw(a, b), ccw(c, d)
    if la == 0.0 or lc == 0.0:
        return 0.0
    if _touches(a, la, c, lc, tolerance.angle_tol()):
        raise TouchesDiagonal(f"rectangle {rect} meets the diagonal")
    # lift so that the integrand is smooth on [a, a + la] x [c', c' + lc]
    b = a + la
    c = a + la + ccw(b, c)
    d = c + lc
    num = math.sin((b - d) / 2) * math.sin((a - c) / 2)
    den = math.sin((a - d) / 2) * math.sin((b - c) / 2)
    return abs(math.log(abs(num / den)))


def rect_mass_quad(rect, epsabs=1e-13, epsrel=1e-11):
    """Adaptive 2-D quadrature of the density over ``rect`` (the reference route)."""
    from scipy.integrate import dblquad

    a, b, c, d = (float(x) for x in rect)
    la, lc = ccw(a, b), ccw(c, d)
    val, _ = dblquad(lambda w, u: 0.25 / math.sin((u - w) / 2) ** 2,
                     a, a + la, lambda u: c, lambda u: c + lc, epsabs=epsabs, epsrel=epsrel)
    return val


def total_mass(attr):
    """``K``: the sum of rectangle masses over the attractor's pieces."""
    total = 0.0
    for u_lo, u_hi, w_lo, w_hi, _ in attr.rectangles():
        total += rect_mass((u_lo, u_hi, w_lo, w_hi))
    return total


def band_sample(size, eps, rng):
    """Points ``(u, w)`` with ``w`` uniform and the gap ``u - w`` in ``[eps, 2 pi - eps]``
    drawn with density proportional to ``1 / sin^2(gap / 2)``.

    Returns ``(u, w, weight)`` where ``weight`` is the constant ratio of the
    measure to the sampling density.
    """
    c = 1.0 / math.tan(eps / 2)
    w = rng.uniform(0.0, TWO_PI, size)
    gap = 2.0 * np.arctan2(1.0, c * (1.0 - 2.0 * rng.random(size)))
    u = np.mod(w + gap, TWO_PI)
    return u, w, TWO_PI * c


def monte_carlo_mass(attr, samples=10_000_000, seed=0, chunk=1_000_000, eps=None):
    """Monte-Carlo estimate of ``K`` with its standard error."""
    rng = np.random.default_rng(seed)
    eps = eps if eps is not None else 0.5 * attr.min_diagonal_gap()
    hits = 0
    weight = None
    left = int(samples)
    while left > 0:
        m = min(chunk, left)
        u, w, weight = band_sample(m, eps, rng)
        hits += int(np.count_nonzero(attr.contains(u, w, tol=0.0)))
        left -= m
    p = hits / samples
    return weight * p, weight * math.sqrt(p * (1 - p) / samples)


def nu_sample(attr, size, rng):
    """Points of the attractor distributed as ``nu / K``.

    A piece is picked with probability proportional to its mass, then points
    are drawn uniformly in the piece and accepted with probability
    ``sin^2_min / sin^2((u - w) / 2)``.
    """
    rects = attr.rectangles()
    masses = np.array([rect_mass(r[:4]) for r in rects])
    counts = rng.multinomial(size, masses / masses.sum())
    us, ws = [], []
    for (u_lo, u_hi, w_lo, w_hi, _), need in zip(rects, counts):
        la, lw = ccw(u_lo, u_hi), ccw(w_lo, w_hi)
        corners = [(u_lo, w_lo), (u_lo, w_hi), (u_hi, w_lo), (u_hi, w_hi)]
        # |sin| over the piece is smallest at a corner: the gap is monotone along each edge
        floor = min(math.sin((x - y) / 2) ** 2 for x, y in corners)
        got_u, got_w = [], []
        while need > 0:
            m = max(64, 2 * need)
            u = u_lo + la * rng.random(m)
            w = w_lo + lw * rng.random(m)
            keep = rng.random(m) * np.sin((u - w) / 2) ** 2 <= floor
            got_u.append(u[keep][:need])
            got_w.append(w[keep][:need])
            need -= int(min(keep.sum(), need))
        if got_u:
            us.append(np.concatenate(got_u))
            ws.append(np.concatenate(got_w))
    u = np.mod(np.concatenate(us), TWO_PI)
    w = np.mod(np.concatenate(ws), TWO_PI)
    order = rng.permutation(len(u))
    return u[order], w[order]


@dataclass(frozen=True)
class MeasureReport:
    genus: int
    K: float
    entropy: float
    method: str
    error: float
    K_monte_carlo: float = None
    K_stderr: float = None
    samples: int = 0

    @property
    def product(self):
        return self.entropy * self.K

    def to_dict(self):
        d = asdict(self)
        d["entropy_times_K"] = self.product
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def entropy(attr, genus, samples=0, seed=0):
    """``h = pi^2 (2g - 2) / K`` from the closed-form mass.

    With ``samples > 0`` the Monte-Carlo mass is computed too and the error
    bar is the entropy change that one standard error in ``K`` produces.
    """
    K = total_mass(attr)
    h = math.pi ** 2 * (2 * genus - 2) / K
    if samples <= 0:
        return MeasureReport(genus, K, h, "closed-form", 0.0)
    k_mc, se = monte_carlo_mass(attr, samples, seed)
    return MeasureReport(genus, K, h, "closed-form", h * se / K, k_mc, se, int(samples))


@dataclass(frozen=True)
class AbramovReport:
    entropy: float
    mean_return: float
    stderr: float
    samples: int

    @property
    def product(self):
        return self.entropy * self.mean_return

    @property
    def ratio(self):
        return self.entropy / self.mean_return

    def to_dict(self):
        d = asdict(self)
        d.update(product=self.product, ratio=self.ratio)
        return d


def abramov(s, part, attr, samples=20_000, seed=0):
    """Mean return time under ``nu / K`` next to the entropy of ``F_A``.

    The unit-speed flow has entropy 1, so the entropy of the section map
    should equal the mean return time and ``ratio`` should be 1.  With the
    entropy from :func:`entropy` the ratio comes out near 1/2; see
    :func:`lyapunov_exponent` for an independent entropy value.
    """
    rng = np.random.default_rng(seed)
    u, w = nu_sample(attr, samples, rng)
    g = return_times(s, part, attr, u, w)
    h = entropy(attr, s.genus).entropy
    return AbramovReport(h, float(g.mean()), float(g.std(ddof=1) / math.sqrt(len(g))), samples)


def lyapunov_exponent(s, part, attr, samples=200_000, seed=0):
    """Mean of ``log|f_A'(w)|`` under the invariant measure, with its standard error.

    For this expanding circle map the mean equals the entropy (Rokhlin's
    formula), which makes it a check on the entropy that shares nothing with
    return times or the value of ``K``.
    """
    from .boundary import strip_of

    rng = np.random.default_rng(seed)
    _, w = nu_sample(attr, samples, rng)
    i = strip_of(part, w)
    a = np.array([t.a for t in s.T], dtype=complex)[i - 1]
    b = np.array([t.b for t in s.T], dtype=complex)[i - 1]
    # |T'(z)| = 1 / |conj(b) z + conj(a)|^2 on the unit circle
    lg = -2.0 * np.log(np.abs(np.conj(b) * np.exp(1j * w) + np.conj(a)))
    return float(lg.mean()), float(lg.std(ddof=1) / math.sqrt(samples))


__all__ = [
    "AbramovReport", "MeasureReport", "abramov", "band_sample", "entropy", "lyapunov_exponent",
    "monte_carlo_mass",
    "nu_sample", "rect_mass", "rect_mass_quad", "total_mass",
]
