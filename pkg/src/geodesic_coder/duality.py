"""Duality between partitions and backward expansions.

Two partitions are dual when the reflection ``phi(u, w) = (w, u)`` carries
one attractor onto the other and conjugates the inverse of one natural
extension to the other.  Both halves are checked numerically, so every
verdict is empirical.
"""
from dataclasses import asdict, dataclass
import json

import numpy as np

from . import tolerance
from .boundary import attractor, inverse_step_many, random_short_cycle_partition
from .coding import _act, _gap
from .moebius import TWO_PI, norm_angles
from . import kernels

COMMUTE_TOL = 1e-8


@dataclass(frozen=True)
class DualityVerdict:
    reflection_match: bool
    diagram_commutes: bool
    counterexample: tuple = None  # (u, w) in the first attractor
    max_error: float = 0.0
    mismatch_cells: int = 0
    samples: int = 0
    grid: int = 0

    @property
    def dual(self):
        return self.reflection_match and self.diagram_commutes

    def to_dict(self):
        d = asdict(self)
        d["dual"] = self.dual
        d["empirical"] = True
        if self.counterexample is not None:
            d["counterexample"] = [float(x) for x in self.counterexample]
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def backward_expansion(s, part, u, n):
    """Strip indices ``m_-1, m_-2, ...`` of ``u, f(u), f^2(u), ...`` under ``part``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    u = float(u)
    out = []
    for _ in range(n):
        i = int(kernels.strip_index(np.array([u]), part.base, part.offsets,
                                    tolerance.angle_tol())[0])
        out.append(i)
        u = s.T[i](u)
    return out


def backward_expansions(s, part, u, n):
    """Vectorised :func:`backward_expansion`, shape ``(len(u), n)``."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    out = np.empty((u.shape[0], n), dtype=np.int64)
    for k in range(n):
        i = kernels.strip_index(u, part.base, part.offsets, tolerance.angle_tol())
        out[:, k] = i
        u = _act(s, "T", i, u, u)[0]
    return out


def commutation_errors(s, part, attr, part2, u, w):
    """``|phi F_A^{-1}(u, w) - F_A'(phi(u, w))|`` per point, plus preimage margins."""
    pu, pw, _, margin = inverse_step_many(s, part, attr, u, w)
    m = kernels.strip_index(np.atleast_1d(u), part2.base, part2.offsets, tolerance.angle_tol())
    # F_A' acts on (w, u): its forward end is u
    fw, fu = _act(s, "T", m, w, u)
    err = np.maximum(_gap(fw, pw), _gap(fu, pu))
    return err, margin


def _edge_distance(attr, u, w):
    """Distance to the region's boundary, up to the step function's jumps in ``w``."""
    du = np.abs(attr.margin(u, w))
    off = norm_angles(np.asarray(w) - attr.base)
    cuts = np.append(attr.breaks, TWO_PI)
    k = np.clip(np.searchsorted(cuts, off, side="right"), 1, len(cuts) - 1)
    dw = np.minimum(off - cuts[k - 1], cuts[k] - off)
    return np.minimum(du, np.abs(dw))


def reflection_mismatch(attr, attr2, grid=512):
    """Grid cells where ``(w, u) in attr`` and ``(u, w) in attr2`` disagree.

    Cells within one cell width of either boundary are skipped.
    """
    cell = TWO_PI / grid
    c = (np.arange(grid) + 0.5) * cell
    u, w = np.meshgrid(c, c, indexing="ij")
    u, w = u.ravel(), w.ravel()
    keep = u != w
    u, w = u[keep], w[keep]
    in1 = attr.contains(w, u)
    in2 = attr2.contains(u, w)
    clear = (_edge_distance(attr, w, u) > cell) & (_edge_distance(attr2, u, w) > cell)
    bad = (in1 != in2) & clear
    return int(bad.sum()), (w[bad], u[bad])


def dual_check(s, part, part2, samples=10_000, grid=512, seed=0, attr=None, attr2=None):
    """Test whether ``part2`` is dual to ``part``."""
    attr = attr or attractor(s, part)
    attr2 = attr2 or attractor(s, part2)
    rng = np.random.default_rng(seed)
    u, w = attr.sample(samples, rng)
    err, margin = commutation_errors(s, part, attr, part2, u, w)
    # preimages landing outside the attractor mean the sample sat on a seam
    err = np.where(margin < -10 * tolerance.angle_tol(), np.inf, err)
    worst = int(np.argmax(err))
    commutes = bool(err[worst] < COMMUTE_TOL)
    mismatches, (bu, bw) = reflection_mismatch(attr, attr2, grid)
    counter = None
    if not commutes:
        counter = (float(u[worst]), float(w[worst]))
    elif mismatches:
        counter = (float(bu[0]), float(bw[0]))
    return DualityVerdict(mismatches == 0, commutes, counter, float(err[worst]), mismatches,
                          samples, grid)


def random_pair_search(s, pairs=100, seed=0, samples=2000, grid=256):
    """Dual checks for random short-cycle partition pairs; returns the verdicts."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(pairs):
        a = random_short_cycle_partition(s, rng)
        b = random_short_cycle_partition(s, rng)
        out.append(dual_check(s, a, b, samples=samples, grid=grid, seed=int(rng.integers(2**31))))
    return out


__all__ = [
    "COMMUTE_TOL", "DualityVerdict", "backward_expansion", "backward_expansions",
    "commutation_errors", "dual_check", "random_pair_search", "reflection_mismatch",
]
