import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geodesic_coder import measure as Me
from geodesic_coder.errors import TouchesDiagonal
from geodesic_coder.moebius import TWO_PI, ccw

# a u-arc inside (0, 3) and a w-arc inside (3.3, 6.2) never meet
u_ends = st.tuples(st.floats(0.01, 2.9), st.floats(0.01, 2.9)).map(sorted)
w_ends = st.tuples(st.floats(3.3, 6.2), st.floats(3.3, 6.2)).map(sorted)


@settings(max_examples=25, deadline=None)
@given(u_ends, w_ends)
def test_closed_form_against_quadrature(ua, wa):
    if ua[1] - ua[0] < 1e-3 or wa[1] - wa[0] < 1e-3:
        return
    r = (ua[0], ua[1], wa[0], wa[1])
    assert Me.rect_mass(r) == pytest.approx(Me.rect_mass_quad(r), rel=1e-8)


@given(u_ends, w_ends, st.floats(0.0, 1.0))
def test_additive_in_u(ua, wa, t):
    a, b = ua
    m = a + t * (b - a)
    whole = Me.rect_mass((a, b, wa[0], wa[1]))
    parts = Me.rect_mass((a, m, wa[0], wa[1])) + Me.rect_mass((m, b, wa[0], wa[1]))
    assert parts == pytest.approx(whole, rel=1e-9, abs=1e-12)


@given(u_ends, w_ends)
def test_reflection_symmetric(ua, wa):
    r = (ua[0], ua[1], wa[0], wa[1])
    assert Me.rect_mass((wa[0], wa[1], ua[0], ua[1])) == pytest.approx(Me.rect_mass(r), rel=1e-12, abs=1e-15)


@given(u_ends, w_ends, st.floats(-10, 10))
def test_rotation_invariant(ua, wa, shift):
    r = (ua[0], ua[1], wa[0], wa[1])
    moved = tuple((x + shift) % TWO_PI for x in r)
    assert Me.rect_mass(moved) == pytest.approx(Me.rect_mass(r), rel=1e-9, abs=1e-12)


def test_moebius_invariant(g2):
    # the density is invariant under disk automorphisms
    r = (0.2, 1.1, 3.5, 4.4)
    T = g2.T[3]
    img = tuple(T.apply_angle(x) for x in r)
    if ccw(img[0], img[1]) > math.pi:  # orientation is preserved, so arcs stay arcs
        pytest.skip("image arc wraps")
    assert Me.rect_mass(img) == pytest.approx(Me.rect_mass(r), rel=1e-10)


def test_touching_diagonal():
    with pytest.raises(TouchesDiagonal):
        Me.rect_mass((0.1, 1.0, 0.5, 2.0))


def test_monte_carlo_agrees(mid):
    _, attr = mid
    k = Me.total_mass(attr)
    est, se = Me.monte_carlo_mass(attr, samples=1_000_000, seed=5)
    assert abs(est - k) < 4 * se


def test_entropy_identity(g2, mid):
    rep = Me.entropy(mid[1], 2)
    assert rep.product == pytest.approx(2 * math.pi ** 2, rel=1e-15)
    assert rep.K == pytest.approx(19.9546306927, rel=1e-9)


def test_nu_sample_marginal(mid, rng):
    # the share of nu-samples in a rectangle matches its mass share
    _, attr = mid
    u, w = Me.nu_sample(attr, 200_000, rng)
    assert attr.contains(u, w).all()
    lo, hi, wl, wh, _ = attr.rectangles()[0]
    inside = np.zeros(len(u), dtype=bool)
    du = (u - lo) % TWO_PI
    dw = (w - wl) % TWO_PI
    inside = (du <= ccw(lo, hi)) & (dw <= ccw(wl, wh))
    p = Me.rect_mass((lo, hi, wl, wh)) / Me.total_mass(attr)
    assert inside.mean() == pytest.approx(p, abs=5 * math.sqrt(p * (1 - p) / len(u)))


@pytest.mark.parametrize("which", ["mid", "mid3"])
def test_lyapunov_equals_mean_return(which, request):
    # Rokhlin (mean log-derivative) and Abramov (mean return time of a unit-speed
    # flow) give the entropy of the section map by two unrelated routes
    s = request.getfixturevalue("g2" if which == "mid" else "g3")
    part, attr = request.getfixturevalue(which)
    lam, se = Me.lyapunov_exponent(s, part, attr, samples=100_000, seed=1)
    ab = Me.abramov(s, part, attr, samples=40_000, seed=2)
    assert abs(lam - ab.mean_return) < 4 * math.hypot(se, ab.stderr)
