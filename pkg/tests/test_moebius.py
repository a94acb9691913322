import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geodesic_coder.errors import NotHyperbolic, NumericallySingular, OrientationMismatch
from geodesic_coder.moebius import (
    TWO_PI, CirclePoint, MoebiusMap, arc_dist, ccw, cyclic_order, derivative_modulus,
    disk_distance, fixed_points, from_boundary_triple, in_arc, klein_to_poincare, midpoint,
    norm_angle, poincare_to_klein, translation_length,
)

angles = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False)
inside = st.complex_numbers(max_magnitude=0.9, allow_nan=False, allow_infinity=False)


def random_map(a, z):
    # disk automorphism with |b/a| = |z| < 1
    a = cmath.exp(1j * a)
    return MoebiusMap(a, a * z)


@given(angles)
def test_norm_angle_range(t):
    x = norm_angle(t)
    assert 0.0 <= x < TWO_PI
    assert abs(math.remainder(x - t, TWO_PI)) < 1e-9


@given(angles, angles)
def test_ccw_complements(a, b):
    if arc_dist(a, b) < 1e-9:
        return
    assert ccw(a, b) + ccw(b, a) == pytest.approx(TWO_PI, abs=1e-9)


@given(angles, angles)
def test_midpoint_is_halfway(a, b):
    m = midpoint(a, b)
    assert ccw(a, m) == pytest.approx(ccw(m, b), abs=1e-9)


def test_in_arc_wraps():
    assert in_arc(0.1, 6.0, 0.5)
    assert not in_arc(3.0, 6.0, 0.5)
    assert cyclic_order(1.0, 2.0, 3.0)
    assert not cyclic_order(3.0, 2.0, 1.0)


def test_circle_point_equality():
    assert CirclePoint(0.0) == CirclePoint(TWO_PI)
    assert CirclePoint.from_complex(1j) == CirclePoint(math.pi / 2)


@settings(max_examples=60)
@given(angles, inside, angles, inside, inside)
def test_composition_is_application(a1, z1, a2, z2, p):
    f, g = random_map(a1, z1), random_map(a2, z2)
    assert (f @ g)(p) == pytest.approx(f(g(p)), abs=1e-9)


@settings(max_examples=60)
@given(angles, inside, inside)
def test_maps_are_disk_isometries(a, z, p):
    f = random_map(a, z)
    q = 0.3 + 0.2j
    assert disk_distance(f(p), f(q)) == pytest.approx(disk_distance(p, q), rel=1e-7, abs=1e-9)
    assert f.inverse()(f(p)) == pytest.approx(p, abs=1e-9)


@settings(max_examples=60)
@given(angles, inside, angles)
def test_angle_action_matches_disk_action(a, z, t):
    f = random_map(a, z)
    assert arc_dist(f.apply_angle(t), cmath.phase(f(cmath.exp(1j * t)))) < 1e-9


@given(st.lists(st.floats(0, TWO_PI), min_size=6, max_size=6, unique=True))
def test_boundary_triple(pts):
    src = sorted(pts[:3])
    dst = sorted(pts[3:])
    if min(ccw(src[k], src[(k + 1) % 3]) for k in range(3)) < 1e-2:
        return
    if min(ccw(dst[k], dst[(k + 1) % 3]) for k in range(3)) < 1e-2:
        return
    f = from_boundary_triple(src, dst)
    for x, y in zip(src, dst):
        assert arc_dist(f.apply_angle(x), y) < 1e-8


def test_boundary_triple_rejects_repeats():
    with pytest.raises(NumericallySingular):
        from_boundary_triple([0.0, 0.0, 1.0], [0.0, 1.0, 2.0])
    with pytest.raises(OrientationMismatch):
        from_boundary_triple([0.0, 1.0, 2.0], [2.0, 1.0, 0.0])


def test_hyperbolic_fixed_points_and_translation_length():
    # z -> (cosh l/2 z + sinh l/2) / (sinh l/2 z + cosh l/2) translates along (-1, 1)
    length = 1.7
    f = MoebiusMap(math.cosh(length / 2), math.sinh(length / 2))
    fp = fixed_points(f)
    assert arc_dist(fp.attracting.angle, 0.0) < 1e-12
    assert arc_dist(fp.repelling.angle, math.pi) < 1e-12
    assert translation_length(f) == pytest.approx(length)
    # derivative at the attracting point is e^{-l}
    assert derivative_modulus(f, 0.0) == pytest.approx(math.exp(-length))


def test_rotation_has_no_axis():
    with pytest.raises(NotHyperbolic):
        fixed_points(MoebiusMap.rotation(0.3))


@given(inside)
def test_klein_round_trip(z):
    assert klein_to_poincare(poincare_to_klein(z)) == pytest.approx(z, abs=1e-12)


def test_projective_equality_ignores_sign():
    f = MoebiusMap(2.0, 0.5j)
    g = MoebiusMap.from_matrix(-np.array(f.matrix))
    assert f.projectively_equal(g)
