import numpy as np
import pytest

from geodesic_coder import boundary as B
from geodesic_coder.errors import InvalidPattern, MaxStepsExceeded, NoAttractor
from geodesic_coder.moebius import TWO_PI, arc_dist, ccw, in_arc


@pytest.mark.parametrize("name", ["midpoints", "product", "mixed"])
def test_standard_partitions_have_short_cycles(g2, name):
    part = B.parse_partition(g2, name)
    rep = B.cycle_report(g2, part)
    assert rep.all_short
    for i in range(1, 13):
        b_i, a_i = rep.admissible_interval[i]
        assert in_arc(part.A[i], b_i, a_i, tol=1e-9)


def test_endpoint_partitions_sit_outside_the_interval(g2):
    for name in ("endpoints:P", "endpoints:Q", "endpoints:PQ"):
        part = B.parse_partition(g2, name)
        rep = B.cycle_report(g2, part)
        for i in range(1, 13):
            b_i, a_i = rep.admissible_interval[i]
            assert not in_arc(part.A[i], b_i, a_i)


def _off_interval(s):
    # A_i scattered between P_i and b_i; for this seed two indices lose the short cycle
    rng = np.random.default_rng(0)
    pts = [s.P[i] + rng.uniform(0.0, 0.05) for i in range(1, s.n + 1)]
    part = B.make_partition(s, "custom", points=pts)
    assert not B.cycle_report(s, part).all_short
    return part


def test_bad_patterns(g2):
    with pytest.raises(InvalidPattern):
        B.parse_partition(g2, "endpoints:PQX")
    with pytest.raises(InvalidPattern):
        B.parse_partition(g2, "endpoints:PQPQP")
    with pytest.raises(ValueError):
        B.make_partition(g2, "custom", points=[0.0] * 12)


def test_strips_are_half_open(g2):
    part = B.parse_partition(g2, "midpoints")
    assert B.strip_of(part, part.A[5]) == 5
    assert B.strip_of(part, part.A[5] - 1e-7) == 4
    x = np.array([part.A[i] + 0.01 for i in range(1, 13)])
    assert list(B.strip_of(part, x)) == list(range(1, 13))


def test_closed_form_attractor_is_invariant(g2, mid, rng):
    part, attr = mid
    u, w = attr.sample(20000, rng)
    u2, w2 = B.extension_orbit(g2, part, u, w, 1)
    assert attr.contains(u2, w2).mean() > 0.999
    pu, pw, _, margin = B.inverse_step_many(g2, part, attr, u, w)
    assert (margin > -1e-9).mean() > 0.999
    # preimage then image returns to the start
    fu, fw = B.extension_orbit(g2, part, pu, pw, 1)
    ok = margin > 1e-9
    assert np.abs((fu - u + np.pi) % TWO_PI - np.pi)[ok].max() < 1e-10
    assert np.abs((fw - w + np.pi) % TWO_PI - np.pi)[ok].max() < 1e-10


def test_closed_form_requires_short_cycles(g2):
    with pytest.raises(NoAttractor):
        B.closed_form_attractor(g2, _off_interval(g2))


def test_numeric_attractor_matches_closed_form(g2, mid):
    part, attr = mid
    num = B.numeric_attractor(g2, part, grid=512)
    gap, cell = B.compare_attractors(attr, num)
    assert gap <= 2 * cell


def test_attractor_corner_count(g2, g3, mid, mid3):
    assert len(mid[1].corners()) == 2 * g2.n
    assert len(mid3[1].corners()) == 2 * g3.n


def test_reduce_lands_in_attractor(g2, mid, rng):
    part, attr = mid
    for _ in range(40):
        u, w = rng.uniform(0, TWO_PI, 2)
        if arc_dist(u, w) < 1e-3:
            continue
        ru, rw, word = B.reduce(g2, part, attr, u, w)
        assert attr.contains(ru, rw)
        f = g2.maps(word)
        assert arc_dist(f.apply_angle(u), ru) < 1e-8
        assert arc_dist(f.apply_angle(w), rw) < 1e-8


def test_reduce_step_limit(g2, mid):
    part, attr = mid
    u, w = g2.P[1] + 0.05, g2.P[1] + 0.0501
    with pytest.raises(MaxStepsExceeded):
        B.reduce(g2, part, attr, u, w, max_steps=0)


def test_random_short_cycle_partition(g2, rng):
    part = B.random_short_cycle_partition(g2, rng)
    assert B.cycle_report(g2, part).all_short


def test_cycle_end_on_interval_edge(g2):
    # the short-cycle interval ends are images of polygon endpoints
    for i in range(1, 13):
        b_i, a_i = B.short_cycle_interval(g2, i)
        assert 0 < ccw(b_i, a_i) < ccw(g2.P[i], g2.Q[i])


def test_attractor_svg_and_csv(mid):
    _, attr = mid
    svg = attr.to_svg()
    assert svg.startswith("<svg") or svg.startswith("<?xml")
    lines = attr.to_csv().strip().splitlines()
    assert len(lines) == len(attr.plane_rectangles()) + 1
