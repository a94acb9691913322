import numpy as np
import pytest

from geodesic_coder import boundary as B
from geodesic_coder import duality as D
from geodesic_coder.coding import past_symbols


@pytest.fixture(scope="module")
def pq(g2):
    p = B.parse_partition(g2, "endpoints:P")
    q = B.parse_partition(g2, "endpoints:Q")
    return p, q, B.numeric_attractor(g2, p, grid=512), B.numeric_attractor(g2, q, grid=512)


def test_backward_expansion_vectorised(g2, mid, rng):
    part, attr = mid
    u, _ = attr.sample(50, rng)
    many = D.backward_expansions(g2, part, u, 6)
    for k in range(5):
        assert list(many[k]) == D.backward_expansion(g2, part, u[k], 6)
    with pytest.raises(ValueError):
        D.backward_expansion(g2, part, u[0], 0)


def test_endpoint_pair_is_dual(g2, pq):
    p, q, ap, aq = pq
    v = D.dual_check(g2, p, q, samples=3000, grid=256, attr=ap, attr2=aq)
    assert v.dual, v
    assert v.max_error < D.COMMUTE_TOL


def test_dual_past_is_backward_expansion(g2, pq, rng):
    # the past symbols of F_P are the strips u visits under the Q boundary map
    p, q, ap, _ = pq
    u, w = ap.sample(500, rng)
    past = past_symbols(g2, p, ap, u, w, 8)
    be = D.backward_expansions(g2, q, u, 8)
    assert (past == be).all(axis=1).mean() > 0.99


def test_midpoints_not_self_dual(g2, mid):
    part, attr = mid
    v = D.dual_check(g2, part, part, samples=2000, grid=256, attr=attr, attr2=attr)
    assert not v.dual
    assert v.counterexample is not None
    d = v.to_dict()
    assert d["empirical"] is True and d["dual"] is False


def test_random_pairs_not_dual(g2):
    verdicts = D.random_pair_search(g2, pairs=3, seed=7, samples=500, grid=128)
    assert not any(v.dual for v in verdicts)
