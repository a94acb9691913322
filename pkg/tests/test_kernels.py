import os
import subprocess
import sys

import numpy as np
import pytest

from geodesic_coder import boundary as B
from geodesic_coder import kernels
from geodesic_coder.moebius import TWO_PI

compiled = pytest.mark.skipif(kernels.BACKEND != "cython", reason="extension not built")


@pytest.fixture(scope="module")
def args(g2):
    part = B.parse_partition(g2, "midpoints")
    ta, tb = B.generator_arrays(g2)
    return part, ta, tb


@compiled
def test_strip_index_backends_agree(args, rng):
    part, _, _ = args
    x = np.concatenate([rng.uniform(0, TWO_PI, 5000), np.array(part.A), np.array(part.A) - 1e-12])
    py = kernels.get("strip_index", "python")(x, part.base, part.offsets, 1e-9)
    cy = kernels.get("strip_index", "cython")(x, part.base, part.offsets, 1e-9)
    assert (py == cy).all()


@compiled
def test_orbit_backends_agree(args, rng):
    part, ta, tb = args
    u = rng.uniform(0, TWO_PI, 2000)
    w = rng.uniform(0, TWO_PI, 2000)
    pu, pw = kernels.get("extension_orbit", "python")(u, w, ta, tb, part.base, part.offsets, 1e-9, 5)
    cu, cw = kernels.get("extension_orbit", "cython")(u, w, ta, tb, part.base, part.offsets, 1e-9, 5)
    # a branch may flip for points within rounding of a cut; allow a handful
    close = (np.abs((pu - cu + np.pi) % TWO_PI - np.pi) < 1e-9) & \
            (np.abs((pw - cw + np.pi) % TWO_PI - np.pi) < 1e-9)
    assert close.mean() > 0.999


@compiled
def test_occupancy_backends_agree(args, rng):
    part, ta, tb = args
    u = rng.uniform(0, TWO_PI, 3000)
    w = rng.uniform(0, TWO_PI, 3000)
    py = kernels.get("extension_occupancy", "python")(u, w, ta, tb, part.base, part.offsets,
                                                      1e-9, 8, 4, 64)[2]
    cy = kernels.get("extension_occupancy", "cython")(u, w, ta, tb, part.base, part.offsets,
                                                      1e-9, 8, 4, 64)[2]
    assert py.sum() == cy.sum() == 3000 * 4
    assert np.abs(py - cy).sum() <= 0.002 * py.sum()


@compiled
def test_membership_backends_agree(mid, rng):
    _, attr = mid
    u = rng.uniform(0, TWO_PI, 5000)
    w = rng.uniform(0, TWO_PI, 5000)
    a = (u, w, attr.base, attr.breaks, attr.lo, attr.span, 1e-9)
    assert (kernels.get("step_member", "python")(*a) == kernels.get("step_member", "cython")(*a)).all()


def test_pure_switch():
    env = dict(os.environ, GEODESIC_CODER_PURE="1")
    out = subprocess.run([sys.executable, "-c", "from geodesic_coder import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
