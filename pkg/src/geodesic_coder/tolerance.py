"""Global numerical tolerances.

``EPS_ANGLE`` is the angular equality tolerance on the circle; it can be
overridden with the ``GEODESIC_CODER_TOL`` environment variable.  ``EPS_MATRIX``
bounds the drift of ``|a|^2 - |b|^2`` away from 1.  Vertex ties in polygon
clipping use a much tighter tolerance: they only need to absorb rounding, and
geodesics passing a vertex at 1e-9 must still be told apart.
"""
import os

EPS_ANGLE = float(os.environ.get("GEODESIC_CODER_TOL", "1e-9"))
EPS_MATRIX = 1e-10


def set_angle_tol(value):
    global EPS_ANGLE
    if not value > 0:
        raise ValueError("tolerance must be positive")
    EPS_ANGLE = float(value)


def angle_tol():
    return EPS_ANGLE


def vertex_tol():
    return EPS_ANGLE * 1e-3
