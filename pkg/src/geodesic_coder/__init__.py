"""Boundary maps, attractors and geodesic coding on compact hyperbolic surfaces."""
from .boundary import Attractor, Partition, attractor, cycle_report, make_partition, parse_partition
from .coding import CodingSequence, arithmetic_code, geometric_code
from .duality import DualityVerdict, dual_check
from .errors import GeodesicCoderError, NumericFailure
from .markov import fine_partition, markov_condition, sofic_presentation, transition_matrix
from .measure import entropy, total_mass
from .moebius import CirclePoint, Geodesic, MoebiusMap
from .surface import GroupWord, Surface, axis, build

__all__ = [
    "Attractor",
    "CirclePoint",
    "CodingSequence",
    "DualityVerdict",
    "Geodesic",
    "GeodesicCoderError",
    "GroupWord",
    "MoebiusMap",
    "NumericFailure",
    "Partition",
    "Surface",
    "arithmetic_code",
    "attractor",
    "axis",
    "build",
    "cycle_report",
    "dual_check",
    "entropy",
    "fine_partition",
    "geometric_code",
    "make_partition",
    "markov_condition",
    "parse_partition",
    "sofic_presentation",
    "total_mass",
    "transition_matrix",
]
__version__ = "0.1.0"
