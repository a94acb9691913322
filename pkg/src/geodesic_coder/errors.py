"""Exception hierarchy.

Errors deriving from :class:`NumericFailure` signal that a computation did not
converge or a geometric construction failed its own consistency checks; the
CLI maps them to exit code 3.
"""


class GeodesicCoderError(Exception):
    pass


class NumericFailure(GeodesicCoderError):
    pass


class DegenerateMap(NumericFailure):
    pass


class OrientationMismatch(GeodesicCoderError):
    pass


class NumericallySingular(NumericFailure):
    pass


class NotHyperbolic(GeodesicCoderError):
    pass


class IsRotation(GeodesicCoderError):
    pass


class RelationFailure(NumericFailure):
    pass


class IndexOutOfRange(GeodesicCoderError, IndexError):
    pass


class NoIntersection(GeodesicCoderError):
    pass


class InvalidPattern(GeodesicCoderError, ValueError):
    pass


class FixedPointNotInInterval(NumericFailure):
    pass


class NotInAttractor(GeodesicCoderError):
    pass


class NoFiniteStructure(NumericFailure):
    pass


class NoAttractor(NumericFailure):
    pass


class MaxStepsExceeded(NumericFailure):
    def __init__(self, message, orbit=None):
        super().__init__(message)
        self.orbit = orbit or []


class Unclassifiable(GeodesicCoderError):
    pass


class NotReduced(GeodesicCoderError):
    pass


class NotMarkov(NumericFailure):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class TouchesDiagonal(GeodesicCoderError):
    pass
