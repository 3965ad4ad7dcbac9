"""Exceptions raised by wgeodesic

Each concrete error also derives from the builtin exception matching
its meaning, so callers may catch either.
"""


class WGeodesicError(Exception):
    """Base class for wgeodesic errors"""


class DimensionError(WGeodesicError, ValueError):
    """Array shape does not match the graph"""


class GraphError(WGeodesicError, ValueError):
    """Invalid weighted graph"""


class DistributionError(WGeodesicError, ValueError):
    """Vector is not a probability vector"""


class UnknownMobilityError(WGeodesicError, KeyError):
    """Mobility name not recognised"""


class DivergentIntegralError(WGeodesicError, ValueError):
    """C_g is infinite where a finite value is required"""


class QuadratureError(WGeodesicError, RuntimeError):
    """Adaptive quadrature failed to reach its tolerance"""


class BoundaryError(WGeodesicError, ValueError):
    """Quantity undefined on the boundary of the simplex"""


class UnrepresentableError(WGeodesicError, ValueError):
    """Mass rate cannot be lifted to a ρ-weighted gradient"""


class OracleError(WGeodesicError, RuntimeError):
    """Reference construction failed its a posteriori checks"""


class FileFormatError(WGeodesicError, ValueError):
    """Malformed graph, distribution, options or result file"""
