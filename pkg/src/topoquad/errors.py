"""Exception hierarchy shared by every module."""


class TopoError(Exception):
    """Base class for all errors raised by topoquad."""


class NumericalDomainError(TopoError, ValueError):
    """A sampled value was non-finite or outside its admissible domain."""


class NotNearIntegerError(TopoError):
    """A quadrature result is too far from any integer to be snapped."""

    def __init__(self, raw, residual, tol):
        self.raw = float(raw)
        self.residual = float(residual)
        self.tol = float(tol)
        super().__init__(
            f"raw value {self.raw:.9g} is {self.residual:.3g} from the nearest "
            f"integer (tolerance {self.tol:.3g}); grid under-resolved or map invalid"
        )


class UnsupportedDimensionError(TopoError, ValueError):
    pass


class SingularPointError(TopoError, ValueError):
    """The solid-angle form was evaluated at (or too close to) the origin."""


class LiftConsistencyError(TopoError, ValueError):
    """A circle-map lift does not satisfy f(x + 2pi) = f(x) + 2pi n."""


class CriticalValueError(TopoError, ValueError):
    """A chosen regular value has a preimage with vanishing derivative."""


class ZeroOnSurfaceError(TopoError, ValueError):
    """A vector field vanishes on the integration surface."""


class ZeroHiggsError(ZeroOnSurfaceError):
    pass


class GeometryError(TopoError, ValueError):
    """Geometric preconditions (containment, disjointness) are violated."""


class ZeroRefinementError(TopoError):
    def __init__(self, message, location=None):
        self.location = location
        super().__init__(message)


class MeshError(TopoError, ValueError):
    """Base class for mesh parsing and validation failures."""


class OffParseError(MeshError):
    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class NonManifoldError(MeshError):
    pass


class NotClosedError(MeshError):
    pass


class NotOrientableError(MeshError):
    pass


class DegenerateFaceError(MeshError):
    pass


class NotOrientableSurfaceError(MeshError):
    pass


class UsageError(TopoError, ValueError):
    """Bad command-line usage or registry parameters (exit code 2)."""
