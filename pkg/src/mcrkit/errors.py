"""Exception hierarchy.

Everything derives from :class:`MCRError`; the CLI maps classes to exit codes.
"""


class MCRError(Exception):
    pass


class InvalidGeometry(MCRError, ValueError):
    """Input geometry violates a structural invariant (simplicity, manifoldness...)."""


class DegenerateInput(MCRError, ValueError):
    """Input is well-formed but degenerate for the requested operation."""


class DegenerateRay(DegenerateInput):
    pass


class CoincidentCircles(DegenerateInput):
    pass


class PointAtCenter(DegenerateInput):
    pass


class DegenerateSegment(DegenerateInput):
    pass


class PointOnBoundary(DegenerateInput):
    pass


class NotCocircular(DegenerateInput):
    pass


class PoleProjection(DegenerateInput):
    pass


class OverlappingCurves(DegenerateInput):
    pass


class InvalidSCP(MCRError, ValueError):
    pass


class InvalidParams(MCRError, ValueError):
    pass


class IncompatibleMode(MCRError, ValueError):
    pass


class SchemaError(MCRError, ValueError):
    """Instance/result file failed validation.

    ``where`` is a line number (JSON syntax errors) or a JSON path (schema errors).
    """

    def __init__(self, message: str, where: str | None = None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


class InvariantViolation(MCRError, AssertionError):
    pass
