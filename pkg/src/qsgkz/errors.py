"""Exception hierarchy.

Every error raised by the library derives from ``QsgkzError``.  The CLI maps
``InvalidInstance`` subclasses to exit code 1 and everything else to 2.
"""


class QsgkzError(Exception):
    pass


class InvalidInstance(QsgkzError):
    pass


class NotSaturated(InvalidInstance):
    pass


class QuasiSymmetryViolation(InvalidInstance):
    pass


class ZeroSumViolation(InvalidInstance):
    pass


class ZeroColumn(InvalidInstance):
    pass


class NotGaleDual(InvalidInstance):
    pass


class DegenerateArrangement(QsgkzError):
    pass


class NotAWallPair(QsgkzError):
    pass


class NotAdjacent(QsgkzError):
    pass


class NotFullDimensional(QsgkzError):
    pass


class ShapeMismatch(QsgkzError):
    pass


class NoCommonFace(QsgkzError):
    pass


class ZeroCoordinate(QsgkzError):
    pass


class AxiomsFailed(QsgkzError):
    pass


class LabelOutsideBasis(QsgkzError):
    pass


class TruncationUnstable(QsgkzError):
    pass


class TriangulationTooLarge(QsgkzError):
    pass


class PoleAtH(QsgkzError):
    """Raised when a denominator factor of an exact series vanishes at h."""

    def __init__(self, message, factor=None):
        super().__init__(message)
        self.factor = factor


class Infeasible(QsgkzError):
    pass


class OutsideConvergenceDomain(QsgkzError):
    pass


class PoleOnContour(QsgkzError):
    pass


class NotGeneric(QsgkzError):
    pass


class NotTotallyNonResonant(QsgkzError):
    pass


class Diverging(QsgkzError):
    pass


class IllConditioned(QsgkzError):
    pass
