"""Exception hierarchy for qidlaw."""


class QIDError(Exception):
    """Base class for all library errors."""


class LawError(QIDError, ValueError):
    """Invalid discrete law input."""


class DuplicateAtom(LawError):
    pass


class MassNotNormalized(LawError):
    pass


class EmptySupport(LawError):
    pass


class BudgetExhausted(QIDError):
    """Certified search ran out of evaluations.

    The partial :class:`~qidlaw.charfn.InfimumReport` is kept on ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class GridTooCoarse(QIDError):
    pass


class NotLattice(QIDError):
    pass


class CoefficientNotReal(QIDError):
    pass


class BasisCollision(QIDError):
    pass


class ZeroOnPath(QIDError):
    pass


class XIsZero(QIDError, ValueError):
    pass


class SigmaNotZero(QIDError, ValueError):
    pass


class NotOnLattice(QIDError):
    pass


class NotAProbabilityLaw(QIDError):
    pass


class DenominatorNearZero(QIDError):
    pass


class AllPointsSkipped(QIDError):
    pass


class NoRecordMinima(QIDError):
    pass


class NotQID(QIDError):
    """Raised when a pipeline step needs a certified QID law and did not get one."""

    def __init__(self, message, verdict=None):
        super().__init__(message)
        self.verdict = verdict
