"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`QubitReconError`, so callers can catch the whole family at once.
"""


class QubitReconError(Exception):
    """Base class for all package errors."""


class InvalidStateError(QubitReconError, ValueError):
    """A Bloch vector is not finite or lies outside the unit ball."""


class FrameError(QubitReconError, ValueError):
    """A frame is not orthonormal, or an axis is too short to normalise."""


class NotTracePreservingError(QubitReconError, ValueError):
    """A Choi matrix fails the partial-trace condition Tr_1 = I/2."""


class NotCompletelyPositiveError(QubitReconError, ValueError):
    """A Choi matrix has a negative eigenvalue beyond tolerance."""


class NotUnitalError(QubitReconError, ValueError):
    """A unital-only formula was applied to a channel that moves the centre."""


class DegenerateDataError(QubitReconError, ValueError):
    """Input states of the records are not affinely independent."""


class NoPureCombinationError(DegenerateDataError):
    """The line through two input states never reaches the Bloch sphere."""


class DegenerateGeometryError(DegenerateDataError):
    """The orthogonal companion of the pure combination does not exist."""


class InconsistentDataError(QubitReconError, ValueError):
    """No completely positive map can reproduce the given records."""


class InfeasibleSearchError(InconsistentDataError):
    """The constrained search found no completely positive point.

    ``best_violation`` holds the smallest Choi-eigenvalue deficit seen.
    """

    def __init__(self, message: str, best_violation: float):
        super().__init__(message)
        self.best_violation = best_violation
