"""Exception hierarchy shared by every module in :mod:`nhtopo`."""


class NHTopoError(Exception):
    """Base class for all toolkit errors."""


class NonFiniteInput(NHTopoError, ValueError):
    """A matrix or scalar argument contains NaN or Inf."""


class ConvergenceFailure(NHTopoError, RuntimeError):
    """The dense eigensolver failed to converge."""


class NotAntisymmetric(NHTopoError, ValueError):
    """A Pfaffian was requested for a matrix that is not antisymmetric."""


class OddDimension(NHTopoError, ValueError):
    """A Pfaffian was requested for an odd-dimensional matrix."""


class DimensionMismatch(NHTopoError, ValueError):
    """Operands have incompatible shapes."""


class AsymmetricGrid(NHTopoError, ValueError):
    """A momentum grid is not closed under k -> -k."""


class ConflictingCandidates(NHTopoError, ValueError):
    """Two distinct candidate operators satisfy the same symmetry role."""


class WrongSquareSign(NHTopoError, ValueError):
    """An anti-unitary operator has the wrong square for the requested check."""


class NonPositiveHopping(NHTopoError, ValueError):
    """A hopping amplitude that must be positive is not."""


class TooFewSites(NHTopoError, ValueError):
    """A finite lattice is shorter than the minimum supported length."""


class UnknownModelKind(NHTopoError, ValueError):
    """A model identifier is not recognised."""


class GapClosedAtTRIM(NHTopoError, ValueError):
    """The gap closes at a time-reversal-invariant momentum."""


class PathMismatch(NHTopoError, RuntimeError):
    """Two independent evaluations of an invariant disagree."""


class PfaffianMismatch(PathMismatch):
    """The sign and Pfaffian evaluations of the class-D invariant disagree."""


class ParityNotQuantized(NHTopoError, ValueError):
    """A parity expectation value is not close to +1 or -1."""


class GaplessRegion(NHTopoError, ValueError):
    """A continuum region violates |m| > |g|."""


class WrongGeometry(NHTopoError, ValueError):
    """A model has the wrong lattice geometry for the requested experiment."""


class ConfigParseError(NHTopoError, ValueError):
    """A configuration file or command line could not be parsed."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class ComputeError(NHTopoError, RuntimeError):
    """A library error surfaced through the command-line harness."""
