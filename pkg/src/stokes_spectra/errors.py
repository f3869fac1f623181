"""Exception hierarchy shared by all modules."""


class NumericsError(Exception):
    """Base class for numerical failures (CLI exit code 3)."""


class ZeroPolynomialError(NumericsError):
    pass


class ZeroNearContourError(NumericsError):
    """A zero of the target function sits too close to a counting contour."""


class BranchObstructedError(NumericsError):
    """A turning point obstructs the root branch along a normalization ray."""


class CertificateError(NumericsError):
    """Ray admissibility certification failed.

    Carries the failing perturbation parameter ``t`` and the violated
    condition tag ('a', 'b' or 'c').
    """

    def __init__(self, message, t=None, condition=None):
        super().__init__(message)
        self.t = t
        self.condition = condition


class MissedEigenvalueError(NumericsError):
    """Newton refinement found fewer roots than the contour count."""

    def __init__(self, message, expected=None, found=None, window=None):
        super().__init__(message)
        self.expected = expected
        self.found = found
        self.window = window


class NotAnEigenvalueError(NumericsError):
    pass


class CountNotStabilizedError(NumericsError):
    pass


class BranchLostError(NumericsError):
    """Continuation corrector failed below the minimal step size."""

    def __init__(self, message, partial_path=None):
        super().__init__(message)
        self.partial_path = partial_path


class IncompleteComplexError(NumericsError):
    """A Stokes complex contains unresolved trajectories."""


class IntegrationError(NumericsError):
    def __init__(self, message, segment=None):
        super().__init__(message)
        self.segment = segment
