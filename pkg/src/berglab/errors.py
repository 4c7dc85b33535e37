"""Exception types shared across the package.

The CLI maps these onto exit codes: precondition/domain problems exit
with status 2, numeric failures (quadrature, truncation, branch
proximity) with status 3.
"""


class BerglabError(Exception):
    """Base class for package errors."""


class DomainError(BerglabError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class PreconditionError(BerglabError, ValueError):
    """A documented precondition of an operation is violated."""


class InconsistencyError(BerglabError, RuntimeError):
    """A computed quantity violates a structural guarantee it should satisfy."""


class NumericError(BerglabError, RuntimeError):
    """A numeric procedure cannot deliver the requested accuracy
    (series truncation, branch-point proximity, overflow).

    Carries a ``diagnostics`` dict with the best estimate and the
    parameters of the failed attempt, so failures are actionable from
    the CLI report.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class QuadratureError(NumericError):
    """Numerical integration failed to converge to the requested tolerance."""
