"""Exception types shared across the package."""


class HardcoreError(Exception):
    """Base class for all package errors."""


class GraphError(HardcoreError, ValueError):
    pass


class GraphTooLarge(HardcoreError):
    pass


class RootFindingError(HardcoreError):
    pass


class ZeroDenominator(HardcoreError, ZeroDivisionError):
    """A partition function in a ratio denominator vanished.

    ``subgraph`` holds the original vertex ids of the offending induced subgraph.
    """

    def __init__(self, message, subgraph=None):
        super().__init__(message)
        self.subgraph = subgraph


class Undecidable(HardcoreError):
    pass


class PoleHit(HardcoreError, ZeroDivisionError):
    """An orbit landed on the pole x = -1."""

    def __init__(self, step, message=None):
        super().__init__(message or f"orbit hit the pole x = -1 at step {step}")
        self.step = step


class BranchViolation(HardcoreError, ValueError):
    pass


class CertificationFailed(HardcoreError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class InvarianceViolated(HardcoreError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class SearchFailed(HardcoreError):
    pass


class PreconditionViolated(HardcoreError, ValueError):
    pass


class NoZeroFound(HardcoreError):
    pass


class ConstructionFailed(HardcoreError):
    pass


class OutOfDomain(HardcoreError):
    """A ratio left the invariant domain; the certificate is inconclusive, not a proof of Z = 0."""

    def __init__(self, message, step=None, certificate=None):
        super().__init__(message)
        self.step = step
        self.certificate = certificate


class ConditionViolated(HardcoreError):
    def __init__(self, message, which=None, step=None, certificate=None):
        super().__init__(message)
        self.which = which
        self.step = step
        self.certificate = certificate
