"""
Error hierarchy shared by all toolkit modules
"""

from typing import Optional, Tuple


class LeggettToolkitError(Exception):
    """Base class for toolkit errors"""
    pass


class InvalidArgumentError(LeggettToolkitError, ValueError):
    """Argument outside the documented domain"""
    pass


class NumericDomainError(LeggettToolkitError, ArithmeticError):
    """Non-finite value or rounding drift beyond the clamp tolerance"""
    pass


class CorrelationFormatError(LeggettToolkitError):
    """Malformed correlation file"""
    pass


class PositivityViolationError(LeggettToolkitError):
    """A reconstructed outcome probability would be negative"""

    def __init__(self, message: str, outcome: Tuple[int, int], slack: float):
        super().__init__(message)
        self.outcome = outcome
        self.slack = slack


class SignalingError(LeggettToolkitError):
    """A local marginal depends on the remote setting"""

    def __init__(self, message: str, party: str, setting: int, mismatch: float):
        super().__init__(message)
        self.party = party
        self.setting = setting
        self.mismatch = mismatch


class OutOfRegimeError(LeggettToolkitError):
    """Visibility above the range where the explicit model is valid"""

    def __init__(self, message: str, visibility: float, bound: float, t: Optional[float] = None):
        super().__init__(message)
        self.visibility = visibility
        self.bound = bound
        self.t = t
