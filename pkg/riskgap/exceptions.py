"""
Error hierarchy shared by every riskgap module.
"""


class RiskGapError(Exception):
    """Base class for all riskgap errors."""


class InvalidInputError(RiskGapError, ValueError):
    """Raised when arguments or input files violate an operation's preconditions."""


class InvalidStateError(RiskGapError, RuntimeError):
    """Raised when an object is used in a state that does not support the call."""


class UnsupportedInstanceError(RiskGapError):
    """Raised when exact ERM is asked for outside its exactness window."""


class ResourceExhaustedError(RiskGapError):
    """Raised when the manifold search hits its node-expansion cap."""

    def __init__(self, message: str, expansions: int):
        super().__init__(message)
        self.expansions = expansions
