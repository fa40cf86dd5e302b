"""Exception hierarchy shared by every module."""


class KakeyaLabError(Exception):
    """Base class for all library errors."""


class DomainError(KakeyaLabError, ValueError):
    """An operation was applied outside its mathematical domain."""


class PrecisionError(KakeyaLabError, ArithmeticError):
    """Truncated arithmetic cannot certify the requested result."""


class ResourceError(KakeyaLabError):
    """An enumeration or search would exceed its configured budget."""


class PreconditionError(KakeyaLabError, ValueError):
    """A documented precondition of an operation does not hold."""


class ConsistencyError(KakeyaLabError, RuntimeError):
    """An internal cross-check failed; indicates a bug, never user error."""
