from typing import Optional


class ToolkitError(Exception):
    """Base class for every error raised by the toolkit"""


class DomainError(ToolkitError, ValueError):
    """A precondition of a domain operation does not hold"""


class FormulaSyntaxError(DomainError):
    """Malformed formula text"""

    def __init__(self, message: str, position: Optional[int] = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class SortError(DomainError):
    """An atom relates terms of the wrong sorts"""

    def __init__(self, message: str, atom: str = ""):
        self.atom = atom
        super().__init__(f"{message}: {atom}" if atom else message)


class AnchorLimitExceeded(DomainError):
    """Pattern or subset enumeration over more anchors than configured"""


class FragmentViolation(ToolkitError):
    """A weak monadic formula lies outside the effectively eliminable fragment"""

    def __init__(self, message: str, atom: str = ""):
        self.atom = atom
        super().__init__(f"{message}: {atom}" if atom else message)


class UsageError(ToolkitError):
    """Malformed command arguments"""
