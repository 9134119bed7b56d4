"""Exception types shared across the package."""

from __future__ import annotations


class SvagenError(Exception):
    """Base class for all package errors."""


class ParseError(SvagenError):
    """Raised on any input outside the supported Verilog subset."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class MissingDeclaration(SvagenError):
    """A signal referenced by an always block has no declaration in its module."""

    def __init__(self, name: str):
        super().__init__(f"no declaration for signal '{name}'")
        self.name = name


class PathExplosion(SvagenError):
    """Exact execution-path count exceeds the representable limit."""


class EmptyInput(SvagenError):
    pass


class DimensionMismatch(SvagenError):
    pass


class EmptyIndex(SvagenError):
    pass


class CorruptIndex(SvagenError):
    """Index file failed checksum or structural validation."""


class VersionMismatch(SvagenError):
    """Index file carries an unsupported format version."""


class UnsatisfiableStratum(SvagenError):
    """Requested synthetic-corpus stratum cannot be constructed."""


class UnresolvedHit(SvagenError):
    """A retrieval hit's id is absent from the knowledge base."""

    def __init__(self, entry_id: str):
        super().__init__(f"hit id '{entry_id}' not found in knowledge base")
        self.entry_id = entry_id


class ProviderError(SvagenError):
    """Remote provider returned a non-retryable or exhausted-retry failure."""

    def __init__(self, status: int, detail: str = ""):
        super().__init__(f"provider error {status}: {detail[:200]}")
        self.status = status
        self.detail = detail


class AuthError(ProviderError):
    """Authentication failure; never retried."""


class RateLimited(ProviderError):
    """Provider rate limit; retryable."""


class Timeout(SvagenError):
    """Transport-level timeout; retryable."""


class EmptyRankings(SvagenError):
    pass


class EmptyText(SvagenError):
    pass


class TooManyAtoms(SvagenError):
    """Guard has more boolean atoms than truth-table enumeration allows."""
