"""Exception types shared across the package."""

from __future__ import annotations


class ContractViolationError(ValueError):
    """An input violates a documented precondition."""


class MustLinkInfeasibleError(ValueError):
    """Must-link pairs reference vertex pairs that are not edges of the graph."""

    def __init__(self, pairs):
        self.pairs = [(int(i), int(j)) for i, j in pairs]
        listed = ", ".join(str(p) for p in self.pairs)
        super().__init__(f"must-link pairs outside the graph support: {listed}")


class EigensolverError(RuntimeError):
    """The eigensolver did not reach the requested residual.

    ``residual`` holds the best residual achieved, when known. ``trace`` is
    filled with a partial solve history when the failure happens inside the
    descent loop.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
        self.trace = None


class EnumerationGuardError(ValueError):
    """An exhaustive enumeration was requested above the edge-count guard."""

    def __init__(self, num_edges, guard):
        super().__init__(
            f"enumeration over {num_edges} edges exceeds the guard of {guard}"
        )
        self.num_edges = num_edges
        self.guard = guard


class ParseError(ValueError):
    """A data file failed to parse; carries the offending line number."""

    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no
