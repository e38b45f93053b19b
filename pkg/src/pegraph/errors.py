"""Exception hierarchy shared by every pegraph module."""

from __future__ import annotations


class PEGraphError(Exception):
    """Base class for all pegraph errors."""


class ConfigError(PEGraphError, ValueError):
    """Bad arguments or parameters (CLI exit code 2)."""


class InvalidSizeError(ConfigError):
    pass


class InvalidParameterError(ConfigError):
    pass


class InvalidSignalError(ConfigError):
    """Signal length does not match the graph, or the signal is not a 1-d real vector."""


class InvalidVectorError(ConfigError):
    """Non-finite entry in a vector handed to the pattern encoder."""


class UnsupportedModeError(ConfigError):
    pass


class InvalidGraphError(ConfigError):
    """Self-loop, negative weight, or asymmetric adjacency on an undirected graph."""


class DomainError(PEGraphError):
    """The entropy is undefined on this graph/signal (CLI exit code 4)."""


class IsolatedVertexError(DomainError):
    def __init__(self, vertices):
        self.vertices = list(vertices)
        shown = ", ".join(str(v + 1) for v in self.vertices[:10])
        more = "" if len(self.vertices) <= 10 else f" (+{len(self.vertices) - 10} more)"
        super().__init__(f"undirected graph has isolated vertices: {shown}{more}")


class EmptyDomainError(DomainError):
    pass


class ParseError(PEGraphError):
    """Malformed input file (CLI exit code 3)."""

    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
        if line is not None:
            where = f"{where}:{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)
