"""Permutation entropy for signals on graphs."""

from .errors import (
    ConfigError,
    DomainError,
    EmptyDomainError,
    InvalidGraphError,
    InvalidParameterError,
    InvalidSignalError,
    InvalidSizeError,
    InvalidVectorError,
    IsolatedVertexError,
    ParseError,
    PEGraphError,
    UnsupportedModeError,
)
from .graph import (
    Graph,
    VertexSet,
    WalkAggregate,
    build_complete,
    build_complete_bipartite,
    build_cycle,
    build_erdos_renyi,
    build_family,
    build_grid2d,
    build_path,
    build_star,
    from_edges,
    gaussian_kernel_graph,
    reachable_set,
    walk_aggregate,
)
from .ordinal import (
    DimensionWarning,
    EmbeddingMatrix,
    EntropyResult,
    PatternHistogram,
    decode_pattern,
    edge_surgery_eligible,
    embed,
    encode_patterns,
    encode_permutation,
    entropy_of_histogram,
    pattern_of,
    pe_time_series,
    peg,
    smoothness,
)
from .signals import GeneratorSpec, gaussian_noise, logistic_map, mix2d

__version__ = "0.1.0"

__all__ = [
    "build_complete",
    "build_complete_bipartite",
    "build_cycle",
    "build_erdos_renyi",
    "build_family",
    "build_grid2d",
    "build_path",
    "build_star",
    "ConfigError",
    "decode_pattern",
    "DimensionWarning",
    "DomainError",
    "edge_surgery_eligible",
    "embed",
    "EmbeddingMatrix",
    "EmptyDomainError",
    "encode_patterns",
    "encode_permutation",
    "entropy_of_histogram",
    "EntropyResult",
    "from_edges",
    "gaussian_kernel_graph",
    "gaussian_noise",
    "GeneratorSpec",
    "Graph",
    "InvalidGraphError",
    "InvalidParameterError",
    "InvalidSignalError",
    "InvalidSizeError",
    "InvalidVectorError",
    "IsolatedVertexError",
    "logistic_map",
    "mix2d",
    "ParseError",
    "pattern_of",
    "PatternHistogram",
    "pe_time_series",
    "peg",
    "PEGraphError",
    "reachable_set",
    "smoothness",
    "UnsupportedModeError",
    "VertexSet",
    "walk_aggregate",
    "WalkAggregate",
    "__version__",
]
