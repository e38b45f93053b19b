"""Ordinal patterns, permutation entropy of time series and of graph signals."""

from __future__ import annotations

import hashlib
import math
import warnings
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import (
    EmptyDomainError,
    InvalidParameterError,
    InvalidSignalError,
    InvalidSizeError,
    InvalidVectorError,
    IsolatedVertexError,
    UnsupportedModeError,
)
from .graph import Graph, _aggregate_many, _as_signal, _check_mode, reachable_set, walk_aggregate

M_RANGE = (2, 12)
L_RANGE = (1, 64)
DENSE_HISTOGRAM_MAX_M = 8


class DimensionWarning(UserWarning):
    """Embedding dimension outside the usual 3..7 range."""


def _check_params(m: int, L: int) -> None:
    if not (isinstance(m, (int, np.integer)) and M_RANGE[0] <= m <= M_RANGE[1]):
        raise InvalidParameterError(f"embedding dimension m must be an integer in {M_RANGE}, got {m!r}")
    if not (isinstance(L, (int, np.integer)) and L_RANGE[0] <= L <= L_RANGE[1]):
        raise InvalidParameterError(f"delay L must be an integer in {L_RANGE}, got {L!r}")
    if not 3 <= m <= 7:
        warnings.warn(f"m={m} is outside the recommended range 3..7", DimensionWarning, stacklevel=3)


# --------------------------------------------------------------------------
# patterns


def _factorials(m: int) -> np.ndarray:
    return np.array([math.factorial(k) for k in range(m)], dtype=np.int64)


def encode_patterns(rows: np.ndarray) -> np.ndarray:
    """Lehmer codes of the ordinal patterns of each row of ``rows``.

    The pattern of a row is its stable ascending argsort, so equal values are
    ordered by position.  The code is ``sum_i c_i (m-1-i)!`` where ``c_i``
    counts later positions of the permutation holding a smaller index; the
    identity maps to 0 and the full reversal to ``m! - 1``.
    """
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2:
        raise InvalidVectorError(f"expected a 2-d array of embedding rows, got shape {rows.shape}")
    m = rows.shape[1]
    if m < 2:
        raise InvalidVectorError("patterns need at least 2 entries")
    if not np.all(np.isfinite(rows)):
        raise InvalidVectorError("embedding vector contains non-finite values")
    perm = np.argsort(rows, axis=1, kind="stable")
    fact = _factorials(m)
    codes = np.zeros(rows.shape[0], dtype=np.int64)
    for i in range(m - 1):
        smaller = (perm[:, i + 1:] < perm[:, i:i + 1]).sum(axis=1)
        codes += smaller * fact[m - 1 - i]
    return codes


def pattern_of(v) -> int:
    """Lehmer code of the ordinal pattern of a single vector."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise InvalidVectorError(f"expected a vector, got shape {v.shape}")
    return int(encode_patterns(v[None, :])[0])


def decode_pattern(code: int, m: int) -> tuple[int, ...]:
    """Permutation ``(k_1, ..., k_m)`` (1-based) for a Lehmer code."""
    if not 0 <= code < math.factorial(m):
        raise InvalidParameterError(f"code {code} outside [0, {m}!)")
    pool = list(range(1, m + 1))
    out = []
    for i in range(m - 1, -1, -1):
        f = math.factorial(i)
        d, code = divmod(code, f)
        out.append(pool.pop(d))
    return tuple(out)


def encode_permutation(perm) -> int:
    """Lehmer code of a 1-based permutation tuple (inverse of :func:`decode_pattern`)."""
    perm = list(perm)
    m = len(perm)
    code = 0
    for i, p in enumerate(perm):
        code += sum(q < p for q in perm[i + 1:]) * math.factorial(m - 1 - i)
    return code


# --------------------------------------------------------------------------
# histogram / entropy


@dataclass(frozen=True)
class PatternHistogram:
    """Counts of ordinal patterns, stored sparsely as sorted ``(code, count)`` pairs."""

    m: int
    codes: tuple[int, ...]
    counts: tuple[int, ...]

    @classmethod
    def from_codes(cls, codes: np.ndarray, m: int) -> "PatternHistogram":
        codes = np.asarray(codes, dtype=np.int64)
        if m <= DENSE_HISTOGRAM_MAX_M:
            dense = np.bincount(codes, minlength=math.factorial(m))
            nz = np.flatnonzero(dense)
            return cls(m, tuple(int(c) for c in nz), tuple(int(c) for c in dense[nz]))
        uniq, cnt = np.unique(codes, return_counts=True)
        return cls(m, tuple(int(c) for c in uniq), tuple(int(c) for c in cnt))

    @classmethod
    def from_mapping(cls, m: int, mapping: dict[int, int]) -> "PatternHistogram":
        items = sorted((int(k), int(v)) for k, v in mapping.items() if v)
        if any(v < 0 for _, v in items):
            raise InvalidParameterError("negative pattern count")
        limit = math.factorial(m)
        if any(not 0 <= k < limit for k, _ in items):
            raise InvalidParameterError(f"pattern code outside [0, {m}!)")
        return cls(m, tuple(k for k, _ in items), tuple(v for _, v in items))

    @property
    def total(self) -> int:
        return sum(self.counts)

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.codes, self.counts))

    def dense(self) -> np.ndarray:
        """Length-``m!`` count vector (refuses beyond m = 8)."""
        if self.m > DENSE_HISTOGRAM_MAX_M:
            raise InvalidParameterError(f"dense histogram not available for m={self.m}")
        out = np.zeros(math.factorial(self.m), dtype=np.int64)
        out[list(self.codes)] = self.counts
        return out

    def reversed(self) -> "PatternHistogram":
        """Histogram of the negated signal when no ties are present."""
        m = self.m
        mapping = {}
        for c, n in zip(self.codes, self.counts):
            perm = decode_pattern(c, m)
            mapping[encode_permutation(perm[::-1])] = n
        return PatternHistogram.from_mapping(m, mapping)


def shannon_nats(counts) -> float:
    """Shannon entropy (natural log) of a count vector; zero counts ignored.

    The sum runs over sorted counts with :func:`math.fsum`, so the value only
    depends on the multiset of counts.
    """
    counts = sorted(int(c) for c in counts if c)
    total = sum(counts)
    if total <= 0:
        raise EmptyDomainError("no patterns to take the entropy of")
    h = -math.fsum((c / total) * math.log(c / total) for c in counts)
    return h + 0.0  # -0.0 -> 0.0


@dataclass(frozen=True)
class EntropyResult:
    raw: float
    normalized: float
    histogram: PatternHistogram
    m: int
    L: int
    mode: str | None = None
    graph: dict | None = None
    signal_hash: str | None = None
    ties: int = 0

    @property
    def total(self) -> int:
        return self.histogram.total

    def to_dict(self) -> dict[str, Any]:
        return {
            "m": self.m,
            "L": self.L,
            "mode": self.mode,
            "raw_nats": self.raw,
            "normalized": self.normalized,
            "total": self.total,
            "histogram": [[c, n] for c, n in zip(self.histogram.codes, self.histogram.counts)],
            "graph": self.graph,
            "signal_hash": self.signal_hash,
            "ties": self.ties,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "EntropyResult":
        m = int(d["m"])
        hist = PatternHistogram.from_mapping(m, {int(c): int(n) for c, n in d["histogram"]})
        if hist.total != int(d["total"]):
            raise InvalidParameterError("histogram counts do not add up to total")
        return cls(
            raw=float(d["raw_nats"]),
            normalized=float(d["normalized"]),
            histogram=hist,
            m=m,
            L=int(d["L"]),
            mode=d.get("mode"),
            graph=d.get("graph"),
            signal_hash=d.get("signal_hash"),
            ties=int(d.get("ties", 0)),
        )


def entropy_of_histogram(h: PatternHistogram, L: int = 1, **provenance) -> EntropyResult:
    """Raw (nats) and normalised permutation entropy of a histogram."""
    if h.total <= 0:
        raise EmptyDomainError("histogram is empty")
    top = math.log(math.factorial(h.m))
    # clamp rounding at the uniform distribution
    raw = min(shannon_nats(h.counts), top)
    return EntropyResult(raw=raw, normalized=raw / top, histogram=h, m=h.m, L=L, **provenance)


def signal_hash(x) -> str:
    x = np.ascontiguousarray(np.asarray(x, dtype="<f8"))
    return hashlib.sha256(x.tobytes()).hexdigest()


def _count_ties(rows: np.ndarray) -> int:
    s = np.sort(rows, axis=1)
    return int(np.any(s[:, 1:] == s[:, :-1], axis=1).sum())


# --------------------------------------------------------------------------
# embeddings


@dataclass(frozen=True)
class EmbeddingMatrix:
    m: int
    L: int
    rows: np.ndarray
    vertex_ids: np.ndarray

    def __post_init__(self) -> None:
        self.rows.flags.writeable = False
        self.vertex_ids.flags.writeable = False

    def __len__(self) -> int:
        return self.rows.shape[0]


def embed(g: Graph, x, m: int, L: int = 1, mode: str = "walk") -> EmbeddingMatrix:
    """Rows ``(y^0, y^L, ..., y^{(m-1)L})`` of walk averages for each retained vertex.

    Undirected graphs keep every vertex and must not have isolated vertices.
    Directed graphs keep the vertices with an outgoing walk of length
    ``(m-1)L``; every shorter walk average is then defined too.
    """
    _check_params(m, L)
    x = _as_signal(g, x)
    _check_mode(g, mode)
    span = (m - 1) * L
    if g.directed:
        keep = reachable_set(g, span).indices
        if keep.size == 0:
            raise EmptyDomainError(f"no vertex has an outgoing walk of length {span}")
    else:
        iso = np.flatnonzero(g.out_degree == 0)
        if iso.size:
            raise IsolatedVertexError(iso)
        keep = np.arange(g.n)
    aggs = _aggregate_many(g, x, [k * L for k in range(m)], mode)
    rows = np.column_stack([aggs[k * L].values[keep] for k in range(m)])
    return EmbeddingMatrix(m, L, rows, keep)


def _result(rows: np.ndarray, m: int, L: int, x: np.ndarray, **prov) -> EntropyResult:
    hist = PatternHistogram.from_codes(encode_patterns(rows), m)
    return entropy_of_histogram(hist, L=L, signal_hash=signal_hash(x), ties=_count_ties(rows), **prov)


def peg(g: Graph, x, m: int, L: int = 1, mode: str = "walk") -> EntropyResult:
    """Permutation entropy of the signal ``x`` on the graph ``g``."""
    emb = embed(g, x, m, L, mode)
    return _result(emb.rows, m, L, np.asarray(x, dtype=np.float64), mode=mode, graph=g.descriptor())


def delay_vectors(x, m: int, L: int = 1) -> np.ndarray:
    """Classical embedding ``(x_i, x_{i+L}, ..., x_{i+(m-1)L})``."""
    x = np.asarray(x, dtype=np.float64)
    span = (m - 1) * L
    if x.ndim != 1:
        raise InvalidSignalError(f"time series must be 1-d, got shape {x.shape}")
    if x.size < span + 1:
        raise InvalidSizeError(f"series of length {x.size} too short for m={m}, L={L}")
    win = np.lib.stride_tricks.sliding_window_view(x, span + 1)
    return win[:, ::L]


def pe_time_series(x, m: int, L: int = 1) -> EntropyResult:
    """Bandt-Pompe permutation entropy of a time series."""
    _check_params(m, L)
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise InvalidSignalError("signal contains non-finite values")
    rows = delay_vectors(x, m, L)
    return _result(rows, m, L, x, mode=None, graph=None)


# --------------------------------------------------------------------------
# auxiliary


def smoothness(g: Graph, x) -> float:
    """Sum over undirected edges of ``w_ij (x_i - x_j)^2``."""
    if g.directed:
        raise UnsupportedModeError("smoothness is defined for undirected graphs only")
    x = _as_signal(g, x)
    coo = g.adjacency.tocoo()
    upper = coo.row < coo.col
    i, j, w = coo.row[upper], coo.col[upper], coo.data[upper]
    return float(np.sum(w * (x[i] - x[j]) ** 2))


def local_extrema(g: Graph, x) -> tuple[np.ndarray, np.ndarray]:
    """Boolean masks ``(A, B)`` of vertices strictly below / above their neighbour mean."""
    mean = walk_aggregate(g, x, 1).values
    x = np.asarray(x, dtype=np.float64)
    return x < mean, x > mean


def edge_surgery_eligible(g: Graph, x) -> tuple[set[tuple[int, int]], set[tuple[int, int]]]:
    """Edges that can be added (``E0``) or removed (``E1``) without changing the m=2 patterns.

    ``A`` holds the vertices below their neighbour mean and ``B`` those above
    it.  ``E0`` contains non-edges ``{i, j}`` with ``i in A``, ``j in B`` and
    ``x_i < x_j``; ``E1`` contains edges with ``i in A``, ``j in B`` and
    ``x_j < x_i``.  Pairs are returned 0-based as ``(min, max)``.
    """
    if g.directed or g.weighted:
        raise UnsupportedModeError("edge surgery needs an undirected unweighted graph")
    x = _as_signal(g, x)
    iso = np.flatnonzero(g.out_degree == 0)
    if iso.size:
        raise IsolatedVertexError(iso)
    below, above = local_extrema(g, x)
    dense_rows = g.adjacency
    e0: set[tuple[int, int]] = set()
    e1: set[tuple[int, int]] = set()
    for i in np.flatnonzero(below):
        nbrs = set(dense_rows.indices[dense_rows.indptr[i]:dense_rows.indptr[i + 1]].tolist())
        for j in np.flatnonzero(above):
            pair = (int(min(i, j)), int(max(i, j)))
            if j in nbrs:
                if x[j] < x[i]:
                    e1.add(pair)
            elif x[i] < x[j]:
                e0.add(pair)
    return e0, e1
