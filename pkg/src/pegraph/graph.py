"""Graphs, deterministic graph families and walk-based neighbourhood averages.

Vertices are 0-based here; the 1-based labels used on disk are
handled by :mod:`pegraph.formats`.

Grid orientation used by :func:`build_grid2d` for ``directed=True``
(vertex 1 top-left, row-major)::

    1 ---> 2 ---> 3          each vertex points East, South,
    | \\  / | \\  / |          South-East and South-West
    |  \\/  |  \\/  |          (whenever that neighbour exists)
    |  /\\  |  /\\  |
    v v  v v v  v v
    4 ---> 5 ---> 6
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Iterator, Literal, Sequence

import numpy as np
from scipy import sparse
from scipy.spatial.distance import pdist, squareform

from .errors import (
    InvalidGraphError,
    InvalidParameterError,
    InvalidSignalError,
    InvalidSizeError,
    UnsupportedModeError,
)

Mode = Literal["walk", "set"]
MODES: tuple[str, ...] = ("walk", "set")

# dense matrix powers are only allowed below this size (test oracles)
DENSE_LIMIT = 64


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple graph with a sparse nonnegative adjacency matrix.

    ``adjacency[i, j]`` is the weight of the arc i -> j.  Undirected graphs
    store both directions and must be exactly symmetric.  Unweighted graphs
    only carry weights equal to one.
    """

    adjacency: sparse.csr_array
    directed: bool = False
    weighted: bool = False
    name: str = "graph"
    check: InitVar[bool] = True
    _memo: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self, check: bool) -> None:
        adj = self.adjacency
        if not isinstance(adj, sparse.csr_array):
            adj = sparse.csr_array(adj, dtype=np.float64)
            object.__setattr__(self, "adjacency", adj)
        if adj.dtype != np.float64:
            adj = adj.astype(np.float64)
            object.__setattr__(self, "adjacency", adj)
        if check:
            _validate(adj, self.directed, self.weighted)
        adj.data.flags.writeable = False
        adj.indices.flags.writeable = False
        adj.indptr.flags.writeable = False

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def n_arcs(self) -> int:
        return int(self.adjacency.nnz)

    @property
    def n_edges(self) -> int:
        """Edges of an undirected graph, arcs of a directed one."""
        return self.n_arcs if self.directed else self.n_arcs // 2

    @cached_property
    def out_degree(self) -> np.ndarray:
        """Number of out-neighbours (neighbours when undirected)."""
        return np.diff(self.adjacency.indptr)

    @cached_property
    def structure(self) -> sparse.csr_array:
        """0/1 pattern of the adjacency matrix."""
        adj = self.adjacency
        return sparse.csr_array(
            (np.ones(adj.nnz), adj.indices, adj.indptr), shape=adj.shape
        )

    def edges(self) -> Iterator[tuple[int, int, float]]:
        """Yield ``(i, j, w)``; undirected edges once with ``i < j``."""
        adj = self.adjacency
        for i in range(self.n):
            lo, hi = adj.indptr[i], adj.indptr[i + 1]
            for j, w in zip(adj.indices[lo:hi], adj.data[lo:hi]):
                if self.directed or i < j:
                    yield i, int(j), float(w)

    def has_edge(self, i: int, j: int) -> bool:
        adj = self.adjacency
        row = adj.indices[adj.indptr[i]:adj.indptr[i + 1]]
        return bool(np.any(row == j))

    def isolated_vertices(self) -> np.ndarray:
        """Vertices with no incident edge (undirected) or no arc at all (directed)."""
        touched = self.out_degree > 0
        if self.directed:
            touched = touched | (np.bincount(self.adjacency.indices, minlength=self.n) > 0)
        return np.flatnonzero(~touched)

    def descriptor(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "directed": bool(self.directed),
            "weighted": bool(self.weighted),
            "edges": self.n_edges,
        }

    def add_edges(self, pairs: Iterable[tuple[int, int]], weight: float = 1.0) -> "Graph":
        """Return a copy with the given edges added (mirrored when undirected)."""
        pairs = list(pairs)
        for i, j in pairs:
            if self.has_edge(i, j):
                raise InvalidGraphError(f"edge ({i + 1}, {j + 1}) already present")
        if not pairs:
            return self
        extra = _coo_from_pairs(self.n, pairs, weight, self.directed)
        adj = (self.adjacency + extra).tocsr()
        return Graph(_canonical(adj), self.directed, self.weighted or weight != 1.0,
                     f"{self.name}+{len(pairs)}")

    def remove_edges(self, pairs: Iterable[tuple[int, int]]) -> "Graph":
        """Return a copy with the given edges removed (both directions when undirected)."""
        pairs = list(pairs)
        if not pairs:
            return self
        adj = self.adjacency.tolil(copy=True)
        for i, j in pairs:
            if not self.has_edge(i, j):
                raise InvalidGraphError(f"edge ({i + 1}, {j + 1}) not present")
            adj[i, j] = 0.0
            if not self.directed:
                adj[j, i] = 0.0
        return Graph(_canonical(sparse.csr_array(adj)), self.directed, self.weighted,
                     f"{self.name}-{len(pairs)}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        if (self.n, self.directed, self.weighted) != (other.n, other.directed, other.weighted):
            return False
        a, b = self.adjacency, other.adjacency
        return (
            np.array_equal(a.indptr, b.indptr)
            and np.array_equal(a.indices, b.indices)
            and np.array_equal(a.data, b.data)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        w = ", weighted" if self.weighted else ""
        return f"Graph({self.name!r}, n={self.n}, {kind}{w}, edges={self.n_edges})"


def _validate(adj: sparse.csr_array, directed: bool, weighted: bool) -> None:
    n, m = adj.shape
    if n != m:
        raise InvalidGraphError(f"adjacency must be square, got {adj.shape}")
    if n < 1:
        raise InvalidSizeError("graph needs at least one vertex")
    if adj.nnz:
        if not np.all(np.isfinite(adj.data)):
            raise InvalidGraphError("non-finite edge weight")
        if np.any(adj.data < 0):
            raise InvalidGraphError("negative edge weight")
        if np.any(adj.data == 0):
            raise InvalidGraphError("explicit zero stored in adjacency")
        if np.any(adj.diagonal() != 0):
            i = int(np.flatnonzero(adj.diagonal())[0])
            raise InvalidGraphError(f"self-loop at vertex {i + 1}")
        if not weighted and np.any(adj.data != 1.0):
            raise InvalidGraphError("unweighted graph with weight other than 1")
        if not directed and (adj != adj.T).nnz:
            raise InvalidGraphError("undirected graph with asymmetric adjacency")


def _canonical(adj) -> sparse.csr_array:
    adj = sparse.csr_array(adj, dtype=np.float64)
    adj.eliminate_zeros()
    adj.sum_duplicates()
    adj.sort_indices()
    return adj


def _coo_from_pairs(n: int, pairs, weight, directed: bool) -> sparse.csr_array:
    pairs = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
    w = np.broadcast_to(np.asarray(weight, dtype=np.float64), (len(pairs),))
    rows, cols = pairs[:, 0], pairs[:, 1]
    if not directed:
        rows, cols, w = np.concatenate([rows, cols]), np.concatenate([cols, rows]), np.concatenate([w, w])
    if len(rows) and (rows.min() < 0 or cols.min() < 0 or rows.max() >= n or cols.max() >= n):
        raise InvalidGraphError(f"vertex id outside 1..{n}")
    return sparse.csr_array((w, (rows, cols)), shape=(n, n))


def from_edges(
    n: int,
    edges: Iterable[Sequence],
    directed: bool = False,
    name: str = "graph",
) -> Graph:
    """Build a graph from 0-based ``(i, j)`` or ``(i, j, w)`` tuples.

    The graph is weighted as soon as one tuple carries a weight.  Duplicate
    edges are rejected.
    """
    edges = [tuple(e) for e in edges]
    weighted = any(len(e) == 3 for e in edges)
    if weighted and not all(len(e) == 3 for e in edges):
        raise InvalidGraphError("either every edge carries a weight or none does")
    seen = set()
    for e in edges:
        key = (e[0], e[1]) if directed else (min(e[0], e[1]), max(e[0], e[1]))
        if key in seen:
            raise InvalidGraphError(f"duplicate edge ({e[0] + 1}, {e[1] + 1})")
        seen.add(key)
        if e[0] == e[1]:
            raise InvalidGraphError(f"self-loop at vertex {e[0] + 1}")
    pairs = [(e[0], e[1]) for e in edges]
    w = [e[2] for e in edges] if weighted else 1.0
    if weighted and any(not np.isfinite(x) or x < 0 for x in w):
        raise InvalidGraphError("edge weights must be finite and nonnegative")
    adj = _coo_from_pairs(n, pairs, w, directed) if pairs else sparse.csr_array((n, n))
    return Graph(_canonical(adj), directed=directed, weighted=weighted, name=name)


_ONES = np.ones(0)


def _shared_ones(size: int) -> np.ndarray:
    """Read-only view of a reused buffer of ones (graph arrays are never written)."""
    global _ONES
    if _ONES.size < size:
        _ONES = np.ones(max(size, 2 * _ONES.size))
        _ONES.flags.writeable = False
    return _ONES[:size]


def _from_csr_parts(n, indptr, indices, directed, name) -> Graph:
    adj = sparse.csr_array(
        (_shared_ones(len(indices)), indices, indptr), shape=(n, n)
    )
    adj.has_sorted_indices = True
    return Graph(adj, directed=directed, weighted=False, name=name, check=False)


# --------------------------------------------------------------------------
# builders


def build_path(n: int, directed: bool = False) -> Graph:
    """Path 1 - 2 - ... - n; arcs (i, i+1) only when ``directed``."""
    if n < 2:
        raise InvalidSizeError(f"path needs n >= 2, got {n}")
    i = np.arange(n - 1)
    if directed:
        indptr = np.concatenate([np.arange(n), [n - 1]])
        return _from_csr_parts(n, indptr, i + 1, True, f"path(n={n},directed)")
    return Graph(_canonical(_coo_from_pairs(n, np.column_stack([i, i + 1]), 1.0, False)),
                 name=f"path(n={n})", check=False)


def build_cycle(n: int) -> Graph:
    if n < 3:
        raise InvalidSizeError(f"cycle needs n >= 3, got {n}")
    i = np.arange(n)
    pairs = np.column_stack([i, (i + 1) % n])
    return Graph(_canonical(_coo_from_pairs(n, pairs, 1.0, False)), name=f"cycle(n={n})", check=False)


def build_complete(n: int) -> Graph:
    if n < 2:
        raise InvalidSizeError(f"complete graph needs n >= 2, got {n}")
    full = np.tile(np.arange(n), n).reshape(n, n)
    keep = ~np.eye(n, dtype=bool)
    indices = full[keep]
    indptr = np.arange(n + 1) * (n - 1)
    return _from_csr_parts(n, indptr, indices, False, f"complete(n={n})")


def build_complete_bipartite(n1: int, n2: int) -> Graph:
    """Complete bipartite graph with sides ``0..n1-1`` and ``n1..n1+n2-1``."""
    if n1 < 1 or n2 < 1:
        raise InvalidSizeError(f"complete bipartite needs n1, n2 >= 1, got ({n1}, {n2})")
    n = n1 + n2
    idx = np.int32 if 2 * n1 * n2 < 2 ** 31 else np.int64
    indices = np.concatenate([np.tile(np.arange(n1, n, dtype=idx), n1), np.tile(np.arange(n1, dtype=idx), n2)])
    indptr = np.concatenate([np.arange(n1 + 1, dtype=idx) * n2, n1 * n2 + np.arange(1, n2 + 1, dtype=idx) * n1])
    return _from_csr_parts(n, indptr, indices, False, f"complete_bipartite({n1},{n2})")


def build_star(n: int) -> Graph:
    """Star with centre at the first vertex."""
    if n < 2:
        raise InvalidSizeError(f"star needs n >= 2, got {n}")
    g = build_complete_bipartite(1, n - 1)
    return Graph(g.adjacency, name=f"star(n={n})", check=False)


FAMILIES: dict[str, Callable[..., Graph]] = {
    "cycle": build_cycle,
    "complete": build_complete,
    "star": build_star,
    "complete_bipartite": build_complete_bipartite,
}


def build_family(kind: str, n: int | None = None, n1: int | None = None, n2: int | None = None) -> Graph:
    """Dispatch to one of the named families.

    ``complete_bipartite`` takes ``n1`` and ``n2`` (``n2`` defaults to ``n - n1``).
    """
    if kind == "complete_bipartite":
        if n1 is None:
            raise InvalidParameterError("complete_bipartite needs n1")
        if n2 is None:
            if n is None:
                raise InvalidParameterError("complete_bipartite needs n2 or n")
            n2 = n - n1
        return build_complete_bipartite(n1, n2)
    if kind not in FAMILIES:
        raise InvalidParameterError(f"unknown graph family {kind!r}; expected one of {sorted(FAMILIES)}")
    if n is None:
        raise InvalidParameterError(f"{kind} needs n")
    return FAMILIES[kind](n)


def build_grid2d(rows: int, cols: int, directed: bool = False) -> Graph:
    """King-move grid, vertices in row-major order.

    Directed grids point East, South, South-East and South-West.
    """
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise InvalidSizeError(f"grid needs rows, cols >= 1 and at least 2 cells, got {rows}x{cols}")
    r, c = np.divmod(np.arange(rows * cols), cols)
    src, dst = [], []
    for dr, dc in ((0, 1), (1, 0), (1, 1), (1, -1)):
        ok = (r + dr < rows) & (c + dc >= 0) & (c + dc < cols)
        src.append(np.flatnonzero(ok))
        dst.append((r[ok] + dr) * cols + c[ok] + dc)
    pairs = np.column_stack([np.concatenate(src), np.concatenate(dst)])
    adj = _canonical(_coo_from_pairs(rows * cols, pairs, 1.0, directed))
    tag = ",directed" if directed else ""
    return Graph(adj, directed=directed, name=f"grid({rows}x{cols}{tag})", check=False)


def build_erdos_renyi(n: int, p: float, seed: int) -> Graph:
    """G(n, p) with one Bernoulli draw per pair.

    Draws come from ``numpy.random.default_rng(seed)`` (PCG64), one uniform
    double per pair ``i < j`` in row-major order; the pair is kept when the
    draw is below ``p``.
    """
    if n < 1:
        raise InvalidSizeError(f"ER graph needs n >= 1, got {n}")
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError(f"p must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    pairs = np.column_stack([iu[keep], ju[keep]])
    adj = _canonical(_coo_from_pairs(n, pairs, 1.0, False))
    return Graph(adj, name=f"er(n={n},p={p},seed={seed})", check=False)


def gaussian_kernel_graph(
    coords,
    sigma1_sq: float,
    sigma2: float,
    metric: str | Callable = "euclidean",
) -> Graph:
    """Weighted graph ``w_ij = exp(-d(i,j)^2 / (2 sigma1_sq))`` for ``0 < d <= sigma2``.

    ``metric`` is anything :func:`scipy.spatial.distance.pdist` accepts.
    """
    pts = np.asarray(coords, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise InvalidSizeError("kernel graph needs at least 2 points")
    if not sigma1_sq > 0:
        raise InvalidParameterError(f"sigma1_sq must be positive, got {sigma1_sq}")
    if not sigma2 >= 0:
        raise InvalidParameterError(f"sigma2 must be nonnegative, got {sigma2}")
    d = squareform(pdist(pts, metric))
    w = np.where((d > 0) & (d <= sigma2), np.exp(-(d ** 2) / (2.0 * sigma1_sq)), 0.0)
    np.fill_diagonal(w, 0.0)
    # keep the matrix exactly symmetric whatever the metric did
    w = np.triu(w, 1)
    w = w + w.T
    adj = _canonical(sparse.csr_array(w))
    return Graph(adj, weighted=True, name=f"gaussian_kernel(n={len(pts)})")


# --------------------------------------------------------------------------
# walks


def _as_signal(g: Graph, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise InvalidSignalError(f"signal must be 1-d, got shape {x.shape}")
    if x.size != g.n:
        raise InvalidSignalError(f"signal has {x.size} values but graph has {g.n} vertices")
    if not np.all(np.isfinite(x)):
        raise InvalidSignalError("signal contains non-finite values")
    return x


def _check_mode(g: Graph, mode: str) -> None:
    if mode not in MODES:
        raise UnsupportedModeError(f"unknown aggregation mode {mode!r}; expected 'walk' or 'set'")
    if mode == "set" and g.weighted:
        raise UnsupportedModeError("set-based aggregation is only defined for unweighted graphs")


def _walk_sums(g: Graph, x: np.ndarray, lengths: Sequence[int]) -> Iterator[tuple[int, np.ndarray, np.ndarray, int]]:
    """Yield ``(k, W^k x, W^k 1, shift)`` for increasing ``k`` in ``lengths``.

    Both vectors are scaled by ``2**-shift`` to keep them in range; scaling by
    a power of two is exact, so their ratio is unaffected.
    """
    adj = g.adjacency
    num = x.copy()
    den = np.ones(g.n)
    shift = 0
    k = 0
    for target in sorted(lengths):
        while k < target:
            num = adj @ num
            # integer row counts are exact, so the first product can be skipped
            den = np.diff(adj.indptr).astype(np.float64) if k == 0 and not g.weighted else adj @ den
            k += 1
            top = den.max(initial=0.0)
            if top > 0:
                e = int(np.frexp(top)[1])
                if e:
                    num = np.ldexp(num, -e)
                    den = np.ldexp(den, -e)
                    shift += e
        yield k, num, den, shift


def _same_pattern(a: sparse.csr_array, b: sparse.csr_array) -> bool:
    return np.array_equal(a.indptr, b.indptr) and np.array_equal(a.indices, b.indices)


def _frontier(g: Graph, k: int) -> sparse.csr_array:
    """0/1 support of ``A^k`` for ``k >= 1``, memoised on the graph.

    ``B_{k+1}`` depends only on ``B_k``, so once a frontier repeats one of the
    two previous ones the sequence is periodic and no product is needed.
    """
    fronts: list = g._memo.setdefault("frontiers", [])
    while len(fronts) < k:
        if not fronts:
            nxt = g.structure
        elif len(fronts) >= 2 and _same_pattern(fronts[-1], fronts[-2]):
            nxt = fronts[-1]
        elif len(fronts) >= 3 and _same_pattern(fronts[-1], fronts[-3]):
            nxt = fronts[-2]
        else:
            nxt = _canonical(fronts[-1] @ g.structure)
            nxt.data[:] = 1.0
            nxt.data.flags.writeable = False
        fronts.append(nxt)
    return fronts[k - 1]


class WalkAggregate:
    """Per-vertex average of a signal over length-``k`` walks.

    ``values[i]`` is NaN when vertex ``i`` has no outgoing walk of length k;
    :attr:`missing` flags those vertices.
    """

    def __init__(self, graph: Graph, k: int, mode: str, values: np.ndarray, **known):
        self.graph = graph
        self.k = k
        self.mode = mode
        self.values = values
        values.flags.writeable = False
        for key, val in known.items():
            self.__dict__[key] = val

    @property
    def missing(self) -> np.ndarray:
        return np.isnan(self.values)

    @cached_property
    def support_size(self) -> np.ndarray:
        """``|N_k(i)|``: number of distinct endpoints of length-k walks."""
        if self.k == 0:
            return np.ones(self.graph.n, dtype=np.int64)
        return np.diff(_frontier(self.graph, self.k).indptr).astype(np.int64)

    @cached_property
    def weight_sum(self) -> np.ndarray:
        """``deg^k(i)``: row sums of ``W^k``."""
        (_, _, den, shift), = _walk_sums(self.graph, np.zeros(self.graph.n), [self.k])
        with np.errstate(over="ignore"):
            return np.ldexp(den, shift)

    def __repr__(self) -> str:
        return f"WalkAggregate(k={self.k}, mode={self.mode!r}, n={self.graph.n})"


def _aggregate_many(g: Graph, x: np.ndarray, lengths: Sequence[int], mode: str) -> dict[int, WalkAggregate]:
    out: dict[int, WalkAggregate] = {}
    positive = sorted({k for k in lengths if k > 0})
    if 0 in lengths:
        out[0] = WalkAggregate(g, 0, mode, x.copy(),
                               support_size=np.ones(g.n, dtype=np.int64), weight_sum=np.ones(g.n))
    if not positive:
        return out
    # a mean lies within [min x, max x]; clipping removes rounding drift, so
    # constant signals give exactly constant aggregates
    lo, hi = (x.min(), x.max()) if x.size else (0.0, 0.0)
    if mode == "walk":
        for k, num, den, shift in _walk_sums(g, x, positive):
            with np.errstate(invalid="ignore", divide="ignore"):
                vals = np.where(den > 0, num / np.where(den > 0, den, 1.0), np.nan)
            vals = np.clip(vals, lo, hi)
            with np.errstate(over="ignore"):
                true_den = np.ldexp(den, shift)
            out[k] = WalkAggregate(g, k, mode, vals, weight_sum=true_den)
    else:
        for k in positive:
            front = _frontier(g, k)
            size = front @ np.ones(g.n)
            total = front @ x
            with np.errstate(invalid="ignore", divide="ignore"):
                vals = np.where(size > 0, total / np.where(size > 0, size, 1.0), np.nan)
            vals = np.clip(vals, lo, hi)
            out[k] = WalkAggregate(g, k, mode, vals, support_size=np.diff(front.indptr).astype(np.int64))
    return out


def walk_aggregate(g: Graph, x, k: int, mode: str = "walk") -> WalkAggregate:
    """Average of ``x`` over the length-``k`` walks leaving each vertex.

    ``mode="walk"`` weights every walk endpoint by the total weight of the
    walks reaching it, ``(W^k x)_i / deg^k(i)``, using ``k`` sparse
    matrix-vector products.  ``mode="set"`` takes the plain mean over the
    distinct endpoints ``N_k(i)`` (unweighted graphs only).  The two agree for
    ``k <= 1`` on unweighted graphs.
    """
    x = _as_signal(g, x)
    _check_mode(g, mode)
    if k < 0:
        raise InvalidParameterError(f"walk length must be >= 0, got {k}")
    return _aggregate_many(g, x, [k], mode)[k]


@dataclass(frozen=True)
class VertexSet:
    included: np.ndarray
    steps: int = 0

    def __post_init__(self) -> None:
        self.included.flags.writeable = False

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.included)

    def __len__(self) -> int:
        return int(self.included.sum())


def reachable_set(g: Graph, steps: int) -> VertexSet:
    """Vertices with at least one outgoing walk of exactly ``steps`` edges."""
    if steps < 0:
        raise InvalidParameterError(f"steps must be >= 0, got {steps}")
    if steps == 0:
        return VertexSet(np.ones(g.n, dtype=bool), 0)
    if not g.directed:
        return VertexSet(g.out_degree >= 1, steps)
    has = np.ones(g.n)
    step = g.structure
    for _ in range(steps):
        has = (step @ has > 0).astype(np.float64)
        if not has.any():
            break
    return VertexSet(has > 0, steps)
