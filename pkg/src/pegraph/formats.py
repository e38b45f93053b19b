"""Readers and writers for edge lists, signals, images, coordinates and results.

On disk vertex ids are 1-based; everything returned from here is 0-based.
Readers reject malformed input instead of repairing it and report the line
(or byte offset for binary PGM) of the first problem.

Edge list::

    %undirected          (or %directed; default undirected)
    %vertices 8          (optional; otherwise the largest id seen)
    # comment
    1<TAB>2
    2<TAB>3<TAB>0.5      (weights all-or-none)
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import InvalidGraphError, InvalidSignalError, ParseError
from .graph import Graph, from_edges
from .ordinal import EntropyResult


def _read_lines(path) -> list[str]:
    try:
        return Path(path).read_text(encoding="utf-8").splitlines()
    except UnicodeDecodeError as exc:
        raise ParseError(f"not valid UTF-8 ({exc.reason} at byte {exc.start})", path) from exc


def _float(token: str, path, lineno: int, what: str = "number") -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"expected a {what}, got {token!r}", path, lineno) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite {what} {token!r}", path, lineno)
    return value


def _vertex(token: str, path, lineno: int) -> int:
    try:
        v = int(token)
    except ValueError:
        raise ParseError(f"expected a vertex id, got {token!r}", path, lineno) from None
    if v < 1:
        raise ParseError(f"vertex ids start at 1, got {v}", path, lineno)
    return v - 1


# --------------------------------------------------------------------------
# graphs


def read_edge_list(path) -> Graph:
    directed = False
    n_declared = None
    edges: list[tuple] = []
    lines_of: list[int] = []
    header_done = False
    for lineno, raw in enumerate(_read_lines(path), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("%"):
            if header_done:
                raise ParseError("header lines must precede the edges", path, lineno)
            word, *rest = line[1:].split()
            if word in ("directed", "undirected") and not rest:
                directed = word == "directed"
            elif word == "vertices" and len(rest) == 1 and rest[0].isdigit():
                n_declared = int(rest[0])
            else:
                raise ParseError(f"unknown header {line!r}", path, lineno)
            continue
        header_done = True
        parts = raw.rstrip("\r\n").split("\t")
        if len(parts) not in (2, 3):
            raise ParseError(f"expected 'u<TAB>v[<TAB>w]', got {raw!r}", path, lineno)
        u, v = _vertex(parts[0].strip(), path, lineno), _vertex(parts[1].strip(), path, lineno)
        if u == v:
            raise InvalidGraphError(f"{path}:{lineno}: self-loop at vertex {u + 1}")
        if len(parts) == 3:
            w = _float(parts[2].strip(), path, lineno, "weight")
            if w < 0:
                raise InvalidGraphError(f"{path}:{lineno}: negative weight {w}")
            edges.append((u, v, w))
        else:
            edges.append((u, v))
        lines_of.append(lineno)
    if any(len(e) != len(edges[0]) for e in edges):
        bad = next(i for i, e in enumerate(edges) if len(e) != len(edges[0]))
        raise ParseError("either every edge carries a weight or none does", path, lines_of[bad])
    seen: dict[tuple[int, int], int] = {}
    for e, lineno in zip(edges, lines_of):
        key = (e[0], e[1]) if directed else (min(e[0], e[1]), max(e[0], e[1]))
        if key in seen:
            raise ParseError(f"duplicate edge ({e[0] + 1}, {e[1] + 1}), first on line {seen[key]}", path, lineno)
        seen[key] = lineno
    n_seen = 1 + max((max(e[0], e[1]) for e in edges), default=-1)
    n = n_declared if n_declared is not None else n_seen
    if n < n_seen:
        raise ParseError(f"%vertices {n} but vertex {n_seen} used", path)
    if n < 1:
        raise ParseError("empty graph", path)
    return from_edges(n, edges, directed=directed, name=Path(path).name)


def format_edge_list(g: Graph) -> str:
    """Canonical text: header, vertex count, edges sorted, undirected as ``u < v``."""
    out = ["%directed" if g.directed else "%undirected", f"%vertices {g.n}"]
    for i, j, w in g.edges():
        if g.weighted:
            out.append(f"{i + 1}\t{j + 1}\t{w!r}")
        else:
            out.append(f"{i + 1}\t{j + 1}")
    return "\n".join(out) + "\n"


def write_edge_list(g: Graph, path) -> None:
    Path(path).write_text(format_edge_list(g), encoding="utf-8")


def read_coordinates(path) -> np.ndarray:
    """``id,x,y`` rows (optional header) -> array of shape ``(n, 2)`` in id order."""
    rows: dict[int, tuple[float, float]] = {}
    for lineno, raw in enumerate(_read_lines(path), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if lineno == 1 and parts and parts[0].lower() == "id":
            continue
        if len(parts) != 3:
            raise ParseError(f"expected 'id,x,y', got {raw!r}", path, lineno)
        i = _vertex(parts[0], path, lineno)
        if i in rows:
            raise ParseError(f"duplicate id {i + 1}", path, lineno)
        rows[i] = (_float(parts[1], path, lineno), _float(parts[2], path, lineno))
    if sorted(rows) != list(range(len(rows))):
        raise ParseError(f"ids must be exactly 1..{len(rows)}", path)
    return np.array([rows[i] for i in range(len(rows))], dtype=np.float64).reshape(-1, 2)


# --------------------------------------------------------------------------
# signals and images


def read_signal(path) -> np.ndarray:
    """One value per line, or ``vertex,value`` pairs covering 1..n once each."""
    values: list[float] = []
    pairs: dict[int, float] = {}
    style = None
    for lineno, raw in enumerate(_read_lines(path), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        this = "pair" if len(parts) == 2 else "value" if len(parts) == 1 else None
        if this is None:
            raise ParseError(f"expected 'value' or 'vertex,value', got {raw!r}", path, lineno)
        if style is None:
            style = this
        elif style != this:
            raise ParseError("mixed 'value' and 'vertex,value' lines", path, lineno)
        if this == "value":
            values.append(_float(parts[0], path, lineno))
        else:
            v = _vertex(parts[0], path, lineno)
            if v in pairs:
                raise ParseError(f"vertex {v + 1} given twice", path, lineno)
            pairs[v] = _float(parts[1], path, lineno)
    if style == "pair":
        if sorted(pairs) != list(range(len(pairs))):
            raise ParseError(f"vertex ids must be exactly 1..{len(pairs)}", path)
        values = [pairs[i] for i in range(len(pairs))]
    if not values:
        raise ParseError("no values", path)
    return np.array(values, dtype=np.float64)


def write_signal(x, path) -> None:
    x = np.asarray(x, dtype=np.float64).ravel()
    Path(path).write_text("".join(f"{v!r}\n" for v in x.tolist()), encoding="utf-8")


def _pgm_tokens(data: bytes, path):
    """Yield ``(token, offset)`` for the ASCII part of a PGM file, skipping comments."""
    pos = 0
    while pos < len(data):
        c = data[pos:pos + 1]
        if c == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            start = pos
            while pos < len(data) and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
                pos += 1
            yield data[start:pos], start, pos


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    tokens = _pgm_tokens(data, path)
    header = []
    try:
        for _ in range(4):
            header.append(next(tokens))
    except StopIteration:
        raise ParseError("truncated PGM header", path) from None
    magic = header[0][0]
    if magic not in (b"P2", b"P5"):
        raise ParseError(f"byte {header[0][1]}: not a P2/P5 PGM (magic {magic!r})", path)
    try:
        width, height, maxval = (int(t[0]) for t in header[1:])
    except ValueError:
        raise ParseError("bad PGM header numbers", path) from None
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise ParseError(f"bad PGM size {width}x{height} or maxval {maxval}", path)
    count = width * height
    if magic == b"P2":
        vals = []
        for tok, off, _ in tokens:
            try:
                v = int(tok)
            except ValueError:
                raise ParseError(f"byte {off}: expected an integer, got {tok!r}", path) from None
            if not 0 <= v <= maxval:
                raise ParseError(f"byte {off}: value {v} outside 0..{maxval}", path)
            vals.append(v)
        if len(vals) != count:
            raise ParseError(f"expected {count} pixel values, got {len(vals)}", path)
        img = np.array(vals, dtype=np.float64)
    else:
        start = header[3][2] + 1  # single whitespace after maxval
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        need = count * dtype.itemsize
        raw = data[start:start + need]
        if len(raw) != need:
            raise ParseError(f"byte {start}: expected {need} bytes of pixel data, got {len(raw)}", path)
        img = np.frombuffer(raw, dtype=dtype).astype(np.float64)
        if img.max(initial=0) > maxval:
            raise ParseError(f"pixel value above maxval {maxval}", path)
    return img.reshape(height, width)


def read_matrix(path) -> np.ndarray:
    """PGM (P2/P5, 8 or 16 bit) or comma separated numeric rows."""
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic in (b"P2", b"P5"):
        return read_pgm(path)
    rows: list[list[float]] = []
    for lineno, raw in enumerate(_read_lines(path), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        row = [_float(t.strip(), path, lineno) for t in line.split(",")]
        if rows and len(row) != len(rows[0]):
            raise ParseError(f"row has {len(row)} columns, expected {len(rows[0])}", path, lineno)
        rows.append(row)
    if not rows:
        raise ParseError("no rows", path)
    return np.array(rows, dtype=np.float64)


def write_matrix(a, path) -> None:
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    text = "".join(",".join(repr(v) for v in row) + "\n" for row in a.tolist())
    Path(path).write_text(text, encoding="utf-8")


# --------------------------------------------------------------------------
# results


def result_to_json(res: EntropyResult) -> str:
    return json.dumps(res.to_dict(), indent=2, sort_keys=True) + "\n"


def write_result(res: EntropyResult, path) -> None:
    Path(path).write_text(result_to_json(res), encoding="utf-8")


def read_result(path) -> EntropyResult:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, path, exc.lineno) from None
    try:
        return EntropyResult.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad result document: {exc}", path) from None


def file_hash(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class Dataset:
    """A graph and the signals living on it, plus where they came from."""

    signals: list[np.ndarray]
    graph: Graph | None = None
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.graph is not None:
            for k, s in enumerate(self.signals):
                if len(s) != self.graph.n:
                    raise InvalidSignalError(f"signal {k} has {len(s)} values, graph has {self.graph.n} vertices")


def load_dataset(signal_paths, graph_path=None) -> Dataset:
    graph = read_edge_list(graph_path) if graph_path is not None else None
    signals = [read_signal(p) for p in signal_paths]
    meta = {
        "graph": None if graph_path is None else {"path": str(graph_path), "sha256": file_hash(graph_path)},
        "signals": [{"path": str(p), "sha256": file_hash(p)} for p in signal_paths],
    }
    return Dataset(signals, graph, meta)
