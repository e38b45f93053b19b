"""Command line interface: ``pegraph pe | peg | experiment | generate``.

Exit codes: 0 success, 2 configuration error, 3 parse error, 4 domain error
(isolated vertex or empty vertex set).
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, DomainError, InvalidParameterError, ParseError
from .experiments import EXPERIMENTS, ExperimentConfig, format_rows, run_experiment
from .formats import read_coordinates, read_edge_list, read_matrix, read_signal, result_to_json, write_matrix, write_signal
from .graph import (
    Graph,
    build_complete,
    build_complete_bipartite,
    build_cycle,
    build_erdos_renyi,
    build_grid2d,
    build_path,
    build_star,
    gaussian_kernel_graph,
)
from .ordinal import DimensionWarning, EntropyResult, pe_time_series, peg
from .signals import GeneratorSpec

EXIT_OK, EXIT_CONFIG, EXIT_PARSE, EXIT_DOMAIN = 0, 2, 3, 4

BUILDERS = ("path", "cycle", "complete", "star", "bipartite", "grid", "er", "kernel")


def _flag(value: str) -> bool:
    return value.lower() in ("1", "true", "yes", "directed")


def parse_builder(text: str) -> Graph:
    """Build a graph from ``kind:key=value,...`` such as ``grid:rows=4,cols=5,directed=1``."""
    spec = GeneratorSpec.parse(text)
    kind, p = spec.kind, spec.params
    try:
        if kind == "path":
            return build_path(int(p["n"]), _flag(p.get("directed", "0")))
        if kind == "cycle":
            return build_cycle(int(p["n"]))
        if kind == "complete":
            return build_complete(int(p["n"]))
        if kind == "star":
            return build_star(int(p["n"]))
        if kind == "bipartite":
            return build_complete_bipartite(int(p["n1"]), int(p["n2"]))
        if kind == "grid":
            return build_grid2d(int(p["rows"]), int(p["cols"]), _flag(p.get("directed", "0")))
        if kind == "er":
            return build_erdos_renyi(int(p["n"]), float(p["p"]), int(p.get("seed", spec.seed)))
        if kind == "kernel":
            coords = read_coordinates(p["coords"])
            return gaussian_kernel_graph(coords, float(p["sigma1_sq"]), float(p["sigma2"]))
    except KeyError as exc:
        raise InvalidParameterError(f"graph builder {kind!r} needs parameter {exc.args[0]!r}") from None
    except ValueError as exc:
        raise InvalidParameterError(f"bad graph builder parameters in {text!r}: {exc}") from None
    raise InvalidParameterError(f"unknown graph builder {kind!r}; expected one of {BUILDERS}")


def _load_graph(text: str) -> Graph:
    if Path(text).is_file():
        return read_edge_list(text)
    if text.split(":", 1)[0] in BUILDERS:
        return parse_builder(text)
    raise ConfigError(f"--graph {text!r} is neither a file nor a builder spec")


def _load_signal(args) -> np.ndarray:
    if args.gen:
        try:
            return GeneratorSpec.parse(args.gen, seed=args.seed).generate()
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise InvalidParameterError(f"bad generator spec {args.gen!r}: {exc}") from None
    if getattr(args, "image", None):
        return read_matrix(args.image)
    if args.signal:
        return read_signal(args.signal)
    raise ConfigError("give --signal, --image or --gen")


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _result_text(res: EntropyResult, fmt: str) -> str:
    if fmt == "json":
        return result_to_json(res)
    hist = " ".join(f"{c}:{n}" for c, n in zip(res.histogram.codes, res.histogram.counts))
    return (
        "m,L,mode,raw_nats,normalized,total,histogram\n"
        f"{res.m},{res.L},{res.mode or ''},{res.raw!r},{res.normalized!r},{res.total},{hist}\n"
    )


def cmd_pe(args) -> int:
    x = _load_signal(args)
    if x.ndim != 1:
        raise ConfigError("pe needs a 1-d series; use peg for images")
    res = pe_time_series(x, args.m, args.L)
    _emit(_result_text(res, args.format), args.out)
    return EXIT_OK


def cmd_peg(args) -> int:
    x = _load_signal(args)
    if args.graph:
        g = _load_graph(args.graph)
    elif x.ndim == 2:
        g = build_grid2d(*x.shape, directed=not args.undirected)
    else:
        g = build_path(x.size, directed=not args.undirected)
    res = peg(g, np.ravel(x), args.m, args.L, args.mode)
    _emit(_result_text(res, args.format), args.out)
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = ExperimentConfig.defaults(
        args.name,
        full=args.full,
        m=args.m,
        L=args.L,
        mode=args.mode,
        seed=args.seed,
        seeds=args.seeds,
        n=args.n,
        p=args.p,
        sizes=args.sizes,
        r_step=args.r_step,
    )
    rows = run_experiment(cfg, workers=args.workers, timing=args.timing)
    _emit(format_rows(cfg, rows, args.format), args.out)
    return EXIT_OK


def cmd_generate(args) -> int:
    data = GeneratorSpec.parse(args.spec, seed=args.seed).generate()
    if args.out is None:
        raise ConfigError("generate needs --out")
    if data.ndim == 2:
        write_matrix(data, args.out)
    else:
        write_signal(data, args.out)
    return EXIT_OK


def _ints(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        if "-" in part:
            lo, hi = part.split("-")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pegraph", description="Permutation entropy for graph signals.")
    parser.add_argument("--version", action="version", version=f"pegraph {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def inputs(p, image=True):
        p.add_argument("--signal", help="signal CSV (one value per line or vertex,value)")
        if image:
            p.add_argument("--image", help="PGM (P2/P5) or numeric CSV matrix, flattened row-major")
        p.add_argument("--gen", help="generator spec, e.g. logistic:r=3.9,n=4096 or mix2d:p=0.5,rows=100,cols=100")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--m", type=int, default=3)
        p.add_argument("--L", type=int, default=1)
        p.add_argument("--out")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("pe", help="classical permutation entropy of a time series")
    inputs(p, image=False)
    p.set_defaults(func=cmd_pe)

    p = sub.add_parser("peg", help="permutation entropy of a graph signal")
    inputs(p)
    p.add_argument("--graph", help="edge-list file or builder spec (path:n=..,directed=1 | cycle:n=.. | "
                                   "complete:n=.. | star:n=.. | bipartite:n1=..,n2=.. | grid:rows=..,cols=..,directed=1 | "
                                   "er:n=..,p=..,seed=.. | kernel:coords=FILE,sigma1_sq=..,sigma2=..)")
    p.add_argument("--mode", choices=("walk", "set"), default="walk")
    p.add_argument("--undirected", action="store_true",
                   help="use an undirected path/grid when no --graph is given (default directed)")
    p.set_defaults(func=cmd_peg)

    p = sub.add_parser("experiment", help="run one of the synthetic sweeps")
    p.add_argument("name", choices=EXPERIMENTS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", type=int, help="realisations per grid point")
    p.add_argument("--m", type=_ints, help="embedding dimensions, e.g. 2-8 or 3,4")
    p.add_argument("--L", type=int)
    p.add_argument("--mode", choices=("walk", "set"))
    p.add_argument("--n", type=int, help="vertex count / series length")
    p.add_argument("--p", type=_floats, help="probability grid, e.g. 0.1,0.3")
    p.add_argument("--sizes", type=_ints, help="image sizes for mix2d, e.g. 10,50,100")
    p.add_argument("--r-step", type=float, dest="r_step")
    p.add_argument("--full", action="store_true", help="full-scale problem sizes")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="add a runtime_s column")
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("generate", help="write a generated signal or image")
    p.add_argument("spec")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DimensionWarning)
            return args.func(args)
    except ParseError as exc:
        print(f"pegraph: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DomainError as exc:
        print(f"pegraph: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConfigError as exc:
        print(f"pegraph: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"pegraph: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
