"""Parameter sweeps behind ``pegraph experiment``.

Every grid point is an independent task; tasks may run in a process pool but
rows always come back in grid order.  Realisation ``r`` of an experiment with
base seed ``S`` draws its signal from :func:`derive_seed` ``(S, 0, r)`` and, for
random graphs, its graph from ``(S, 1, r)``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Any, Callable

import numpy as np

from . import __version__
from .errors import ConfigError
from .graph import (
    MODES,
    build_complete,
    build_complete_bipartite,
    build_cycle,
    build_erdos_renyi,
    build_grid2d,
    build_path,
)
from .ordinal import DimensionWarning, peg
from .signals import gaussian_noise, logistic_map, mix2d

EXPERIMENTS = ("logistic", "mix2d", "regular", "er", "bipartite-sweep")


def derive_seed(base: int, stream: int, realisation: int) -> int:
    ss = np.random.SeedSequence([int(base), int(stream), int(realisation)])
    return int(ss.generate_state(1, dtype=np.uint32)[0])


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    m: tuple[int, ...]
    L: int = 1
    mode: str = "walk"
    seed: int = 0
    seeds: int = 1
    n: int = 500
    p: tuple[float, ...] = ()
    sizes: tuple[int, ...] = ()
    r_start: float = 3.55
    r_stop: float = 4.0
    r_step: float = 1e-3
    x0: float = 0.65
    full: bool = False

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENTS}")
        if not self.m:
            raise ConfigError("empty m grid")
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.seeds < 1:
            raise ConfigError("need at least one seed")
        if self.experiment in ("mix2d", "er") and not self.p:
            raise ConfigError("empty p grid")
        if self.experiment == "mix2d" and not self.sizes:
            raise ConfigError("empty size grid")
        if self.experiment == "logistic" and not (self.r_step > 0 and self.r_start <= self.r_stop):
            raise ConfigError("bad r grid")
        if any(not 0 <= q <= 1 for q in self.p):
            raise ConfigError("p values must lie in [0, 1]")

    @classmethod
    def defaults(cls, experiment: str, full: bool = False, **overrides) -> "ExperimentConfig":
        """Desk-scale defaults; ``full`` switches to the full-scale sizes."""
        if experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {experiment!r}; expected one of {EXPERIMENTS}")
        base: dict[str, Any] = {"experiment": experiment, "full": full}
        if experiment == "logistic":
            base.update(m=(3,), n=2 ** 14 if full else 2 ** 12, r_step=1e-4 if full else 1e-3)
        elif experiment == "mix2d":
            base.update(m=(6,), p=(0.1, 0.25, 0.5, 0.9), sizes=tuple(range(10, 101, 10)), seeds=10)
        elif experiment == "regular":
            base.update(m=tuple(range(2, 9)), n=500, seeds=20)
        elif experiment == "er":
            base.update(m=tuple(range(2, 8)), n=2000 if full else 500, p=(0.1, 0.3, 0.6, 0.9), seeds=20)
        elif experiment == "bipartite-sweep":
            base.update(m=(2,), n=2000)
        base.update({k: v for k, v in overrides.items() if v is not None})
        for key in ("m", "p", "sizes"):
            if key in base:
                base[key] = tuple(base[key])
        return cls(**base)

    def r_grid(self) -> np.ndarray:
        count = int(round((self.r_stop - self.r_start) / self.r_step)) + 1
        return np.round(self.r_start + self.r_step * np.arange(count), 10)

    def digest(self) -> str:
        text = json.dumps(asdict(self), sort_keys=True)
        return hashlib.sha256(text.encode()).hexdigest()[:16]


# --------------------------------------------------------------------------
# tasks: (callable name, kwargs) pairs so they pickle cheaply


def _stats(values: list[float]) -> dict[str, float]:
    a = np.asarray(values, dtype=np.float64)
    std = float(a.std(ddof=1)) if a.size > 1 else 0.0
    return {
        "n_seeds": int(a.size),
        "mean": float(a.mean()),
        "std": std,
        "sem": std / math.sqrt(a.size),
    }


def _task_logistic(cfg: ExperimentConfig, r: float, m: int) -> list[dict]:
    x = logistic_map(r, cfg.x0, cfg.n)
    rows = []
    for domain, directed in (("directed_path", True), ("undirected_path", False)):
        res = peg(build_path(cfg.n, directed=directed), x, m, cfg.L, cfg.mode)
        rows.append({"r": r, "domain": domain, "m": m, "L": cfg.L, "mode": cfg.mode,
                     "raw": res.raw, **_stats([res.normalized])})
    return rows


def _task_mix2d(cfg: ExperimentConfig, p: float, size: int, m: int) -> list[dict]:
    g = build_grid2d(size, size, directed=True)
    vals = [peg(g, mix2d(p, size, size, derive_seed(cfg.seed, 0, r)).ravel(), m, cfg.L, cfg.mode).normalized
            for r in range(cfg.seeds)]
    return [{"p": p, "size": size, "m": m, "L": cfg.L, "mode": cfg.mode, **_stats(vals)}]


REGULAR_GRAPHS: dict[str, Callable[[int], Any]] = {
    "cycle": build_cycle,
    "complete_bipartite_half": lambda n: build_complete_bipartite(n // 2, n - n // 2),
    "complete": build_complete,
}


def _task_regular(cfg: ExperimentConfig, m: int) -> list[dict]:
    rows = []
    signals = [gaussian_noise(cfg.n, derive_seed(cfg.seed, 0, r)) for r in range(cfg.seeds)]
    for name, build in REGULAR_GRAPHS.items():
        g = build(cfg.n)
        vals = [peg(g, x, m, cfg.L, cfg.mode).normalized for x in signals]
        rows.append({"graph": name, "n": cfg.n, "m": m, "L": cfg.L, "mode": cfg.mode, **_stats(vals)})
    return rows


def _task_er(cfg: ExperimentConfig, p: float) -> list[dict]:
    per_m: dict[int, list[float]] = {m: [] for m in cfg.m}
    for r in range(cfg.seeds):
        g = build_erdos_renyi(cfg.n, p, derive_seed(cfg.seed, 1, r))
        x = gaussian_noise(cfg.n, derive_seed(cfg.seed, 0, r))
        for m in cfg.m:
            per_m[m].append(peg(g, x, m, cfg.L, cfg.mode).normalized)
    return [{"p": p, "n": cfg.n, "m": m, "L": cfg.L, "mode": cfg.mode, **_stats(per_m[m])} for m in cfg.m]


def bipartite_closed_form(n: int, k: int) -> float:
    """Entropy (nats) of a two-bin histogram with counts ``k`` and ``n - k``."""
    a, b = k / n, (n - k) / n
    return -b * math.log(b) - a * math.log(a)


def _task_bipartite(cfg: ExperimentConfig, ks: list[int]) -> list[dict]:
    # descending order puts the k largest values on side A = {0..k-1} for every k
    x = np.sort(gaussian_noise(cfg.n, derive_seed(cfg.seed, 0, 0)))[::-1].copy()
    rows = []
    for k in ks:
        res = peg(build_complete_bipartite(k, cfg.n - k), x, 2, 1, cfg.mode)
        closed = bipartite_closed_form(cfg.n, k)
        rows.append({"k": k, "n": cfg.n, "m": 2, "mode": cfg.mode, "raw": res.raw,
                     "closed_form": closed, "abs_diff": abs(res.raw - closed),
                     "normalized": res.normalized})
    return rows


def _tasks(cfg: ExperimentConfig) -> list[tuple[Callable, tuple]]:
    if cfg.experiment == "logistic":
        return [(_task_logistic, (cfg, float(r), m)) for r in cfg.r_grid() for m in cfg.m]
    if cfg.experiment == "mix2d":
        return [(_task_mix2d, (cfg, p, s, m)) for p in cfg.p for s in cfg.sizes for m in cfg.m]
    if cfg.experiment == "regular":
        return [(_task_regular, (cfg, m)) for m in cfg.m]
    if cfg.experiment == "er":
        return [(_task_er, (cfg, p)) for p in cfg.p]
    ks = list(range(1, cfg.n // 2 + 1))
    chunks = [ks[i:i + 50] for i in range(0, len(ks), 50)]
    return [(_task_bipartite, (cfg, c)) for c in chunks]


def _run_task(task, timing: bool) -> list[dict]:
    fn, args = task
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DimensionWarning)
        t0 = time.perf_counter()
        rows = fn(*args)
        dt = time.perf_counter() - t0
    if timing:
        for row in rows:
            row["runtime_s"] = dt / len(rows)
    return rows


def run_experiment(cfg: ExperimentConfig, workers: int = 1, timing: bool = False) -> list[dict]:
    """Evaluate every grid point; rows are returned in grid order."""
    tasks = _tasks(cfg)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_task, tasks, [timing] * len(tasks)))
    else:
        chunks = [_run_task(t, timing) for t in tasks]
    return [row for chunk in chunks for row in chunk]


def provenance(cfg: ExperimentConfig) -> str:
    return f"pegraph {__version__} experiment={cfg.experiment} config={cfg.digest()}"


def format_rows(cfg: ExperimentConfig, rows: list[dict], fmt: str = "csv") -> str:
    if fmt == "json":
        doc = {"provenance": provenance(cfg), "config": asdict(cfg), "rows": rows}
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    if fmt != "csv":
        raise ConfigError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    buf.write(f"# {provenance(cfg)}\n")
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()
