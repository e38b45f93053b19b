"""Seeded synthetic signals: logistic map orbits, MIX2D images, white noise.

All randomness comes from ``numpy.random.default_rng(seed)`` (PCG64), so a
given ``(params, seed)`` always reproduces the same output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import InvalidParameterError, InvalidSizeError

SQRT3 = math.sqrt(3.0)


def logistic_map(r: float, x0: float = 0.65, n: int = 2 ** 14, burn_in: int = 0) -> np.ndarray:
    """Iterates ``x_{k+1} = r x_k (1 - x_k)``; the first value returned is ``x_1``.

    ``burn_in`` extra iterates are discarded before recording.
    """
    if not 0.0 < x0 < 1.0:
        raise InvalidParameterError(f"x0 must lie in (0, 1), got {x0}")
    if not 0.0 < r <= 4.0:
        raise InvalidParameterError(f"r must lie in (0, 4], got {r}")
    if n < 1:
        raise InvalidSizeError(f"n must be >= 1, got {n}")
    if burn_in < 0:
        raise InvalidParameterError(f"burn_in must be >= 0, got {burn_in}")
    x = float(x0)
    r = float(r)
    for _ in range(burn_in):
        x = r * x * (1.0 - x)
    out = np.empty(n)
    for k in range(n):
        x = r * x * (1.0 - x)
        out[k] = x
    return out


def mix2d_deterministic(rows: int, cols: int) -> np.ndarray:
    """``sin(2 pi i / 12) + sin(2 pi j / 12)`` on 1-based indices."""
    i = np.arange(1, rows + 1)[:, None]
    j = np.arange(1, cols + 1)[None, :]
    return np.sin(2 * np.pi * i / 12) + np.sin(2 * np.pi * j / 12)


def mix2d(p: float, rows: int, cols: int, seed: int) -> np.ndarray:
    """MIX2D(p) image of shape ``(rows, cols)``.

    Each cell (row-major) consumes two uniforms from the stream: the first
    sets the Bernoulli(p) switch Z, the second the noise value Y on
    ``[-sqrt(3), sqrt(3)]``.
    """
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError(f"p must lie in [0, 1], got {p}")
    if rows < 1 or cols < 1:
        raise InvalidSizeError(f"image needs positive size, got {rows}x{cols}")
    u = np.random.default_rng(seed).random((rows, cols, 2))
    z = u[..., 0] < p
    y = SQRT3 * (2.0 * u[..., 1] - 1.0)
    return np.where(z, y, mix2d_deterministic(rows, cols))


def gaussian_noise(n: int, seed: int) -> np.ndarray:
    """``n`` standard normal draws (numpy's ziggurat sampler on PCG64)."""
    if n < 1:
        raise InvalidSizeError(f"n must be >= 1, got {n}")
    return np.random.default_rng(seed).standard_normal(n)


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0

    def generate(self) -> np.ndarray:
        p = dict(self.params)
        if self.kind == "logistic":
            return logistic_map(
                float(p.get("r", 4.0)),
                float(p.get("x0", 0.65)),
                int(p.get("n", 2 ** 12)),
                int(p.get("burn_in", 0)),
            )
        if self.kind == "mix2d":
            return mix2d(float(p.get("p", 0.5)), int(p.get("rows", 100)), int(p.get("cols", 100)), self.seed)
        if self.kind in ("gaussian_noise", "noise"):
            return gaussian_noise(int(p.get("n", 500)), self.seed)
        raise InvalidParameterError(f"unknown generator {self.kind!r}")

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> "GeneratorSpec":
        """Parse ``kind:key=value,key=value`` (e.g. ``logistic:r=3.9,n=4096``)."""
        kind, _, rest = text.partition(":")
        params: dict[str, Any] = {}
        for item in filter(None, (s.strip() for s in rest.split(","))):
            key, eq, value = item.partition("=")
            if not eq:
                raise InvalidParameterError(f"generator parameter {item!r} is not key=value")
            params[key.strip()] = value.strip()
        if "seed" in params:
            seed = int(params.pop("seed"))
        return cls(kind.strip(), params, seed)
