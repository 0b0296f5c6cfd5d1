"""First-order methods driven through an oracle with a `query(z) -> (value, gradient)` method."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .theta_zeta import smooth_bound, theta_sequence


@dataclass
class RunResult:
    method: str
    search_points: list[np.ndarray]
    output: np.ndarray
    calls_used: int
    bound: float
    gap: Optional[float] = None
    values: list[float] = field(default_factory=list)


class FunctionOracle:
    """Plain oracle around explicit value/gradient callables; counts calls."""

    def __init__(self, f: Callable, grad: Callable, budget: Optional[int] = None):
        self.f = f
        self.grad = grad
        self.budget = budget
        self.calls = 0

    def query(self, z):
        if self.budget is not None and self.calls >= self.budget:
            raise RuntimeError("oracle budget exhausted")
        self.calls += 1
        z = np.asarray(z, dtype=float)
        return float(self.f(z)), np.asarray(self.grad(z), dtype=float)


def quadratic_oracle(L: float, budget: Optional[int] = None) -> FunctionOracle:
    return FunctionOracle(lambda x: 0.5 * L * (x @ x), lambda x: L * x, budget)


def _check(N):
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")


def run_gd(oracle, x0, N: int, L: float, R: float = 1.0) -> RunResult:
    _check(N)
    x = np.asarray(x0, dtype=float).copy()
    pts, vals = [], []
    for _ in range(N):
        pts.append(x.copy())
        f, g = oracle.query(x)
        vals.append(f)
        x = x - g / L
    return RunResult("gd", pts, x, N, smooth_bound(L, R, N), values=vals)


def run_fgm(oracle, x0, N: int, L: float, R: float = 1.0) -> RunResult:
    """Nesterov's fast gradient method; reports the last gradient-step point y_N."""
    _check(N)
    x = np.asarray(x0, dtype=float).copy()
    y = x.copy()
    t = 1.0
    pts, vals = [], []
    for _ in range(N):
        pts.append(x.copy())
        f, g = oracle.query(x)
        vals.append(f)
        y_next = x - g / L
        t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        x = y_next + ((t - 1.0) / t_next) * (y_next - y)
        y, t = y_next, t_next
    return RunResult("fgm", pts, y, N, smooth_bound(L, R, N), values=vals)


def run_ogm(oracle, x0, N: int, L: float, R: float = 1.0) -> RunResult:
    """Optimized gradient method with the modified last coefficient; reports x_N."""
    _check(N)
    th = theta_sequence(N).values
    x = np.asarray(x0, dtype=float).copy()
    y = x.copy()
    pts, vals = [], []
    for i in range(N):
        pts.append(x.copy())
        f, g = oracle.query(x)
        vals.append(f)
        y_next = x - g / L
        x = (y_next
             + ((th[i] - 1.0) / th[i + 1]) * (y_next - y)
             + (th[i] / th[i + 1]) * (y_next - x))
        y = y_next
    return RunResult("ogm", pts, x, N, smooth_bound(L, R, N), values=vals)


METHODS: dict[str, Callable[..., RunResult]] = {
    "gd": run_gd,
    "fgm": run_fgm,
    "ogm": run_ogm,
}


def get_method(name: str) -> Callable[..., RunResult]:
    try:
        return METHODS[name]
    except KeyError:
        raise ValueError(f"unknown method {name!r}; choose from {sorted(METHODS)}") from None
