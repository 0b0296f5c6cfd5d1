"""Randomized numerical checks shared by the certificate runner and the scripts."""
from __future__ import annotations

import numpy as np

from .worst_case import WorstCaseFunction, eval_worst_case, eval_worst_case_reference


def probe_scale(W: WorstCaseFunction) -> float:
    # typical coordinate size of the interpolation points
    return float(np.linalg.norm(W.minimizer)) / np.sqrt(W.dim)


def random_points(W: WorstCaseFunction, rng: np.random.Generator, count: int) -> np.ndarray:
    s = probe_scale(W)
    scales = s * rng.choice([0.1, 1.0, 3.0], size=count)
    return rng.normal(size=(count, W.dim)) * scales[:, None]


def cocoercivity_slack(value_grad, ys1, ys2, L: float) -> float:
    """Smallest slack of f(y2) - f(y1) - <g1, y2-y1> - ||g1-g2||^2/(2L) over the pairs."""
    worst = np.inf
    for y1, y2 in zip(ys1, ys2):
        f1, g1 = value_grad(y1)
        f2, g2 = value_grad(y2)
        slack = f2 - f1 - g1 @ (y2 - y1) - (g1 - g2) @ (g1 - g2) / (2.0 * L)
        worst = min(worst, slack)
    return float(worst)


def convexity_slack(value_fn, ys1, ys2, lams) -> float:
    worst = np.inf
    for y1, y2, lam in zip(ys1, ys2, lams):
        mid = value_fn(lam * y1 + (1 - lam) * y2)
        worst = min(worst, lam * value_fn(y1) + (1 - lam) * value_fn(y2) - mid)
    return float(worst)


def fd_gradient_error(value_grad, ys, h: float = 1e-6) -> float:
    """Largest relative error between the gradient and central finite differences.

    Where the gradient vanishes exactly (W is flat on a region around its
    minimizer) the absolute error is used instead.
    """
    worst = 0.0
    for y in ys:
        _, g = value_grad(y)
        fd = np.empty_like(g)
        for j in range(len(y)):
            e = np.zeros_like(y)
            e[j] = h
            fd[j] = (value_grad(y + e)[0] - value_grad(y - e)[0]) / (2.0 * h)
        gn = np.linalg.norm(g)
        err = np.linalg.norm(fd - g)
        worst = max(worst, float(err / gn if gn > 0 else err))
    return worst


def corollary_points(W: WorstCaseFunction, rng: np.random.Generator, count: int):
    """Points with y_k >= 0 and y_n = 0 for some k < n (k = N allowed with no n)."""
    N = W.N
    s = probe_scale(W)
    out = []
    for _ in range(count):
        y = rng.normal(size=W.dim) * s * rng.choice([0.1, 1.0, 3.0])
        k = int(rng.integers(0, N + 1))
        y[k] = abs(y[k])
        n = None
        if k < N:
            n = int(rng.integers(k + 1, N + 1))
            y[n] = 0.0
        out.append((y, k, n))
    return out


def corollary_violations(W: WorstCaseFunction, points) -> tuple[float, float]:
    """(largest shortfall of W(y) below f_k, largest |dW/dy_n|) over the points."""
    F = W.triples.F
    shortfall = 0.0
    deriv = 0.0
    for y, k, n in points:
        res = eval_worst_case(W, y)
        shortfall = max(shortfall, F[k] - res.value)
        if n is not None:
            deriv = max(deriv, abs(res.gradient[n]))
    return shortfall, deriv


def interpolation_errors(W: WorstCaseFunction) -> tuple[float, float]:
    T = W.triples
    ev = eg = 0.0
    for i in range(T.n):
        res = eval_worst_case(W, T.X[i])
        ev = max(ev, abs(res.value - T.F[i]))
        eg = max(eg, float(np.max(np.abs(res.gradient - T.G[i]))))
    return ev, eg


def cross_solver_error(W: WorstCaseFunction, ys, tol: float = 1e-10) -> float:
    worst = 0.0
    for y in ys:
        fast = eval_worst_case(W, y).value
        ref = eval_worst_case_reference(W, y, tol=tol).value
        worst = max(worst, abs(fast - ref))
    return worst
