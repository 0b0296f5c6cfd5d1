"""Primal smooth convex interpolation of first-order data.

For a set of triples {(x_i, g_i, f_i)} and a kernel set C containing the origin,

    W(y) = min_{nu in C, alpha in simplex} (L/2)||y + nu - sum_i alpha_i u_i||^2 + sum_i alpha_i c_i

with u_i = x_i - g_i/L and c_i = f_i - ||g_i||^2/(2L).  The minimization over nu is
done in closed form through the kernel projection; the remaining simplex problem is
solved with Frank-Wolfe (away steps, exact line search).
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000
CONDITION_TOL = 1e-12


class ConvergenceError(RuntimeError):
    """Inner solver hit its iteration cap before reaching the requested tolerance."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class Kernel(enum.Enum):
    ZERO_POINT = "zero"
    NONNEGATIVE_ORTHANT = "orthant"
    FULL_SPACE = "full"


def project_kernel(kernel: Kernel, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if kernel is Kernel.ZERO_POINT:
        return np.zeros_like(v)
    if kernel is Kernel.NONNEGATIVE_ORTHANT:
        return np.maximum(v, 0.0)
    if kernel is Kernel.FULL_SPACE:
        return v.copy()
    raise ValueError(f"unknown kernel {kernel!r}")


def _residual_map(kernel: Kernel, r: np.ndarray) -> np.ndarray:
    # r + P_C(-r): the gradient of dist^2(r, -C) / 2
    if kernel is Kernel.ZERO_POINT:
        return r
    if kernel is Kernel.NONNEGATIVE_ORTHANT:
        return np.maximum(r, 0.0)
    return np.zeros_like(r)


@dataclass(frozen=True)
class TriplePoint:
    x: np.ndarray
    g: np.ndarray
    f: float


@dataclass(frozen=True)
class TripleSet:
    """Interpolation data stored row-wise: X[i], G[i], F[i] for each index i."""

    X: np.ndarray
    G: np.ndarray
    F: np.ndarray
    L: float

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        G = np.atleast_2d(np.asarray(self.G, dtype=float))
        F = np.atleast_1d(np.asarray(self.F, dtype=float))
        if X.shape[0] == 0:
            raise ValueError("a TripleSet needs at least one point")
        if X.shape != G.shape:
            raise ValueError(f"x and g shapes differ: {X.shape} vs {G.shape}")
        if F.shape != (X.shape[0],):
            raise ValueError(f"expected {X.shape[0]} function values, got shape {F.shape}")
        if not self.L > 0:
            raise ValueError(f"L must be positive, got {self.L}")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "L", float(self.L))

    @classmethod
    def from_points(cls, points: Sequence[TriplePoint], L: float) -> "TripleSet":
        if not points:
            raise ValueError("a TripleSet needs at least one point")
        X = np.array([np.atleast_1d(p.x) for p in points], dtype=float)
        G = np.array([np.atleast_1d(p.g) for p in points], dtype=float)
        F = np.array([p.f for p in points], dtype=float)
        return cls(X, G, F, L)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    @property
    def U(self) -> np.ndarray:
        return self.X - self.G / self.L

    @property
    def c(self) -> np.ndarray:
        return self.F - np.sum(self.G**2, axis=1) / (2.0 * self.L)

    def points(self) -> list[TriplePoint]:
        return [TriplePoint(self.X[i], self.G[i], float(self.F[i])) for i in range(self.n)]

    def to_dict(self) -> dict:
        return {
            "L": self.L,
            "points": [
                {"x": self.X[i].tolist(), "g": self.G[i].tolist(), "f": float(self.F[i])}
                for i in range(self.n)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TripleSet":
        pts = [TriplePoint(np.asarray(p["x"], float), np.asarray(p["g"], float), float(p["f"]))
               for p in data["points"]]
        return cls.from_points(pts, data["L"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "TripleSet":
        return cls.from_dict(json.loads(text))


@dataclass
class SimplexWeights:
    alpha: np.ndarray

    def __post_init__(self):
        self.alpha = np.asarray(self.alpha, dtype=float)

    def is_valid(self, neg_tol: float = 1e-14, sum_tol: float = 1e-12) -> bool:
        a = self.alpha
        return bool(np.all(a >= -neg_tol) and abs(a.sum() - 1.0) <= sum_tol)


@dataclass
class EvalResult:
    value: float
    gradient: np.ndarray
    argmin_nu: np.ndarray
    argmin_alpha: SimplexWeights
    active_pair: Optional[tuple[int, float]] = None
    iterations: int = 0
    fw_gap: float = 0.0


@dataclass
class ConditionReport:
    conic_ok: np.ndarray
    pairwise_ok: np.ndarray
    overall: bool = field(init=False)

    def __post_init__(self):
        self.overall = bool(np.all(self.conic_ok) and np.all(self.pairwise_ok))


def check_interpolation_conditions(T: TripleSet, kernel: Kernel, tol: float = CONDITION_TOL) -> ConditionReport:
    """Sufficient conditions for W to reproduce (f_i, g_i) at every x_i.

    conic: P_C(-g_i/L) = 0.  pairwise: ||g_i - g_j||^2/(2L) <= f_j - f_i - <g_i, x_j - x_i>.
    """
    L = T.L
    conic = np.array([np.linalg.norm(project_kernel(kernel, -g / L)) <= tol for g in T.G])
    dg = T.G[:, None, :] - T.G[None, :, :]
    dx = T.X[None, :, :] - T.X[:, None, :]
    lhs = np.sum(dg**2, axis=2) / (2.0 * L)
    rhs = T.F[None, :] - T.F[:, None] - np.einsum("id,ijd->ij", T.G, dx)
    pairwise = (rhs - lhs) >= -tol
    return ConditionReport(conic, pairwise)


def eval_quadratic_w(T: TripleSet, y, nu, alpha) -> float:
    y = np.asarray(y, dtype=float)
    nu = np.asarray(nu, dtype=float)
    a = alpha.alpha if isinstance(alpha, SimplexWeights) else np.asarray(alpha, dtype=float)
    if y.shape != (T.d,) or nu.shape != (T.d,):
        raise ValueError(f"y and nu must have dimension {T.d}")
    if a.shape != (T.n,):
        raise ValueError(f"alpha must have {T.n} entries")
    r = y + nu - a @ T.U
    return float(0.5 * T.L * (r @ r) + a @ T.c)


def _line_search(kernel, L, r0, w, cd, gamma_max):
    """Exact minimizer over [0, gamma_max] of the restriction to r(gamma) = r0 - gamma*w.

    Its derivative -L <w, h(r0 - gamma w)> + cd is continuous, nondecreasing and
    piecewise affine, so the root is found exactly segment by segment.
    """

    def dphi(gamma):
        return -L * np.dot(w, _residual_map(kernel, r0 - gamma * w)) + cd

    if dphi(0.0) >= 0.0:
        return 0.0
    if dphi(gamma_max) <= 0.0:
        return gamma_max
    pts = [0.0, gamma_max]
    if kernel is Kernel.NONNEGATIVE_ORTHANT:
        nz = w != 0.0
        bp = r0[nz] / w[nz]
        pts.extend(bp[(bp > 0.0) & (bp < gamma_max)].tolist())
    pts = np.unique(pts)
    vals = np.array([dphi(p) for p in pts])
    j = int(np.argmax(vals >= 0.0))
    a, b = pts[j - 1], pts[j]
    va, vb = vals[j - 1], vals[j]
    if vb == va:
        return float(a)
    return float(min(max(a - va * (b - a) / (vb - va), a), b))


def eval_interpolant(
    T: TripleSet,
    kernel: Kernel,
    y,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> EvalResult:
    """Value and gradient of the interpolating function at y.

    Raises ConvergenceError when the Frank-Wolfe gap is still above `tol`
    after `max_iter` iterations.
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (T.d,):
        raise ValueError(f"y must have dimension {T.d}, got shape {y.shape}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    L, U, c = T.L, T.U, T.c

    if kernel is Kernel.FULL_SPACE:
        i = int(np.argmin(c))
        alpha = np.zeros(T.n)
        alpha[i] = 1.0
        nu = project_kernel(kernel, -(y - U[i]))
        return EvalResult(float(c[i]), np.zeros(T.d), nu, SimplexWeights(alpha))

    def objective(r):
        h = _residual_map(kernel, r)
        return 0.5 * L * (h @ h)

    # start at the best vertex
    vertex_vals = np.array([objective(y - U[i]) + c[i] for i in range(T.n)])
    start = int(np.argmin(vertex_vals))
    alpha = np.zeros(T.n)
    alpha[start] = 1.0
    a_pt = U[start].copy()

    gap = np.inf
    it = 0
    for it in range(max_iter + 1):
        r = y - a_pt
        h = _residual_map(kernel, r)
        grad = -L * (U @ h) + c
        s = int(np.argmin(grad))
        ga = grad @ alpha
        gap = ga - grad[s]
        if gap <= tol:
            break
        if it == max_iter:
            break
        active = np.flatnonzero(alpha > 0.0)
        v = int(active[np.argmax(grad[active])])
        gap_away = grad[v] - ga
        if gap >= gap_away or alpha[v] >= 1.0:
            w = U[s] - a_pt
            cd = c[s] - c @ alpha
            gamma = _line_search(kernel, L, r, w, cd, 1.0)
            alpha *= 1.0 - gamma
            alpha[s] += gamma
            a_pt = a_pt + gamma * w
        else:
            gmax = alpha[v] / (1.0 - alpha[v])
            w = a_pt - U[v]
            cd = c @ alpha - c[v]
            gamma = _line_search(kernel, L, r, w, cd, gmax)
            alpha *= 1.0 + gamma
            alpha[v] -= gamma
            if gamma == gmax:
                alpha[v] = 0.0
            a_pt = a_pt + gamma * w
        alpha[alpha < 0.0] = 0.0
        alpha /= alpha.sum()
        # refresh the aggregated point to keep rounding from drifting
        if it % 50 == 49:
            a_pt = alpha @ U

    r = y - a_pt
    h = _residual_map(kernel, r)
    nu = project_kernel(kernel, -r)
    res = EvalResult(
        value=float(0.5 * L * (h @ h) + c @ alpha),
        gradient=L * h,
        argmin_nu=nu,
        argmin_alpha=SimplexWeights(alpha),
        iterations=it,
        fw_gap=float(gap),
    )
    if gap > tol:
        raise ConvergenceError(
            f"Frank-Wolfe gap {gap:.3e} above tol {tol:.1e} after {max_iter} iterations", res
        )
    return res
