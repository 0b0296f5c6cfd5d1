"""The worst-case smooth convex function for N oracle calls and its fast evaluation."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .interpolation import (
    DEFAULT_TOL,
    EvalResult,
    Kernel,
    SimplexWeights,
    TripleSet,
    eval_interpolant,
)
from .theta_zeta import ZetaVector, smooth_bound, zeta_star

BISECTION_WIDTH = 1e-14
BISECTION_MAX_ITER = 200


@dataclass(frozen=True)
class WorstCaseFunction:
    """W for a given zeta: interpolant of N+2 triples in R^{N+1} with the orthant kernel.

    `u[i] = x_i - g_i/L` and `c[i] = f_i - ||g_i||^2/(2L)` are cached for evaluation.
    """

    N: int
    L: float
    zeta: ZetaVector
    triples: TripleSet
    u: np.ndarray
    c: np.ndarray

    @property
    def dim(self) -> int:
        return self.N + 1

    @property
    def minimizer(self) -> np.ndarray:
        return self.triples.X[self.N + 1]

    def value_and_grad(self, y) -> tuple[float, np.ndarray]:
        res = eval_worst_case(self, y)
        return res.value, res.gradient

    def spec_dict(self) -> dict:
        return {"N": self.N, "L": self.L, "R": self.zeta.R, "zeta": self.zeta.values.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.spec_dict())

    @classmethod
    def from_json(cls, text: str) -> "WorstCaseFunction":
        data = json.loads(text)
        z = ZetaVector(int(data["N"]), float(data["R"]), np.asarray(data["zeta"], dtype=float))
        return build_triples(z, float(data["L"]))


def build_triples(zeta: ZetaVector, L: float) -> WorstCaseFunction:
    if not zeta.is_valid():
        raise ValueError("zeta must be strictly decreasing and end with 0")
    if not L > 0:
        raise ValueError(f"L must be positive, got {L}")
    N = zeta.N
    z = np.asarray(zeta.values, dtype=float)
    steps = np.sqrt(z[:-1] - z[1:])  # sqrt(zeta_j - zeta_{j+1}), j = 0..N+1
    n, d = N + 2, N + 1

    # x_i[j] = -(zeta_j - zeta_{i+1}) / sqrt(zeta_j - zeta_{j+1}) for j < i
    X = -(z[None, :d] - z[1 : n + 1, None]) / steps[None, :d]
    X = np.where(np.arange(d)[None, :] < np.arange(n)[:, None], X, 0.0)
    G = np.zeros((n, d))
    G[np.arange(d), np.arange(d)] = L * steps[:d]
    F = np.zeros(n)
    F[:d] = 0.5 * L * (z[:d] + z[1 : d + 1])

    T = TripleSet(X, G, F, L)
    return WorstCaseFunction(N=N, L=float(L), zeta=zeta, triples=T, u=X - G / L, c=L * z[1:])


def worst_case_function(N: int, L: float, R: float) -> WorstCaseFunction:
    return build_triples(zeta_star(N, R), L)


def eval_worst_case(W: WorstCaseFunction, y) -> EvalResult:
    """Minimize over consecutive weight pairs (m, m+1) only, all pairs in parallel.

    For each m the one-dimensional problem in t is solved by bisection on its
    derivative; the smallest value wins, ties going to the smallest m.
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (W.dim,):
        raise ValueError(f"y must have dimension {W.dim}, got shape {y.shape}")
    L, u, c = W.L, W.u, W.c
    P = u[:-1]                 # u_m
    Q = u[1:]                  # u_{m+1}
    D = P - Q                  # direction in u-space per pair
    cdiff = c[:-1] - c[1:]     # L (zeta_{m+1} - zeta_{m+2}) > 0
    base = y[None, :] - Q      # y - u_{m+1}

    def dphi(t):
        h = np.maximum(base - t[:, None] * D, 0.0)
        return -L * np.einsum("mj,mj->m", D, h) + cdiff

    npairs = W.N + 1
    lo = np.zeros(npairs)
    hi = np.ones(npairs)
    d0 = dphi(lo)
    d1 = dphi(hi)
    at_zero = d0 >= 0.0
    at_one = (~at_zero) & (d1 <= 0.0)
    todo = ~(at_zero | at_one)
    if np.any(todo):
        for _ in range(BISECTION_MAX_ITER):
            mid = 0.5 * (lo + hi)
            dm = dphi(mid)
            pos = dm > 0.0
            hi = np.where(todo & pos, mid, hi)
            lo = np.where(todo & ~pos, mid, lo)
            if np.max((hi - lo)[todo]) < BISECTION_WIDTH:
                break
    t = 0.5 * (lo + hi)
    t[at_zero] = 0.0
    t[at_one] = 1.0

    h_all = np.maximum(base - t[:, None] * D, 0.0)
    vals = 0.5 * L * np.sum(h_all**2, axis=1) + t * c[:-1] + (1.0 - t) * c[1:]
    m = int(np.argmin(vals))
    tm = float(t[m])
    alpha = np.zeros(W.N + 2)
    alpha[m] = tm
    alpha[m + 1] = 1.0 - tm
    h = h_all[m]
    r = y - (tm * u[m] + (1.0 - tm) * u[m + 1])
    return EvalResult(
        value=float(vals[m]),
        gradient=L * h,
        argmin_nu=np.maximum(-r, 0.0),
        argmin_alpha=SimplexWeights(alpha),
        active_pair=(m, tm),
    )


def eval_worst_case_reference(W: WorstCaseFunction, y, tol: float = DEFAULT_TOL, max_iter: int | None = None) -> EvalResult:
    """Full-simplex solve through the general interpolation solver (no pair structure used)."""
    kwargs = {} if max_iter is None else {"max_iter": max_iter}
    return eval_interpolant(W.triples, Kernel.NONNEGATIVE_ORTHANT, y, tol=tol, **kwargs)


def _rel_close(a, b, rtol, scale=None):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    s = np.maximum(np.abs(b), 1.0 if scale is None else scale)
    return bool(np.all(np.abs(a - b) <= rtol * s))


def verify_identities(W: WorstCaseFunction, R: float, rtol: float = 1e-10) -> dict[str, bool]:
    """Structural identities of the instance plus the distance / final-value identities.

    `R` is the distance budget the instance was built for; the last two checks
    only hold for zeta = zeta*(N, R).
    """
    L, N = W.L, W.N
    z = W.zeta.values
    scale = L * abs(z[0])
    X, G, F = W.triples.X, W.triples.G, W.triples.F

    c_direct = F - np.sum(G**2, axis=1) / (2.0 * L)
    inner = G @ (-W.u).T
    expect_inner = L * np.maximum(z[: N + 2, None] - z[None, 1 : N + 3], 0.0)
    # g_{N+1} = 0, so the max formula does not apply on the terminal diagonal entry
    expect_inner[N + 1, N + 1] = 0.0
    dist = float(np.linalg.norm(X[N + 1]))
    bound = smooth_bound(L, R, N)
    return {
        "zeta_monotone": W.zeta.is_valid(),
        "value_identity": _rel_close(c_direct, L * z[1:], rtol, scale),
        "max_inner_identity": _rel_close(inner, expect_inner, rtol, scale),
        "neg_u_nonnegative": bool(np.all(-W.u >= 0.0)),
        "terminal_triple_zero": bool(np.all(G[N + 1] == 0.0) and F[N + 1] == 0.0 and np.all(X[0] == 0.0)),
        "distance_equals_R": bool(abs(dist - R) <= rtol * R),
        "final_value_equals_bound": bool(abs(F[N] - bound) <= rtol * bound),
    }
