"""Step-size sequence, worst-case parameter vector and closed-form reference bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

IDENTITY_RTOL = 1e-12


def _require_budget(N: int) -> int:
    if isinstance(N, bool) or int(N) != N:
        raise TypeError(f"N must be an integer, got {N!r}")
    N = int(N)
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    return N


def _require_positive(name: str, value: float) -> float:
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value


@dataclass(frozen=True)
class ThetaSequence:
    N: int
    values: np.ndarray

    def __getitem__(self, i):
        return self.values[i]

    def __len__(self):
        return len(self.values)

    @property
    def last(self) -> float:
        return float(self.values[-1])

    def identity_residuals(self) -> np.ndarray:
        """Relative residuals of the defining quadratic relations.

        Entries 0..N-2 are for theta_{i-1}^2 = theta_i (theta_i - 1), the last
        entry for theta_{N-1}^2 = theta_N (theta_N - 1) / 2.
        """
        th = self.values
        res = np.empty(self.N)
        lhs = th[:-2] ** 2
        rhs = th[1:-1] * (th[1:-1] - 1.0)
        res[:-1] = np.abs(lhs - rhs) / np.abs(lhs)
        lhs_n = th[-2] ** 2
        res[-1] = abs(lhs_n - 0.5 * th[-1] * (th[-1] - 1.0)) / lhs_n
        return res


@dataclass(frozen=True)
class ZetaVector:
    """Parameters zeta_0..zeta_{N+2} of the worst-case instance (units: length^2).

    Validity (strictly decreasing, last entry zero) is not enforced here so that
    deliberately broken vectors can be built and checked; see `is_valid`.
    """

    N: int
    R: float
    values: np.ndarray

    def __post_init__(self):
        if len(self.values) != self.N + 3:
            raise ValueError(f"zeta must have N+3={self.N + 3} entries, got {len(self.values)}")

    def __getitem__(self, i):
        return self.values[i]

    def __len__(self):
        return len(self.values)

    def is_valid(self) -> bool:
        z = self.values
        return bool(z[-1] == 0.0 and np.all(np.diff(z) < 0))

    def perturbed(self, index: int, delta: float) -> "ZetaVector":
        z = np.array(self.values, dtype=float)
        z[index] += delta
        return ZetaVector(self.N, self.R, z)


@dataclass(frozen=True)
class BoundsReport:
    L: float
    R: float
    N: int
    smooth_exact: float
    quadratic_ref: float
    nonsmooth_ref: Optional[float] = None

    def as_dict(self) -> dict:
        return {
            "L": self.L,
            "R": self.R,
            "N": self.N,
            "smooth_exact": self.smooth_exact,
            "quadratic_ref": self.quadratic_ref,
            "nonsmooth_ref": self.nonsmooth_ref,
        }


def theta_sequence(N: int) -> ThetaSequence:
    """theta_0 = 1, the accelerated recursion up to N-1, then the modified last step."""
    N = _require_budget(N)
    th = np.empty(N + 1)
    th[0] = 1.0
    for i in range(1, N):
        th[i] = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * th[i - 1] ** 2))
    th[N] = 0.5 * (1.0 + math.sqrt(1.0 + 8.0 * th[N - 1] ** 2))
    return ThetaSequence(N, th)


def zeta_star(N: int, R: float) -> ZetaVector:
    N = _require_budget(N)
    R = _require_positive("R", R)
    th = theta_sequence(N).values
    tn = th[N]
    z = np.empty(N + 3)
    z[N + 2] = 0.0
    z[N + 1] = (tn - 1.0) * R * R / (tn * tn * (2.0 * tn - 1.0))
    z[N] = tn * z[N + 1] / (tn - 1.0)
    for i in range(N - 1, -1, -1):
        z[i] = 2.0 * th[i] * z[i + 1] / (2.0 * th[i] - 1.0)
    return ZetaVector(N, R, z)


def smooth_bound(L: float, R: float, N: int) -> float:
    """Exact minimax risk L R^2 / (2 theta_N^2)."""
    tn = theta_sequence(N).last
    return L * R * R / (2.0 * tn * tn)


def reference_bounds(L: float, R: float, N: int, M: Optional[float] = None) -> BoundsReport:
    L = _require_positive("L", L)
    R = _require_positive("R", R)
    N = _require_budget(N)
    nonsmooth = None
    if M is not None:
        M = _require_positive("M", M)
        nonsmooth = M * R / math.sqrt(N + 1)
    return BoundsReport(
        L=L,
        R=R,
        N=N,
        smooth_exact=smooth_bound(L, R, N),
        quadratic_ref=L * R * R / (2.0 * (2 * N + 1) ** 2),
        nonsmooth_ref=nonsmooth,
    )


def quadratic_gap_ratio(N: int) -> float:
    """(2N+1)^2 / theta_N^2: how far the quadratic-class bound sits below the exact risk."""
    tn = theta_sequence(N).last
    return (2 * N + 1) ** 2 / (tn * tn)
