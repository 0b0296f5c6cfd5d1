"""Adversarial first-order oracle.

Answers are those of W(<z - x0, v_0>, ..., <z - x0, v_N>) for an orthonormal frame
that is grown one vector per query.  Earlier answers stay valid whatever vectors
are appended later, so the objective is only fixed once the method reports its
output point.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .theta_zeta import smooth_bound
from .worst_case import WorstCaseFunction, eval_worst_case, worst_case_function

RESIDUAL_RTOL = 1e-12
SIGN_ATOL = 1e-12
REPLAY_TOL = 1e-9


class BudgetExhausted(RuntimeError):
    pass


class OracleStateError(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleAnswer:
    value: float
    gradient: np.ndarray

    def __iter__(self):
        yield self.value
        yield self.gradient


@dataclass
class QueryRecord:
    k: int
    z: np.ndarray
    value: float
    grad: np.ndarray
    v: Optional[np.ndarray] = None

    def to_dict(self) -> dict:
        out = {"type": "query", "k": self.k, "z": self.z.tolist(), "value": self.value,
               "grad": self.grad.tolist()}
        if self.v is not None:
            out["v"] = self.v.tolist()
        return out


@dataclass
class Transcript:
    d: int
    N: int
    L: float
    R: float
    x0: np.ndarray
    records: list[QueryRecord] = field(default_factory=list)
    output: Optional[np.ndarray] = None
    gap: Optional[float] = None
    bound: Optional[float] = None

    def __len__(self):
        return len(self.records) + (self.output is not None)

    def header(self) -> dict:
        return {"type": "header", "d": self.d, "N": self.N, "L": self.L, "R": self.R,
                "x0": self.x0.tolist()}

    def lines(self) -> list[str]:
        out = [json.dumps(self.header())]
        out += [json.dumps(r.to_dict()) for r in self.records]
        if self.output is not None:
            out.append(json.dumps({"type": "final", "output": self.output.tolist(),
                                   "gap": self.gap, "bound": self.bound}))
        return out

    def write(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(self.lines()) + "\n")
        return path

    @classmethod
    def read(cls, path) -> "Transcript":
        return cls.from_lines(Path(path).read_text().splitlines())

    @classmethod
    def from_lines(cls, lines) -> "Transcript":
        rows = [json.loads(line) for line in lines if line.strip()]
        if not rows or rows[0].get("type") != "header":
            raise ValueError("transcript must start with a header record")
        h = rows[0]
        tr = cls(int(h["d"]), int(h["N"]), float(h["L"]), float(h["R"]), np.asarray(h["x0"], float))
        for row in rows[1:]:
            kind = row.get("type")
            if kind == "query":
                v = row.get("v")
                tr.records.append(QueryRecord(
                    int(row["k"]), np.asarray(row["z"], float), float(row["value"]),
                    np.asarray(row["grad"], float), None if v is None else np.asarray(v, float)))
            elif kind == "final":
                tr.output = np.asarray(row["output"], float)
                tr.gap = row["gap"]
                tr.bound = row["bound"]
            else:
                raise ValueError(f"unknown transcript record type {kind!r}")
        return tr


def _orthogonalize(w: np.ndarray, frame: list[np.ndarray]) -> np.ndarray:
    # classical Gram-Schmidt, applied twice
    r = w.copy()
    for _ in range(2):
        for v in frame:
            r -= (v @ r) * v
    return r


def _fallback_vector(d: int, frame: list[np.ndarray]) -> np.ndarray:
    """Lowest-index e_i with orthogonal residual >= 1/2, else the largest residual."""
    if len(frame) >= d:
        raise OracleStateError("frame already spans the whole space")
    best, best_norm = None, -1.0
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        r = _orthogonalize(e, frame)
        nrm = np.linalg.norm(r)
        if nrm >= 0.5:
            return r / nrm
        if nrm > best_norm:
            best, best_norm = r, nrm
    # sum of squared residuals is d - len(frame) >= 1, so best_norm >= 1/sqrt(d)
    r = _orthogonalize(best / best_norm, frame)
    return r / np.linalg.norm(r)


def _next_frame_vector(w: np.ndarray, frame: list[np.ndarray]) -> np.ndarray:
    r = _orthogonalize(w, frame)
    nrm = np.linalg.norm(r)
    if nrm < RESIDUAL_RTOL * (1.0 + np.linalg.norm(w)):
        v = _fallback_vector(len(w), frame)
    else:
        v = r / nrm
    s = v @ w
    if s < 0.0 and abs(s) >= SIGN_ATOL:
        v = -v
    return v


@dataclass(frozen=True)
class FinalizedFunction:
    """w(z) = W(V (z - x0)) for the completed frame V (rows v_0..v_N)."""

    frame: np.ndarray
    base: WorstCaseFunction
    x0: np.ndarray

    @property
    def minimizer(self) -> np.ndarray:
        return self.x0 + self.frame.T @ self.base.minimizer

    @property
    def min_value(self) -> float:
        return 0.0

    def coordinates(self, z) -> np.ndarray:
        return self.frame @ (np.asarray(z, dtype=float) - self.x0)

    def evaluate(self, z) -> OracleAnswer:
        res = eval_worst_case(self.base, self.coordinates(z))
        return OracleAnswer(res.value, self.frame.T @ res.gradient)

    def __call__(self, z) -> float:
        return self.evaluate(z).value

    def query(self, z) -> OracleAnswer:
        return self.evaluate(z)


class ResistingOracle:
    """Mutable per-run adversary; one instance serves exactly one method run."""

    def __init__(self, d: int, N: int, L: float, R: float, x0=None):
        if N < 1:
            raise ValueError(f"N must be >= 1, got {N}")
        if d < N + 1:
            raise ValueError(f"dimension d={d} must be at least N+1={N + 1}")
        x0 = np.zeros(d) if x0 is None else np.asarray(x0, dtype=float)
        if x0.shape != (d,):
            raise ValueError(f"x0 must have dimension {d}")
        self.d = int(d)
        self.N = int(N)
        self.L = float(L)
        self.R = float(R)
        self.x0 = x0
        self.base = worst_case_function(self.N, self.L, self.R)
        self.frame: list[np.ndarray] = []
        self.transcript = Transcript(self.d, self.N, self.L, self.R, x0.copy())
        self.queries_used = 0
        self.finalized: Optional[FinalizedFunction] = None

    @property
    def bound(self) -> float:
        return smooth_bound(self.L, self.R, self.N)

    def query(self, z) -> OracleAnswer:
        if self.finalized is not None:
            raise OracleStateError("oracle already finalized")
        if self.queries_used >= self.N:
            raise BudgetExhausted(f"oracle budget of {self.N} calls exhausted")
        z = np.asarray(z, dtype=float)
        if z.shape != (self.d,):
            raise ValueError(f"query must have dimension {self.d}, got shape {z.shape}")
        w = z - self.x0
        v = _next_frame_vector(w, self.frame)
        self.frame.append(v)
        k = len(self.frame) - 1
        V = np.array(self.frame)
        y = np.zeros(self.N + 1)
        y[: k + 1] = V @ w
        res = eval_worst_case(self.base, y)
        grad = V.T @ res.gradient[: k + 1]
        self.transcript.records.append(QueryRecord(k, z.copy(), res.value, grad.copy(), v.copy()))
        self.queries_used += 1
        return OracleAnswer(res.value, grad)

    __call__ = query

    def finalize(self, output) -> FinalizedFunction:
        if self.finalized is not None:
            raise OracleStateError("finalize called twice")
        output = np.asarray(output, dtype=float)
        if output.shape != (self.d,):
            raise ValueError(f"output must have dimension {self.d}")
        while len(self.frame) < self.N:
            self.frame.append(_fallback_vector(self.d, self.frame))
        self.frame.append(_next_frame_vector(output - self.x0, self.frame))
        fn = FinalizedFunction(np.array(self.frame), self.base, self.x0.copy())
        self.finalized = fn
        self.transcript.output = output.copy()
        self.transcript.gap = fn(output) - fn.min_value
        self.transcript.bound = self.bound
        return fn

    def frame_gram_error(self) -> float:
        if not self.frame:
            return 0.0
        V = np.array(self.frame)
        return float(np.max(np.abs(V @ V.T - np.eye(len(self.frame)))))


def new_oracle(d: int, N: int, L: float, R: float, x0=None) -> ResistingOracle:
    return ResistingOracle(d, N, L, R, x0)


def query(state: ResistingOracle, z) -> OracleAnswer:
    return state.query(z)


def finalize(state: ResistingOracle, output) -> FinalizedFunction:
    return state.finalize(output)


@dataclass
class ReplayReport:
    passed: bool
    max_value_error: float
    max_grad_error: float
    mismatches: list[int]


def replay_verify(fn: FinalizedFunction, transcript: Transcript, tol: float = REPLAY_TOL) -> ReplayReport:
    """Re-ask every recorded query of the finalized function and compare answers."""
    bad = []
    ev = eg = 0.0
    for rec in transcript.records:
        ans = fn.evaluate(rec.z)
        e_val = abs(ans.value - rec.value)
        e_grad = float(np.max(np.abs(ans.gradient - rec.grad))) if rec.grad.size else 0.0
        ev, eg = max(ev, e_val), max(eg, e_grad)
        if e_val > tol or e_grad > tol:
            bad.append(rec.k)
    return ReplayReport(not bad, ev, eg, bad)
