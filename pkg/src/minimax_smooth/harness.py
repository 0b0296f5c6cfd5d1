"""Experiment runner, CSV export and the certificate sweep."""
from __future__ import annotations

import csv
import dataclasses
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from . import checks
from .methods import METHODS, get_method
from .resisting_oracle import new_oracle, replay_verify
from .theta_zeta import quadratic_gap_ratio, reference_bounds, smooth_bound, theta_sequence, zeta_star
from .worst_case import build_triples, verify_identities

log = logging.getLogger(__name__)

CSV_COLUMNS = ["method", "N", "L", "R", "d", "calls", "gap", "bound", "ratio",
               "quadratic_ref", "transcript_path"]
FLOAT_FMT = "{:.17g}"


@dataclass
class ExperimentConfig:
    L: float = 1.0
    R: float = 1.0
    N: int = 1
    d: Optional[int] = None
    method: str = "ogm"
    tol: float = 1e-10
    seed: int = 42
    out: Optional[str] = None
    transcript: Optional[str] = None

    def __post_init__(self):
        if self.d is None:
            self.d = self.N + 1

    def validate(self) -> None:
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if not (self.L > 0 and self.R > 0):
            raise ValueError("L and R must be positive")
        if self.d < self.N + 1:
            raise ValueError(f"dimension d={self.d} must be at least N+1={self.N + 1}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {sorted(METHODS)}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")

    @classmethod
    def from_file(cls, path, **overrides) -> "ExperimentConfig":
        data = json.loads(Path(path).read_text())
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)


@dataclass
class RunRecord:
    method: str
    N: int
    L: float
    R: float
    d: int
    calls: int
    gap: float
    bound: float
    ratio: float
    quadratic_ref: float
    transcript_path: str = ""
    replay_ok: bool = True

    def row(self) -> list[str]:
        out = []
        for col in CSV_COLUMNS:
            v = getattr(self, col)
            out.append(FLOAT_FMT.format(v) if isinstance(v, float) else str(v))
        return out


def run_experiment(config: ExperimentConfig) -> RunRecord:
    config.validate()
    oracle = new_oracle(config.d, config.N, config.L, config.R)
    x0 = oracle.x0.copy()
    result = get_method(config.method)(oracle, x0, config.N, config.L, config.R)
    fn = oracle.finalize(result.output)
    replay = replay_verify(fn, oracle.transcript)
    gap = float(oracle.transcript.gap)
    result.gap = gap
    bound = oracle.bound
    path = ""
    if config.transcript:
        path = str(oracle.transcript.write(config.transcript))
    record = RunRecord(
        method=config.method, N=config.N, L=config.L, R=config.R, d=config.d,
        calls=oracle.queries_used, gap=gap, bound=bound, ratio=gap / bound,
        quadratic_ref=reference_bounds(config.L, config.R, config.N).quadratic_ref,
        transcript_path=path, replay_ok=replay.passed,
    )
    if not replay.passed:
        log.error("replay mismatch for %s N=%d at records %s", config.method, config.N, replay.mismatches)
    if config.out:
        export([record], config.out, append=True)
    return record


def export(records: Iterable[RunRecord], path, append: bool = False) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fresh = not (append and path.exists() and path.stat().st_size > 0)
    with path.open("w" if fresh else "a", newline="") as fh:
        writer = csv.writer(fh)
        if fresh:
            writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow(rec.row())
    return path


def read_records(path) -> list[RunRecord]:
    out = []
    with Path(path).open(newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(RunRecord(
                method=row["method"], N=int(row["N"]), L=float(row["L"]), R=float(row["R"]),
                d=int(row["d"]), calls=int(row["calls"]), gap=float(row["gap"]),
                bound=float(row["bound"]), ratio=float(row["ratio"]),
                quadratic_ref=float(row["quadratic_ref"]), transcript_path=row["transcript_path"],
            ))
    return out


@dataclass
class CheckRecord:
    name: str
    expected: str
    observed: float
    tolerance: float
    passed: bool


@dataclass
class CertificateReport:
    records: list[CheckRecord] = field(default_factory=list)

    def add(self, name, expected, observed, tolerance, passed) -> None:
        self.records.append(CheckRecord(name, expected, float(observed), float(tolerance), bool(passed)))

    @property
    def n_pass(self) -> int:
        return sum(r.passed for r in self.records)

    @property
    def n_fail(self) -> int:
        return len(self.records) - self.n_pass

    @property
    def passed(self) -> bool:
        return self.n_fail == 0

    def summary(self) -> dict:
        return {"total": len(self.records), "passed": self.n_pass, "failed": self.n_fail}

    def to_dict(self) -> dict:
        return {"summary": self.summary(), "records": [dataclasses.asdict(r) for r in self.records]}

    def write(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), indent=2))
        return path


def certify(
    n_max: int = 30,
    L: float = 1.0,
    R: float = 1.0,
    seed: int = 42,
    probes: int = 100,
    zeta_perturbation: Optional[float] = None,
    transcript_dir: Optional[str] = None,
) -> CertificateReport:
    """Run the full numerical certificate over N = 1..n_max.

    `zeta_perturbation=eps` adds eps*zeta_0 to zeta_1 of every instance before
    the instance checks, which must then fail.
    """
    rng = np.random.default_rng(seed)
    rep = CertificateReport()

    for N in range(1, n_max + 1):
        th = theta_sequence(N)
        err = float(np.max(th.identity_residuals()))
        rep.add(f"theta_identities[N={N}]", "rel residual <= 1e-12", err, 1e-12, err <= 1e-12)

        z = zeta_star(N, R)
        if zeta_perturbation is not None:
            z = z.perturbed(1, zeta_perturbation * z[0])
        mono = z.is_valid()
        rep.add(f"zeta_monotone[N={N}]", "strictly decreasing, last 0", float(mono), 0.0, mono)
        if not mono:
            rep.add(f"instance[N={N}]", "buildable", 0.0, 0.0, False)
            continue
        W = build_triples(z, L)
        for name, ok in verify_identities(W, R).items():
            rep.add(f"{name}[N={N}]", "holds at rtol 1e-10", float(ok), 1e-10, ok)

        if N <= 20:
            ev, eg = checks.interpolation_errors(W)
            rep.add(f"interpolation[N={N}]", "W(x_i)=f_i, grad=g_i", max(ev, eg), 1e-8, max(ev, eg) <= 1e-8)
        if N <= 10:
            ys = checks.random_points(W, rng, probes)
            err = checks.cross_solver_error(W, ys)
            rep.add(f"cross_solver[N={N}]", "|fast - reference| <= 1e-6", err, 1e-6, err <= 1e-6)
            pts = checks.corollary_points(W, rng, 10 * probes)
            short, deriv = checks.corollary_violations(W, pts)
            rep.add(f"min_value_corollary[N={N}]", "W(y) >= f_k - 1e-9", short, 1e-9, short <= 1e-9)
            rep.add(f"zero_derivative_corollary[N={N}]", "|dW/dy_n| <= 1e-9", deriv, 1e-9, deriv <= 1e-9)
            ys1 = checks.random_points(W, rng, 10 * probes)
            ys2 = checks.random_points(W, rng, 10 * probes)
            slack = checks.cocoercivity_slack(W.value_and_grad, ys1, ys2, L)
            rep.add(f"cocoercivity[N={N}]", "slack >= -1e-9", slack, 1e-9, slack >= -1e-9)
            fd = checks.fd_gradient_error(W.value_and_grad, checks.random_points(W, rng, probes))
            rep.add(f"finite_difference[N={N}]", "rel err <= 1e-5", fd, 1e-5, fd <= 1e-5)

        bound = smooth_bound(L, R, N)
        for method in METHODS:
            tpath = None
            if transcript_dir:
                tpath = str(Path(transcript_dir) / f"{method}_N{N}.jsonl")
            cfg = ExperimentConfig(L=L, R=R, N=N, method=method, transcript=tpath)
            rec = run_experiment(cfg)
            rep.add(f"lower_bound[{method},N={N}]", "gap >= bound - 1e-9", rec.gap - bound, 1e-9,
                    rec.gap >= bound - 1e-9)
            rep.add(f"replay[{method},N={N}]", "answers reproduced within 1e-9", float(rec.replay_ok), 1e-9,
                    rec.replay_ok)
            if method == "ogm":
                rel = abs(rec.gap - bound) / bound
                rep.add(f"ogm_exact[N={N}]", "gap = bound within rel 1e-6", rel, 1e-6, rel <= 1e-6)

    ratio = quadratic_gap_ratio(100)
    rep.add("quadratic_gap_ratio[N=100]", "in [7.5, 8.0]", ratio, 0.0, 7.5 <= ratio <= 8.0)
    return rep
