"""Exit criteria: one test per criterion, each printing a PASS/FAIL line."""
import time

import numpy as np
import pytest

from minimax_smooth.methods import run_fgm, run_gd, run_ogm
from minimax_smooth.resisting_oracle import finalize, new_oracle, replay_verify
from minimax_smooth.theta_zeta import quadratic_gap_ratio, theta_sequence
from minimax_smooth.worst_case import eval_worst_case, eval_worst_case_reference, worst_case_function

RESULTS: list[str] = []
SWEEP = range(1, 31)


def report(tag, ok, detail):
    line = f"{tag}: {'PASS' if ok else 'FAIL'} ({detail})"
    RESULTS.append(line)
    print(line)
    assert ok, line


def bound(N, L=1.0, R=1.0):
    return L * R * R / (2.0 * theta_sequence(N).last ** 2)


def sample(rng, W, count):
    s = np.linalg.norm(W.minimizer) / np.sqrt(W.dim)
    return rng.normal(size=(count, W.dim)) * s * rng.choice([0.1, 1.0, 3.0], size=(count, 1))


@pytest.fixture(scope="module")
def runs():
    """Resisting-oracle runs for every method and N in the sweep (timed per method)."""
    out, timing = {}, {}
    for name, method in (("ogm", run_ogm), ("gd", run_gd), ("fgm", run_fgm)):
        t0 = time.perf_counter()
        for N in SWEEP:
            o = new_oracle(N + 1, N, 1.0, 1.0)
            res = method(o, np.zeros(N + 1), N, 1.0, 1.0)
            fn = finalize(o, res.output)
            out[name, N] = (o, fn)
        timing[name] = time.perf_counter() - t0
    return out, timing


def test_c1_ogm_attains_exact_risk(runs):
    out, timing = runs
    rel = max(abs(out["ogm", N][0].transcript.gap - bound(N)) / bound(N) for N in SWEEP)
    ok = rel <= 1e-6 and timing["ogm"] < 10.0
    report("C1 exact minimax realization", ok, f"max rel err {rel:.2e} <= 1e-6, {timing['ogm']:.2f}s < 10s")


def test_c2_lower_bound_universal(runs):
    out, _ = runs
    worst = min(out[m, N][0].transcript.gap - bound(N) for m in ("gd", "fgm") for N in SWEEP)
    gd1 = out["gd", 1][0].transcript.gap
    ok = worst >= -1e-9 and abs(gd1 - 5 / 36) <= 1e-9
    report("C2 lower-bound universality", ok, f"min gap-bound {worst:.3e} >= -1e-9, GD N=1 gap {gd1:.12f} vs 5/36")


def test_c3_instance_identities():
    worst_inst = worst_theta = 0.0
    for N in range(1, 1001):
        W = worst_case_function(N, 1.0, 1.0)
        b = bound(N)
        worst_inst = max(worst_inst, abs(np.linalg.norm(W.minimizer) - 1.0), abs(W.triples.F[N] - b) / b)
        worst_theta = max(worst_theta, float(np.max(theta_sequence(N).identity_residuals())))
    ok = worst_inst <= 1e-9 and worst_theta <= 1e-12
    report("C3 worst-case identities", ok, f"norm/f_N rel err {worst_inst:.2e} <= 1e-9, theta {worst_theta:.2e} <= 1e-12")


def test_c4_interpolation():
    worst = 0.0
    for N in range(1, 21):
        W = worst_case_function(N, 1.0, 1.0)
        for i in range(N + 2):
            res = eval_worst_case(W, W.triples.X[i])
            worst = max(worst, abs(res.value - W.triples.F[i]), np.max(np.abs(res.gradient - W.triples.G[i])))
    report("C4 interpolation", worst <= 1e-8, f"max err {worst:.2e} <= 1e-8")


def test_c5_pair_scan_matches_full_simplex():
    rng = np.random.default_rng(5)
    worst = 0.0
    for N in range(1, 11):
        W = worst_case_function(N, 1.0, 1.0)
        for y in sample(rng, W, 100):
            worst = max(worst, abs(eval_worst_case(W, y).value - eval_worst_case_reference(W, y).value))
    report("C5 pair-scan witness", worst <= 1e-6, f"max |fast - reference| {worst:.2e} <= 1e-6")


def test_c6_corollaries():
    rng = np.random.default_rng(6)
    short = deriv = 0.0
    for N in range(1, 11):
        W = worst_case_function(N, 1.0, 1.0)
        ys = sample(rng, W, 1000)
        for y in ys:
            k = int(rng.integers(0, N + 1))
            y[k] = abs(y[k])
            n = int(rng.integers(k + 1, N + 1)) if k < N else None
            if n is not None:
                y[n] = 0.0
            res = eval_worst_case(W, y)
            short = max(short, W.triples.F[k] - res.value)
            if n is not None:
                deriv = max(deriv, abs(res.gradient[n]))
    ok = short <= 1e-9 and deriv <= 1e-9
    report("C6 corollary suite", ok, f"min-value shortfall {short:.2e}, |dW/dy_n| {deriv:.2e} <= 1e-9")


def test_c7_smoothness_certificate():
    rng = np.random.default_rng(7)
    slack, fd_err = np.inf, 0.0
    h = 1e-6
    for N in (1, 5, 10):
        W = worst_case_function(N, 1.0, 1.0)
        y1s, y2s = sample(rng, W, 1000), sample(rng, W, 1000)
        for y1, y2 in zip(y1s, y2s):
            a, b = eval_worst_case(W, y1), eval_worst_case(W, y2)
            dg = a.gradient - b.gradient
            slack = min(slack, b.value - a.value - a.gradient @ (y2 - y1) - dg @ dg / (2 * W.L))
        for y in sample(rng, W, 100):
            g = eval_worst_case(W, y).gradient
            fd = np.array([(eval_worst_case(W, y + h * e).value - eval_worst_case(W, y - h * e).value) / (2 * h)
                           for e in np.eye(W.dim)])
            gn = np.linalg.norm(g)
            fd_err = max(fd_err, np.linalg.norm(fd - g) / gn if gn > 0 else np.linalg.norm(fd))
    ok = slack >= -1e-9 and fd_err <= 1e-5
    report("C7 smoothness certificate", ok, f"co-coercivity slack {slack:.2e} >= -1e-9, FD rel err {fd_err:.2e} <= 1e-5")


def test_c8_adversary_consistency(runs):
    out, _ = runs
    worst, failed = 0.0, []
    for (m, N), (o, fn) in out.items():
        rep = replay_verify(fn, o.transcript)
        worst = max(worst, rep.max_value_error, rep.max_grad_error)
        if not rep.passed:
            failed.append((m, N))
    report("C8 adversary consistency", not failed, f"{len(out)} transcripts, max replay err {worst:.2e} <= 1e-9")


def test_c9_factor_eight_gap():
    r = quadratic_gap_ratio(100)
    report("C9 asymptotic gap", 7.5 <= r <= 8.0, f"(2N+1)^2/theta_N^2 = {r:.6f} at N=100 in [7.5, 8.0]")
