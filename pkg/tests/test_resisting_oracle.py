import json

import numpy as np
import pytest

from minimax_smooth import checks
from minimax_smooth.methods import run_fgm, run_gd, run_ogm
from minimax_smooth.resisting_oracle import (
    BudgetExhausted,
    OracleStateError,
    Transcript,
    _fallback_vector,
    finalize,
    new_oracle,
    query,
    replay_verify,
)
from minimax_smooth.theta_zeta import smooth_bound, zeta_star


def test_new_oracle_dimensions():
    o = new_oracle(2, 1, 1.0, 1.0, np.zeros(2))
    assert o.queries_used == 0 and o.frame == []
    new_oracle(10, 3, 1.0, 1.0)
    with pytest.raises(ValueError):
        new_oracle(1, 1, 1.0, 1.0)
    with pytest.raises(ValueError):
        new_oracle(3, 1, 1.0, 1.0, np.zeros(2))


def test_first_query_at_origin():
    o = new_oracle(2, 1, 1.0, 1.0)
    ans = query(o, np.zeros(2))
    np.testing.assert_array_equal(o.frame[0], [1.0, 0.0])  # fallback e_0
    assert ans.value == pytest.approx(0.25, abs=1e-15)
    np.testing.assert_allclose(ans.gradient, [1 / np.sqrt(6), 0.0], atol=1e-15)


def test_budget_contract():
    o = new_oracle(3, 2, 1.0, 1.0)
    query(o, np.zeros(3))
    query(o, np.ones(3))
    with pytest.raises(BudgetExhausted):
        query(o, np.ones(3))
    with pytest.raises(ValueError):
        new_oracle(3, 2, 1.0, 1.0).query(np.zeros(2))


def test_repeated_query_consistent():
    o = new_oracle(4, 3, 1.0, 1.0)
    z = np.array([0.3, -0.2, 0.1, 0.0])
    a1 = query(o, z)
    a2 = query(o, z)
    assert a1.value == pytest.approx(a2.value, abs=1e-14)
    np.testing.assert_allclose(a1.gradient, a2.gradient, atol=1e-14)
    assert len(o.frame) == 2


def test_sign_convention_and_span(rng):
    N, d = 5, 9
    o = new_oracle(d, N, 1.0, 2.0, rng.normal(size=d))
    for k in range(N):
        z = rng.normal(size=d)
        ans = query(o, z)
        assert o.frame[k] @ (z - o.x0) >= 0.0
        V = np.array(o.frame)
        # gradient lies in the span of the frame at answer time
        resid = ans.gradient - V.T @ (V @ ans.gradient)
        assert np.linalg.norm(resid) <= 1e-10
        assert o.frame_gram_error() <= 1e-10


def test_gradients_orthogonal_to_later_frame(rng):
    N, d = 8, 12
    o = new_oracle(d, N, 1.0, 1.0)
    grads = [query(o, rng.normal(size=d)).gradient for _ in range(N)]
    fn = finalize(o, rng.normal(size=d))
    for k, g in enumerate(grads):
        for v in fn.frame[k + 1:]:
            assert abs(g @ v) <= 1e-10


def test_finalize_contract(rng):
    o = new_oracle(5, 3, 2.0, 1.5)
    query(o, rng.normal(size=5))
    fn = finalize(o, rng.normal(size=5))
    assert fn.frame.shape == (4, 5)
    np.testing.assert_allclose(fn.frame @ fn.frame.T, np.eye(4), atol=1e-10)
    assert np.linalg.norm(fn.minimizer - o.x0) == pytest.approx(1.5, rel=1e-10)
    ans = fn.evaluate(fn.minimizer)
    assert ans.value == pytest.approx(0.0, abs=1e-12)
    assert np.linalg.norm(ans.gradient) <= 1e-9
    assert o.transcript.gap >= smooth_bound(2.0, 1.5, 3) - 1e-9
    with pytest.raises(OracleStateError):
        finalize(o, np.zeros(5))
    with pytest.raises(OracleStateError):
        query(o, np.zeros(5))


def test_output_x0_gap():
    o = new_oracle(3, 2, 1.0, 1.0)
    finalize(o, np.zeros(3))
    z = zeta_star(2, 1.0)
    assert o.transcript.gap == pytest.approx(0.5 * (z[0] + z[1]), rel=1e-14)


def test_fallback_when_no_basis_vector_is_half_outside():
    d = 10
    ones = np.ones(d) / np.sqrt(d)
    Q, _ = np.linalg.qr(np.column_stack([ones, np.eye(d)[:, : d - 1]]))
    frame = [Q[:, j] for j in range(1, d)]   # orthonormal complement of ones
    v = _fallback_vector(d, frame)
    assert abs(abs(v @ ones) - 1.0) <= 1e-12


@pytest.mark.parametrize("method", [run_gd, run_fgm, run_ogm])
@pytest.mark.parametrize("N", [1, 4, 11])
def test_replay_passes(method, N, rng):
    d = N + 3
    o = new_oracle(d, N, 1.0, 1.0, rng.normal(size=d))
    res = method(o, o.x0, N, 1.0, 1.0)
    fn = finalize(o, res.output)
    rep = replay_verify(fn, o.transcript)
    assert rep.passed, rep
    assert rep.max_grad_error <= 1e-9
    assert o.transcript.gap >= smooth_bound(1.0, 1.0, N) - 1e-9


def test_replay_detects_perturbation():
    o = new_oracle(4, 3, 1.0, 1.0)
    run_gd(o, np.zeros(4), 3, 1.0)
    fn = finalize(o, np.zeros(4))
    o.transcript.records[1].value += 1e-3
    rep = replay_verify(fn, o.transcript)
    assert not rep.passed
    assert rep.mismatches == [1]


def test_replay_empty_transcript():
    o = new_oracle(2, 1, 1.0, 1.0)
    fn = finalize(o, np.ones(2))
    assert replay_verify(fn, Transcript(2, 1, 1.0, 1.0, np.zeros(2))).passed


def test_transcript_jsonl_roundtrip(tmp_path, rng):
    o = new_oracle(5, 3, 1.0, 2.0, rng.normal(size=5))
    res = run_ogm(o, o.x0, 3, 1.0, 2.0)
    fn = finalize(o, res.output)
    path = o.transcript.write(tmp_path / "t.jsonl")
    lines = path.read_text().splitlines()
    assert len(lines) == 1 + 3 + 1
    rows = [json.loads(x) for x in lines]
    assert rows[0]["type"] == "header" and {"d", "N", "L", "R", "x0"} <= set(rows[0])
    assert all(r["type"] == "query" and {"k", "z", "value", "grad"} <= set(r) for r in rows[1:4])
    assert rows[-1]["type"] == "final" and {"output", "gap", "bound"} <= set(rows[-1])
    back = Transcript.read(path)
    assert len(back) == len(o.transcript) <= 3 + 1
    assert back.records[2].value == o.transcript.records[2].value
    np.testing.assert_array_equal(back.x0, o.x0)
    assert replay_verify(fn, back).passed


def test_finalized_is_smooth_convex(rng):
    N, d = 4, 7
    o = new_oracle(d, N, 1.0, 1.0)
    res = run_fgm(o, np.zeros(d), N, 1.0)
    fn = finalize(o, res.output)

    def vg(z):
        a = fn.evaluate(z)
        return a.value, a.gradient

    ys1 = rng.normal(size=(300, d)) * 0.5
    ys2 = rng.normal(size=(300, d)) * 0.5
    assert checks.cocoercivity_slack(vg, ys1, ys2, 1.0) >= -1e-9
