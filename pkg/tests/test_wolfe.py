import io
import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import all_permutation_vertices
from fwsfm.functions import (cut_oracle, iwata_oracle, modular_oracle, random_concave_instance,
                             random_cut_instance)
from fwsfm.oracle import BasePolytope, VertexPolytope
from fwsfm.wolfe import (ActiveSet, IterationRecord, StallError, certificate, major_step,
                         minor_loop, run, trace_violations, write_trace_csv)


def test_pair_run(pair_oracle):
    res = run(BasePolytope(pair_oracle), 0.1)
    np.testing.assert_allclose(res.x, [0, 0], atol=1e-15)
    assert (res.major_cycles, res.minor_cycles) == (1, 0)
    assert res.terminated == "normal"
    assert res.delta_certificate <= 0.01
    assert res.iterations[0].active_size_after == 2


def test_modular_run_stays_at_w():
    res = run(BasePolytope(modular_oracle([3, -1, 2])), 0.01)
    np.testing.assert_array_equal(res.x, [3, -1, 2])
    assert res.delta_certificate == 0.0
    assert res.terminated == "normal"
    # the only vertex is the start; the terminating oracle call adds nothing
    assert res.total_iterations == 0


def simplex_grid_min_norm(V, steps=30):
    best = np.inf
    for c in itertools.product(range(steps + 1), repeat=len(V) - 1):
        if sum(c) <= steps:
            lam = np.array(c + (steps - sum(c),)) / steps
            best = min(best, float(np.sum((lam @ V) ** 2)))
    return best


def test_zero_epsilon_vertex_optimum():
    o = cut_oracle(random_cut_instance(5, 0.8, 6, 2))
    res = run(BasePolytope(o), 0.0)
    V = np.unique(all_permutation_vertices(o), axis=0)
    assert res.terminated == "normal"
    assert any(np.array_equal(res.x, v) for v in V)
    assert res.x @ res.x <= simplex_grid_min_norm(V) + 1e-12


def test_major_step_adds_vertex(pair_oracle):
    state = ActiveSet.from_vertex([1.0, -1.0])
    status, q, delta = major_step(state, BasePolytope(pair_oracle), 0.1)
    assert status == "continue"
    np.testing.assert_array_equal(state.vertices, [[1, -1], [-1, 1]])
    assert delta == 4.0


def test_major_step_terminates_on_zero_gap():
    state = ActiveSet(2)
    state.add([1.0, 0.0])
    state.add([0.0, 1.0])
    state.lam = np.array([0.5, 0.5])
    state.x = np.array([0.5, 0.5])
    status, q, delta = major_step(state, VertexPolytope([[0, 1], [1, 0]]), 1e-3)
    assert status == "terminate"
    np.testing.assert_array_equal(q, [0, 1])
    assert delta == 0.0


def test_major_step_refuses_repeat_vertex():
    state = ActiveSet.from_vertex([1.0, -2.0])
    state.x = np.array([1.0, 1.0])  # artificially off the set, so the gap is large
    with pytest.raises(StallError):
        major_step(state, VertexPolytope([[1, -2], [5, 5]]), 0.0)


def test_minor_loop_theta_half():
    state = ActiveSet(1)
    state.add([1.0])
    state.add([3.0])
    state.lam = np.array([0.5, 0.5])
    state.x = np.array([2.0])
    assert np.allclose(state.affine().alpha, [1.5, -0.5])
    recs = minor_loop(state)
    assert len(recs) == 1
    assert recs[0].theta == pytest.approx(0.5)
    np.testing.assert_array_equal(state.vertices, [[1.0]])
    np.testing.assert_allclose(state.x, [1.0])


def test_minor_loop_triangle_to_segment():
    state = ActiveSet(2)
    for p in ([1, 0], [0, 1], [0.9, 0.9]):
        state.add(p)
    state.lam = np.array([0.25, 0.25, 0.5])
    state.x = state.lam @ state.vertices
    recs = minor_loop(state)
    assert len(recs) == 1
    assert recs[0].theta == pytest.approx(0.5 / 1.75)
    assert recs[0].active_size_after == 2
    np.testing.assert_allclose(state.x, [0.5, 0.5], atol=1e-12)


def test_minor_loop_nonnegative_alpha_moves_to_y():
    state = ActiveSet(2)
    state.add([1.0, 0.0])
    state.add([0.0, 1.0])
    state.lam = np.array([0.9, 0.1])
    state.x = state.lam @ state.vertices
    assert minor_loop(state) == []
    np.testing.assert_allclose(state.x, [0.5, 0.5])


def _instances():
    yield "pair", None
    for seed in range(6):
        yield f"cut{seed}", cut_oracle(random_cut_instance(9, 0.8, 10, seed))
        yield f"concave{seed}", random_concave_instance(8, seed)
    yield "iwata", iwata_oracle(12)


@pytest.mark.parametrize("name, oracle", list(_instances()))
def test_trace_invariants(name, oracle, pair_oracle):
    oracle = oracle or pair_oracle
    res = run(BasePolytope(oracle), 1 / (4 * oracle.n))
    assert res.terminated == "normal"
    assert trace_violations(res, oracle.n) == []
    assert len(res.iterations) == res.total_iterations
    delta, _ = certificate(res.x, BasePolytope(oracle))
    assert delta <= res.epsilon**2 + 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 100_000), st.integers(2, 14))
def test_incremental_matches_scratch(seed, n):
    o = random_concave_instance(n, seed)
    a = run(BasePolytope(o), 1e-3)
    b = run(BasePolytope(o), 1e-3, incremental=False)
    np.testing.assert_allclose(a.x, b.x, atol=1e-9)
    assert trace_violations(b, n) == []


def test_iteration_cap():
    o = cut_oracle(random_cut_instance(30, 0.8, 10, 1))
    res = run(BasePolytope(o), 1e-6, max_iterations=3)
    assert res.terminated == "iteration_cap"
    assert res.total_iterations == 3
    assert res.delta_certificate > 1e-12


def test_detector_flags_broken_traces(pair_oracle):
    res = run(BasePolytope(iwata_oracle(6)), 0.01)
    good = list(res.iterations)
    assert trace_violations(res, 6) == []
    r = good[0]
    res.iterations = [IterationRecord("major", r.norm_sq_before, r.norm_sq_before + 1.0, 1, 2,
                                      added_id=r.added_id, active_ids=r.active_ids)] + good[1:]
    assert any("did not decrease" in v for v in trace_violations(res, 6))
    res.iterations = [IterationRecord("minor", 1.0, 0.5, 3, 3, theta=0.2)]
    msgs = trace_violations(res, 2)
    assert any("deleted nothing" in v for v in msgs)
    assert any("larger than n" in v for v in msgs)
    res.iterations = [IterationRecord("major", 2.0, 1.0, 1, 1, added_id=5, active_ids=(0,))]
    assert any("did not survive" in v for v in trace_violations(res, 2))


def test_detector_window_without_short_cycle():
    recs = []
    norm = 100.0
    for _ in range(3):
        recs.append(IterationRecord("major", norm, norm - 3, 2, 1, minor_cycles=2, added_id=0,
                                    active_ids=(0,)))
        recs.append(IterationRecord("minor", norm, norm - 1, 2, 1, theta=0.5))
        recs.append(IterationRecord("minor", norm - 1, norm - 2, 2, 1, theta=0.5))
        norm -= 3
    res = run(BasePolytope(modular_oracle([1.0])), 0.1)
    res.iterations = recs
    assert any("no major cycle" in v for v in trace_violations(res, 1))


def test_trace_csv(pair_oracle):
    res = run(BasePolytope(iwata_oracle(5)), 0.05)
    fh = io.StringIO()
    write_trace_csv(res, fh)
    lines = fh.getvalue().splitlines()
    assert lines[0] == "iter,kind,norm_sq,active_size,delta,theta"
    assert len(lines) == 1 + res.total_iterations


def test_rejects_negative_epsilon(pair_oracle):
    with pytest.raises(ValueError):
        run(BasePolytope(pair_oracle), -1.0)
