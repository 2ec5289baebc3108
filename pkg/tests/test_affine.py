import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from fwsfm.affine import DegenerateSetError, IncrementalAffine, affine_minimizer


def lstsq_affine_minimizer(P):
    """Independent oracle: minimize |P.T a| subject to sum(a) = 1 via the KKT system."""
    s = max(1.0, np.abs(P).max())
    P = P / s
    m = len(P)
    K = np.zeros((m + 1, m + 1))
    K[:m, :m] = P @ P.T
    K[:m, m] = K[m, :m] = 1.0
    rhs = np.zeros(m + 1)
    rhs[m] = 1.0
    sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
    return s * (sol[:m] @ P)


def assert_contract(P, sol):
    scale = max(1.0, np.abs(P).max())
    assert abs(sol.alpha.sum() - 1.0) <= 1e-10
    assert np.abs(sol.y - sol.alpha @ P).max() <= 1e-8 * scale
    yy = sol.y @ sol.y
    assert np.abs(P @ sol.y - yy).max() <= 1e-8 * scale**2


@pytest.mark.parametrize("points, y, alpha", [
    ([[1, 0], [0, 1]], [0.5, 0.5], [0.5, 0.5]),
    ([[2, 0], [0, 1]], [0.4, 0.8], [0.2, 0.8]),
    ([[3, -1, 2]], [3, -1, 2], [1.0]),
])
def test_examples(points, y, alpha):
    sol = affine_minimizer(points)
    np.testing.assert_allclose(sol.y, y, atol=1e-12)
    np.testing.assert_allclose(sol.alpha, alpha, atol=1e-12)
    for v in np.asarray(points, float):
        assert v @ sol.y == pytest.approx(sol.y @ sol.y)


def test_origin_in_hull_gives_zero():
    sol = affine_minimizer([[1, -1], [-1, 1]])
    np.testing.assert_allclose(sol.y, 0, atol=1e-15)
    np.testing.assert_allclose(sol.alpha, [0.5, 0.5])


def test_degenerate_reports_dependent_index():
    with pytest.raises(DegenerateSetError) as info:
        affine_minimizer([[1, 0], [0, 1], [2, -1]])
    assert info.value.index == 2
    with pytest.raises(DegenerateSetError) as info:
        affine_minimizer([[1, 0, 0], [1, 0, 0]])
    assert info.value.index == 1


def test_rejects_empty_and_nonfinite():
    with pytest.raises(ValueError):
        affine_minimizer(np.empty((0, 3)))
    with pytest.raises(ValueError):
        affine_minimizer([[np.inf, 0]])


def test_large_scale_points():
    # capacity-scaled vertices still factor correctly
    P = 1e6 * np.array([[3.0, -1.0, 0.0], [-1.0, 2.0, 1.0], [0.5, 0.5, -2.0]])
    sol = affine_minimizer(P)
    assert_contract(P, sol)
    np.testing.assert_allclose(sol.y, lstsq_affine_minimizer(P), rtol=1e-8, atol=1e-3)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 8).flatmap(lambda n: st.tuples(
    st.just(n), st.integers(1, n + 1), st.integers(0, 2**32 - 1))))
def test_random_contract_and_oracle(args):
    n, m, seed = args
    P = np.random.default_rng(seed).normal(size=(m, n))
    sol = affine_minimizer(P)
    assert_contract(P, sol)
    np.testing.assert_allclose(sol.y, lstsq_affine_minimizer(P), atol=1e-8)
    assert np.linalg.norm(sol.y) <= np.linalg.norm(P, axis=1).min() + 1e-12


@settings(max_examples=60, deadline=None)
@given(arrays(float, (4, 6), elements=st.integers(-5, 5).map(float)), st.randoms())
def test_order_invariance(P, rnd):
    try:
        sol = affine_minimizer(P)
    except DegenerateSetError:
        return
    perm = list(range(len(P)))
    rnd.shuffle(perm)
    sol2 = affine_minimizer(P[perm])
    np.testing.assert_allclose(sol2.y, sol.y, atol=1e-9)
    np.testing.assert_allclose(sol2.alpha, sol.alpha[perm], atol=1e-9)


def test_incremental_agrees_with_scratch():
    rng = np.random.default_rng(7)
    n = 12
    inc = IncrementalAffine(n)
    pts = []
    for step in range(200):
        if pts and (len(pts) >= n or rng.random() < 0.4):
            j = int(rng.integers(len(pts)))
            inc.remove(j)
            pts.pop(j)
        else:
            p = rng.normal(size=n)
            inc.add(p)
            pts.append(p)
        if pts:
            a, b = inc.solve(), affine_minimizer(np.array(pts), scale=1.0)
            np.testing.assert_allclose(a.y, b.y, atol=1e-9)
            np.testing.assert_allclose(a.alpha, b.alpha, atol=1e-9)


def test_incremental_refuses_dependent_point():
    inc = IncrementalAffine(2)
    inc.add([1.0, 0.0])
    inc.add([0.0, 1.0])
    with pytest.raises(DegenerateSetError):
        inc.add([0.5, 0.5])
    assert len(inc) == 2
    inc.refactor()
    np.testing.assert_allclose(inc.solve().y, [0.5, 0.5])
