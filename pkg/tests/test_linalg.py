import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meanlab import linalg as LA
from meanlab.errors import DomainError, InputError

PS = [1, 1.5, 2, 3, math.inf]
vectors = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=1, max_size=12)


def oracle_norm(v, p):
    m = np.abs(np.asarray(v, dtype=complex))
    return m.max() if p == math.inf else (m**p).sum() ** (1 / p)


def test_p_norm_examples():
    assert LA.p_norm([3, 4], 2) == 5
    assert LA.p_norm([3, 4], 1) == 7
    assert LA.p_norm([3, 4], math.inf) == 4
    with pytest.raises(DomainError):
        LA.p_norm([1, 2], 0.5)


@pytest.mark.parametrize("p", PS)
def test_p_norm_matches_direct_sum(p):
    rng = np.random.default_rng(0)
    for _ in range(20):
        v = rng.normal(size=9) + 1j * rng.normal(size=9)
        assert LA.p_norm(v, p) == pytest.approx(oracle_norm(v, p), rel=1e-13)


def test_p_norm_no_overflow():
    assert LA.p_norm([1e300, 1e300], 3) == pytest.approx(1e300 * 2 ** (1 / 3), rel=1e-14)


def test_norm_inequality_examples():
    r = LA.norm_inequality_report([1, 1], 1, 2)
    assert r.passed
    assert r.values["q_norm"] == pytest.approx(math.sqrt(2))
    assert r.values["factor"] * r.values["q_norm"] == pytest.approx(2)
    e = np.zeros(5)
    e[0] = 1
    r = LA.norm_inequality_report(e, 1.5, math.inf)
    assert r.passed and r.values["p_norm"] == r.values["q_norm"] == 1
    with pytest.raises(InputError):
        LA.norm_inequality_report([1, 2], 2, 1)


def test_inner_product_and_cauchy_schwarz():
    assert LA.inner_product([1, 1j], [1, 1j]) == 2
    assert LA.inner_product([1, 0], [0, 1]) == 0
    assert LA.cauchy_schwarz_gap([1, 0], [0, 1]) == 1
    v = np.array([1.0, -2.0, 0.5])
    assert abs(LA.cauchy_schwarz_gap(v, 3 * v)) <= 1e-14
    with pytest.raises(InputError):
        LA.inner_product([1, 2], [1, 2, 3])


def test_parallelogram_examples():
    assert LA.parallelogram_residual([1, 0], [0, 1]) == 0
    assert LA.parallelogram_residual([1, 2], [1, 2]) <= 1e-14


def test_projection_examples():
    sub = LA.ConvexSpec.subspace([[1, 0]])
    assert np.allclose(LA.project([1, 1], sub), [1, 0])
    box = LA.ConvexSpec.box([0, 0], [2, 2])
    assert np.array_equal(LA.project([1, 1], box), [1, 1])
    ball = LA.ConvexSpec.ball([0, 0], 1)
    assert np.allclose(LA.project([3, 4], ball), [0.6, 0.8])
    with pytest.raises(InputError):
        LA.ConvexSpec.subspace([[1, 0], [2, 0]])


def test_orthogonal_decomposition_examples():
    w, y = LA.orthogonal_complement_decompose([1, 2, 3], [[1, 0, 0], [0, 1, 0]])
    assert np.allclose(w, [1, 2, 0]) and np.allclose(y, [0, 0, 3])
    w, y = LA.orthogonal_complement_decompose([1, 2], [[1, 1], [1, -1]])
    assert np.allclose(y, 0)


def test_subspace_projection_matches_lstsq_oracle():
    rng = np.random.default_rng(5)
    for _ in range(30):
        n, k = 7, int(rng.integers(1, 6))
        B = rng.normal(size=(k, n)) + 1j * rng.normal(size=(k, n))
        v = rng.normal(size=n) + 1j * rng.normal(size=n)
        coef = np.linalg.lstsq(B.T, v, rcond=None)[0]
        w, y = LA.orthogonal_complement_decompose(v, B)
        assert np.allclose(w, B.T @ coef, atol=1e-10)
        assert np.max(np.abs(B.conj() @ y)) <= 1e-10


@settings(max_examples=60, deadline=None)
@given(vectors, vectors, st.floats(-50, 50, allow_nan=False), st.sampled_from(PS))
def test_norm_axioms(v, w, t, p):
    n = min(len(v), len(w))
    v, w = np.array(v[:n]), np.array(w[:n])
    nv = LA.p_norm(v, p)
    assert LA.p_norm(t * v, p) == pytest.approx(abs(t) * nv, rel=1e-12, abs=1e-300)
    assert LA.p_norm(v + w, p) <= nv + LA.p_norm(w, p) + 1e-12 * (nv + LA.p_norm(w, p))


@settings(max_examples=60, deadline=None)
@given(vectors, vectors, st.floats(0.01, 0.99), st.sampled_from(PS))
def test_unit_ball_convex(v, w, t, p):
    n = min(len(v), len(w))
    u, v = np.array(v[:n]), np.array(w[:n])
    u = u / max(LA.p_norm(u, p), 1.0)
    v = v / max(LA.p_norm(v, p), 1.0)
    assert LA.p_norm(t * u + (1 - t) * v, p) <= 1 + 1e-12


@settings(max_examples=60, deadline=None)
@given(vectors, st.sampled_from(PS), st.sampled_from(PS))
def test_norm_comparison_property(v, p, q):
    if not p < q:
        p, q = q, p
    if p == q:
        return
    assert LA.norm_inequality_report(v, p, q).passed


@settings(max_examples=40, deadline=None)
@given(vectors, vectors)
def test_cauchy_schwarz_and_parallelogram(v, w):
    n = min(len(v), len(w))
    v, w = np.array(v[:n]), np.array(w[:n])
    scale = LA.p_norm(v) * LA.p_norm(w)
    assert LA.cauchy_schwarz_gap(v, w) >= -1e-12 * scale
    assert LA.parallelogram_residual(v, w) <= 1e-11 * (1 + LA.p_norm(v) ** 2 + LA.p_norm(w) ** 2)
