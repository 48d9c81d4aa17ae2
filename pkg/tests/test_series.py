import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meanlab import series as S
from meanlab.errors import ConsistencyError, DomainError, InputError, ResolutionError

finite = st.floats(-10, 10, allow_nan=False)
complexes = st.builds(complex, finite, finite)


def test_partial_sums_examples():
    b = S.partial_sums(S.SeriesSpec.geometric(0.5), 10).values
    assert b[10] == pytest.approx(2 - 2**-10, abs=1e-15)
    b = S.partial_sums(S.SeriesSpec.explicit([1, -1, 1, -1]), 3).values
    assert np.array_equal(b, [1, 0, 1, 0])
    b = S.partial_sums(S.SeriesSpec.geometric(1j), 3).values
    assert b[3] == 0


def test_partial_sum_differences_are_terms():
    s = S.SeriesSpec.weighted_geometric(0.3 - 0.2j, 2)
    b = S.partial_sums(s, 50).values
    assert np.allclose(np.diff(b), s.terms(50)[1:], rtol=0, atol=1e-13)


def test_explicit_list_is_zero_beyond_end_and_deterministic():
    s = S.SeriesSpec.explicit([1, 2, 3])
    assert np.array_equal(s.terms(6), [1, 2, 3, 0, 0, 0, 0])
    g = S.SeriesSpec.geometric(cmath.exp(0.3j))
    assert np.array_equal(g.terms(100), g.terms(100))


def test_custom_rule_failure_is_input_error():
    S.register_rule("broken", lambda j: 1 / 0)
    with pytest.raises(InputError):
        S.partial_sums(S.SeriesSpec.custom("broken"), 3)
    with pytest.raises(InputError):
        S.SeriesSpec.custom("no-such-rule")


def test_cesaro_means_examples():
    z = (-1.0) ** np.arange(41)
    zeta = S.cesaro_means(z).values
    n = np.arange(41)
    assert np.all(zeta[n % 2 == 1] == 0)
    assert np.allclose(zeta[n % 2 == 0], 1 / (n[n % 2 == 0] + 1), rtol=0, atol=1e-15)
    assert np.allclose(S.cesaro_means(np.full(10, 2 - 1j)).values, 2 - 1j)
    zeta = S.cesaro_means(1j ** np.arange(2001)).values
    assert np.all(np.abs(zeta) <= math.sqrt(2) / (np.arange(2001) + 1) + 1e-15)


def test_cesaro_sum_examples():
    r = S.cesaro_sum(S.SeriesSpec.geometric(-1), 10_000, tol=1e-3)
    assert r.estimate == pytest.approx(0.5, abs=1e-4)
    # beta_n - 2 ~ -2/(n+1), so stabilizing to 1e-6 takes n near 10^6
    r = S.cesaro_sum(S.SeriesSpec.geometric(0.5), 10**6)
    assert r.estimate == pytest.approx(2, abs=1e-5)
    r = S.cesaro_sum(S.SeriesSpec.weighted_geometric(-1, 1), 10_000, tol=1e-3)
    assert r.divergent and r.estimate is None
    assert r.diagnostics["necessary_condition"] is False
    assert r.diagnostics["term_growth_last"] == pytest.approx(1.0)


def test_cesaro_two_formulas_disagreement_raises(monkeypatch):
    s = S.SeriesSpec.geometric(-1)
    real = np.cumsum
    calls = {"k": 0}

    def skewed(x, *a, **kw):
        calls["k"] += 1
        out = real(x, *a, **kw)
        return out + 1.0 if calls["k"] == 2 else out

    monkeypatch.setattr(S.np, "cumsum", skewed)
    with pytest.raises(ConsistencyError):
        S.cesaro_sum(s, 100)


@pytest.mark.parametrize("n", [10_000])
@pytest.mark.parametrize("a", [-1, 1j, cmath.exp(2j * math.pi / 7)])
def test_cesaro_geometric_rate(a, n):
    r = S.cesaro_sum(S.SeriesSpec.geometric(a), n, tol=1e-2)
    beta = r.trace.values[-1]
    assert abs(beta - 1 / (1 - a)) <= 4 / ((n + 1) * abs(1 - a) ** 2)


def test_abel_examples():
    assert abs(S.abel_sum(S.SeriesSpec.geometric(-1)).estimate - 0.5) <= 1e-6
    assert abs(S.abel_sum(S.SeriesSpec.weighted_geometric(-1, 1)).estimate - 0.25) <= 1e-5
    r = S.abel_sum(S.SeriesSpec.geometric(0.5), r_grid=(0.999, 0.9999, 0.99999))
    assert abs(r.estimate - 2) <= 1e-9
    assert r.diagnostics["tail_bound"][-1] <= 1e-10


def test_abel_errors():
    with pytest.raises(DomainError):
        S.abel_sum(S.SeriesSpec.geometric(2))
    with pytest.raises(ResolutionError):
        S.abel_sum(S.SeriesSpec.geometric(-1), n_terms=100)
    with pytest.raises(DomainError):
        S.abel_sum(S.SeriesSpec.geometric(-1), r_grid=(0.5, 1.0))


def test_admissibility_examples():
    one = S.is_admissible(S.SeriesSpec.geometric(1))
    assert one.admissible and one.radius == pytest.approx(1, abs=0.02)
    two = S.is_admissible(S.SeriesSpec.geometric(2))
    assert two.classification == "not-admissible"
    assert two.radius == pytest.approx(0.5, rel=1e-6)
    assert S.is_admissible(S.SeriesSpec.weighted_geometric(1, 1)).admissible
    with pytest.raises(InputError):
        S.is_admissible(S.SeriesSpec.geometric(1), n_probe=8)


def test_root_test_radius_matches_oracle():
    # |a_j| = 3^-j (j+1)^2: radius 3
    r = S.is_admissible(S.SeriesSpec.weighted_geometric(1 / 3, 2), n_probe=512)
    assert r.radius == pytest.approx(3, rel=0.02)
    assert r.admissible


def test_cauchy_product_examples():
    c = S.cauchy_product(S.SeriesSpec.explicit([1, 1]), S.SeriesSpec.explicit([1, -1]), 2)
    assert np.array_equal(c.terms(2), [1, 0, -1])
    alpha = 0.7 - 0.3j
    g = S.SeriesSpec.geometric(alpha)
    c = S.cauchy_product(g, g, 32).terms(32)
    oracle = [sum(alpha**j * alpha ** (n - j) for j in range(n + 1)) for n in range(33)]
    assert np.allclose(c, oracle, rtol=1e-13, atol=0)
    assert np.allclose(c, (np.arange(33) + 1) * alpha ** np.arange(33), rtol=1e-13)


def test_cauchy_product_identity_and_mass():
    rng = np.random.default_rng(3)
    a = S.SeriesSpec.explicit(rng.normal(size=7))
    c = S.cauchy_product(a, S.SeriesSpec.explicit([1]), 10)
    assert np.array_equal(c.terms(10), a.terms(10))
    b = S.SeriesSpec.explicit(rng.normal(size=5))
    c = S.cauchy_product(a, b, 10)
    assert c.terms(10).sum() == pytest.approx(a.terms(6).sum() * b.terms(4).sum(), rel=1e-12)


def test_abel_multiplicative_on_geometric_pair():
    g = S.SeriesSpec.geometric(-1)
    A = S.abel_sum(g)
    n = A.diagnostics["n_terms"]
    C = S.abel_sum(S.cauchy_product(g, g, n), n_terms=n)
    assert abs(C.estimate - 0.25) <= 1e-5


def test_summation_by_parts_examples():
    assert S.summation_by_parts_residual(S.SeriesSpec.geometric(-1), 0.5, 20) < 1e-12
    s = S.SeriesSpec.weighted_geometric(1, 1)
    lhs = abs(np.sum(s.terms(100) * (0.9j) ** np.arange(101)))
    assert S.summation_by_parts_residual(s, 0.9j, 100) <= 1e-10 * max(lhs, 1)
    assert S.summation_by_parts_residual(S.SeriesSpec.explicit([3]), 0.2, 5) <= 4 * 2**-52 * 3
    with pytest.raises(DomainError):
        S.summation_by_parts_residual(s, 1.0, 5)


def test_json_round_trip():
    for s in (S.SeriesSpec.geometric(-1 + 0.5j), S.SeriesSpec.explicit([1, -1j, 2]),
              S.SeriesSpec.weighted_geometric(0.5, 3), S.SeriesSpec.custom("harmonic")):
        assert S.SeriesSpec.from_json(s.to_json()) == s
    g = S.SeriesSpec.from_json({"kind": "geometric", "a": {"re": -1, "im": 0}})
    assert g.a == -1


@settings(max_examples=60, deadline=None)
@given(complexes, complexes)
def test_modulus_properties(z, w):
    assert abs(z * w) == pytest.approx(abs(z) * abs(w), rel=1e-12, abs=1e-300)
    assert abs(z + w) <= abs(z) + abs(w) + 1e-12 * (abs(z) + abs(w))
    assert abs(z) ** 2 == pytest.approx(z.real**2 + z.imag**2, rel=1e-12, abs=1e-300)


lists = st.lists(finite, min_size=1, max_size=12)


@settings(max_examples=40, deadline=None)
@given(lists, lists, finite)
def test_linearity_over_lists(x, y, t):
    n = max(len(x), len(y))
    x, y = x + [0.0] * (n - len(x)), y + [0.0] * (n - len(y))
    a, b = S.SeriesSpec.explicit(x), S.SeriesSpec.explicit(y)
    ab = S.SeriesSpec.explicit([u + t * v for u, v in zip(x, y)])
    grid = (0.999, 0.9999, 0.99999)
    lhs = S.abel_sum(ab, r_grid=grid).estimate
    rhs = S.abel_sum(a, r_grid=grid).estimate + t * S.abel_sum(b, r_grid=grid).estimate
    scale = 1 + sum(map(abs, x)) + abs(t) * sum(map(abs, y))
    assert abs(lhs - rhs) <= 1e-10 * scale
    c = S.cesaro_sum(ab, 4000, tol=1e-2).trace.values[-1]
    ca = S.cesaro_sum(a, 4000, tol=1e-2).trace.values[-1]
    cb = S.cesaro_sum(b, 4000, tol=1e-2).trace.values[-1]
    assert abs(c - (ca + t * cb)) <= 1e-10 * scale


@settings(max_examples=30, deadline=None)
@given(lists)
def test_consistency_ladder_on_finite_lists(x):
    s = S.SeriesSpec.explicit(x)
    total = math.fsum(x)
    scale = 1 + sum(map(abs, x))
    assert abs(S.classical_sum(s, 64).estimate - total) <= 1e-12 * scale
    ces = S.cesaro_sum(s, 200_000, tol=1e-3)
    assert ces.estimate is not None
    assert abs(ces.estimate - total) <= 1e-3 * scale
    assert abs(S.abel_sum(s, r_grid=(0.999, 0.9999, 0.99999)).estimate - total) <= 1e-6 * scale


@pytest.mark.parametrize("a", [-1, 1j, cmath.exp(2j * math.pi / 7), cmath.exp(1j)])
def test_cesaro_implies_abel_same_sum(a):
    s = S.SeriesSpec.geometric(a)
    c = S.cesaro_sum(s, 100_000, tol=1e-3)
    assert c.estimate is not None
    assert abs(S.abel_sum(s).estimate - c.estimate) <= 1e-4


def test_necessary_condition_when_summable():
    for s in (S.SeriesSpec.geometric(-1), S.SeriesSpec.geometric(0.9j)):
        r = S.cesaro_sum(s, 20_000, tol=1e-3)
        assert r.estimate is not None and r.diagnostics["necessary_condition"]
