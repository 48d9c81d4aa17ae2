import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meanlab import maximal as M
from meanlab.errors import DomainError, InputError
from meanlab.metric import UltrametricMetric, UltrametricSpace


def brute_maximal(values, lo, points, reach=40):
    """max over all windows [a, b] containing l, with a, b up to `reach` past the support."""
    w = np.abs(np.asarray(values, dtype=complex))
    f = {lo + i: x for i, x in enumerate(w)}
    lo_all = min(lo, min(points)) - reach
    hi_all = max(lo + len(w) - 1, max(points)) + reach
    out = []
    for l in points:
        best = 0.0
        for a in range(lo_all, l + 1):
            s = sum(f.get(j, 0.0) for j in range(a, l))
            for b in range(l, hi_all + 1):
                s += f.get(b, 0.0)
                best = max(best, s / (b - a + 1))
        out.append(best)
    return np.array(out)


def brute_level_count(values, lo, lam):
    # f* <= S/(d+1) at distance d from the support, so |l| range S/lam suffices
    S = np.abs(values).sum()
    R = int(S / lam) + 2
    pts = list(range(lo - R, lo + len(values) + R))
    prof = M.discrete_maximal(M.GridFunction(lo, values), pts[0], pts[-1]).values
    return int(np.count_nonzero(prof > lam))


grid_values = st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=10)


def test_delta_profile():
    prof = M.discrete_maximal(M.GridFunction(0, [1.0]), -30, 30)
    l = np.arange(-30, 31)
    assert np.allclose(prof.values, 1 / (np.abs(l) + 1), rtol=0, atol=1e-15)
    assert np.allclose(brute_maximal([1.0], 0, list(range(-6, 7)), reach=64),
                       prof.values[24:37], atol=1e-15)


def test_constant_profile():
    prof = M.discrete_maximal(M.GridFunction(3, np.full(6, 2.5)))
    assert np.allclose(prof.values, 2.5)


def test_profile_matches_brute_force_oracle():
    rng = np.random.default_rng(0)
    for _ in range(30):
        n = int(rng.integers(1, 12))
        v = rng.exponential(size=n) * (rng.uniform(size=n) < 0.7)
        lo = int(rng.integers(-5, 5))
        pts = list(range(lo - 8, lo + n + 8))
        prof = M.discrete_maximal(M.GridFunction(lo, v), pts[0], pts[-1])
        assert np.allclose(prof.values, brute_maximal(v, lo, pts), rtol=1e-13, atol=1e-15)


def test_witnesses_reproduce_values():
    rng = np.random.default_rng(1)
    for _ in range(30):
        n = int(rng.integers(1, 20))
        v = rng.normal(size=n) + 1j * rng.normal(size=n)
        f = M.GridFunction(-4, v)
        prof = M.discrete_maximal(f, -12, n + 4)
        w = dict(zip(f.points.tolist(), f.abs.tolist()))
        for l, val, a, b in zip(prof.points, prof.values, prof.witness_a, prof.witness_b):
            assert a <= l <= b
            avg = sum(w.get(j, 0.0) for j in range(a, b + 1)) / (b - a + 1)
            assert avg == pytest.approx(val, rel=1e-12)
            assert val >= abs(w.get(int(l), 0.0))


def test_sum_and_window_mean_bounds():
    rng = np.random.default_rng(2)
    for _ in range(30):
        v = rng.exponential(size=int(rng.integers(1, 32)))
        prof = M.discrete_maximal(M.GridFunction(0, v))
        assert prof.values.max() <= v.sum() + 1e-12
        a = int(rng.integers(0, len(v)))
        b = int(rng.integers(a, len(v)))
        assert prof.values[a: b + 1].max() >= v[a: b + 1].mean() - 1e-12


@pytest.mark.parametrize("k", [2, 3, 5, 10, 50])
def test_delta_level_sets(k):
    # strict '>' gives 1/(|l|+1) > 1/k  <=>  |l| <= k-2, i.e. 2k-3 points
    f = M.GridFunction(0, [1.0])
    assert M.superlevel_count(f, 1 / k) == 2 * k - 3
    assert M.weak_type_report(f, [1 / k]).passed


def test_indicator_level_set_empty_above_one():
    f = M.GridFunction(0, np.ones(7))
    assert M.superlevel_count(f, 1.0) == 0 and M.superlevel_count(f, 1.5) == 0


def test_level_counts_match_profile_oracle():
    rng = np.random.default_rng(3)
    for _ in range(40):
        v = rng.exponential(size=int(rng.integers(1, 10)))
        f = M.GridFunction(int(rng.integers(-3, 3)), v)
        for lam in v.sum() * rng.uniform(0.02, 1.0, size=4):
            assert M.superlevel_count(f, lam) == brute_level_count(v, f.lo, lam)


def test_weak_type_random():
    rng = np.random.default_rng(4)
    for _ in range(50):
        v = rng.exponential(size=int(rng.integers(1, 30)))
        f = M.GridFunction(0, v)
        lams = np.logspace(-3, 0, 10) * v.max()
        rep = M.weak_type_report(f, lams)
        assert rep.passed and rep.values["worst_ratio"] <= 2


def test_lp_examples():
    f = M.GridFunction(0, [1.0])
    rep = M.lp_bound_report(f, 2)
    assert rep.passed
    assert rep.values["lhs"] == pytest.approx(math.pi**2 / 3 - 1, rel=1e-12)
    assert rep.values["lhs"] < 1 + math.pi**2 / 3 and rep.values["rhs"] == 1
    assert M.lp_constant(2) == 16 and M.lp_constant(3) == 24
    c = M.GridFunction(0, np.full(20, 3.0))
    rep = M.lp_bound_report(c, 2)
    assert rep.passed and 1 <= rep.values["ratio"] <= 16
    prof = M.discrete_maximal(c)
    assert np.allclose(prof.values, 3.0)


def test_lp_domain_errors():
    with pytest.raises(DomainError):
        M.lp_constant(1.0)
    with pytest.raises(DomainError):
        M.maximal_power_sum(M.GridFunction(0, [1.0]), 0.5)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_exact_power_sum_vs_long_partial_sum(p):
    rng = np.random.default_rng(5)
    for _ in range(10):
        v = rng.exponential(size=int(rng.integers(1, 8)))
        f = M.GridFunction(0, v)
        D = 20000
        prof = M.discrete_maximal(f, -D, len(v) - 1 + D).values
        partial = math.fsum((prof**p).tolist())
        exact = M.maximal_power_sum(f, p)
        assert partial <= exact * (1 + 1e-12)
        assert exact <= partial + M.tail_bound(f.mass(), p, D) * (1 + 1e-12)


def test_power_sum_with_rounding_level_masses():
    # masses differing by ~1e-14 used to stall the exterior envelope walk
    v = 10.0 ** -np.arange(14, -1, -2)
    rep = M.lp_bound_report(M.GridFunction(0, v.astype(complex)), 1.5)
    assert rep.passed


def test_lp_random_p3():
    rng = np.random.default_rng(6)
    for _ in range(100):
        v = rng.normal(size=int(rng.integers(1, 30)))
        rep = M.lp_bound_report(M.GridFunction(0, v), 3.0, n_lambda=3)
        assert rep.passed and rep.values["ratio"] <= 24


def test_piecewise_constant_dominates_discrete():
    rng = np.random.default_rng(7)
    for _ in range(10):
        v = rng.exponential(size=int(rng.integers(1, 10)))
        f = M.GridFunction(0, v, "piecewise-constant-on-R")
        prof = M.discrete_maximal(f, -3, len(v) + 2)
        for l, val in zip(prof.points, prof.values):
            assert M.piecewise_constant_maximal(f, int(l)) >= val - 1e-12


def test_grid_function_csv_round_trip():
    f = M.GridFunction(-2, [1, 2j, -0.5])
    g = M.GridFunction.from_csv(f.to_csv())
    assert g.lo == f.lo and np.array_equal(g.values, f.values)
    with pytest.raises(InputError):
        M.GridFunction(0, [])


@settings(max_examples=40, deadline=None)
@given(grid_values, grid_values, st.floats(-4, 4, allow_nan=False))
def test_sublinear_and_homogeneous(x, y, t):
    n = max(len(x), len(y))
    x, y = np.array(x + [0.0] * (n - len(x))), np.array(y + [0.0] * (n - len(y)))
    pf = lambda v: M.discrete_maximal(M.GridFunction(0, v), -5, n + 4).values  # noqa: E731
    scale = 1 + np.abs(x).sum() + np.abs(y).sum()
    assert np.all(pf(x + y) <= pf(x) + pf(y) + 1e-12 * scale)
    assert np.allclose(pf(t * x), abs(t) * pf(x), rtol=1e-12, atol=1e-300)


@settings(max_examples=40, deadline=None)
@given(grid_values)
def test_sup_bound_and_nested_levels(x):
    v = np.array(x)
    f = M.GridFunction(0, v)
    prof = M.discrete_maximal(f, -10, len(v) + 9).values
    assert prof.max() <= np.abs(v).max() + 1e-12
    if np.any(v):
        lams = np.sort(np.abs(v).max() * np.array([0.05, 0.2, 0.5, 0.9]))
        counts = [M.superlevel_count(f, lam) for lam in lams]
        assert all(a >= b for a, b in zip(counts, counts[1:]))


# ---------------------------------------------------------------- coverings

def sweep_multiplicity(fam, grid):
    return max(sum(a < x < b for a, b in fam) for x in grid)


def test_covering_examples():
    fam = [(0, 2), (1, 3), (0, 3)]
    red = M.covering_reduce_multiplicity(fam)
    assert red in ([(0, 3)], [(0, 2), (1, 3)])
    assert M.union_segments(red) == [(0, 3)]
    disjoint = [(0, 1), (2, 3), (5, 8)]
    assert M.covering_reduce_multiplicity(disjoint) == disjoint


def test_covering_random_vs_fine_sweep():
    rng = np.random.default_rng(8)
    grid = np.arange(-1, 31, 0.05) + 0.025
    for _ in range(100):
        k = int(rng.integers(1, 40))
        a = rng.uniform(0, 25, size=k).round(1)
        fam = [(x, x + w) for x, w in zip(a, rng.uniform(0.1, 5, size=k).round(1))]
        red = M.covering_reduce_multiplicity(fam)
        assert set(red) <= set(fam)
        assert M.union_segments(red) == M.union_segments(fam)
        assert M.max_multiplicity(red) <= 2
        assert sweep_multiplicity(red, grid) <= 2
        inside = lambda x, F: any(a < x < b for a, b in F)  # noqa: E731
        assert all(inside(x, red) == inside(x, fam) for x in grid)


def test_vitali_examples():
    metric = M.EuclideanMetric(1)
    assert M.vitali_select([(0.0, 1.0)], metric).selected == [0]
    balls = [(0.0, 1.0), (1.5, 2.0)]
    res = M.vitali_select(balls, metric)
    assert res.selected == [1] and res.assignment[0] == 1
    assert M.vitali_report(balls, res, metric).passed


@pytest.mark.parametrize("kind", ["1d", "2d", "ultra"])
def test_vitali_random(kind):
    rng = np.random.default_rng(9)
    if kind == "ultra":
        space = UltrametricSpace(2, 0.5, 10)
        metric = UltrametricMetric(space)
    else:
        metric = M.EuclideanMetric(1 if kind == "1d" else 2)
    for t in range(40):
        k = int(rng.integers(1, 25))
        if kind == "ultra":
            balls = [(space.sample(1, rng)[0],
                      float(0.5 ** rng.integers(0, 8)) * rng.uniform(0.6, 1.0)) for _ in range(k)]
        else:
            dim = 1 if kind == "1d" else 2
            balls = [(rng.uniform(0, 10, size=dim), rng.uniform(0.1, 2)) for _ in range(k)]
        res = M.vitali_select(balls, metric)
        rep = M.vitali_report(balls, res, metric, seed=t)
        assert rep.passed
        sel = res.selected
        for i in range(len(sel)):
            for j in range(i + 1, len(sel)):
                (ci, ri), (cj, rj) = balls[sel[i]], balls[sel[j]]
                assert not metric.intersects(ci, ri, cj, rj)


# ---------------------------------------------------------------- product variant

def test_product_single_row_matches_weak_type():
    v = np.array([0.5, 2.0, 0.0, 1.0])
    lams = [0.1, 0.4, 1.0]
    profiles, rep = M.product_maximal(M.ProductGridFunction(0, [v], [1.0]), lams)
    one = M.weak_type_report(M.GridFunction(0, v), lams)
    assert rep.values["worst_weak_ratio"] == pytest.approx(one.values["worst_ratio"], rel=1e-15)
    assert np.array_equal(profiles[0].values, M.discrete_maximal(M.GridFunction(0, v)).values)


def test_product_identical_rows_half_weight():
    v = np.array([0.5, 2.0, 0.0, 1.0])
    lams = [0.1, 0.4, 1.0]
    _, one = M.product_maximal(M.ProductGridFunction(0, [v], [1.0]), lams)
    _, two = M.product_maximal(M.ProductGridFunction(0, [v, v], [0.5, 0.5]), lams)
    for key in ("worst_weak_ratio", "ratio_p1.5", "ratio_p2", "ratio_p3"):
        assert two.values[key] == pytest.approx(one.values[key], rel=1e-13)


def test_product_random_and_validation():
    rng = np.random.default_rng(10)
    for _ in range(10):
        rows = rng.exponential(size=(10, 12)) * (rng.uniform(size=(10, 12)) < 0.5)
        rows[:, 0] += 0.1
        _, rep = M.product_maximal(M.ProductGridFunction(-3, rows, rng.uniform(0.1, 1, 10)),
                                   np.logspace(-2, 0.5, 8))
        assert rep.passed
    with pytest.raises(InputError):
        M.ProductGridFunction(0, [[1.0]], [0.0])
