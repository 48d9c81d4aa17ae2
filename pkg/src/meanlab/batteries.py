"""Named experiment batteries.

Each battery takes a parameter dict (validated against its defaults) and
a seed, runs a family of randomized or exhaustive checks, and returns one
:class:`Report`.  The acceptance suite and the ``battery`` subcommand both
run these.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import ergodic, fourier, maximal, metric, operators, series
from .errors import InputError
from .report import Report, complex_from_json


@dataclass(frozen=True)
class Battery:
    name: str
    description: str
    run: Callable[[dict, int], Report]
    defaults: dict = field(default_factory=dict)
    csv: str = ""


BATTERIES: dict[str, Battery] = {}
ALIASES = {"weak-type": "maximal-weak-type", "cesaro-geometric": "series-cesaro-geometric"}


def battery(name, description, csv="", **defaults):
    def deco(fn):
        BATTERIES[name] = Battery(name, description, fn, defaults, csv)
        return fn
    return deco


def resolve(name: str) -> Battery:
    name = ALIASES.get(name, name)
    if name not in BATTERIES:
        raise InputError(f"unknown battery {name!r}; see 'battery list'")
    return BATTERIES[name]


def list_batteries(prefix: str = "") -> list[tuple[str, str]]:
    return [(n, BATTERIES[n].description) for n in sorted(BATTERIES) if n.startswith(prefix)]


def validate(b: Battery, params: dict | None) -> dict:
    """Defaults overlaid with ``params``; unknown or mistyped fields raise InputError."""
    out = dict(b.defaults)
    for key, val in (params or {}).items():
        if key not in b.defaults:
            raise InputError(f"battery {b.name!r} has no parameter {key!r}")
        ref = b.defaults[key]
        if isinstance(ref, bool):
            ok = isinstance(val, bool)
        elif isinstance(ref, int):
            ok = isinstance(val, int) and not isinstance(val, bool)
        elif isinstance(ref, float):
            ok = isinstance(val, (int, float)) and not isinstance(val, bool)
        elif isinstance(ref, (list, tuple)):
            ok = isinstance(val, (list, tuple))
        else:
            ok = True
        if not ok:
            raise InputError(f"parameter {key!r} of battery {b.name!r} must be like {ref!r}")
        out[key] = val
    return out


def run_battery(name: str, params: dict | None = None, seed: int = 0) -> Report:
    b = resolve(name)
    rep = b.run(validate(b, params), seed)
    rep.values["seed"] = seed
    return rep


def _scalar(v) -> complex:
    if isinstance(v, (list, dict)):
        return complex_from_json(v)
    if isinstance(v, str):
        return complex(v.replace(" ", ""))
    return complex(v)


# ---------------------------------------------------------------- series

@battery("series-cesaro-geometric",
         "Cesaro sums of geometric series: |beta_n - 1/(1-a)| <= 4/((n+1)|1-a|^2)",
         csv="m, beta_re, beta_im for the last a",
         a=[-1, [0, 1], "exp7"], n=10_000)
def _cesaro_geometric(p, seed):
    rep = Report("series-cesaro-geometric")
    n = p["n"]
    for raw in p["a"]:
        a = cmath.exp(2j * math.pi / 7) if raw == "exp7" else _scalar(raw)
        res = series.cesaro_sum(series.SeriesSpec.geometric(a), n, tol=1e-2)
        beta = res.trace.values[-1]
        target = 1 / (1 - a)
        bound = 4 / ((n + 1) * abs(1 - a) ** 2)
        rep.check(f"a={a:.6g}: |beta_n - 1/(1-a)| <= 4/((n+1)|1-a|^2)", abs(beta - target), bound)
        rep.values[f"estimate[{a:.6g}]"] = beta
        rep.traces["means"] = {"m": np.arange(n + 1), "beta": res.trace.values}
    return rep


@battery("series-abel-extrapolation",
         "Abel sums of geometric(-1), (j+1)(-1)^j and geometric(1/2)")
def _abel_extrapolation(p, seed):
    rep = Report("series-abel-extrapolation")
    g = series.abel_sum(series.SeriesSpec.geometric(-1))
    rep.check("geometric(-1): |estimate - 1/2|", abs(g.estimate - 0.5), 1e-6)
    w = series.abel_sum(series.SeriesSpec.weighted_geometric(-1, 1))
    rep.check("(j+1)(-1)^j: |estimate - 1/4|", abs(w.estimate - 0.25), 1e-5)
    h = series.abel_sum(series.SeriesSpec.geometric(0.5), r_grid=(0.999, 0.9999, 0.99999))
    rep.check("geometric(1/2): |estimate - 2|", abs(h.estimate - 2.0), 1e-9)
    rep.values.update({"geometric(-1)": g.estimate, "(j+1)(-1)^j": w.estimate,
                       "geometric(1/2)": h.estimate})
    return rep


@battery("series-abel-cauchy",
         "Abel sum of a Cauchy product equals the product of Abel sums",
         trials=100, max_len=25)
def _abel_cauchy(p, seed):
    rng = np.random.default_rng(seed)
    rep = Report("series-abel-cauchy")
    fine = (0.999, 0.9999, 0.99999)
    worst = 0.0
    for _ in range(p["trials"]):
        la, lb = rng.integers(1, p["max_len"] + 1, size=2)
        a = series.SeriesSpec.explicit(rng.normal(size=la) + 1j * rng.normal(size=la))
        b = series.SeriesSpec.explicit(rng.normal(size=lb))
        c = series.cauchy_product(a, b, int(la + lb - 2))
        A, B, C = (series.abel_sum(s, r_grid=fine).estimate for s in (a, b, c))
        worst = max(worst, abs(C - A * B))
    rep.check("random lists: max |Abel(c) - Abel(a)Abel(b)|", worst, 1e-5)
    g = series.SeriesSpec.geometric(-1)
    A = series.abel_sum(g)
    n = A.diagnostics["n_terms"]
    C = series.abel_sum(series.cauchy_product(g, g, n), n_terms=n)
    err = abs(C.estimate - A.estimate**2)
    rep.check("geometric(-1) pair: |Abel(c) - Abel(a)^2|", err, 1e-5)
    rep.values.update({"worst_random": worst, "geometric_pair_error": err})
    return rep


# ---------------------------------------------------------------- operators

@battery("spectral-neumann",
         "Neumann series inverses of random contractions and nilpotent matrices",
         trials=200, max_dim=8, max_norm=0.9)
def _neumann(p, seed):
    rng = np.random.default_rng(seed)
    rep = Report("spectral-neumann")
    worst_res = worst_tail = 0.0
    for _ in range(p["trials"]):
        d = int(rng.integers(1, p["max_dim"] + 1))
        a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        a *= rng.uniform(0.05, p["max_norm"]) / operators.operator_norm(a)
        res = operators.neumann_inverse(a)
        exact = np.linalg.inv(np.eye(d) - a)
        err = operators.operator_norm(exact - res.inverse)
        worst_res = max(worst_res, res.residual)
        # the bound covers the truncation; allow rounding in the reference inverse
        worst_tail = max(worst_tail, err - res.tail_bound - 1e-13 * operators.operator_norm(exact))
    rep.check("max ||(I-a)S_n - I||", worst_res, 1e-10)
    rep.check("max (||inverse - S_n|| - tail bound)", worst_tail, 0.0)
    finite_ok = 0
    for d in range(1, 9):
        a = np.triu(rng.normal(size=(d, d)), k=1)
        res = operators.neumann_inverse(a)
        finite_ok += int(res.n_terms <= d - 1 and res.tail_bound == 0.0 and res.residual <= 1e-10)
    rep.check("nilpotent inputs terminating by n = d-1", finite_ok, 8, rel="==")
    return rep


def _random_normal(d, rng):
    q, _ = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    lam = rng.normal(size=d) + 1j * rng.normal(size=d)
    return q @ np.diag(lam) @ q.conj().T, lam


@battery("spectral-radius",
         "Gelfand estimate against eigenvalue moduli; exact for normal matrices in the 2-norm",
         trials=100, max_dim=16, n_max=512, normal_trials=20)
def _spectral_radius(p, seed):
    rng = np.random.default_rng(seed)
    rep = Report("spectral-radius")
    tol = max(1e-2, 5 / p["n_max"])
    worst = 0.0
    for _ in range(p["trials"]):
        d = int(rng.integers(2, p["max_dim"] + 1))
        x = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / math.sqrt(2 * d)
        sr = operators.spectral_radius(x, n_max=p["n_max"])
        worst = max(worst, abs(sr.gelfand_estimate - sr.eigen_radius))
    rep.check(f"max |gelfand - eigen radius| <= {tol:g}", worst, tol)
    worst_normal = 0.0
    for _ in range(p["normal_trials"]):
        d = int(rng.integers(2, 9))
        x, lam = _random_normal(d, rng)
        sr = operators.spectral_radius(x, n_max=64, pairing=(2, 2))
        rho = float(np.max(np.abs(lam)))
        worst_normal = max(worst_normal, float(np.max(np.abs(sr.gelfand_trace - rho))) / rho)
    rep.check("normal matrices: max_n | ||x^n||^(1/n) - rho | / rho", worst_normal, 0.0,
              rel="==", tol=1e-9)
    rep.values.update({"worst": worst, "worst_normal": worst_normal})
    return rep


def _random_unitary_avoiding_one(d, rng, gap=0.2):
    q, _ = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    theta = rng.uniform(gap, 2 * math.pi - gap, size=d)
    return q @ np.diag(np.exp(1j * theta)) @ q.conj().T


@battery("spectral-operator-average",
         "||A_n|| <= 2||(I-x)^-1||/(n+1) for unitary x without eigenvalue 1",
         trials=50, max_dim=6, n_max=1000)
def _operator_average(p, seed):
    rng = np.random.default_rng(seed)
    rep = Report("spectral-operator-average")
    ratio = 0.0
    burn = []
    failures = 0
    for _ in range(p["trials"]):
        d = int(rng.integers(1, p["max_dim"] + 1))
        x = _random_unitary_avoiding_one(d, rng)
        r = operators.operator_average_report(x, p["n_max"])
        ratio = max(ratio, r.values["worst_ratio"])
        failures += len(r.failures)
        burn.append(r.values["burn_in"])
    rep.check("max_n ||A_n||(n+1)/(2||(I-x)^-1||)", ratio, 1.0, tol=1e-12)
    rep.check("failed checks (envelope, block monotonicity, ||x|| = 1)", failures, 0, rel="==")
    rep.values.update({"worst_ratio": ratio, "burn_in_max": max(b or 0 for b in burn)})
    return rep


@battery("spectral-mean-ergodic",
         "Averages of cyclic permutation unitaries converge to the orbit mean",
         max_size=12, ns=[100, 1000, 10_000])
def _mean_ergodic(p, seed):
    rng = np.random.default_rng(seed)
    rep = Report("spectral-mean-ergodic")
    worst = 0.0
    for size in range(1, p["max_size"] + 1):
        U = np.roll(np.eye(size), 1, axis=0)
        v = rng.normal(size=size) + 1j * rng.normal(size=size)
        mean = np.full(size, v.mean())
        for n in p["ns"]:
            res = operators.mean_ergodic_projection(U, v, n)
            err = float(np.linalg.norm(res.average - mean))
            bound = 2 * np.linalg.norm(v) * size / (n + 1)
            worst = max(worst, err / bound)
            rep.check(f"size={size}, n={n}: ||avg - orbit mean|| <= 2||v|| size/(n+1)",
                      err, bound)
            rep.check(f"size={size}, n={n}: predicted limit = orbit mean",
                      float(np.linalg.norm(res.predicted - mean)), 0.0, tol=1e-10)
    rep.values["worst_ratio"] = worst
    return rep


# ---------------------------------------------------------------- maximal

def random_grid_function(rng, max_len=64) -> maximal.GridFunction:
    """Mixed family: sparse, heavy-tailed, smooth bumps, complex, and single spikes."""
    n = int(rng.integers(1, max_len + 1))
    kind = rng.integers(0, 5)
    if kind == 0:
        v = rng.uniform(0, 1, size=n) * (rng.uniform(size=n) < 0.3)
    elif kind == 1:
        v = rng.exponential(size=n) ** 3
    elif kind == 2:
        v = np.exp(-((np.arange(n) - rng.uniform(0, n)) ** 2) / (2 * max(1.0, n / 8) ** 2))
    elif kind == 3:
        v = rng.normal(size=n) + 1j * rng.normal(size=n)
    else:
        v = np.zeros(n)
        v[rng.integers(0, n)] = rng.uniform(0.5, 2)
    if not np.any(v):
        v[0] = 1.0
    return maximal.GridFunction(int(rng.integers(-20, 20)), v)


def _lambda_grid(f: maximal.GridFunction, k: int) -> np.ndarray:
    top = float(discrete_max(f))
    return top * np.logspace(-3, math.log10(0.999), k)


def discrete_max(f):
    return maximal.discrete_maximal(f).values.max()


def _bernoulli_transference(rng, n_values, ps, lambdas_per=20):
    """Transference reports for random cylinder functions on Bernoulli(1/2,1/2)."""
    sys = ergodic.ShiftSystem.bernoulli((0.5, 0.5), depth=12)
    out = []
    for n in n_values:
        k = 1 if n >= 7 else 2
        table = rng.exponential(size=(2,) * k) ** 2
        f = ergodic.CylinderFunction(tuple(range(k)), table)
        out.append(ergodic.transference_maximal(sys, f, n, ps=ps))
    return out


@battery("maximal-weak-type",
         "Weak-type bound |{f* > lam}| <= (2/lam) sum|f| on random grid functions and "
         "the Bernoulli transference variant",
         csv="lambda, level_set_size, bound (worst input)",
         trials=500, n_lambda=20, max_len=64, transference_n=[1, 2, 4, 6, 8])
def _weak_type(p, seed):
    rng = np.random.default_rng(seed)
    rep = Report("maximal-weak-type")
    worst, worst_rep = 0.0, None
    failures = 0
    for _ in range(p["trials"]):
        f = random_grid_function(rng, p["max_len"])
        r = maximal.weak_type_report(f, _lambda_grid(f, p["n_lambda"]))
        failures += len(r.failures)
        if r.values["worst_ratio"] >= worst:
            worst, worst_rep = r.values["worst_ratio"], r
    rep.check("grid functions: worst |{f*>lam}| lam / sum|f|", worst, 2.0)
    rep.check("grid functions: failed checks", failures, 0, rel="==")
    tw = 0.0
    for r in _bernoulli_transference(rng, p["transference_n"], ps=()):
        tw = max(tw, r.report.values["worst_weak_ratio"])
        rep.extend(r.report, prefix=f"transference n={r.report.values['n']}: ")
    rep.check("transference: worst mu(A*>lam) lam / int|f|", tw, 2.0)
    rep.values.update({"worst_ratio": worst, "worst_transference_ratio": tw})
    if worst_rep is not None:
        rep.traces["levels"] = worst_rep.traces["levels"]
    return rep


@battery("maximal-lp",
         "L^p bound sum f*^p <= 4p 2^(p-1)/(p-1) sum|f|^p, p in {1.5, 2, 3}",
         trials=500, ps=[1.5, 2.0, 3.0], max_len=64, transference_n=[1, 2, 4, 6, 8])
def _lp(p, seed):
    rng = np.random.default_rng(seed)
    rep = Report("maximal-lp")
    fams = [random_grid_function(rng, p["max_len"]) for _ in range(p["trials"])]
    fams.append(maximal.GridFunction(0, [1.0]))
    for q in p["ps"]:
        C = maximal.lp_constant(q)
        worst, failures = 0.0, 0
        for f in fams:
            r = maximal.lp_bound_report(f, q, n_lambda=4)
            failures += len(r.failures)
            worst = max(worst, r.values["ratio"])
        rep.check(f"p={q:g}: worst sum f*^p / sum|f|^p <= {C:.6g}", worst, C)
        rep.check(f"p={q:g}: failed checks (tail, truncation chain)", failures, 0, rel="==")
        rep.check(f"p={q:g}: worst ratio exceeds 1 (non-vacuous)", worst, 1.0, rel=">=")
        rep.values[f"worst_ratio_p{q:g}"] = worst
    for r in _bernoulli_transference(rng, p["transference_n"], ps=tuple(p["ps"])):
        rep.extend(r.report, prefix=f"transference n={r.report.values['n']}: ")
    return rep


@battery("maximal-covering",
         "Interval multiplicity reduction and Vitali selection (1-D, 2-D, ultrametric)",
         trials=200, max_intervals=50, max_balls=30)
def _covering(p, seed):
    rng = np.random.default_rng(seed)
    rep = Report("maximal-covering")
    mult = bad_union = 0
    for _ in range(p["trials"]):
        k = int(rng.integers(1, p["max_intervals"] + 1))
        a = rng.uniform(0, 20, size=k).round(1)
        fam = [(x, x + w) for x, w in zip(a, rng.uniform(0.1, 5, size=k).round(1))]
        red = maximal.covering_reduce_multiplicity(fam)
        mult = max(mult, maximal.max_multiplicity(red))
        bad_union += int(maximal.union_segments(red) != maximal.union_segments(fam))
    rep.check("intervals: max multiplicity after reduction", mult, 2)
    rep.check("intervals: families whose union changed", bad_union, 0, rel="==")
    space = metric.UltrametricSpace(2, 0.5, 12)
    handles = {
        "1-D": (maximal.EuclideanMetric(1), lambda: rng.uniform(0, 10, size=1)),
        "2-D": (maximal.EuclideanMetric(2), lambda: rng.uniform(0, 10, size=2)),
        "ultrametric": (metric.UltrametricMetric(space), lambda: space.sample(1, rng)[0]),
    }
    for label, (handle, center) in handles.items():
        fails = 0
        for t in range(p["trials"]):
            k = int(rng.integers(1, p["max_balls"] + 1))
            if label == "ultrametric":
                radii = 0.5 ** rng.uniform(0, 8, size=k)
            else:
                radii = rng.uniform(0.1, 2.0, size=k)
            balls = [(center(), float(r)) for r in radii]
            res = maximal.vitali_select(balls, handle)
            fails += len(maximal.vitali_report(balls, res, handle, samples=4,
                                               seed=seed + t).failures)
        rep.check(f"vitali {label}: families failing disjointness or 3B containment",
                  fails, 0, rel="==")
    return rep


@battery("maximal-product",
         "Row-wise maximal functions on weighted product instances",
         trials=50, rows=10, n_lambda=10)
def _product(p, seed):
    rng = np.random.default_rng(seed)
    rep = Report("maximal-product")
    fails = 0
    for _ in range(p["trials"]):
        width = int(rng.integers(1, 40))
        F = maximal.ProductGridFunction(0, rng.exponential(size=(p["rows"], width)),
                                        rng.uniform(0.1, 1, size=p["rows"]))
        top = max(discrete_max(F.row(i)) for i in range(p["rows"]))
        _, r = maximal.product_maximal(F, top * np.logspace(-3, -0.001, p["n_lambda"]))
        fails += len(r.failures)
    rep.check("instances failing a weighted inequality", fails, 0, rel="==")
    return rep


# ---------------------------------------------------------------- fourier

@battery("fourier-fejer",
         "Fejer means of |sin theta| converge uniformly; Fejer mean of z is n z/(n+1)",
         csv="param, sup_error", m=2048, ns=[16, 256])
def _fejer(p, seed):
    rep = Report("fourier-fejer")
    f = fourier.SampledCircleFunction.from_theta(lambda t: np.abs(np.sin(t)), p["m"])
    err = fourier.summation_error_report(f, "fejer", p["ns"])
    e = err.traces["sup_error"]["sup_error"]
    rep.check(f"sup error at n={p['ns'][-1]} <= 0.02", e[-1], 0.02)
    rep.check(f"sup error at n={p['ns'][-1]} <= sup error at n={p['ns'][0]}", e[-1], e[0])
    z = fourier.SampledCircleFunction.from_z(lambda z: z, p["m"])
    g = fourier.fejer_mean(z, 9)
    rep.check("n=9: sup |fejer(z) - (9/10) z|", float(np.max(np.abs(g.values - 0.9 * z.values))),
              1e-12)
    rep.traces.update(err.traces)
    rep.values["sup_error"] = dict(zip(map(str, p["ns"]), e))
    return rep


# ---------------------------------------------------------------- ergodic

@battery("ergodic-krylov-bogolyubov",
         "Averaged pushforwards on random finite systems: defect <= 2/(n+1), exact invariance "
         "on periodic starts", csv="n, defect (last system)",
         trials=100, max_size=40, ns=[0, 1, 2, 5, 10, 50, 100, 1000])
def _kb(p, seed):
    rng = np.random.default_rng(seed)
    rep = Report("ergodic-krylov-bogolyubov")
    worst, fails = 0.0, 0
    for _ in range(p["trials"]):
        m = int(rng.integers(1, p["max_size"] + 1))
        sys = ergodic.FiniteSystem.random(m, rng)
        w = rng.exponential(size=m) * (rng.uniform(size=m) < 0.5)
        if not w.any():
            w[0] = 1.0
        start = ergodic.MeasureFunctional(w / w.sum(), True)
        r = ergodic.krylov_bogolyubov_report(sys, start, p["ns"])
        fails += len(r.failures)
        d = np.asarray(r.traces["defect"]["defect"]) * (np.asarray(p["ns"]) + 1) / 2
        worst = max(worst, float(d.max()))
        rep.traces["defect"] = r.traces["defect"]
    rep.check("max defect (n+1)/2", worst, 1.0, tol=1e-12)
    rep.check("failed checks (mass, positivity, bound)", fails, 0, rel="==")
    periodic = 0
    total = 0
    for _ in range(p["trials"]):
        m = int(rng.integers(1, p["max_size"] + 1))
        sys = ergodic.FiniteSystem.random(m, rng)
        x = int(rng.integers(0, m))
        q = next(len(c) for c in sys.cycles() if x in c)
        n = q * int(rng.integers(1, 6)) - 1
        lam, d = ergodic.krylov_bogolyubov(sys, ergodic.MeasureFunctional.point_mass(m, x), n)
        cyc = next(c for c in sys.cycles() if x in c)
        uniform = np.all(lam.weights[cyc] == lam.weights[cyc][0])
        periodic += int(d == 0.0 and uniform)
        total += 1
    rep.check("periodic starts with exact invariance", periodic, total, rel="==")
    return rep


@battery("ergodic-counting-measure",
         "Shifted delta with counting measure: averages keep L1 mass 1, sup 1/(n+1)",
         csv="n, l1_mass, sup", n_max=1000)
def _counting(p, seed):
    return ergodic.counting_measure_counterexample(p["n_max"])


@battery("ergodic-transference",
         "Transference maximal inequalities on Bernoulli(1/2,1/2) by exhaustive enumeration",
         ns=[1, 2, 3, 4, 5, 6, 7, 8])
def _transference(p, seed):
    rng = np.random.default_rng(seed)
    rep = Report("ergodic-transference")
    for r in _bernoulli_transference(rng, p["ns"], ps=(1.5, 2.0, 3.0)):
        rep.extend(r.report, prefix=f"n={r.report.values['n']}: ")
    return rep


@battery("ergodic-birkhoff",
         "Birkhoff averages of the coordinate-0 symbol on Bernoulli(1/2,1/2)",
         csv="point, average, deviation", n=10_000, samples=200, eps=0.05)
def _birkhoff(p, seed):
    sys = ergodic.ShiftSystem.bernoulli((0.5, 0.5), depth=p["n"])
    f = ergodic.CylinderFunction.coordinate(2, 0)
    res = ergodic.birkhoff_average(sys, f, p["n"], n_samples=p["samples"], seed=seed,
                                   eps=p["eps"])
    rep = res.report
    rep.check(f"fraction within {p['eps']:g} of the mean", res.report.values["fraction_within_eps"],
              0.95, rel=">=")
    return rep


@battery("ergodic-coboundary",
         "Invariant plus coboundary decomposition on random permutations",
         trials=100, max_size=100)
def _coboundary(p, seed):
    rng = np.random.default_rng(seed)
    rep = Report("ergodic-coboundary")
    worst = 0.0
    for _ in range(p["trials"]):
        m = int(rng.integers(1, p["max_size"] + 1))
        sys = ergodic.FiniteSystem.random(m, rng)
        res = ergodic.coboundary_decompose(sys, rng.normal(size=m))
        worst = max(worst, res.residual)
    rep.check("max ||a + (Tb - b) - f||_2", worst, 1e-10)
    return rep


@battery("ergodic-power-tail",
         "sum int|T^n f|^p/(n+1)^p against the zeta series on a Bernoulli system",
         p=2.0, n_max=1000)
def _power_tail(p, seed):
    rng = np.random.default_rng(seed)
    sys = ergodic.ShiftSystem.bernoulli((0.5, 0.5), depth=p["n_max"] + 2)
    f = ergodic.CylinderFunction((0, 1), rng.normal(size=(2, 2)))
    return ergodic.power_tail_check(sys, f, p["p"], p["n_max"], seed=seed)


# ---------------------------------------------------------------- metric

@battery("metric-dimension",
         "Box dimension of the binary ultrametric space, before and after snowflaking",
         csv="log_inv_r, log_N", alphabet=2, rho=0.5, depth_lo=8, depth_hi=16, a=0.5)
def _dimension(p, seed):
    space = metric.UltrametricSpace(p["alphabet"], p["rho"], p["depth_hi"])
    base = math.log(p["alphabet"]) / math.log(1 / p["rho"])
    depths = range(p["depth_lo"], p["depth_hi"] + 1)
    e1 = metric.box_dimension(space, 1.0, depths)
    ea = metric.box_dimension(space, p["a"], depths)
    rep = Report("metric-dimension")
    rep.check(f"|estimate - {base:g}| (a=1)", abs(e1.slope - base), 0.05)
    rep.check(f"|estimate - {base / p['a']:g}| (a={p['a']:g})", abs(ea.slope - base / p["a"]), 0.10)
    rep.values.update({"estimate": e1.slope, "ci": e1.ci, "estimate_snowflake": ea.slope,
                       "ci_snowflake": ea.ci, "estimator": e1.estimator})
    rep.traces["scales"] = e1.trace()
    return rep


@battery("metric-ultrametric",
         "Ball trichotomy, doubling constants, snowflake checks on ultrametric spaces",
         trials=2000, depth=8)
def _ultrametric(p, seed):
    rep = Report("metric-ultrametric")
    space = metric.UltrametricSpace(2, 0.5, p["depth"])
    rep.extend(metric.ball_trichotomy_check(space, p["trials"], seed), "trichotomy: ")
    rep.extend(metric.doubling_constant(space, "space", seed=seed), "doubling space: ")
    rep.extend(metric.doubling_constant(space, "measure", seed=seed), "doubling measure: ")
    for a in (0.3, 0.5, 2.0):
        rep.extend(metric.snowflake_check(space, a, trials=p["trials"] // 4, seed=seed),
                   f"snowflake a={a:g}: ")
    rng = np.random.default_rng(seed)
    for a in (0.3, 0.5, 0.9):
        x, y = rng.exponential(size=(2, 10_000))
        rep.extend(metric.snowflake_scalar_check(x, y, a), f"scalar a={a:g}: ")
    rep.extend(metric.totally_bounded_check(space), "")
    return rep
