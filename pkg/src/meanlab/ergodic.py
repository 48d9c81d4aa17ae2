"""Measure-preserving systems small enough to compute with exactly.

Two models are provided.  A :class:`ShiftSystem` is the two-sided shift on
sequences over a finite alphabet with a product (Bernoulli) measure,
realized through cylinder functions that read finitely many coordinates
within ``-D .. D``.  A :class:`FiniteSystem` is a permutation of a finite
set with point weights constant on orbits.  In both, ``T f = f o phi``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DepthError, DomainError, InputError
from .maximal import lp_constant
from .report import Report

WEIGHT_TOL = 1e-12
MAX_STATES = 1 << 20


@dataclass(frozen=True)
class ShiftSystem:
    weights: tuple
    depth: int

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        if len(w) < 2:
            raise InputError("alphabet needs at least two symbols")
        if any(not x > 0 for x in w):
            raise InputError("symbol weights must be positive")
        if abs(math.fsum(w) - 1.0) > WEIGHT_TOL:
            raise InputError(f"symbol weights sum to {math.fsum(w)!r}, not 1")
        if int(self.depth) != self.depth or self.depth < 0:
            raise InputError("depth must be a nonnegative integer")

    @classmethod
    def bernoulli(cls, weights=(0.5, 0.5), depth: int = 12) -> "ShiftSystem":
        return cls(tuple(weights), depth)

    @property
    def alphabet(self) -> int:
        return len(self.weights)

    def sample(self, n_points: int, seed: int, span: tuple[int, int] | None = None) -> np.ndarray:
        """Random sequences on coordinates ``span`` (default ``-D .. D``), one per row."""
        lo, hi = (-self.depth, self.depth) if span is None else span
        rng = np.random.default_rng(seed)
        return rng.choice(self.alphabet, size=(n_points, hi - lo + 1), p=self.weights)

    def to_json(self) -> dict:
        return {"alphabet": self.alphabet, "weights": list(self.weights), "depth": self.depth}


@dataclass(frozen=True)
class CylinderFunction:
    """``f(x) = table[x_{c_1}, ..., x_{c_k}]`` for distinct coordinates ``c_i``."""

    coords: tuple
    table: np.ndarray

    def __post_init__(self):
        coords = tuple(int(c) for c in self.coords)
        table = np.asarray(self.table, dtype=complex)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "table", table)
        if len(set(coords)) != len(coords):
            raise InputError("cylinder coordinates must be distinct")
        if table.ndim != len(coords):
            raise InputError(f"table needs {len(coords)} axes, has {table.ndim}")
        if len(coords) and len(set(table.shape)) != 1:
            raise InputError("every table axis must have the alphabet size")

    @classmethod
    def constant(cls, value) -> "CylinderFunction":
        return cls((), np.asarray(value, dtype=complex))

    @classmethod
    def coordinate(cls, alphabet: int, coord: int = 0) -> "CylinderFunction":
        """The symbol at one coordinate, as a number."""
        return cls((coord,), np.arange(alphabet, dtype=float))

    def shifted(self, j: int = 1) -> "CylinderFunction":
        """``T^j f``: since ``(phi x)_i = x_{i+1}``, it reads coordinates shifted by j."""
        return CylinderFunction(tuple(c + j for c in self.coords), self.table)

    def span(self) -> tuple[int, int]:
        if not self.coords:
            return 0, 0
        return min(self.coords), max(self.coords)

    def evaluate(self, X: np.ndarray, origin: int, shift: int = 0) -> np.ndarray:
        """Values at sequences ``X`` (rows; column 0 is coordinate ``origin``) of ``T^shift f``."""
        X = np.atleast_2d(X)
        if not self.coords:
            return np.full(X.shape[0], complex(self.table))
        idx = tuple(X[:, c + shift - origin] for c in self.coords)
        return self.table[idx]

    def windows(self, X: np.ndarray, origin: int, shifts: np.ndarray) -> np.ndarray:
        """``(T^j f)(x)`` for every row x and each j in ``shifts``, shape (rows, len(shifts))."""
        X = np.atleast_2d(X)
        shifts = np.asarray(shifts)
        if not self.coords:
            return np.full((X.shape[0], len(shifts)), complex(self.table))
        idx = tuple(X[:, (c - origin) + shifts] for c in self.coords)
        return self.table[idx]


def cylinder_integral(sys: ShiftSystem, f: CylinderFunction, power: float | None = None) -> complex:
    """``int f dmu`` (or ``int |f|^power dmu``) summed exactly over symbol patterns."""
    vals = f.table if power is None else np.abs(f.table) ** power
    if not f.coords:
        return complex(vals)
    w = np.asarray(sys.weights)
    prob = np.ones(vals.shape)
    for axis in range(vals.ndim):
        shape = [1] * vals.ndim
        shape[axis] = len(w)
        prob = prob * w.reshape(shape)
    return complex(np.sum(prob * vals))


@dataclass(frozen=True)
class FiniteSystem:
    permutation: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pi = np.asarray(self.permutation, dtype=np.int64)
        m = len(pi)
        w = (np.full(m, 1.0 / m) if self.weights is None
             else np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "permutation", pi)
        object.__setattr__(self, "weights", w)
        if m < 1 or sorted(pi.tolist()) != list(range(m)):
            raise InputError("permutation must be a bijection of 0..m-1")
        if w.shape != (m,) or np.any(w <= 0):
            raise InputError("point weights must be positive, one per point")
        if not np.allclose(w[pi], w, rtol=1e-12, atol=0):
            raise InputError("weights are not preserved: need mu[pi(x)] = mu[x]")

    @classmethod
    def uniform(cls, permutation) -> "FiniteSystem":
        return cls(permutation, None)

    @classmethod
    def cycle(cls, m: int) -> "FiniteSystem":
        return cls(np.roll(np.arange(m), -1), None)

    @classmethod
    def rotation(cls, m: int, s: int) -> "FiniteSystem":
        """Rotation of the m-point circle grid by ``exp(2 pi i s / m)``."""
        return cls((np.arange(m) + s) % m, None)

    @classmethod
    def random(cls, m: int, rng) -> "FiniteSystem":
        """Random permutation with random weights constant on each cycle."""
        sys = cls.uniform(rng.permutation(m))
        w = np.empty(m)
        for cyc in sys.cycles():
            w[cyc] = rng.uniform(0.5, 2.0)
        return cls(sys.permutation, w)

    @property
    def size(self) -> int:
        return len(self.permutation)

    def cycles(self) -> list[np.ndarray]:
        seen = np.zeros(self.size, dtype=bool)
        out = []
        for x in range(self.size):
            if seen[x]:
                continue
            cyc = [x]
            seen[x] = True
            y = int(self.permutation[x])
            while y != x:
                cyc.append(y)
                seen[y] = True
                y = int(self.permutation[y])
            out.append(np.array(cyc))
        return out

    def power(self, j: int) -> np.ndarray:
        """The map ``pi^j`` as an index array (j may be negative)."""
        out = np.arange(self.size)
        for cyc in self.cycles():
            q = len(cyc)
            out[cyc] = np.roll(cyc, -(j % q))
        return out

    def apply_T(self, f, j: int = 1) -> np.ndarray:
        return np.asarray(f)[self.power(j)]

    def integral(self, f) -> complex:
        return complex(np.sum(self.weights * np.asarray(f)))

    def lp_norm(self, f, p: float) -> float:
        return float(np.sum(self.weights * np.abs(np.asarray(f)) ** p) ** (1.0 / p))

    def to_json(self) -> dict:
        return {"permutation": self.permutation.tolist(), "weights": self.weights.tolist()}


def system_from_json(data: dict):
    if "permutation" in data:
        return FiniteSystem(data["permutation"], data.get("weights"))
    if "weights" in data:
        if "alphabet" in data and data["alphabet"] != len(data["weights"]):
            raise InputError("alphabet size and weight count disagree")
        return ShiftSystem(tuple(data["weights"]), int(data.get("depth", 12)))
    raise InputError("system JSON needs 'permutation' or 'weights'")


# ---------------------------------------------------------------- averages

@dataclass
class BirkhoffResult:
    averages: np.ndarray
    report: Report
    points: np.ndarray | None = None


def birkhoff_average(sys, f, n: int, points=None, n_samples: int = 200, seed: int = 0,
                     eps: float = 0.05) -> BirkhoffResult:
    """``(1/(n+1)) sum_{j=0}^n (T^j f)(x)`` at each point.

    For a shift system the points are sequences on ``-D .. D`` (sampled
    with ``seed`` if not given); for a finite system, point indices
    (default: all).  The report compares with the space mean.
    """
    if n < 0:
        raise InputError("n must be nonnegative")
    rep = Report("birkhoff")
    if isinstance(sys, ShiftSystem):
        lo, hi = f.span()
        need = max(hi + n, -lo)
        if need > sys.depth:
            raise DepthError(f"averages to n={n} read coordinate {hi + n}; depth is {sys.depth}",
                             needed=need)
        X = sys.sample(n_samples, seed) if points is None else np.atleast_2d(points)
        vals = f.windows(X, -sys.depth, np.arange(n + 1))
        avg = vals.mean(axis=1)
        mean = cylinder_integral(sys, f)
        rep.values["seed"] = seed
    else:
        f = np.asarray(f, dtype=complex)
        idx = np.arange(sys.size) if points is None else np.asarray(points)
        X = idx
        acc = np.zeros(sys.size, dtype=complex)
        pi = np.arange(sys.size)
        for _ in range(n + 1):
            acc += f[pi]
            pi = sys.permutation[pi]
        avg = acc[idx] / (n + 1)
        mean = sys.integral(f) / float(np.sum(sys.weights))
    dev = np.abs(avg - mean)
    rep.values.update({
        "n": n, "space_mean": mean, "max_deviation": float(dev.max()),
        "median_deviation": float(np.median(dev)),
        "q95_deviation": float(np.quantile(dev, 0.95)),
        "fraction_within_eps": float(np.mean(dev <= eps)), "eps": eps,
    })
    rep.traces["points"] = {"point": np.arange(len(avg)), "average": avg, "deviation": dev}
    return BirkhoffResult(avg, rep, X)


@dataclass
class CoboundaryResult:
    invariant: np.ndarray
    potential: np.ndarray
    residual: float


def coboundary_decompose(sys: FiniteSystem, f) -> CoboundaryResult:
    """``f = a + (T b - b)`` with ``T a = a``.

    ``a`` is the orbit mean of f; along each cycle ``x, pi x, ...`` the
    potential is the running sum of ``f - a``, shifted to have mean zero on
    the cycle.  The residual is the weighted 2-norm of ``a + Tb - b - f``.
    """
    f = np.asarray(f, dtype=complex)
    if f.shape != (sys.size,):
        raise InputError("f needs one value per point")
    a = np.empty_like(f)
    b = np.empty_like(f)
    for cyc in sys.cycles():
        vals = f[cyc]
        mean = vals.mean()
        a[cyc] = mean
        pot = np.concatenate(([0.0], np.cumsum(vals - mean)[:-1]))
        b[cyc] = pot - pot.mean()
    resid = a + sys.apply_T(b) - b - f
    return CoboundaryResult(a, b, sys.lp_norm(resid, 2.0))


# ---------------------------------------------------------------- transference

def _bernoulli_states(sys: ShiftSystem, lo: int, hi: int):
    """All sequences on coordinates lo..hi with their probabilities."""
    k = hi - lo + 1
    count = sys.alphabet**k
    if count > MAX_STATES:
        raise InputError(f"exhaustive enumeration of {count} states exceeds {MAX_STATES}")
    X = np.array(list(itertools.product(range(sys.alphabet), repeat=k)), dtype=np.int64)
    X = X.reshape(count, k)
    prob = np.prod(np.asarray(sys.weights)[X], axis=1)
    return X, prob


@dataclass
class TransferenceResult:
    values: np.ndarray
    prob: np.ndarray
    report: Report


def _maximal_rows(rows: np.ndarray, n: int) -> np.ndarray:
    return _kernels.centered_window_max(np.abs(rows), n)


def transference_maximal(sys, f, n: int, lambdas=None, ps=(1.5, 2.0, 3.0)) -> TransferenceResult:
    """``A_n*(f)(x) = max_{0<=k,l<=n} (1/(k+l+1)) sum_{j=-k}^{l} |T^j f(x)|``.

    On a shift system the expectation is exact over all sequences on the
    coordinates the windows read.  The report asserts the weak-type and
    L^p inequalities, ``A_{n-1}* <= A_n*``, and ``A_n*(T f) = T(A_n* f)``.
    """
    if n < 1:
        raise InputError("n must be at least 1")
    shifts = np.arange(-n, n + 1)
    if isinstance(sys, ShiftSystem):
        lo, hi = f.span()
        lo, hi = lo - n, hi + n + 1  # one extra coordinate for the commutation check
        if max(-lo, hi) > sys.depth:
            raise DepthError(f"windows of size {n} need depth {max(-lo, hi)}", needed=max(-lo, hi))
        X, prob = _bernoulli_states(sys, lo, hi)
        rows = f.windows(X, lo, shifts)
        A = _maximal_rows(rows, n)
        # route 1: maximal function of T f; route 2: maximal function of f at phi x
        A_Tf = _maximal_rows(f.shifted(1).windows(X, lo, shifts), n)
        A_at_phi = _maximal_rows(f.windows(X[:, 1:], lo, shifts), n)
        l1 = cylinder_integral(sys, f, power=1.0).real
        lp = {p: cylinder_integral(sys, f, power=p).real for p in ps}
    else:
        fv = np.asarray(f, dtype=complex)
        maps = np.stack([sys.power(int(j)) for j in shifts], axis=1)
        rows = fv[maps]
        prob = sys.weights
        A = _maximal_rows(rows, n)
        A_Tf = _maximal_rows(sys.apply_T(fv)[maps], n)
        A_at_phi = sys.apply_T(A)
        l1 = float(np.sum(prob * np.abs(fv)))
        lp = {p: float(np.sum(prob * np.abs(fv) ** p)) for p in ps}
    # same rows and prefix sums, so shared windows give bit-identical averages
    A_prev = _maximal_rows(rows, n - 1)

    rep = Report(f"transference(n={n})")
    if lambdas is None:
        pos = A[A > 0]
        lambdas = np.unique(np.quantile(pos, np.linspace(0, 0.99, 20))) if len(pos) else []
    worst = 0.0
    for lam in np.asarray(lambdas, dtype=float):
        meas = float(np.sum(prob[A > lam]))
        if l1 > 0:
            worst = max(worst, meas * lam / l1)
        rep.check(f"lam={lam:.6g}: mu(A*>lam) <= (2/lam) int|f|", meas, 2 * l1 / lam,
                  tol=1e-12 * l1 / lam)
    for p in ps:
        lhs = float(np.sum(prob * A**p))
        C = lp_constant(p)
        rep.check(f"p={p:g}: int A*^p <= C_p int|f|^p", lhs, C * lp[p], tol=1e-12 * C * lp[p])
        rep.values[f"ratio_p{p:g}"] = lhs / lp[p] if lp[p] else 0.0
    rep.check("A_(n-1)* <= A_n*", float(np.max(A_prev - A, initial=0.0)), 0.0)
    rep.check("A_n*(T f) = T(A_n* f)", float(np.max(np.abs(A_Tf - A_at_phi), initial=0.0)), 0.0,
              rel="==")
    rep.values.update({"n": n, "states": len(prob), "worst_weak_ratio": worst, "int_abs_f": l1})
    return TransferenceResult(A, prob, rep)


# ---------------------------------------------------------------- tails

def power_tail_check(sys, f, p: float, n_max: int, n_samples: int = 50, seed: int = 0,
                     eps_grid=(0.1, 0.01, 0.001)) -> Report:
    """``sum_{n<=N} int |T^n f|^p / (n+1)^p`` against ``(sum (n+1)^-p) int |f|^p``,
    and pointwise decay of ``|T^n f(x)| / (n+1)`` along sampled orbits."""
    if not p > 1:
        raise DomainError("p must exceed 1")
    ns = np.arange(n_max + 1)
    rep = Report(f"power-tail(p={p:g})")
    if isinstance(sys, ShiftSystem):
        integrals = np.array([cylinder_integral(sys, f.shifted(int(j)), power=p).real
                              for j in ns])
        base = cylinder_integral(sys, f, power=p).real
        M = float(np.max(np.abs(f.table), initial=0.0)) if f.coords else abs(complex(f.table))
        lo, hi = f.span()
        if hi + n_max > sys.depth:
            raise DepthError(f"orbits to n={n_max} need depth {hi + n_max}", needed=hi + n_max)
        X = sys.sample(n_samples, seed)
        orbit = np.abs(f.windows(X, -sys.depth, ns))
        rep.values["seed"] = seed
    else:
        fv = np.asarray(f, dtype=complex)
        integrals, orbit_cols = [], []
        g = fv.copy()
        for _ in ns:
            integrals.append(float(np.sum(sys.weights * np.abs(g) ** p)))
            orbit_cols.append(np.abs(g))
            g = sys.apply_T(g)
        integrals = np.array(integrals)
        base = integrals[0]
        M = float(np.max(np.abs(fv)))
        orbit = np.stack(orbit_cols, axis=1)
    weights = (ns + 1.0) ** (-p)
    lhs = math.fsum((integrals * weights).tolist())
    rhs = math.fsum(weights.tolist()) * base
    rep.check("sum int|T^n f|^p/(n+1)^p = (sum (n+1)^-p) int|f|^p", abs(lhs - rhs), 0.0,
              tol=1e-12 * max(rhs, 1e-300))
    # the full series is zeta(p) int|f|^p; the remainder after N is at most (N+1)^(1-p)/(p-1)
    tail = base * (n_max + 1.0) ** (1 - p) / (p - 1)
    from scipy.special import zeta

    rep.check("full series - partial <= tail bound", zeta(p) * base - lhs, tail,
              tol=1e-12 * max(rhs, 1e-300))
    scaled = orbit / (ns + 1.0)
    rep.check("|T^n f(x)|/(n+1) <= sup|f|/(n+1)", float(np.max(scaled * (ns + 1.0) - M)), 0.0,
              tol=1e-12 * max(M, 1e-300))
    for eps in eps_grid:
        start = int(math.floor(M / eps))
        if start <= n_max:
            tail_max = float(np.max(scaled[:, start:], initial=0.0))
            rep.check(f"max_(n>={start}) |T^n f|/(n+1) <= {eps:g}", tail_max, eps)
    rep.values.update({"partial": lhs, "exact_partial": rhs, "zeta_total": zeta(p) * base,
                       "sup_f": M})
    rep.traces["tail"] = {"n": ns, "max_scaled": scaled.max(axis=0)}
    return rep


# ---------------------------------------------------------------- invariant measures

@dataclass
class MeasureFunctional:
    """``lambda(f) = sum_x weights[x] f(x)`` on a finite point set."""

    weights: np.ndarray
    nonnegative: bool = field(default=False)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.nonnegative and np.any(self.weights < 0):
            raise InputError("functional flagged nonnegative has a negative weight")

    @classmethod
    def point_mass(cls, m: int, x: int) -> "MeasureFunctional":
        w = np.zeros(m)
        w[x] = 1.0
        return cls(w, True)

    def __call__(self, f) -> float:
        return float(np.dot(self.weights, np.asarray(f, dtype=float)))

    def mass(self) -> float:
        """Dual norm against the sup norm: total variation."""
        return math.fsum(np.abs(self.weights).tolist())

    def pushforward(self, sys: FiniteSystem) -> "MeasureFunctional":
        """``T* lambda``, with ``(T* lambda)(f) = lambda(f o pi)``."""
        out = np.zeros_like(self.weights)
        out[sys.permutation] = self.weights
        return MeasureFunctional(out, self.nonnegative)


def krylov_bogolyubov(sys: FiniteSystem, start: MeasureFunctional, n: int
                      ) -> tuple[MeasureFunctional, float]:
    """``lambda_n = (1/(n+1)) sum_{j<=n} (T*)^j lambda`` and its defect ``||T* lambda_n - lambda_n||``.

    The sum is taken cycle by cycle with integer visit counts: a point at
    offset k along a cycle of length q is visited ``(n+1)//q`` or one more times.
    """
    if n < 0:
        raise InputError("n must be nonnegative")
    w = start.weights
    if w.shape != (sys.size,):
        raise InputError("functional and system sizes differ")
    out = np.zeros(sys.size)
    for cyc in sys.cycles():
        q = len(cyc)
        full, rem = divmod(n + 1, q)
        counts = np.full(q, full, dtype=np.int64)
        counts[:rem] += 1
        vals = w[cyc]
        acc = np.zeros(q)
        for k in np.nonzero(counts)[0]:
            acc += counts[k] * np.roll(vals, int(k))
        out[cyc] = acc / (n + 1)
    lam = MeasureFunctional(out, start.nonnegative)
    diff = lam.pushforward(sys).weights - lam.weights
    return lam, math.fsum(np.abs(diff).tolist())


def krylov_bogolyubov_report(sys: FiniteSystem, start: MeasureFunctional, ns) -> Report:
    rep = Report("krylov-bogolyubov")
    mass = start.mass()
    total = math.fsum(start.weights.tolist())
    defects = []
    for n in ns:
        lam, d = krylov_bogolyubov(sys, start, int(n))
        defects.append(d)
        bound = 2 * mass / (n + 1)
        rep.check(f"n={n}: defect <= 2 mass/(n+1)", d, bound, tol=1e-12 * bound)
        rep.check(f"n={n}: lambda_n(1) = lambda(1)", abs(math.fsum(lam.weights.tolist()) - total),
                  0.0, tol=1e-12 * max(mass, 1.0))
        if start.nonnegative:
            rep.check(f"n={n}: lambda_n >= 0", float(-lam.weights.min()), 0.0)
    rep.traces["defect"] = {"n": np.asarray(ns), "defect": defects}
    return rep


def weak_star_trace(sys: FiniteSystem, start: MeasureFunctional, ns, tests) -> dict:
    """``lambda_n(g)`` for each test function g and each n."""
    out = {"n": np.asarray(ns)}
    lams = [krylov_bogolyubov(sys, start, int(n))[0] for n in ns]
    for i, g in enumerate(tests):
        out[f"test_{i}"] = np.array([lam(g) for lam in lams])
    return out


def counting_measure_counterexample(n_max: int) -> Report:
    """Shifted delta on the integers with counting measure.

    The n-th average of ``T^j delta_0``, ``T f(x) = f(x+1)``, is the
    indicator of ``{-n, ..., 0}`` divided by n+1, so its L^1 mass stays 1
    while its sup norm is 1/(n+1).  Window ``[-n_max, n_max]`` holds every support.
    """
    W = n_max
    counts = np.zeros(2 * W + 1, dtype=np.int64)
    delta = np.zeros(2 * W + 1, dtype=np.int64)
    delta[W] = 1
    rep = Report("counting-measure")
    mass_err = sup_err = 0.0
    masses, sups = [], []
    for n in range(n_max + 1):
        # T^n delta_0 = delta_{-n}
        counts += np.roll(delta, -n)
        mass = int(counts.sum()) / (n + 1)
        sup = int(counts.max()) / (n + 1)
        masses.append(mass)
        sups.append(sup)
        mass_err = max(mass_err, abs(mass - 1.0))
        sup_err = max(sup_err, abs(sup - 1.0 / (n + 1)))
    rep.check("max_n |L1 mass - 1|", mass_err, 0.0, rel="==")
    rep.check("max_n |sup - 1/(n+1)|", sup_err, 0.0, rel="==")
    rep.traces["averages"] = {"n": np.arange(n_max + 1), "l1_mass": masses, "sup": sups}
    return rep
