"""Ultrametric sequence spaces.

Points are strings of length D over an alphabet of size ``|A|``, with
``d(x, y) = rho^n`` where n counts the initial positions on which x and y
agree.  Every open ball is a cylinder (all strings sharing a prefix), so
ball relations, covering counts and measures reduce to prefix arithmetic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import DomainError, InputError
from .report import Report

MAX_ENUMERATE = 1 << 20


@dataclass(frozen=True)
class UltrametricSpace:
    alphabet: int
    rho: float
    depth: int
    weights: tuple | None = None

    def __post_init__(self):
        if int(self.alphabet) != self.alphabet or self.alphabet < 2:
            raise InputError("alphabet needs at least two symbols")
        if not 0 < self.rho < 1:
            raise InputError("scale rho must lie in (0, 1)")
        if int(self.depth) != self.depth or self.depth < 1:
            raise InputError("depth must be a positive integer")
        w = (tuple([1.0 / self.alphabet] * self.alphabet) if self.weights is None
             else tuple(float(x) for x in self.weights))
        if len(w) != self.alphabet or any(not x > 0 for x in w):
            raise InputError("need one positive weight per symbol")
        if abs(math.fsum(w) - 1.0) > 1e-12:
            raise InputError("symbol weights must sum to 1")
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return self.alphabet**self.depth

    def points(self) -> np.ndarray:
        if self.size > MAX_ENUMERATE:
            raise InputError(f"space has {self.size} points; too many to enumerate")
        # row i spells i in base |A|, most significant symbol first
        powers = self.alphabet ** np.arange(self.depth - 1, -1, -1, dtype=np.int64)
        return (np.arange(self.size, dtype=np.int64)[:, None] // powers) % self.alphabet

    def sample(self, n: int, rng) -> np.ndarray:
        return rng.choice(self.alphabet, size=(n, self.depth), p=self.weights)

    def ball_depth(self, r: float) -> int:
        """Least k with ``rho^k < r``, capped at D: B(x, r) fixes the first k symbols."""
        if not r > 0:
            raise InputError("radius must be positive")
        k, s = 0, 1.0
        while not s < r and k < self.depth:
            k += 1
            s *= self.rho
        return k

    def ball(self, x, r: float) -> tuple:
        """The open ball as its cylinder prefix."""
        return tuple(int(v) for v in np.asarray(x)[: self.ball_depth(r)])

    def cylinder_measure(self, prefix) -> float:
        return math.prod(self.weights[s] for s in prefix)

    def to_json(self) -> dict:
        return {"alphabet": self.alphabet, "rho": self.rho, "depth": self.depth,
                "weights": list(self.weights)}

    @classmethod
    def from_json(cls, data: dict) -> "UltrametricSpace":
        w = data.get("weights")
        A = int(data.get("alphabet", len(w) if w else 2))
        return cls(A, float(data.get("rho", 0.5)), int(data.get("depth", 12)),
                   tuple(w) if w else None)


def agreement(x, y) -> int:
    """Number of initial positions on which x and y agree."""
    x, y = np.asarray(x), np.asarray(y)
    if x.shape != y.shape:
        raise InputError("strings must have equal length")
    diff = np.nonzero(x != y)[0]
    return len(x) if len(diff) == 0 else int(diff[0])


def ultrametric_distance(x, y, rho: float, a: float = 1.0) -> float:
    """``rho^n`` (to the power a), or 0 for identical strings."""
    n = agreement(x, y)
    if n == len(np.asarray(x)):
        return 0.0
    return (rho**n) ** a


def _agreements(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Agreement counts of every row of X with y."""
    neq = X != np.asarray(y)[None, :]
    first = np.argmax(neq, axis=1)
    return np.where(neq.any(axis=1), first, X.shape[1])


def _distances(X, y, rho, a=1.0) -> np.ndarray:
    n = _agreements(X, y)
    # scalar powers, so values match ultrametric_distance bit for bit
    table = np.array([(float(rho) ** k) ** a for k in range(X.shape[1])] + [0.0])
    return table[n]


def _prefix_contains(outer: tuple, inner: tuple) -> bool:
    """Cylinder ``inner`` lies inside cylinder ``outer``."""
    return len(outer) <= len(inner) and inner[: len(outer)] == outer


class UltrametricMetric:
    """Metric handle for covering selections on an ultrametric space (optionally snowflaked)."""

    def __init__(self, space: UltrametricSpace, a: float = 1.0):
        if not a > 0:
            raise DomainError("snowflake exponent must be positive")
        self.space = space
        self.a = a

    def distance(self, x, y) -> float:
        return ultrametric_distance(x, y, self.space.rho, self.a)

    def intersects(self, c1, r1, c2, r2) -> bool:
        # any common point z gives d(c1,c2) <= max(d(c1,z), d(z,c2)) < max(r1,r2),
        # and conversely the center of the smaller ball lies in the larger one
        return self.distance(c1, c2) < max(r1, r2)

    def sample_in_ball(self, c, r, rng) -> np.ndarray:
        k = self.space.ball_depth(r ** (1.0 / self.a))
        z = self.space.sample(1, rng)[0]
        z[:k] = np.asarray(c)[:k]
        return z


def ball_trichotomy_check(space: UltrametricSpace, trials: int = 10_000, seed: int = 0) -> Report:
    """For random ``(x, r, y, t)``, the balls are nested or disjoint.

    Each ball is taken both as its cylinder and by brute-force distances
    over all points; the two must agree exactly.
    """
    rng = np.random.default_rng(seed)
    P = space.points()
    bad_relation = bad_cylinder = 0
    counts = {"nested": 0, "disjoint": 0}

    def radius():
        if rng.random() < 0.5:
            return float(space.rho ** rng.integers(0, space.depth))
        return float(rng.uniform(space.rho**space.depth, 1.5))

    for _ in range(trials):
        i, j = rng.integers(0, len(P), size=2)
        r, t = radius(), radius()
        B1 = _distances(P, P[i], space.rho) < r
        B2 = _distances(P, P[j], space.rho) < t
        for c, B in ((space.ball(P[i], r), B1), (space.ball(P[j], t), B2)):
            members = np.all(P[:, : len(c)] == np.array(c, dtype=np.int64), axis=1)
            bad_cylinder += int(not np.array_equal(members, B))
        inter = np.any(B1 & B2)
        if not inter:
            counts["disjoint"] += 1
        elif np.all(B1 <= B2) or np.all(B2 <= B1):
            counts["nested"] += 1
        else:
            bad_relation += 1
    rep = Report("ball-trichotomy")
    rep.check("configurations neither nested nor disjoint", bad_relation, 0, rel="==")
    rep.check("balls differing from their cylinder", bad_cylinder, 0, rel="==")
    rep.values.update({"trials": trials, "seed": seed, **counts})
    return rep


def doubling_constant(space: UltrametricSpace, kind: str = "space", samples: int = 1000,
                      seed: int = 0) -> Report:
    """Largest observed covering count (``kind='space'``) or ``mu(2B)/mu(B)`` (``'measure'``).

    Balls are sampled with radii at scales ``>= rho^(D-1)`` so that both
    the ball and its half (or double) are resolved by the finite depth.
    """
    rng = np.random.default_rng(seed)
    X = space.sample(samples, rng)
    logs = rng.uniform(0, space.depth - 1, size=samples)
    radii = space.rho**logs
    worst = 0.0
    rep = Report(f"doubling-{kind}")
    for x, r in zip(X, radii):
        k = space.ball_depth(r)
        if kind == "space":
            k_half = space.ball_depth(r / 2)
            if k_half == space.depth and not space.rho**space.depth < r / 2:
                continue
            # radius-r/2 balls are the depth-k_half cylinders, which partition the ball
            val = float(space.alphabet ** (k_half - k))
        elif kind == "measure":
            k2 = space.ball_depth(2 * r)
            val = space.cylinder_measure(x[:k2]) / space.cylinder_measure(x[:k])
        else:
            raise InputError(f"unknown doubling kind {kind!r}")
        worst = max(worst, val)
    steps = math.ceil(math.log(2) / math.log(1 / space.rho))
    if kind == "space":
        rep.check("constant <= |A|^ceil(log 2/log(1/rho))", worst, float(space.alphabet**steps))
    else:
        wmin = min(space.weights)
        rep.check("constant <= (1/min w)^ceil(log 2/log(1/rho))", worst, (1 / wmin) ** steps,
                  tol=1e-12 * (1 / wmin) ** steps)
    rep.values.update({"constant": worst, "samples": samples, "seed": seed})
    return rep


def snowflake_scalar_check(x, y, a: float) -> Report:
    """``(x + y)^a <= x^a + y^a`` for nonnegative x, y and ``0 < a <= 1``."""
    if not 0 < a <= 1:
        raise DomainError("scalar snowflake inequality needs 0 < a <= 1")
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if np.any(x < 0) or np.any(y < 0):
        raise InputError("inputs must be nonnegative")
    lhs = (x + y) ** a
    rhs = x**a + y**a
    rep = Report(f"snowflake-scalar(a={a:g})")
    rep.check("max (x+y)^a - (x^a + y^a)", float(np.max(lhs - rhs)), 0.0,
              tol=1e-12 * float(np.max(rhs, initial=1.0)))
    return rep


def snowflake_check(space: UltrametricSpace, a: float, trials: int = 2000, seed: int = 0
                    ) -> Report:
    """``d^a`` stays an ultrametric, and ``B_d(p, r) = B_(d^a)(p, r^a)`` as point sets."""
    if not a > 0:
        raise DomainError("snowflake exponent must be positive")
    rng = np.random.default_rng(seed)
    P = space.points()
    bad_ultra = bad_ball = 0
    for _ in range(trials):
        x, y, z = P[rng.integers(0, len(P), size=3)]
        dxz = ultrametric_distance(x, z, space.rho, a)
        dxy = ultrametric_distance(x, y, space.rho, a)
        dyz = ultrametric_distance(y, z, space.rho, a)
        bad_ultra += int(dxz > max(dxy, dyz))
        r = float(space.rho ** rng.uniform(0, space.depth))
        B = _distances(P, x, space.rho) < r
        Ba = _distances(P, x, space.rho, a) < r**a
        bad_ball += int(not np.array_equal(B, Ba))
    rep = Report(f"snowflake(a={a:g})")
    rep.check("triples violating the ultrametric inequality", bad_ultra, 0, rel="==")
    rep.check("balls changed by r -> r^a", bad_ball, 0, rel="==")
    rep.values.update({"trials": trials, "seed": seed})
    return rep


@dataclass
class DimensionEstimate:
    radii: np.ndarray
    counts: np.ndarray
    slope: float
    ci: tuple[float, float]
    intercept: float
    estimator: str = "box-counting"

    def trace(self) -> dict:
        return {"log_inv_r": np.log(1 / self.radii), "log_N": np.log(self.counts)}


def cover_count(space: UltrametricSpace, k: int) -> int:
    """Fewest sets of diameter ``<= rho^k`` covering the space.

    Two strings agreeing on k symbols are within ``rho^k``; strings with
    different k-prefixes are at distance ``>= rho^(k-1) > rho^k``.  So the
    minimal covers are the depth-k cylinders, counted here by enumerating
    distinct prefixes when the space is small enough.
    """
    if space.size <= MAX_ENUMERATE:
        P = space.points()
        codes = P[:, :k] @ (space.alphabet ** np.arange(k, dtype=np.int64))
        return len(np.unique(codes))
    return space.alphabet**k


def box_dimension(space: UltrametricSpace, a: float = 1.0, depths=None, level: float = 0.95
                  ) -> DimensionEstimate:
    """Slope of ``log N(r)`` against ``log(1/r)`` at ``r = (rho^k)^a``."""
    if not a > 0:
        raise DomainError("snowflake exponent must be positive")
    depths = list(range(1, space.depth + 1) if depths is None else depths)
    if len(depths) < 4:
        raise InputError("need at least four scales")
    if max(depths) > space.depth:
        raise InputError(f"depth {max(depths)} exceeds the space depth {space.depth}")
    radii = np.array([(space.rho**k) ** a for k in depths])
    counts = np.array([cover_count(space, k) for k in depths], dtype=float)
    fit = stats.linregress(np.log(1 / radii), np.log(counts))
    q = stats.t.ppf(0.5 + level / 2, len(depths) - 2)
    ci = (fit.slope - q * fit.stderr, fit.slope + q * fit.stderr)
    return DimensionEstimate(radii, counts, float(fit.slope), ci, float(fit.intercept))


def maximal_balls_disjoint(balls) -> bool:
    """Among cylinder balls (prefix tuples), the inclusion-maximal ones are pairwise disjoint."""
    uniq = set(balls)
    maximal = [b for b in uniq if not any(o != b and _prefix_contains(o, b) for o in uniq)]
    return all(not (_prefix_contains(p, q) or _prefix_contains(q, p))
               for p, q in itertools.combinations(maximal, 2))


def totally_bounded_check(space: UltrametricSpace) -> Report:
    """For each k, the open balls of radius ``rho^(k-1)`` are the depth-k cylinders,
    and exactly ``|A|^k`` distinct ones cover the space."""
    rep = Report("totally-bounded")
    P = space.points()
    for k in range(space.depth + 1):
        r = 2.0 if k == 0 else space.rho ** (k - 1)
        balls = {space.ball(x, r) for x in P}
        rep.check(f"k={k}: distinct balls = |A|^k", len(balls), space.alphabet**k, rel="==")
    return rep
