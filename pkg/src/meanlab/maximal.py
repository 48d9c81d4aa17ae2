"""Hardy–Littlewood maximal operators on the integers and covering lemmas.

Everything outside the support hull ``[s0, s1]`` of a finitely supported
function is handled in closed form.  At distance ``d`` to the left of the
hull the maximal function is ``g(d) = max_b P_b / (L_b + d)``, where
``P_b`` is the mass of ``[s0, b]`` and ``L_b = b - s0 + 1``.  This is
decreasing in ``d`` and, past finitely many switch points, equal to a
single hyperbola, so level sets are found by bisection and sums of
``g(d)^p`` are exact Hurwitz-zeta differences.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import zeta

from . import _kernels
from .errors import DomainError, InputError
from .report import Report


def lp_constant(p: float) -> float:
    """``4 p 2^(p-1) / (p-1)``."""
    if not p > 1:
        raise DomainError("the L^p bound needs p > 1")
    return 4.0 * p * 2.0 ** (p - 1) / (p - 1)


@dataclass
class GridFunction:
    """Values on the integer window ``[lo, lo + len(values) - 1]``, zero outside."""

    lo: int
    values: np.ndarray
    interpretation: str = "on-Z"

    def __post_init__(self):
        self.lo = int(self.lo)
        self.values = np.asarray(self.values, dtype=complex).ravel()
        if self.values.size == 0:
            raise InputError("grid function needs at least one point")
        if self.interpretation not in ("on-Z", "piecewise-constant-on-R"):
            raise InputError(f"unknown interpretation {self.interpretation!r}")

    @property
    def hi(self) -> int:
        return self.lo + len(self.values) - 1

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    @property
    def abs(self) -> np.ndarray:
        return np.abs(self.values)

    def mass(self) -> float:
        return math.fsum(self.abs.tolist())

    def power_sum(self, p: float) -> float:
        return math.fsum((self.abs**p).tolist())

    def hull(self) -> tuple[int, int] | None:
        nz = np.nonzero(self.values)[0]
        if len(nz) == 0:
            return None
        return self.lo + int(nz[0]), self.lo + int(nz[-1])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["j", "re", "im"])
        for j, v in zip(self.points, self.values):
            w.writerow([int(j), format(v.real, ".17g"), format(v.imag, ".17g")])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "GridFunction":
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        if rows and rows[0][0].strip().lower() == "j":
            rows = rows[1:]
        if not rows:
            raise InputError("empty grid function CSV")
        try:
            pts = {int(r[0]): complex(float(r[1]), float(r[2]) if len(r) > 2 else 0.0)
                   for r in rows}
        except (ValueError, IndexError) as exc:
            raise InputError(f"bad grid function CSV row ({exc})") from exc
        lo, hi = min(pts), max(pts)
        vals = np.zeros(hi - lo + 1, dtype=complex)
        for j, v in pts.items():
            vals[j - lo] = v
        return cls(lo, vals)


@dataclass
class MaximalProfile:
    lo: int
    values: np.ndarray
    witness_a: np.ndarray
    witness_b: np.ndarray

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.lo, self.lo + len(self.values))

    def at(self, l: int) -> float:
        return float(self.values[l - self.lo])


class _Side:
    """Closed-form maximal function on one side of the support hull.

    ``w`` lists ``|f|`` over the hull, ordered outward from the hull edge
    nearest the exterior points (reversed for the right side).
    """

    def __init__(self, w: np.ndarray):
        self.P = np.cumsum(w)
        self.L = np.arange(1, len(w) + 1, dtype=float)
        self.S = float(self.P[-1])

    def values(self, d: np.ndarray, chunk: int = 1 << 22):
        d = np.asarray(d, dtype=float)
        out = np.empty(len(d))
        arg = np.empty(len(d), dtype=np.int64)
        step = max(1, chunk // len(self.P))
        for i in range(0, len(d), step):
            q = self.P[None, :] / (self.L[None, :] + d[i: i + step, None])
            k = np.argmax(q, axis=1)
            arg[i: i + step] = k
            out[i: i + step] = q[np.arange(len(k)), k]
        return out, arg

    def count_above(self, lam: float) -> int:
        """Number of distances d >= 1 with g(d) > lam (g is decreasing)."""
        if self.S <= lam:
            return 0
        hi = int(math.floor(self.S / lam)) + 1  # g(hi) <= S/(hi+1) < lam
        g = lambda d: float(np.max(self.P / (self.L + d)))  # noqa: E731
        if g(1) <= lam:
            return 0
        lo = 1  # g(lo) > lam, g(hi) <= lam
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if g(mid) > lam:
                lo = mid
            else:
                hi = mid
        return lo

    def segments(self):
        """Pieces ``(k, d_first, d_last)`` on which index k attains g(d).

        g(d) is the steepest slope from (-d, 0) to a point (L_b, P_b), so the
        witnesses are the vertices of the upper hull of those points, taken
        in order; the switch from vertex k to the next vertex j happens at
        ``d = (P_k L_j - P_j L_k) / (P_j - P_k)``.
        """
        P, L = self.P, self.L
        hull: list[int] = []
        for b in range(len(P)):
            while len(hull) >= 2:
                i, j = hull[-2], hull[-1]
                # drop j unless it lies strictly above the chord from i to b
                if (P[j] - P[i]) * (L[b] - L[i]) <= (P[b] - P[i]) * (L[j] - L[i]):
                    hull.pop()
                else:
                    break
            hull.append(b)
        out = []
        d = 1
        for k, j in zip(hull, hull[1:] + [None]):
            if j is None or P[j] <= P[k]:
                out.append((k, d, math.inf))
                return out
            t = (P[k] * L[j] - P[j] * L[k]) / (P[j] - P[k])
            last = int(math.floor(t))
            if last >= d:
                out.append((k, d, last))
                d = last + 1
        return out

    def power_sum(self, p: float) -> float:
        """Exact ``sum_{d >= 1} g(d)^p``."""
        total = []
        for k, d1, d2 in self.segments():
            head = zeta(p, self.L[k] + d1)
            tail = 0.0 if d2 == math.inf else zeta(p, self.L[k] + d2 + 1)
            total.append(self.P[k] ** p * (head - tail))
        return math.fsum(total)


@dataclass
class _Parts:
    hull: tuple[int, int] | None
    interior: np.ndarray = field(default=None)
    wa: np.ndarray = field(default=None)
    wb: np.ndarray = field(default=None)
    left: _Side | None = None
    right: _Side | None = None
    mass: float = 0.0


def _parts(f: GridFunction) -> _Parts:
    h = f.hull()
    if h is None:
        return _Parts(None)
    s0, s1 = h
    w = f.abs[s0 - f.lo: s1 - f.lo + 1]
    prefix = np.concatenate(([0.0], np.cumsum(w)))
    vals, wa, wb = _kernels.maximal_scan(prefix)
    # prefix differences can round a singleton below |f(l)|; that window is exact
    own = w > vals
    vals[own] = w[own]
    wa[own] = wb[own] = np.nonzero(own)[0]
    return _Parts(h, vals, wa + s0, wb + s0, _Side(w), _Side(w[::-1]), f.mass())


def _profile(parts: _Parts, lo: int, hi: int) -> MaximalProfile:
    pts = np.arange(lo, hi + 1)
    vals = np.zeros(len(pts))
    wa, wb = pts.copy(), pts.copy()
    if parts.hull is None:
        return MaximalProfile(lo, vals, wa, wb)
    s0, s1 = parts.hull
    inside = (pts >= s0) & (pts <= s1)
    vals[inside] = parts.interior[pts[inside] - s0]
    wa[inside] = parts.wa[pts[inside] - s0]
    wb[inside] = parts.wb[pts[inside] - s0]
    left = pts < s0
    if left.any():
        v, k = parts.left.values(s0 - pts[left])
        vals[left], wb[left] = v, s0 + k
    right = pts > s1
    if right.any():
        v, k = parts.right.values(pts[right] - s1)
        vals[right], wa[right] = v, s1 - k
    return MaximalProfile(lo, vals, wa, wb)


def discrete_maximal(f: GridFunction, lo: int | None = None, hi: int | None = None
                     ) -> MaximalProfile:
    """``f*(l) = max_{a <= l <= b} (1/(b-a+1)) sum_{j=a}^b |f(j)|`` on a window.

    The window defaults to f's own.  Windows never need to reach past the
    support hull (clipping keeps the mass and shortens the window), which
    makes the finite search exact.
    """
    lo = f.lo if lo is None else int(lo)
    hi = f.hi if hi is None else int(hi)
    if hi < lo:
        raise InputError("empty window")
    return _profile(_parts(f), lo, hi)


def superlevel_count(f: GridFunction, lam: float, parts: _Parts | None = None) -> int:
    """``|{j in Z : f*(j) > lam}|`` over all of Z."""
    if not lam > 0:
        raise DomainError("lambda must be positive")
    parts = _parts(f) if parts is None else parts
    if parts.hull is None:
        return 0
    return (int(np.count_nonzero(parts.interior > lam))
            + parts.left.count_above(lam) + parts.right.count_above(lam))


def maximal_power_sum(f: GridFunction, p: float, parts: _Parts | None = None) -> float:
    """Exact ``sum_{j in Z} f*(j)^p`` for ``p > 1``."""
    if not p > 1:
        raise DomainError("f* is not p-summable for p <= 1 unless f = 0")
    parts = _parts(f) if parts is None else parts
    if parts.hull is None:
        return 0.0
    return math.fsum([
        math.fsum((parts.interior**p).tolist()),
        parts.left.power_sum(p),
        parts.right.power_sum(p),
    ])


def weak_type_report(f: GridFunction, lambdas) -> Report:
    """Check ``|{f* > lam}| <= (2/lam) sum |f|`` for each lam."""
    S = f.mass()
    if S == 0:
        raise InputError("weak-type report needs a nonzero function")
    parts = _parts(f)
    lambdas = np.sort(np.asarray(lambdas, dtype=float))
    counts = np.array([superlevel_count(f, lam, parts) for lam in lambdas])
    bounds = 2.0 * S / lambdas
    ratios = counts * lambdas / S
    rep = Report("weak-type")
    i = int(np.argmax(ratios))
    rep.check("max |{f*>lam}| lam / sum|f|", ratios[i], 2.0)
    rep.check("level sets nested", float(np.any(np.diff(counts) > 0)), 0.0, rel="==")
    rep.values.update({"worst_ratio": float(ratios[i]), "worst_lambda": float(lambdas[i]),
                       "mass": S})
    rep.traces["levels"] = {"lambda": lambdas, "level_set_size": counts, "bound": bounds}
    return rep


def tail_bound(mass: float, p: float, D: int) -> float:
    """Bound on ``sum f*^p`` over points farther than D from the hull (both sides),
    from ``f*(l) <= mass/(d+1)``."""
    return 2.0 * mass**p * (D + 1.0) ** (1.0 - p) / (p - 1.0)


def lp_bound_report(f: GridFunction, p: float, D: int | None = None, n_lambda: int = 8
                    ) -> Report:
    """Check ``sum f*^p <= 4p 2^(p-1)/(p-1) sum |f|^p``.

    The left side is computed exactly, and also as a partial sum to
    distance D plus a certified tail; both must agree.  The truncation
    step behind the constant is traced on a few levels lam:
    ``|{f* > lam}| <= |{(f - f_lam)* > lam/2}| <= (4/lam) sum_{|f| > lam/2} |f|``
    where ``f_lam`` keeps the values with ``|f| <= lam/2``.
    """
    C = lp_constant(p)
    parts = _parts(f)
    rhs = f.power_sum(p)
    rep = Report(f"lp-bound(p={p:g})")
    if parts.hull is None:
        rep.check("sum f*^p <= C sum|f|^p", 0.0, 0.0)
        return rep
    exact = maximal_power_sum(f, p, parts)
    s0, s1 = parts.hull
    if D is None:
        D = 4 * (s1 - s0 + 1) + 64
    near = _profile(parts, s0 - D, s1 + D).values
    partial = math.fsum((near**p).tolist())
    tb = tail_bound(parts.mass, p, D)
    scale = 1e-12 * max(exact, 1e-300)
    rep.check("partial sum <= exact", partial, exact, tol=scale)
    rep.check("exact <= partial + tail", exact, partial + tb, tol=scale)
    rep.check("sum f*^p <= C sum|f|^p", exact, C * rhs, tol=1e-12 * C * rhs)

    absf = f.abs
    levels = np.quantile(parts.interior, np.linspace(0.1, 0.95, n_lambda))
    for lam in np.unique(levels[levels > 0]):
        big = np.where(absf > lam / 2, f.values, 0)
        g = GridFunction(f.lo, big)
        lhs = superlevel_count(f, lam, parts)
        mid = superlevel_count(g, lam / 2) if np.any(big) else 0
        bound = 4.0 / lam * math.fsum(absf[absf > lam / 2].tolist())
        rep.check(f"lam={lam:.6g}: |{{f*>lam}}| <= |{{(f-f_lam)*>lam/2}}|", lhs, mid)
        rep.check(f"lam={lam:.6g}: |{{(f-f_lam)*>lam/2}}| <= (4/lam) sum_(|f|>lam/2)|f|",
                  mid, bound, tol=1e-12 * bound)
    rep.values.update({"p": p, "constant": C, "lhs": exact, "rhs": rhs,
                       "ratio": exact / rhs, "partial": partial, "tail_bound": tb, "D": D})
    return rep


def piecewise_constant_maximal(f: GridFunction, l: int, resolution: int = 8) -> float:
    """Maximal value at ``x = l + 1/2`` of the step function equal to f(j) on [j, j+1).

    Open intervals with endpoints on a ``1/resolution`` grid are searched;
    the supremum over all intervals is at least this value.
    """
    w = f.abs
    h = f.hull()
    if h is None:
        return 0.0
    s0, s1 = h
    lo_edge, hi_edge = min(s0, l), max(s1, l) + 1
    grid = np.arange(lo_edge * resolution, hi_edge * resolution + 1) / resolution
    x = l + 0.5
    left, right = grid[grid < x], grid[grid > x]
    edges = np.arange(f.lo, f.hi + 2)
    cum = np.concatenate(([0.0], np.cumsum(w)))

    def F(t):  # integral of the step function up to t
        t = np.clip(t, edges[0], edges[-1])
        k = np.clip(np.floor(t).astype(int) - f.lo, 0, len(w) - 1)
        return cum[k] + (t - (k + f.lo)) * w[k]

    A = F(left)[:, None]
    B = F(right)[None, :]
    return float(np.max((B - A) / (right[None, :] - left[:, None])))


# ---------------------------------------------------------------- covering

def _overlap(I, J) -> bool:
    return max(I[0], J[0]) < min(I[1], J[1])


def covering_reduce_multiplicity(intervals) -> list[tuple[float, float]]:
    """Sub-family of open intervals with the same union and multiplicity <= 2.

    Intervals inside another are dropped first; afterwards, whenever a
    point lies in three or more intervals, the ones strictly between the
    leftmost and rightmost of them lie in the union of those two and are
    dropped.
    """
    fam = [(float(a), float(b)) for a, b in intervals]
    for a, b in fam:
        if not a < b:
            raise InputError(f"interval ({a}, {b}) is empty")
    order = sorted(range(len(fam)), key=lambda i: (fam[i][0], -fam[i][1]))
    kept = []
    for i in order:
        if kept and fam[kept[-1]][1] >= fam[i][1]:
            continue  # nested in an earlier interval (left ends sorted)
        kept.append(i)
    # now left and right endpoints increase together
    changed = True
    while changed:
        changed = False
        for s in range(len(kept)):
            a = fam[kept[s]][0]
            # intervals containing a point just right of a
            live = [k for k in kept[: s + 1] if fam[k][1] > a]
            live += [k for k in kept[s + 1:] if fam[k][0] <= a]
            if len(live) >= 3:
                drop = set(live[1:-1])
                kept = [k for k in kept if k not in drop]
                changed = True
                break
    keep = set(kept)
    return [fam[i] for i in range(len(fam)) if i in keep]


def union_segments(intervals) -> list[tuple[float, float]]:
    """Connected components of a union of open intervals.  Touching open
    intervals like (0,1), (1,2) stay separate because the shared endpoint is missing."""
    out: list[list[float]] = []
    for a, b in sorted((float(a), float(b)) for a, b in intervals):
        if out and a < out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return [tuple(s) for s in out]


def max_multiplicity(intervals) -> int:
    """Largest number of the open intervals sharing a point (endpoint sweep)."""
    events = []
    for a, b in intervals:
        events.append((float(a), 1))
        events.append((float(b), -1))
    # closing before opening at equal coordinates: open intervals
    events.sort(key=lambda e: (e[0], e[1]))
    cur = best = 0
    for _, e in events:
        cur += e
        best = max(best, cur)
    return best


# ---------------------------------------------------------------- Vitali

class EuclideanMetric:
    """Euclidean distance on R or R^2 with exact open-ball intersection."""

    def __init__(self, dim: int = 1):
        if dim not in (1, 2):
            raise InputError("Euclidean handle supports dimension 1 or 2")
        self.dim = dim

    def distance(self, x, y) -> float:
        return float(np.linalg.norm(np.atleast_1d(np.subtract(x, y, dtype=float))))

    def intersects(self, c1, r1, c2, r2) -> bool:
        return self.distance(c1, c2) < r1 + r2

    def sample_in_ball(self, c, r, rng) -> np.ndarray:
        c = np.atleast_1d(np.asarray(c, dtype=float))
        while True:
            u = rng.uniform(-1, 1, size=self.dim)
            if np.linalg.norm(u) < 1:
                return c + r * u


@dataclass
class VitaliResult:
    selected: list[int]
    assignment: dict[int, int]  # ball index -> selected ball meeting it with radius >= its own


def vitali_select(balls, metric) -> VitaliResult:
    """Greedy selection by decreasing radius of pairwise disjoint balls.

    Every input ball meets a selected ball of at least its radius and so
    lies in three times that ball.
    """
    balls = [(c, float(r)) for c, r in balls]
    if any(not r > 0 for _, r in balls):
        raise InputError("ball radii must be positive")
    order = sorted(range(len(balls)), key=lambda i: -balls[i][1])
    selected: list[int] = []
    assignment: dict[int, int] = {}
    for i in order:
        c, r = balls[i]
        hit = next((j for j in selected if metric.intersects(c, r, *balls[j])), None)
        if hit is None:
            selected.append(i)
            assignment[i] = i
        else:
            assignment[i] = hit
    return VitaliResult(selected, assignment)


def vitali_report(balls, result: VitaliResult, metric, samples: int = 8, seed: int = 0
                  ) -> Report:
    rng = np.random.default_rng(seed)
    balls = [(c, float(r)) for c, r in balls]
    rep = Report("vitali")
    sel = result.selected
    overlaps = sum(
        metric.intersects(*balls[sel[i]], *balls[sel[j]])
        for i in range(len(sel)) for j in range(i + 1, len(sel))
    )
    rep.check("selected balls pairwise disjoint", overlaps, 0, rel="==")
    worst = 0.0
    bad_samples = 0
    for i, (c, r) in enumerate(balls):
        j = result.assignment[i]
        cj, rj = balls[j]
        if rj < r:
            worst = math.inf
        # d(c_i, c_j) + r_i <= 3 r_j gives B_i inside 3 B_j in any metric space
        worst = max(worst, (metric.distance(c, cj) + r) / (3 * rj))
        for _ in range(samples):
            z = metric.sample_in_ball(c, r, rng)
            if not metric.distance(cj, z) < 3 * rj:
                bad_samples += 1
    rep.check("max (d(c_i,c_j) + r_i) / (3 r_j)", worst, 1.0)
    rep.check("sampled points outside 3B", bad_samples, 0, rel="==")
    rep.values.update({"n_balls": len(balls), "n_selected": len(sel)})
    return rep


# ---------------------------------------------------------------- product variant

@dataclass
class ProductGridFunction:
    """Rows ``f(x, .)`` on a shared integer window with weights ``mu_x > 0``."""

    lo: int
    rows: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.rows = np.atleast_2d(np.asarray(self.rows, dtype=complex))
        self.weights = np.asarray(self.weights, dtype=float).ravel()
        if len(self.weights) != self.rows.shape[0]:
            raise InputError("one weight per row required")
        if np.any(self.weights <= 0):
            raise InputError("row weights must be positive")

    def row(self, i: int) -> GridFunction:
        return GridFunction(self.lo, self.rows[i])


def product_maximal(F: ProductGridFunction, lambdas, ps=(1.5, 2.0, 3.0)
                    ) -> tuple[list[MaximalProfile], Report]:
    """Maximal function in the integer variable, row by row, with the weighted
    weak-type and L^p inequalities aggregated over rows."""
    parts = [_parts(F.row(i)) for i in range(len(F.weights))]
    profiles = [_profile(pt, F.lo, F.lo + F.rows.shape[1] - 1) for pt in parts]
    mu = F.weights
    masses = np.array([F.row(i).mass() for i in range(len(mu))])
    rep = Report("product-maximal")
    total = float(np.dot(mu, masses))
    worst = 0.0
    for lam in np.asarray(lambdas, dtype=float):
        lhs = math.fsum(float(m) * superlevel_count(F.row(i), lam, parts[i])
                        for i, m in enumerate(mu))
        worst = max(worst, lhs * lam / total if total else 0.0)
        rep.check(f"lam={lam:.6g}: weighted level measure <= (2/lam) sum int|f|",
                  lhs, 2.0 * total / lam, tol=1e-12 * total / lam)
    for p in ps:
        lhs = math.fsum(float(m) * maximal_power_sum(F.row(i), p, parts[i])
                        for i, m in enumerate(mu))
        rhs = math.fsum(float(m) * F.row(i).power_sum(p) for i, m in enumerate(mu))
        rep.check(f"p={p:g}: sum int f*^p <= C_p sum int |f|^p", lhs, lp_constant(p) * rhs,
                  tol=1e-12 * lp_constant(p) * rhs)
        rep.values[f"ratio_p{p:g}"] = lhs / rhs if rhs else 0.0
    rep.values["worst_weak_ratio"] = worst
    return profiles, rep
