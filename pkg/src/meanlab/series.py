"""Partial sums, Cesàro and Abel summation, admissibility, Cauchy products.

Series are indexed from 0.  A :class:`SeriesSpec` produces the vector of
terms ``a_0 .. a_n`` on demand; everything downstream works on numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConsistencyError, DomainError, InputError, ResolutionError
from .report import complex_from_json, complex_to_json

MIN_TRACE = 16

# name -> vectorised rule j -> a_j
CUSTOM_RULES: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "harmonic": lambda j: 1.0 / (j + 1.0),
    "alternating-harmonic": lambda j: np.where(j % 2 == 0, 1.0, -1.0) / (j + 1.0),
    "grandi": lambda j: np.where(j % 2 == 0, 1.0, -1.0),
    "linear": lambda j: j + 1.0,
    "two-power": lambda j: np.exp2(j.astype(float)),
    "inverse-square": lambda j: 1.0 / (j + 1.0) ** 2,
}


def register_rule(name: str, rule: Callable[[np.ndarray], np.ndarray]):
    """Make ``rule`` available as ``SeriesSpec.custom(name)``."""
    CUSTOM_RULES[name] = rule


def _powers(a: complex, j: np.ndarray) -> np.ndarray:
    a = complex(a)
    if a.imag == 0.0:
        return np.power(a.real, j.astype(float)).astype(complex)
    if a.real == 0.0 and abs(a.imag) == 1.0:
        # exact cycle 1, ±i, -1, ∓i
        cyc = np.array([1, a, -1, -a], dtype=complex)
        return cyc[j % 4]
    r, t = abs(a), math.atan2(a.imag, a.real)
    return np.power(r, j.astype(float)) * np.exp(1j * t * j)


@dataclass(frozen=True)
class SeriesSpec:
    """A deterministic rule for the terms of an infinite series.

    Use the constructors :meth:`explicit`, :meth:`geometric`,
    :meth:`weighted_geometric` and :meth:`custom`.
    """

    kind: str
    a: complex = 0j
    degree: int = 0
    coeffs: tuple = ()
    rule: str | None = None

    @classmethod
    def explicit(cls, terms) -> "SeriesSpec":
        return cls("list", coeffs=tuple(complex(t) for t in terms))

    @classmethod
    def geometric(cls, a) -> "SeriesSpec":
        return cls("geometric", a=complex(a))

    @classmethod
    def weighted_geometric(cls, a, degree: int) -> "SeriesSpec":
        """Terms ``(j+1)**degree * a**j``."""
        if degree < 0:
            raise InputError("polynomial degree must be nonnegative")
        return cls("weighted-geometric", a=complex(a), degree=int(degree))

    @classmethod
    def custom(cls, rule: str) -> "SeriesSpec":
        if rule not in CUSTOM_RULES:
            raise InputError(f"unknown custom rule {rule!r}; known: {sorted(CUSTOM_RULES)}")
        return cls("custom", rule=rule)

    def terms(self, n: int) -> np.ndarray:
        """Complex array ``[a_0, ..., a_n]``."""
        if n < 0:
            raise InputError("n must be nonnegative")
        j = np.arange(n + 1)
        if self.kind == "list":
            out = np.zeros(n + 1, dtype=complex)
            k = min(n + 1, len(self.coeffs))
            out[:k] = self.coeffs[:k]
            return out
        if self.kind == "geometric":
            return _powers(self.a, j)
        if self.kind == "weighted-geometric":
            return (j + 1.0) ** self.degree * _powers(self.a, j)
        if self.kind == "custom":
            try:
                out = np.asarray(CUSTOM_RULES[self.rule](j), dtype=complex)
            except Exception as exc:  # rule code is user supplied
                raise InputError(f"custom rule {self.rule!r} failed: {exc}") from exc
            if out.shape != j.shape:
                raise InputError(f"custom rule {self.rule!r} returned shape {out.shape}")
            return out
        raise InputError(f"unknown series kind {self.kind!r}")

    def term(self, j: int) -> complex:
        return complex(self.terms(j)[j])

    def to_json(self) -> dict:
        if self.kind == "list":
            return {"kind": "list", "terms": [complex_to_json(c) for c in self.coeffs]}
        if self.kind == "geometric":
            return {"kind": "geometric", "a": {"re": self.a.real, "im": self.a.imag}}
        if self.kind == "weighted-geometric":
            return {
                "kind": "weighted-geometric",
                "a": {"re": self.a.real, "im": self.a.imag},
                "degree": self.degree,
            }
        return {"kind": "custom", "rule": self.rule}

    @classmethod
    def from_json(cls, data: dict) -> "SeriesSpec":
        kind = data.get("kind")
        if kind == "list":
            return cls.explicit(complex_from_json(t) for t in data["terms"])
        if kind == "geometric":
            return cls.geometric(complex_from_json(data["a"]))
        if kind == "weighted-geometric":
            return cls.weighted_geometric(complex_from_json(data["a"]), int(data["degree"]))
        if kind == "custom":
            return cls.custom(data["rule"])
        raise InputError(f"unknown series kind {kind!r}")


@dataclass
class PartialSumTrace:
    values: np.ndarray
    kind: str


@dataclass
class SummabilityReport:
    method: str
    estimate: complex | None
    trace: PartialSumTrace
    diagnostics: dict = field(default_factory=dict)

    @property
    def divergent(self) -> bool:
        return self.estimate is None

    def to_dict(self):
        return {
            "method": self.method,
            "estimate": None if self.estimate is None else complex_to_json(self.estimate),
            "divergent": self.divergent,
            "trace_kind": self.trace.kind,
            "trace": self.trace.values,
            "diagnostics": self.diagnostics,
        }


def partial_sums(s: SeriesSpec, n: int) -> PartialSumTrace:
    return PartialSumTrace(np.cumsum(s.terms(n)), "partial-sums")


def cesaro_means(seq, n: int | None = None) -> PartialSumTrace:
    """Running averages ``(z_0 + ... + z_m) / (m + 1)`` for ``m <= n``."""
    z = np.asarray(seq, dtype=complex)
    if n is not None:
        if len(z) < n + 1:
            raise InputError(f"sequence has {len(z)} entries, need {n + 1}")
        z = z[: n + 1]
    return PartialSumTrace(np.cumsum(z) / np.arange(1, len(z) + 1), "cesaro-means-of-sequence")


def _stabilized(values: np.ndarray, tol: float) -> tuple[bool, float]:
    """Trailing-quarter Cauchy test; returns (passed, observed spread)."""
    if len(values) < MIN_TRACE:
        return False, math.inf
    tail = values[len(values) - max(len(values) // 4, 2):]
    spread = float(np.max(np.abs(tail - values[-1])))
    return spread <= tol, spread


def cesaro_sum(s: SeriesSpec, n: int, tol: float = 1e-6) -> SummabilityReport:
    """Cesàro sum from the averages ``beta_0 .. beta_n`` of the partial sums.

    The averages are computed twice, by averaging partial sums and from the
    weighted form ``sum_j (m+1-j)/(m+1) a_j``; a disagreement raises
    :class:`ConsistencyError`.
    """
    if n < 1:
        raise InputError("n must be at least 1")
    if not tol > 0:
        raise InputError("tol must be positive")
    a = s.terms(n)
    b = np.cumsum(a)
    m1 = np.arange(1, n + 2)
    beta = np.cumsum(b) / m1
    # sum_j (m+1-j) a_j / (m+1) = b_m - (sum_j j a_j) / (m+1)
    beta_w = b - np.cumsum(np.arange(n + 1) * a) / m1
    scale = max(1.0, float(np.max(np.abs(b))))
    disagreement = float(np.max(np.abs(beta - beta_w)))
    if disagreement > max(tol, 1e-12 * scale * n):
        raise ConsistencyError(
            f"averaged partial sums and weighted formula differ by {disagreement:.3e}"
        )
    ok, spread = _stabilized(beta, tol)
    q = len(a) - max(len(a) // 4, 2)
    growth = np.abs(a[q:]) / m1[q:]
    diagnostics = {
        "tol": tol,
        "spread": spread,
        "formula_disagreement": disagreement,
        # a_m/(m+1) must tend to 0 for any Cesàro summable series
        "term_growth_max": float(np.max(growth)),
        "term_growth_last": float(growth[-1]),
        "necessary_condition": bool(np.max(growth) <= 4 * tol + 1e-12 * scale),
        "residuals": np.abs(beta - beta[-1]),
    }
    return SummabilityReport(
        "cesaro",
        complex(beta[-1]) if ok else None,
        PartialSumTrace(beta, "cesaro-means-of-series"),
        diagnostics,
    )


@dataclass
class AdmissibilityResult:
    classification: str  # admissible | not-admissible | undetermined
    radius: float
    bounded: dict

    @property
    def admissible(self) -> bool:
        return self.classification == "admissible"


def is_admissible(
    s: SeriesSpec,
    t_values=(0.5, 0.9, 0.99),
    n_probe: int = 2048,
    eps_radius: float = 0.02,
) -> AdmissibilityResult:
    """Classify the radius of convergence of ``sum a_j z^j`` against 1.

    Combines a boundedness probe of ``|a_j| t^j`` at each ``t`` with a
    root-test radius estimate (slope of ``log|a_j|`` over the trailing half
    of the window).
    """
    if n_probe < 16:
        raise InputError("n_probe must be at least 16")
    with np.errstate(over="ignore", invalid="ignore"):
        a = np.abs(s.terms(n_probe))
    finite = np.isfinite(a)
    if not finite.all():
        # terms overflow double range; probe the finite prefix only
        n_probe = int(np.argmin(finite)) - 1
        if n_probe < 16:
            return AdmissibilityResult("not-admissible", 0.0, {t: False for t in t_values})
        a = a[: n_probe + 1]
    j = np.arange(n_probe + 1)
    nz = np.nonzero(a)[0]
    if len(nz) == 0 or nz[-1] < n_probe // 2:
        return AdmissibilityResult("admissible", math.inf, {t: True for t in t_values})

    half = j >= n_probe // 2
    mask = half & (a > 0)
    if mask.sum() >= 2:
        slope = np.polyfit(j[mask], np.log(a[mask]), 1)[0]
        radius = float(math.exp(-slope))
    else:
        radius = math.inf

    bounded = {}
    cut = (3 * (n_probe + 1)) // 4
    for t in t_values:
        with np.errstate(under="ignore"):
            seq = a * np.power(float(t), j.astype(float))
        head, tail = float(np.max(seq[:cut])), float(np.max(seq[cut:]))
        bounded[t] = tail <= head
    if radius >= 1.0 - eps_radius and all(bounded.values()):
        cls = "admissible"
    elif radius < 1.0 - eps_radius and not all(bounded.values()):
        cls = "not-admissible"
    else:
        cls = "undetermined"
    return AdmissibilityResult(cls, radius, bounded)


def _neville_at_zero(x: np.ndarray, y: np.ndarray) -> complex:
    """Polynomial interpolation through (x_i, y_i) evaluated at x = 0."""
    p = [complex(v) for v in y]
    n = len(x)
    for k in range(1, n):
        for i in range(n - k):
            p[i] = (x[i + k] * p[i] - x[i] * p[i + 1]) / (x[i + k] - x[i])
    return p[0]


def _tail_bound(absa: np.ndarray, r: float, n: int) -> float:
    """Bound on ``sum_{j>n} |a_j| r^j`` by comparison with a geometric series.

    For ``t = r**theta`` with ``M = max_j |a_j| t^j`` over the window,
    the tail is at most ``M q^(n+1) / (1 - q)`` with ``q = r / t``; the
    smallest bound over a few ``theta`` is returned.
    """
    j = np.arange(len(absa), dtype=float)
    best = math.inf
    lr = math.log(r)
    for theta in (0.5, 0.25, 0.1, 0.05, 0.02, 0.01):
        with np.errstate(under="ignore"):
            m = float(np.max(absa * np.exp(theta * lr * j)))
        lq = (1.0 - theta) * lr
        bound = m * math.exp(lq * (n + 1)) / (-math.expm1(lq))
        best = min(best, bound)
    return best


def power_series(s: SeriesSpec, r: float, n_terms: int) -> complex:
    """Truncated evaluation ``sum_{j <= n_terms} a_j r^j``."""
    a = s.terms(n_terms)
    with np.errstate(under="ignore"):
        w = np.exp(math.log(r) * np.arange(n_terms + 1))
    return complex(np.sum(a * w))


def abel_sum(
    s: SeriesSpec,
    r_grid=(0.9, 0.99, 0.999),
    n_terms: int | None = None,
    tol: float = 1e-10,
    check_admissible: bool = True,
) -> SummabilityReport:
    """Abel sum by evaluating ``f(r) = sum a_j r^j`` on ``r_grid``.

    The estimate extrapolates the last three grid values to ``r = 1`` by
    Richardson (Neville) elimination in the variable ``1 - r``.  When
    ``n_terms`` is omitted it is chosen so that ``r_max**n_terms ~ e**-60``
    (or the length of an explicit list, if shorter).
    """
    r = np.asarray(sorted(float(x) for x in r_grid))
    if len(r) == 0:
        raise InputError("r_grid must be nonempty")
    if r[0] <= 0 or r[-1] >= 1:
        raise DomainError("grid points must lie in (0, 1)")
    if n_terms is None:
        n_terms = int(math.ceil(60.0 / (1.0 - r[-1])))
        if s.kind == "list" and s.coeffs:
            # a finite list is a polynomial; nothing lies beyond its last term
            n_terms = min(n_terms, len(s.coeffs) - 1)
    if check_admissible:
        adm = is_admissible(s, n_probe=max(64, min(n_terms, 4096)))
        if adm.classification == "not-admissible":
            raise DomainError(f"series is not admissible (radius estimate {adm.radius:.4g})")
    a = s.terms(n_terms)
    absa = np.abs(a)
    j = np.arange(n_terms + 1)
    vals, tails = [], []
    for x in r:
        with np.errstate(under="ignore"):
            w = np.exp(math.log(x) * j)
        vals.append(complex(np.sum(a * w)))
        exact_tail = s.kind == "list" and n_terms >= len(s.coeffs) - 1
        tails.append(0.0 if exact_tail else _tail_bound(absa, float(x), n_terms))
    vals = np.array(vals)
    if tails[-1] > tol:
        raise ResolutionError(
            f"truncation tail bound {tails[-1]:.3e} at r={r[-1]} exceeds tol={tol:.1e}; "
            f"raise n_terms above {n_terms}"
        )
    k = min(3, len(r))
    est = _neville_at_zero(1.0 - r[-k:], vals[-k:])
    return SummabilityReport(
        "abel",
        est,
        PartialSumTrace(vals, "abel-evaluations"),
        {"r_grid": r, "n_terms": n_terms, "tail_bound": np.array(tails)},
    )


def classical_sum(s: SeriesSpec, n: int, tol: float = 1e-10) -> SummabilityReport:
    tr = partial_sums(s, n)
    ok, spread = _stabilized(tr.values, tol)
    return SummabilityReport(
        "classical", complex(tr.values[-1]) if ok else None, tr, {"spread": spread}
    )


def cauchy_product(a: SeriesSpec, b: SeriesSpec, n: int) -> SeriesSpec:
    """Coefficients ``c_k = sum_j a_j b_{k-j}`` for ``k <= n`` as an explicit list."""
    if n < 0:
        raise InputError("n must be nonnegative")
    c = np.convolve(a.terms(n), b.terms(n))[: n + 1]
    return SeriesSpec.explicit(c)


def summation_by_parts_residual(s: SeriesSpec, z: complex, n: int) -> float:
    """``|sum a_j z^j - ((1-z) sum_{j<n} b_j z^j + b_n z^n)|`` at truncation n."""
    z = complex(z)
    if abs(z) >= 1:
        raise DomainError("|z| must be < 1")
    if n < 0:
        raise InputError("n must be nonnegative")
    a = s.terms(n)
    b = np.cumsum(a)
    zp = z ** np.arange(n + 1)
    lhs = np.sum(a * zp)
    rhs = (1 - z) * np.sum(b[:n] * zp[:n]) + b[n] * zp[n]
    return float(abs(lhs - rhs))
