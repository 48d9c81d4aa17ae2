"""Finite-dimensional vectors: p-norms, inner products, projections.

Vectors are 1-D complex numpy arrays; anything array-like is accepted.
Norm exponents are floats in ``[1, inf]`` with ``math.inf`` for the max norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InputError
from .report import Report, vector_from_json, vector_to_json

RANK_TOL = 1e-10


def as_vector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1 or arr.size < 1:
        raise InputError(f"vector must be 1-D with at least one entry, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError("vector entries must be finite")
    return arr


def check_p(p) -> float:
    p = float(p)
    if not p >= 1:
        raise DomainError(f"norm exponent must lie in [1, inf], got {p}")
    return p


def p_norm(v, p=2.0) -> float:
    """``(sum |v_j|^p)^(1/p)``, or ``max |v_j|`` for ``p = inf``.

    Sums for ``p = 1, 2`` are compensated (``math.fsum``); other exponents
    are scaled by the largest modulus first to avoid overflow.
    """
    p = check_p(p)
    m = np.abs(as_vector(v))
    big = float(m.max())
    if p == math.inf or big == 0.0:
        return big
    if p == 1.0:
        return math.fsum(m.tolist())
    if p == 2.0:
        s = m / big
        return big * math.sqrt(math.fsum((s * s).tolist()))
    s = m / big
    return big * math.fsum((s**p).tolist()) ** (1.0 / p)


def norm_inequality_report(v, p, q, rtol: float = 1e-12) -> Report:
    """Check the comparison inequalities between the p- and q-norms of v.

    ``||v||_q <= ||v||_p`` and ``||v||_p <= n^(1/p - 1/q) ||v||_q`` for
    ``p < q``; when ``{p, q} = {1, 2}`` also ``||v||_2^2 <= ||v||_1 ||v||_inf``.
    """
    p, q = check_p(p), check_p(q)
    if not p < q:
        raise InputError("need p < q")
    v = as_vector(v)
    n = len(v)
    np_, nq = p_norm(v, p), p_norm(v, q)
    inv = lambda x: 0.0 if x == math.inf else 1.0 / x  # noqa: E731
    factor = n ** (inv(p) - inv(q))
    rep = Report(f"norm-inequalities(p={p:g}, q={q:g})")
    scale = max(np_, nq, 1e-300)
    rep.check("q-norm <= p-norm", nq, np_, tol=rtol * scale)
    rep.check("p-norm <= n^(1/p-1/q) q-norm", np_, factor * nq, tol=rtol * factor * scale)
    if (p, q) == (1.0, 2.0):
        n1, n2, ninf = p_norm(v, 1), p_norm(v, 2), p_norm(v, math.inf)
        rep.check("2-norm^2 <= 1-norm * inf-norm", n2 * n2, n1 * ninf, tol=rtol * n1 * ninf)
    rep.values.update({"n": n, "p_norm": np_, "q_norm": nq, "factor": factor})
    return rep


def inner_product(v, w) -> complex:
    """``sum_j v_j conj(w_j)``."""
    v, w = as_vector(v), as_vector(w)
    if v.shape != w.shape:
        raise InputError(f"dimension mismatch {v.shape} vs {w.shape}")
    return complex(np.vdot(w, v))


def cauchy_schwarz_gap(v, w) -> float:
    """``||v|| ||w|| - |<v, w>|``; nonnegative up to rounding."""
    ip = inner_product(v, w)
    return p_norm(v, 2) * p_norm(w, 2) - abs(ip)


def parallelogram_residual(a, b) -> float:
    a, b = as_vector(a), as_vector(b)
    if a.shape != b.shape:
        raise InputError(f"dimension mismatch {a.shape} vs {b.shape}")
    sq = lambda x: math.fsum((np.abs(x) ** 2).tolist())  # noqa: E731
    return abs(sq(a - b) + sq(a + b) - 2 * sq(a) - 2 * sq(b))


def _gram(basis: np.ndarray) -> np.ndarray:
    # G[i, j] = <b_j, b_i>
    return basis.conj() @ basis.T


def solve_pivoted(G: np.ndarray, rhs: np.ndarray, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Solve ``G x = rhs`` by Gaussian elimination with complete pivoting.

    Raises :class:`InputError` when a pivot falls below ``rank_tol`` times
    the largest diagonal entry of ``G``.
    """
    A = np.array(G, dtype=complex)
    b = np.array(rhs, dtype=complex)
    n = A.shape[0]
    cols = np.arange(n)
    thresh = rank_tol * max(float(np.max(np.abs(np.diag(A)))), 1e-300)
    for k in range(n):
        sub = np.abs(A[k:, k:])
        i, j = np.unravel_index(int(np.argmax(sub)), sub.shape)
        i += k
        j += k
        if sub[i - k, j - k] <= thresh:
            raise InputError("degenerate basis: Gram matrix is rank deficient")
        A[[k, i]] = A[[i, k]]
        b[[k, i]] = b[[i, k]]
        A[:, [k, j]] = A[:, [j, k]]
        cols[[k, j]] = cols[[j, k]]
        f = A[k + 1:, k] / A[k, k]
        A[k + 1:, k:] -= np.outer(f, A[k, k:])
        b[k + 1:] -= f * b[k]
    y = np.zeros(n, dtype=complex)
    for k in range(n - 1, -1, -1):
        y[k] = (b[k] - A[k, k + 1:] @ y[k + 1:]) / A[k, k]
    x = np.empty(n, dtype=complex)
    x[cols] = y
    return x


@dataclass(frozen=True)
class ConvexSpec:
    """A closed convex set: a subspace, a real box, or a Euclidean ball."""

    kind: str
    basis: np.ndarray | None = None
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    center: np.ndarray | None = None
    radius: float = 0.0

    @classmethod
    def subspace(cls, basis) -> "ConvexSpec":
        B = np.atleast_2d(np.asarray(basis, dtype=complex))
        if B.size == 0:
            raise InputError("subspace basis must be nonempty")
        G = _gram(B)
        d = np.real(np.diag(G))
        # Gram determinant relative to the product of squared lengths
        if np.any(d <= 0) or abs(np.linalg.det(G)) <= RANK_TOL * float(np.prod(d)):
            raise InputError("degenerate basis: vectors are not linearly independent")
        return cls("subspace", basis=B)

    @classmethod
    def box(cls, lower, upper) -> "ConvexSpec":
        lo, hi = np.asarray(lower, dtype=float), np.asarray(upper, dtype=float)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise InputError("box bounds must be 1-D arrays of equal length")
        if np.any(lo > hi):
            raise InputError("box bounds must satisfy lower <= upper")
        return cls("box", lower=lo, upper=hi)

    @classmethod
    def ball(cls, center, radius: float) -> "ConvexSpec":
        if not radius >= 0:
            raise InputError("ball radius must be nonnegative")
        return cls("ball", center=as_vector(center), radius=float(radius))

    @property
    def dim(self) -> int:
        if self.kind == "subspace":
            return self.basis.shape[1]
        if self.kind == "box":
            return len(self.lower)
        return len(self.center)

    def contains(self, v, tol: float = 1e-12) -> bool:
        v = as_vector(v)
        if self.kind == "box":
            return bool(np.all(np.abs(v.imag) <= tol) and np.all(v.real >= self.lower - tol)
                        and np.all(v.real <= self.upper + tol))
        if self.kind == "ball":
            return p_norm(v - self.center) <= self.radius + tol
        return p_norm(v - project(v, self)) <= tol * max(1.0, p_norm(v))

    def to_json(self) -> dict:
        if self.kind == "subspace":
            return {"kind": "subspace", "basis": [vector_to_json(b) for b in self.basis]}
        if self.kind == "box":
            return {"kind": "box", "lower": self.lower.tolist(), "upper": self.upper.tolist()}
        return {"kind": "ball", "center": vector_to_json(self.center), "radius": self.radius}

    @classmethod
    def from_json(cls, data: dict) -> "ConvexSpec":
        kind = data.get("kind")
        if kind == "subspace":
            return cls.subspace([vector_from_json(b) for b in data["basis"]])
        if kind == "box":
            return cls.box(data["lower"], data["upper"])
        if kind == "ball":
            return cls.ball(vector_from_json(data["center"]), data["radius"])
        raise InputError(f"unknown convex set kind {kind!r}")


def _subspace_part(v: np.ndarray, B: np.ndarray) -> np.ndarray:
    G = _gram(B)
    rhs = B.conj() @ v  # rhs_i = <v, b_i>
    coef = solve_pivoted(G, rhs)
    return coef @ B


def project(v, c: ConvexSpec) -> np.ndarray:
    """Nearest point of ``c`` to ``v`` in the Euclidean norm."""
    v = as_vector(v)
    if len(v) != c.dim:
        raise InputError(f"vector has dimension {len(v)}, set lives in dimension {c.dim}")
    if c.kind == "subspace":
        return _subspace_part(v, c.basis)
    if c.kind == "box":
        if np.any(v.imag != 0):
            raise InputError("box projection is defined for real vectors only")
        return np.clip(v.real, c.lower, c.upper).astype(complex)
    if c.kind == "ball":
        d = v - c.center
        r = p_norm(d)
        if r <= c.radius:
            return v.copy()
        return c.center + d * (c.radius / r)
    raise InputError(f"unknown convex set kind {c.kind!r}")


def orthogonal_complement_decompose(v, basis) -> tuple[np.ndarray, np.ndarray]:
    """Split ``v = w + y`` with ``w`` in span(basis) and ``y`` orthogonal to it."""
    v = as_vector(v)
    spec = ConvexSpec.subspace(basis)
    if spec.dim != len(v):
        raise InputError("basis vectors and v have different dimensions")
    w = _subspace_part(v, spec.basis)
    return w, v - w
