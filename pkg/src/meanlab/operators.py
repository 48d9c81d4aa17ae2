"""Square matrices as bounded operators.

Operator norms under p-norm pairings, Neumann-series inversion with a
certified tail, Gelfand traces for the spectral radius, resolvents,
Cesàro averages of powers, the mean ergodic projection for unitaries and
diagonal multiplication averages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import (
    DomainError,
    InputError,
    NotInvertibleError,
    SingularError,
    UnsupportedPairingError,
)
from .report import Report

INF = math.inf
MAX_EIG_DIM = 64


def as_operator(T) -> np.ndarray:
    A = np.asarray(T, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise InputError(f"operator must be a nonempty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InputError("operator entries must be finite")
    return A


@dataclass(frozen=True)
class NormPairing:
    domain: float = INF
    codomain: float = INF

    def __post_init__(self):
        linalg.check_p(self.domain)
        linalg.check_p(self.codomain)

    @classmethod
    def of(cls, pairing) -> "NormPairing":
        if isinstance(pairing, NormPairing):
            return pairing
        if pairing is None:
            return cls()
        if isinstance(pairing, (int, float)):
            return cls(float(pairing), float(pairing))
        p, q = pairing
        return cls(float(p), float(q))


def spectral_norm(T, tol: float = 1e-13, max_iter: int = 20000, v0=None):
    """Largest singular value by power iteration on ``T* T``.

    Returns ``(L, v)`` with unit witness ``v`` satisfying ``||T v|| = L``
    (so L is always a certified lower bound).  Iteration stops once the
    relative change of the Rayleigh quotient falls below ``tol``.
    """
    T = np.asarray(T, dtype=complex)
    n = T.shape[1]
    if v0 is None:
        # start from the heaviest column of T*T, plus a fixed perturbation
        M = T.conj().T @ T
        k = int(np.argmax(np.sum(np.abs(M) ** 2, axis=0)))
        v = M[:, k] + 1e-3 * np.cos(np.arange(1, n + 1))
    else:
        v = np.array(v0, dtype=complex)
    nv = np.linalg.norm(v)
    if nv == 0:
        v = np.ones(n, dtype=complex)
        nv = math.sqrt(n)
    v = v / nv
    w = T @ v
    est = float(np.linalg.norm(w))
    for _ in range(max_iter):
        u = T.conj().T @ w
        nu = np.linalg.norm(u)
        if nu == 0:
            break
        v_new = u / nu
        w_new = T @ v_new
        new = float(np.linalg.norm(w_new))
        if new < est:
            # rounding only; keep the better witness
            break
        done = new - est <= tol * new
        v, w, est = v_new, w_new, new
        if done:
            break
    return est, v


def operator_norm(T, pairing=(INF, INF), tol: float = 1e-13) -> float:
    """Operator norm of T between the pairing's domain and codomain p-norms.

    Exact for ``(1, q)`` (largest column q-norm) and ``(inf, inf)`` (largest
    absolute row sum); ``(2, 2)`` uses :func:`spectral_norm`.
    """
    T = as_operator(T)
    pr = NormPairing.of(pairing)
    p, q = pr.domain, pr.codomain
    if p == 1.0:
        return max(linalg.p_norm(T[:, j], q) for j in range(T.shape[1]))
    if p == INF and q == INF:
        return float(np.max(np.sum(np.abs(T), axis=1)))
    if p == 2.0 and q == 2.0:
        return spectral_norm(T, tol=tol)[0]
    raise UnsupportedPairingError(
        f"no exact or certified method for pairing ({p:g}, {q:g}); "
        "supported: (1, q), (inf, inf), (2, 2)"
    )


@dataclass
class NeumannResult:
    inverse: np.ndarray
    n_terms: int
    tail_bound: float
    residual: float
    block_power: int
    block_constant: float
    contraction: float

    def __iter__(self):
        # unpacks as (inverse, n_terms)
        yield self.inverse
        yield self.n_terms


def neumann_inverse(a, pairing=(INF, INF), tol: float = 1e-10, max_terms: int = 100_000,
                    max_block: int = 64) -> NeumannResult:
    """``(I - a)^{-1}`` as the partial sum ``S_n = sum_{j<=n} a^j``.

    Finds the least ``m <= max_block`` with ``q = ||a^m|| < 1``; the tail
    then obeys ``||(I-a)^{-1} - S_n|| <= q^floor((n+1)/m) C / (1 - q)`` with
    ``C = m max_{k<m} ||a^k||``.  Terms are added until the residual
    ``||(I - a) S_n - I||`` is at most ``tol``.
    """
    a = as_operator(a)
    pr = NormPairing.of(pairing)
    n = a.shape[0]
    eye = np.eye(n, dtype=complex)
    nrm = lambda M: operator_norm(M, pr)  # noqa: E731

    powers = [eye]
    q = None
    for m in range(1, max_block + 1):
        powers.append(powers[-1] @ a)
        qm = nrm(powers[-1])
        if qm < 1.0:
            q = qm
            break
    if q is None:
        raise NotInvertibleError(
            f"no power a^m with m <= {max_block} has norm < 1; consult spectrum_eigenvalues"
        )
    C = m * max(nrm(P) for P in powers[:m])

    S = np.zeros_like(a)
    P = eye.copy()
    I_minus_a = eye - a
    residual = math.inf
    k = -1
    for k in range(max_terms + 1):
        S += P
        P = P @ a
        if k % 8 == 0 or not P.any():
            residual = nrm(I_minus_a @ S - eye)
            if residual <= tol:
                break
    else:
        raise NotInvertibleError(f"residual {residual:.3e} above tol after {max_terms} terms")
    tail = 0.0 if not P.any() else C * q ** ((k + 1) // m) / (1.0 - q)
    return NeumannResult(S, k, tail, residual, m, C, q)


def spectrum_eigenvalues(x, check: bool = True) -> np.ndarray:
    """Eigenvalues of a small matrix (dimension at most 64).

    Each returned eigenvalue is certified by the smallest singular value of
    ``lambda I - x`` being at most ``1e-6 ||x||``; uncertified values raise
    :class:`SingularError` carrying the partial certified list.
    """
    x = as_operator(x)
    if x.shape[0] > MAX_EIG_DIM:
        raise InputError(f"eigenvalues supported up to dimension {MAX_EIG_DIM}")
    lam = np.linalg.eigvals(x)
    if check:
        scale = max(float(np.linalg.norm(x, 2)), 1e-300)
        eye = np.eye(x.shape[0])
        ok = np.array([
            np.linalg.svd(l * eye - x, compute_uv=False)[-1] <= 1e-6 * scale for l in lam
        ])
        if not ok.all():
            raise SingularError(
                f"{int((~ok).sum())} eigenvalue(s) failed certification", nearest=lam[ok]
            )
    return lam


@dataclass
class SpectralReport:
    gelfand_trace: np.ndarray  # ||x^n||^(1/n), n = 1..n_max
    gelfand_estimate: float
    fekete_inf: float
    eigen_radius: float
    consistent: bool
    log_power_norms: np.ndarray = field(repr=False)
    pairing: NormPairing = field(default_factory=NormPairing)

    def to_dict(self):
        return {
            "gelfand_trace": self.gelfand_trace,
            "gelfand_estimate": self.gelfand_estimate,
            "fekete_inf": self.fekete_inf,
            "eigen_radius": self.eigen_radius,
            "consistent": self.consistent,
            "pairing": [self.pairing.domain, self.pairing.codomain],
        }


def power_log_norms(x, n_max: int, pairing=(INF, INF)) -> np.ndarray:
    """``log ||x^n||`` for ``n = 1..n_max``; ``-inf`` once a power vanishes.

    Powers are renormalised at every step, so the logs never overflow.
    """
    x = as_operator(x)
    pr = NormPairing.of(pairing)
    out = np.full(n_max, -np.inf)
    s = operator_norm(x, pr)
    if s == 0.0:
        return out
    y = x / s
    P = np.eye(x.shape[0], dtype=complex)
    acc = 0.0
    witness = None
    for k in range(n_max):
        P = P @ y
        if pr.domain == 2.0 and pr.codomain == 2.0:
            nrm, witness = spectral_norm(P, v0=witness)
        else:
            nrm = operator_norm(P, pr)
        if nrm == 0.0:
            break
        acc += math.log(nrm)
        P /= nrm
        out[k] = acc + (k + 1) * math.log(s)
    return out


def spectral_radius(x, n_max: int = 64, pairing=(INF, INF)) -> SpectralReport:
    """Spectral radius from the Gelfand trace ``||x^n||^(1/n)``.

    ``fekete_inf`` is the minimum of the trace.  ``gelfand_estimate`` fits
    ``log ||x^n|| = n log(rho) + c`` over the trailing half of the trace,
    which cancels the constant that makes ``||x^n||^(1/n)`` converge only like
    ``1/n``; it is capped by ``fekete_inf`` since rho never exceeds it.
    """
    if n_max < 8:
        raise InputError("n_max must be at least 8")
    x = as_operator(x)
    pr = NormPairing.of(pairing)
    logs = power_log_norms(x, n_max, pr)
    ns = np.arange(1, n_max + 1)
    with np.errstate(under="ignore"):
        trace = np.exp(logs / ns)
    fekete = float(np.min(trace))
    if np.isneginf(logs).any():
        est = 0.0
    else:
        h = n_max // 2
        slope = np.polyfit(ns[h:], logs[h:], 1)[0]
        est = min(float(math.exp(slope)), fekete)
    eig = float(np.max(np.abs(spectrum_eigenvalues(x, check=False))))
    return SpectralReport(
        trace, est, fekete, eig, abs(est - eig) <= max(1e-2, 5.0 / n_max), logs, pr
    )


def resolvent(x, lam: complex, sep: float = 1e-8) -> np.ndarray:
    """``(lam I - x)^{-1}``; refuses when lam is within ``sep`` of the spectrum."""
    x = as_operator(x)
    lam = complex(lam)
    ev = spectrum_eigenvalues(x, check=False)
    d = np.abs(ev - lam)
    i = int(np.argmin(d))
    if d[i] <= sep:
        raise SingularError(
            f"lambda={lam} lies within {d[i]:.2e} of eigenvalue {ev[i]}", nearest=complex(ev[i])
        )
    eye = np.eye(x.shape[0], dtype=complex)
    M = lam * eye - x
    R = np.linalg.solve(M, eye)
    res = operator_norm(M @ R - eye)
    if res > 1e-8:
        raise SingularError(
            f"resolvent residual {res:.2e} too large near eigenvalue {ev[i]}",
            nearest=complex(ev[i]),
        )
    return R


def cesaro_operator_average(x, n: int) -> tuple[np.ndarray, np.ndarray]:
    """``A_n = (1/(n+1)) sum_{j<=n} x^j`` and the double average
    ``(1/(n+1)) sum_{l<=n} sum_{j<=l} x^j``."""
    if n < 1:
        raise InputError("n must be at least 1")
    x = as_operator(x)
    A, D = _average_traces(x, n)
    return A[-1], D[-1]


def _average_traces(x: np.ndarray, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Stacks of ``A_n`` and double averages for ``n = 0..n_max``."""
    d = x.shape[0]
    A = np.empty((n_max + 1, d, d), dtype=complex)
    D = np.empty_like(A)
    P = np.eye(d, dtype=complex)
    S = np.zeros((d, d), dtype=complex)  # sum_{j<=l} x^j
    SS = np.zeros_like(S)  # sum_{l<=n} S_l
    for k in range(n_max + 1):
        S = S + P
        SS = SS + S
        A[k] = S / (k + 1)
        D[k] = SS / (k + 1)
        P = P @ x
    return A, D


def batched_spectral_norm(stack: np.ndarray, tol: float = 1e-13, max_iter: int = 5000):
    """:func:`spectral_norm` applied to every matrix of a ``(B, d, d)`` stack."""
    T = np.asarray(stack, dtype=complex)
    B, _, d = T.shape
    TH = np.conj(np.transpose(T, (0, 2, 1)))
    M = TH @ T
    k = np.argmax(np.sum(np.abs(M) ** 2, axis=1), axis=1)
    v = M[np.arange(B), :, k] + 1e-3 * np.cos(np.arange(1, d + 1))
    nv = np.linalg.norm(v, axis=1, keepdims=True)
    v = np.where(nv > 0, v / np.where(nv > 0, nv, 1), 1 / math.sqrt(d))
    est = np.linalg.norm(np.einsum("bij,bj->bi", T, v), axis=1)
    active = np.ones(B, dtype=bool)
    for _ in range(max_iter):
        idx = np.nonzero(active)[0]
        if len(idx) == 0:
            break
        u = np.einsum("bij,bj->bi", M[idx], v[idx])
        nu = np.linalg.norm(u, axis=1)
        zero = nu == 0
        nu[zero] = 1
        v_new = u / nu[:, None]
        new = np.linalg.norm(np.einsum("bij,bj->bi", T[idx], v_new), axis=1)
        improve = (new >= est[idx]) & ~zero
        upd = idx[improve]
        v[upd] = v_new[improve]
        conv = ~improve | (new - est[idx] <= tol * new)
        est[upd] = new[improve]
        active[idx[conv]] = False
    return est


def operator_average_report(x, n_max: int, pairing=(2.0, 2.0), burn_in_blocks: bool = True
                            ) -> Report:
    """Check ``||A_n|| <= 2 ||(I-x)^{-1}|| / (n+1)`` for ``n <= n_max``.

    Applies when ``||x|| = 1`` and ``I - x`` is invertible.  Also traces the
    error of the double average against ``(I-x)^{-1}``: it is bounded by the
    decreasing envelope ``2 ||(I-x)^{-1}||^2 / (n+1)``, and its maxima over
    dyadic blocks ``[2^k, 2^(k+1))`` decrease from the reported burn-in on.
    """
    x = as_operator(x)
    pr = NormPairing.of(pairing)
    d = x.shape[0]
    eye = np.eye(d, dtype=complex)
    inv = np.linalg.solve(eye - x, eye)
    A, D = _average_traces(x, n_max)
    ns = np.arange(n_max + 1)
    if pr.domain == 2.0 and pr.codomain == 2.0:
        inv_norm = spectral_norm(inv)[0]
        a_norms = batched_spectral_norm(A)
        err = batched_spectral_norm(D - inv)
    else:
        inv_norm = operator_norm(inv, pr)
        a_norms = np.array([operator_norm(M, pr) for M in A])
        err = np.array([operator_norm(M, pr) for M in D - inv])
    x_norm = operator_norm(x, pr)
    bound = 2.0 * inv_norm / (ns + 1)
    envelope = 2.0 * inv_norm**2 / (ns + 1)
    rep = Report("operator-average")
    ratio = a_norms / bound
    worst = int(np.argmax(ratio))
    rep.check("||x|| == 1", x_norm, 1.0, rel="==", tol=1e-10)
    rep.check("max_n ||A_n|| (n+1) / (2||(I-x)^-1||)", ratio[worst], 1.0, tol=1e-12)
    eworst = int(np.argmax(err / envelope))
    rep.check("double-average error <= 2||(I-x)^-1||^2/(n+1)",
              err[eworst] / envelope[eworst], 1.0, tol=1e-12)
    # dyadic block maxima of the double-average error
    blocks = []
    k = 0
    while 2 ** (k + 1) - 1 <= n_max:
        blocks.append(float(np.max(err[2**k: 2 ** (k + 1)])))
        k += 1
    burn = None
    for i in range(len(blocks)):
        if all(blocks[j + 1] < blocks[j] for j in range(i, len(blocks) - 1)):
            burn = 2**i
            break
    rep.check("double-average error block maxima decrease after burn-in",
              0.0 if burn is not None else 1.0, 0.0, rel="==")
    rep.values.update({
        "inverse_norm": inv_norm,
        "worst_ratio": float(ratio[worst]),
        "worst_n": worst,
        "burn_in": burn,
        "final_double_average_error": float(err[-1]),
    })
    rep.traces["averages"] = {"n": ns, "norm_A_n": a_norms, "bound": bound,
                              "double_average_error": err}
    return rep


@dataclass
class MeanErgodicResult:
    average: np.ndarray
    predicted: np.ndarray
    bound_constant: float  # ||average - predicted|| <= bound_constant / (n + 1)
    error: float

    def __iter__(self):
        yield self.average
        yield self.predicted


def fixed_space_basis(U, tol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis (rows) of ``{y : U y = y}``."""
    U = as_operator(U)
    _, s, vh = np.linalg.svd(U - np.eye(U.shape[0]))
    return vh[s <= tol * max(1.0, float(s[0]) if len(s) else 1.0)].conj()


def mean_ergodic_projection(U, v, n: int) -> MeanErgodicResult:
    """Average ``(1/(n+1)) sum_{j<=n} U^j v`` and its predicted limit.

    The limit is the orthogonal projection of v onto the fixed space of U.
    The remainder ``y = v - limit`` is a coboundary ``U b - b``, so the
    error is at most ``2 ||b|| / (n+1)``.
    """
    U = as_operator(U)
    v = linalg.as_vector(v)
    if v.shape[0] != U.shape[0]:
        raise InputError("vector and operator dimensions differ")
    if np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))) > 1e-10:
        raise DomainError("operator is not unitary")
    F = fixed_space_basis(U)
    if len(F):
        predicted, y = linalg.orthogonal_complement_decompose(v, F)
    else:
        predicted, y = np.zeros_like(v), v.copy()
    b = np.linalg.lstsq(U - np.eye(U.shape[0]), y, rcond=None)[0]
    if len(F):
        b = b - linalg.orthogonal_complement_decompose(b, F)[0]
    acc = np.zeros_like(v)
    w = v.copy()
    for _ in range(n + 1):
        acc += w
        w = U @ w
    avg = acc / (n + 1)
    return MeanErgodicResult(avg, predicted, 2.0 * linalg.p_norm(b), linalg.p_norm(avg - predicted))


def multiplication_average(b, n: int) -> np.ndarray:
    """Entrywise ``(1/(n+1)) sum_{j<=n} b_k^j`` for a diagonal operator with ``|b_k| <= 1``."""
    b = linalg.as_vector(b)
    if np.any(np.abs(b) > 1 + 1e-12):
        raise DomainError("multiplication symbol must satisfy |b_k| <= 1")
    if n < 0:
        raise InputError("n must be nonnegative")
    acc = np.zeros_like(b)
    w = np.ones_like(b)
    for _ in range(n + 1):
        acc += w
        w = w * b
    return acc / (n + 1)
