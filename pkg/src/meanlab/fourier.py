"""Functions sampled on an equispaced grid of the unit circle.

Fourier coefficients come from the m-point trapezoid rule (computed with
an FFT), and the Fejér and Abel–Poisson means are formed by scaling those
coefficients, never by convolution.  Rotations are restricted to the
grid's subgroup of m-th roots of unity, where they permute nodes exactly.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import AliasingError, DomainError, InputError, ResolutionError
from .report import Report


@dataclass(frozen=True)
class CircleGrid:
    m: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 4:
            raise InputError("circle grid needs an integer m >= 4")

    @property
    def theta(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.m) / self.m

    @property
    def z(self) -> np.ndarray:
        return np.exp(1j * self.theta)

    @property
    def weight(self) -> float:
        """Arc-length quadrature weight ``2 pi / m``."""
        return 2 * np.pi / self.m


@dataclass
class SampledCircleFunction:
    grid: CircleGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.m,):
            raise InputError(f"need {self.grid.m} samples, got shape {self.values.shape}")

    @classmethod
    def from_theta(cls, fn, m: int) -> "SampledCircleFunction":
        g = CircleGrid(m)
        return cls(g, fn(g.theta))

    @classmethod
    def from_z(cls, fn, m: int) -> "SampledCircleFunction":
        g = CircleGrid(m)
        return cls(g, fn(g.z))

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def integral(self) -> complex:
        """Trapezoid value of ``int f |dz|``."""
        return complex(np.sum(self.values) * self.grid.weight)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theta", "re", "im"])
        for t, v in zip(self.grid.theta, self.values):
            w.writerow([format(t, ".17g"), format(v.real, ".17g"), format(v.imag, ".17g")])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SampledCircleFunction":
        rows = list(csv.reader(io.StringIO(text)))
        if rows and rows[0] and rows[0][0].strip().lower() == "theta":
            rows = rows[1:]
        rows = [r for r in rows if r]
        m = len(rows)
        g = CircleGrid(m)
        try:
            theta = np.array([float(r[0]) for r in rows])
            vals = np.array([complex(float(r[1]), float(r[2]) if len(r) > 2 else 0.0)
                             for r in rows])
        except (ValueError, IndexError) as exc:
            raise InputError(f"bad circle function CSV row ({exc})") from exc
        if not np.allclose(theta, g.theta, atol=1e-9):
            raise InputError("CSV nodes are not the equispaced grid 2 pi k / m")
        return cls(g, vals)


@dataclass
class FourierCoeffs:
    degree: int
    coeffs: np.ndarray  # index j + degree holds c_j

    def __getitem__(self, j: int) -> complex:
        if abs(j) > self.degree:
            raise IndexError(j)
        return complex(self.coeffs[j + self.degree])

    @property
    def index(self) -> np.ndarray:
        return np.arange(-self.degree, self.degree + 1)


def _check_alias(m: int, N: int):
    if not m > 2 * N:
        raise AliasingError(f"grid of m={m} points cannot resolve degree {N} (need m > {2 * N})")


def fourier_coefficients(f: SampledCircleFunction, N: int) -> FourierCoeffs:
    """``c_j = (1/m) sum_k f(theta_k) e^{-i j theta_k}`` for ``|j| <= N``."""
    m = f.grid.m
    _check_alias(m, N)
    c = np.fft.fft(f.values) / m
    idx = np.arange(-N, N + 1) % m
    return FourierCoeffs(N, c[idx])


def _synthesize(m: int, js: np.ndarray, cs: np.ndarray) -> np.ndarray:
    spec = np.zeros(m, dtype=complex)
    np.add.at(spec, js % m, cs)
    return np.fft.ifft(spec) * m


def fejer_mean(f: SampledCircleFunction, n: int, N: int | None = None) -> SampledCircleFunction:
    """Cesàro mean of the symmetric partial sums ``S_0 .. S_n`` on the grid.

    Equals ``sum_{|j|<=n} (1 - |j|/(n+1)) c_j z^j``; coefficients above
    degree ``N`` (default ``n``) are taken as zero.
    """
    if n < 0:
        raise InputError("n must be nonnegative")
    N = n if N is None else N
    _check_alias(f.grid.m, max(n, N))
    D = min(n, N)
    c = fourier_coefficients(f, D)
    j = c.index
    w = 1.0 - np.abs(j) / (n + 1)
    return SampledCircleFunction(f.grid, _synthesize(f.grid.m, j, w * c.coeffs))


def symmetric_partial_sum(f: SampledCircleFunction, n: int) -> SampledCircleFunction:
    _check_alias(f.grid.m, n)
    c = fourier_coefficients(f, n)
    return SampledCircleFunction(f.grid, _synthesize(f.grid.m, c.index, c.coeffs))


def abel_truncation_degree(r: float, rel_tol: float = 1e-12) -> int:
    """Least N with ``2 r^(N+1) / (1 - r) <= rel_tol``."""
    return max(0, int(math.ceil(math.log(rel_tol * (1 - r) / 2) / math.log(r))) - 1)


def abel_poisson_mean(f: SampledCircleFunction, r: float, N: int | None = None,
                      rel_tol: float = 1e-12) -> SampledCircleFunction:
    """``sum_{|j|<=N} c_j r^|j| z^j`` on the grid.

    Since ``|c_j| <= sup|f|``, the dropped modes contribute at most
    ``2 sup|f| r^(N+1) / (1-r)``; this must be at most ``rel_tol sup|f|``.
    """
    if not 0 < r < 1:
        raise DomainError("r must lie in (0, 1)")
    need = abel_truncation_degree(r, rel_tol)
    if N is None:
        N = need
    if 2 * r ** (N + 1) / (1 - r) > rel_tol:
        raise ResolutionError(f"degree N={N} leaves truncation bound above {rel_tol:.1e}")
    if not f.grid.m > 2 * N:
        raise ResolutionError(
            f"truncation needs degree {N}, unreachable on m={f.grid.m} (need m > {2 * N})"
        )
    c = fourier_coefficients(f, N)
    j = c.index
    return SampledCircleFunction(f.grid, _synthesize(f.grid.m, j, r ** np.abs(j) * c.coeffs))


def grid_rotation_index(alpha: complex, m: int, tol: float = 1e-12) -> int:
    """The integer s with ``alpha = exp(2 pi i s / m)``; DomainError if none."""
    s, err = nearest_grid_rotation(alpha, m)
    if err > tol:
        raise DomainError(
            f"rotation {alpha} is not in the grid subgroup (nearest s={s}, error {err:.2e})"
        )
    return s


def nearest_grid_rotation(alpha: complex, m: int) -> tuple[int, float]:
    """Closest grid rotation and its distance, for approximating other angles."""
    alpha = complex(alpha)
    s = int(round(m * math.atan2(alpha.imag, alpha.real) / (2 * math.pi))) % m
    return s, abs(alpha - complex(math.cos(2 * math.pi * s / m), math.sin(2 * math.pi * s / m)))


def rotate(f: SampledCircleFunction, alpha: complex) -> SampledCircleFunction:
    """``R_alpha f(z) = f(alpha z)`` for a grid rotation."""
    s = grid_rotation_index(alpha, f.grid.m)
    return SampledCircleFunction(f.grid, np.roll(f.values, -s))


def rotation_cesaro(f: SampledCircleFunction, alpha: complex, n: int) -> SampledCircleFunction:
    """``(1/(n+1)) sum_{j<=n} R_alpha^j f``, summing each distinct shift once with its count."""
    if n < 0:
        raise InputError("n must be nonnegative")
    m = f.grid.m
    s = grid_rotation_index(alpha, m)
    counts = np.bincount((np.arange(n + 1) * s) % m, minlength=m)
    out = np.zeros(m, dtype=complex)
    for t in np.nonzero(counts)[0]:
        out += counts[t] * np.roll(f.values, -int(t))
    return SampledCircleFunction(f.grid, out / (n + 1))


def summation_error_report(f: SampledCircleFunction, method: str, params, reference=None
                           ) -> Report:
    """Sup-norm distance to ``reference`` (default f) of the Fejér means
    (``method='fejer'``, params are n values) or Abel means (``'abel'``, r values)."""
    ref = f.values if reference is None else np.asarray(reference)
    errs = []
    for p in params:
        if method == "fejer":
            g = fejer_mean(f, int(p))
        elif method == "abel":
            g = abel_poisson_mean(f, float(p))
        else:
            raise InputError(f"unknown method {method!r}")
        errs.append(float(np.max(np.abs(g.values - ref))))
    rep = Report(f"{method}-sup-error")
    rep.traces["sup_error"] = {"param": np.asarray(params, dtype=float), "sup_error": errs}
    rep.values["sup_error"] = dict(zip(map(str, params), errs))
    return rep
