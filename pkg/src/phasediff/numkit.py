"""Numerical primitives shared by the physics modules.

Special functions, quadrature rules for Gaussian phase averages and a
dense symmetric eigensolver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

SQRT_PI = math.sqrt(math.pi)
MAX_HERMITE_ORDER = 512


def erfc(x):
    """Complementary error function, elementwise."""
    return special.erfc(x)


def log_factorial(n):
    """Natural log of ``n!`` for nonnegative integers (scalar or array)."""
    n_arr = np.asarray(n)
    if np.any(n_arr < 0):
        raise ValueError("log_factorial is defined for n >= 0")
    out = special.gammaln(n_arr + 1.0)
    return float(out) if out.ndim == 0 else out


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite rule for integrals against ``exp(-t**2)``."""

    order: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", _frozen(self.nodes))
        object.__setattr__(self, "weights", _frozen(self.weights))

    def integrate(self, g) -> float:
        """Approximate ``int g(t) exp(-t**2) dt``."""
        return float(np.dot(self.weights, g(self.nodes)))

    def expectation(self, f, sigma: float) -> float:
        return gaussian_expectation(f, sigma, self)


def _hermite_functions(t: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    # orthonormal Hermite functions psi_n, psi_{n-1}; bounded for all t
    prev = np.zeros_like(t)
    cur = np.exp(-0.5 * t * t) / SQRT_PI**0.5
    for k in range(n):
        nxt = t * math.sqrt(2.0 / (k + 1)) * cur - math.sqrt(k / (k + 1)) * prev
        prev, cur = cur, nxt
    return cur, prev


def gauss_hermite(order: int) -> QuadratureRule:
    """Gauss-Hermite nodes and weights of the given order.

    Nodes start from the eigenvalues of the Jacobi matrix and are polished
    by Newton steps on the orthonormal Hermite functions, which stay finite
    where the raw polynomials would overflow.

    For orders above roughly 360 the outermost weights fall below the
    smallest double and are stored as 0.0.
    """
    if not isinstance(order, (int, np.integer)) or not 1 <= order <= MAX_HERMITE_ORDER:
        raise ValueError(f"order must be an integer in [1, {MAX_HERMITE_ORDER}], got {order!r}")
    n = int(order)
    if n == 1:
        return QuadratureRule(1, [0.0], [SQRT_PI])
    off = np.sqrt(np.arange(1, n) / 2.0)
    from scipy.linalg import eigvalsh_tridiagonal

    t = eigvalsh_tridiagonal(np.zeros(n), off)
    for _ in range(6):
        psi_n, psi_nm1 = _hermite_functions(t, n)
        dpsi = math.sqrt(2.0 * n) * psi_nm1 - t * psi_n
        step = psi_n / dpsi
        t = t - step
        if np.max(np.abs(step)) < 1e-15:
            break
    t = 0.5 * (t - t[::-1])
    _, psi_nm1 = _hermite_functions(t, n)
    with np.errstate(under="ignore"):
        w = np.exp(-t * t) / (n * psi_nm1**2)
    w = 0.5 * (w + w[::-1])
    return QuadratureRule(n, t, w)


def gaussian_expectation(f, sigma: float, rule: QuadratureRule) -> float:
    """Expectation of ``f(phi)`` for ``phi ~ Normal(0, sigma**2)``.

    ``f`` must accept a numpy array of evaluation points.
    """
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0:
        return float(np.asarray(f(np.zeros(1)))[0])
    vals = f(math.sqrt(2.0) * sigma * rule.nodes)
    return float(np.dot(rule.weights, vals) / SQRT_PI)


@dataclass(frozen=True)
class PeriodicRule:
    """Gaussian phase average for 2*pi-periodic integrands.

    The integrand is sampled on ``order`` equispaced phases in [0, 2*pi),
    its Fourier coefficients are taken by FFT and each harmonic ``k`` is
    damped by the Gaussian characteristic function ``exp(-k**2 sigma**2/2)``.
    Accuracy depends only on the integrand's bandwidth, not on ``sigma``,
    so wide phase distributions cost nothing extra.
    """

    order: int
    phases: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.order < 2:
            raise ValueError("periodic rule needs at least 2 points")
        object.__setattr__(self, "phases", _frozen(2.0 * np.pi * np.arange(self.order) / self.order))

    def harmonic_weights(self, sigma: float) -> np.ndarray:
        k = np.arange(self.order // 2 + 1, dtype=float)
        g = np.exp(-0.5 * (k * sigma) ** 2)
        g[1:] *= 2.0
        if self.order % 2 == 0:
            g[-1] /= 2.0  # Nyquist term appears once
        return g

    def expectation(self, f, sigma: float) -> float:
        if sigma < 0:
            raise ValueError("sigma must be >= 0")
        if sigma == 0:
            return float(np.asarray(f(np.zeros(1)))[0])
        coeffs = np.fft.rfft(f(self.phases)).real / self.order
        return float(np.dot(coeffs, self.harmonic_weights(sigma)))

    def expectation_many(self, values: np.ndarray, sigma: float) -> np.ndarray:
        """Phase average of each row of ``values`` sampled on ``self.phases``."""
        coeffs = np.fft.rfft(values, axis=-1).real / self.order
        return coeffs @ self.harmonic_weights(sigma)


def periodic_rule(order: int = 96) -> PeriodicRule:
    return PeriodicRule(int(order))


def _as_array(M) -> np.ndarray:
    return np.asarray(getattr(M, "entries", M), dtype=float)


def jacobi_eigen(M, tol: float = 1e-12, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi diagonalization of a real symmetric matrix.

    Returns ``(eigenvalues, V)`` with ``M = V diag(eigenvalues) V.T``.
    Sweeps stop once the off-diagonal Frobenius norm drops below
    ``tol * ||M||_F``.
    """
    A = _as_array(M).copy()
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    scale = np.linalg.norm(A)
    if np.max(np.abs(A - A.T), initial=0.0) > 1e-12 * max(scale, 1.0):
        raise ValueError("matrix is not symmetric")
    A = 0.5 * (A + A.T)
    n = A.shape[0]
    V = np.eye(n)
    if n < 2 or scale == 0.0:
        return np.diag(A).copy(), V
    thresh = tol * scale
    for _ in range(max_sweeps):
        if np.linalg.norm(A - np.diag(np.diag(A))) <= thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                Ap, Aq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * Ap - s * Aq
                A[:, q] = s * Ap + c * Aq
                Ap, Aq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * Ap - s * Aq
                A[q, :] = s * Ap + c * Aq
                A[p, q] = A[q, p] = 0.0
                Vp, Vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * Vp - s * Vq
                V[:, q] = s * Vp + c * Vq
    else:
        raise RuntimeError("Jacobi sweeps did not converge")
    return np.diag(A).copy(), V


def symmetric_eigenvalues(M) -> np.ndarray:
    """All eigenvalues of a real symmetric matrix (ascending, with multiplicity)."""
    vals, _ = jacobi_eigen(M)
    return np.sort(vals)
