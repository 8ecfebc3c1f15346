"""Phase-diffused PSK signals in a truncated photon-number basis."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .numkit import log_factorial


class TruncationError(ValueError):
    """Raised when the required Fock cutoff exceeds the policy's ``max_dim``."""


@dataclass(frozen=True)
class SignalParams:
    """Channel point: real coherent amplitude ``alpha`` and phase-noise std ``delta`` (rad)."""

    alpha: float
    delta: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "delta"):
            v = getattr(self, name)
            if isinstance(v, complex):
                raise TypeError(f"{name} must be real")
            v = float(v)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
            object.__setattr__(self, name, v)

    @classmethod
    def from_energy(cls, energy: float, delta: float = 0.0) -> "SignalParams":
        if energy < 0:
            raise ValueError("energy must be >= 0")
        return cls(math.sqrt(energy), delta)

    @property
    def energy(self) -> float:
        """Mean photon number per signal."""
        return self.alpha**2


@dataclass(frozen=True)
class TruncationPolicy:
    tail_epsilon: float = 1e-12
    max_dim: int = 512

    def __post_init__(self):
        if not 0 < self.tail_epsilon < 1:
            raise ValueError("tail_epsilon must lie in (0, 1)")
        if self.max_dim < 2:
            raise ValueError("max_dim must be >= 2")


GUARD_BAND = 5


@dataclass(frozen=True)
class FockMatrix:
    """Real symmetric matrix on the photon-number states |0>, ..., |dim-1>."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("FockMatrix must be square")
        a.flags.writeable = False
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __getitem__(self, idx):
        return self.entries[idx]

    def trace(self) -> float:
        return float(np.trace(self.entries))

    def to_dict(self) -> dict:
        return {"dim": self.dim, "entries": self.entries.ravel().tolist()}


def choose_truncation(alpha: float, policy: TruncationPolicy = TruncationPolicy()) -> int:
    """Fock cutoff for amplitude ``alpha``.

    Smallest ``k`` with Poisson(alpha**2) tail mass ``P(n >= k)`` below
    ``policy.tail_epsilon``, plus a guard band of 5 levels. The vacuum
    (alpha = 0) has no tail and gets the 2-level floor.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if alpha == 0:
        return 2
    mean = alpha * alpha
    # sf(k-1) = P(n >= k)
    k = int(mean)
    while stats.poisson.sf(k - 1, mean) >= policy.tail_epsilon:
        k += 1
    dim = max(k + GUARD_BAND, 2)
    if dim > policy.max_dim:
        raise TruncationError(
            f"alpha={alpha} needs dim {dim} > max_dim {policy.max_dim}"
        )
    return dim


def _log_amplitudes(alpha: float, dim: int):
    n = np.arange(dim)
    logfac = log_factorial(n)
    m = n[:, None]
    log_alpha = math.log(alpha) if alpha > 0 else -math.inf
    # alpha**(n+m) with 0**0 = 1
    npm = (n + m).astype(float)
    with np.errstate(invalid="ignore"):
        log_pow = np.where(npm == 0, 0.0, npm * log_alpha)
    return n, m, log_pow - 0.5 * (logfac[:, None] + logfac[None, :])


def rho_matrix(params: SignalParams, sign: int, dim: int) -> FockMatrix:
    """Matrix elements <m| rho'_{sign*alpha} |n> of the phase-diffused coherent state."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if dim < 2:
        raise ValueError("dim must be >= 2")
    a, d = params.alpha, params.delta
    n, m, logamp = _log_amplitudes(a, dim)
    mag = np.exp(logamp - a * a - 0.5 * ((n - m) * d) ** 2)
    if sign < 0:
        mag = np.where((n + m) % 2 == 1, -mag, mag)
    return FockMatrix(mag)


def lambda_matrix(params: SignalParams, dim: int) -> FockMatrix:
    """Traceless difference ``rho'_alpha - rho'_{-alpha}``; only odd ``m - n`` survive."""
    if dim < 2:
        raise ValueError("dim must be >= 2")
    a, d = params.alpha, params.delta
    n, m, logamp = _log_amplitudes(a, dim)
    parity = 1.0 - (-1.0) ** (n - m)
    return FockMatrix(parity * np.exp(logamp - a * a - 0.5 * ((n - m) * d) ** 2))
