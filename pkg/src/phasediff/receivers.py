"""Error probabilities of the Helstrom, Kennedy and homodyne receivers.

Each function takes a :class:`SignalParams` channel point. Phase averages
go through a ``rule`` object exposing ``expectation(f, sigma)`` and an
``order``; by default a 96-point :class:`~phasediff.numkit.PeriodicRule`.
A Gauss-Hermite :class:`~phasediff.numkit.QuadratureRule` is accepted too.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .channel import SignalParams, TruncationPolicy, choose_truncation, lambda_matrix
from .numkit import PeriodicRule, erfc, periodic_rule, symmetric_eigenvalues

DEFAULT_ORDER = 96
DEFAULT_RULE = periodic_rule(DEFAULT_ORDER)
SQRT2 = math.sqrt(2.0)


class Receiver(str, enum.Enum):
    HELSTROM = "helstrom"
    KENNEDY = "kennedy"
    HOMODYNE = "homodyne"


@dataclass(frozen=True)
class ErrorProbability:
    value: float
    receiver: Receiver
    params: SignalParams
    quad_order: int | None = None
    dim: int | None = None

    def __post_init__(self):
        if not -1e-15 <= self.value <= 0.5 + 1e-12:
            raise ValueError(f"error probability {self.value} outside [0, 1/2]")

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class ConditionalPair:
    """``p01`` = P(infer 0 | sent 1), ``p10`` = P(infer 1 | sent 0)."""

    p01: float
    p10: float

    @property
    def error(self) -> float:
        return 0.5 * (self.p01 + self.p10)


def _clamp(p: float) -> float:
    return min(max(p, 0.0), 0.5)


def helstrom_pure(energy: float) -> ErrorProbability:
    """Minimum error for the noiseless pair |alpha>, |-alpha> at mean photon number ``energy``."""
    if energy < 0 or not math.isfinite(energy):
        raise ValueError("energy must be finite and >= 0")
    # 1 - sqrt(1 - e) = e / (1 + sqrt(1 - e)) avoids cancellation at large energy
    overlap = math.exp(-4.0 * energy)
    value = 0.5 * overlap / (1.0 + math.sqrt(1.0 - overlap))
    return ErrorProbability(value, Receiver.HELSTROM, SignalParams.from_energy(energy))


def trace_norm(params: SignalParams, dim: int) -> float:
    """Sum of absolute eigenvalues of the truncated discrimination operator."""
    return float(np.sum(np.abs(symmetric_eigenvalues(lambda_matrix(params, dim)))))


def helstrom(
    params: SignalParams,
    policy: TruncationPolicy = TruncationPolicy(),
    dim: int | None = None,
) -> ErrorProbability:
    if params.alpha == 0:
        return ErrorProbability(0.5, Receiver.HELSTROM, params, dim=2)
    if dim is None:
        dim = choose_truncation(params.alpha, policy)
    value = 0.5 * (1.0 - 0.5 * trace_norm(params, dim))
    return ErrorProbability(_clamp(value), Receiver.HELSTROM, params, dim=dim)


def kennedy_conditionals(params: SignalParams, rule=DEFAULT_RULE) -> ConditionalPair:
    a2, d = params.alpha**2, params.delta
    if d == 0:
        return ConditionalPair(math.exp(-4.0 * a2), 0.0)
    no_click_1 = rule.expectation(lambda p: np.exp(-4.0 * a2 * np.cos(0.5 * p) ** 2), d)
    no_click_0 = rule.expectation(lambda p: np.exp(-4.0 * a2 * np.sin(0.5 * p) ** 2), d)
    return ConditionalPair(min(max(no_click_1, 0.0), 1.0), min(max(1.0 - no_click_0, 0.0), 1.0))


def kennedy(params: SignalParams, rule=DEFAULT_RULE) -> ErrorProbability:
    pair = kennedy_conditionals(params, rule)
    return ErrorProbability(_clamp(pair.error), Receiver.KENNEDY, params, quad_order=rule.order)


def homodyne_density(x, sign: int, params: SignalParams, rule=DEFAULT_RULE):
    """Phase-averaged quadrature density ``p(x; sign*alpha)``; ``x`` may be an array."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    x_arr = np.asarray(x, dtype=float)
    shift = sign * SQRT2 * params.alpha

    def f(p):
        mean = shift * np.cos(p)
        return np.exp(-(x_arr[..., None] - mean) ** 2) / math.sqrt(math.pi)

    out = _phase_average_vector(f, params.delta, rule, x_arr.shape)
    return float(out) if x_arr.ndim == 0 else out


def homodyne_cdf(x, sign: int, params: SignalParams, rule=DEFAULT_RULE):
    """Cumulative distribution of the homodyne outcome for input ``sign*alpha``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    x_arr = np.asarray(x, dtype=float)
    shift = sign * SQRT2 * params.alpha

    def f(p):
        # x ~ Normal(mean, 1/2)  =>  P(X <= x) = erfc(mean - x) / 2
        return 0.5 * erfc(shift * np.cos(p) - x_arr[..., None])

    out = _phase_average_vector(f, params.delta, rule, x_arr.shape)
    return float(out) if x_arr.ndim == 0 else out


def _phase_average_vector(f, sigma, rule, shape):
    if sigma == 0:
        return f(np.zeros(1))[..., 0]
    if isinstance(rule, PeriodicRule):
        return rule.expectation_many(f(rule.phases), sigma)
    return f(SQRT2 * sigma * rule.nodes) @ rule.weights / math.sqrt(math.pi)


def homodyne_conditionals(params: SignalParams, rule=DEFAULT_RULE) -> ConditionalPair:
    """Sign-threshold conditionals; the x-integral is done in closed form before phase averaging."""
    a, d = params.alpha, params.delta
    if d == 0:
        q = 0.5 * float(erfc(SQRT2 * a))
    else:
        q = rule.expectation(lambda p: 0.5 * erfc(SQRT2 * a * np.cos(p)), d)
    q = min(max(q, 0.0), 1.0)
    # p(x; -alpha) = p(-x; alpha) makes the two conditionals identical
    return ConditionalPair(q, q)


def homodyne(params: SignalParams, rule=DEFAULT_RULE) -> ErrorProbability:
    pair = homodyne_conditionals(params, rule)
    return ErrorProbability(_clamp(pair.error), Receiver.HOMODYNE, params, quad_order=rule.order)


def error_probability(receiver, params: SignalParams, rule=DEFAULT_RULE,
                      policy: TruncationPolicy = TruncationPolicy()) -> ErrorProbability:
    """Dispatch on receiver name."""
    receiver = Receiver(receiver)
    if receiver is Receiver.HELSTROM:
        return helstrom(params, policy)
    if receiver is Receiver.KENNEDY:
        return kennedy(params, rule)
    return homodyne(params, rule)
