"""Small-amplitude and large-noise behaviour of the three receivers.

Two kinds of output sit side by side here: the printed closed-form
expansions (evaluated literally) and quantities measured from the exact
numerics, namely small-amplitude coefficients by Richardson-extrapolated
finite differences and large-noise prefactors/decay rates by a log-linear
least-squares fit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

import numpy as np

from .channel import SignalParams, TruncationPolicy
from .receivers import DEFAULT_RULE, ErrorProbability, Receiver, error_probability


class Regime(str, enum.Enum):
    SMALL_ALPHA = "small_alpha"
    LARGE_DELTA = "large_delta"


class FitError(RuntimeError):
    """Raised when ``1 - 2P`` is too close to zero for a log-domain fit."""


@dataclass(frozen=True)
class AsymptoticForm:
    """``P ~ (1 - coefficient * exp(-decay_rate * delta**2)) / 2``."""

    receiver: Receiver
    regime: Regime
    coefficient: float
    decay_rate: float

    def __post_init__(self):
        if self.coefficient < 0 or self.decay_rate <= 0:
            raise ValueError("coefficient must be >= 0 and decay_rate > 0")

    def evaluate(self, delta: float) -> float:
        return min(max(0.5 * (1.0 - self.coefficient * math.exp(-self.decay_rate * delta**2)), 0.0), 0.5)


@dataclass(frozen=True)
class FitReport:
    receiver: Receiver
    alpha: float
    estimated_rate: float
    estimated_prefactor: float
    residual: float
    delta_window: tuple[float, float]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["receiver"] = self.receiver.value
        d["delta_window"] = list(self.delta_window)
        return d


# printed small-amplitude coefficients: value at alpha, power of alpha, decay rate
_PRINTED_SMALL_ALPHA = {
    Receiver.HELSTROM: (lambda a: a, 1, 0.5),
    Receiver.KENNEDY: (lambda a: 4.0 * a * a, 2, 2.0),
    Receiver.HOMODYNE: (lambda a: a * math.sqrt(2.0 / math.pi), 1, 0.5),
}
# printed large-noise decay rates
PRINTED_LARGE_DELTA_RATE = {Receiver.HELSTROM: 0.5, Receiver.KENNEDY: 2.0, Receiver.HOMODYNE: 0.5}


def small_alpha_form(receiver, alpha: float) -> AsymptoticForm:
    receiver = Receiver(receiver)
    coeff, _, rate = _PRINTED_SMALL_ALPHA[receiver]
    return AsymptoticForm(receiver, Regime.SMALL_ALPHA, coeff(alpha), rate)


def paper_small_alpha(receiver, params: SignalParams) -> ErrorProbability:
    """Printed small-amplitude expansion, evaluated as written and clamped to [0, 1/2]."""
    form = small_alpha_form(receiver, params.alpha)
    return ErrorProbability(form.evaluate(params.delta), form.receiver, params)


def printed_small_alpha_coefficient(receiver, delta: float) -> float:
    """Coefficient ``c`` in the printed form ``P ~ (1 - c * alpha**p) / 2`` at noise ``delta``."""
    receiver = Receiver(receiver)
    coeff, power, rate = _PRINTED_SMALL_ALPHA[receiver]
    return coeff(1.0) * math.exp(-rate * delta**2)


def small_alpha_power(receiver) -> int:
    return _PRINTED_SMALL_ALPHA[Receiver(receiver)][1]


def small_alpha_coefficient(receiver, delta: float, h: float = 1e-3, rule=DEFAULT_RULE,
                            policy: TruncationPolicy = TruncationPolicy()) -> float:
    """Leading coefficient ``c(delta)`` of ``1 - 2P ~ c * alpha**p`` from the exact receiver.

    Evaluated at ``alpha = h`` and ``2h`` and Richardson-extrapolated
    assuming an ``O(alpha**2)`` relative correction.
    """
    receiver = Receiver(receiver)
    p = small_alpha_power(receiver)

    def c(a):
        prob = error_probability(receiver, SignalParams(a, delta), rule, policy).value
        return (1.0 - 2.0 * prob) / a**p

    return (4.0 * c(h) - c(2.0 * h)) / 3.0


def fit_large_delta(receiver, alpha: float, delta_window=(2.0, 3.0), points: int = 11,
                    rule=DEFAULT_RULE, policy: TruncationPolicy = TruncationPolicy()) -> FitReport:
    """Least-squares fit of ``ln(1 - 2P) = ln g - k delta**2`` over ``delta_window``."""
    receiver = Receiver(receiver)
    lo, hi = map(float, delta_window)
    if not 1.0 <= lo < hi <= 4.0:
        raise ValueError("delta_window must be increasing within [1, 4]")
    if points < 8:
        raise ValueError("need at least 8 fit points")
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    deltas = np.linspace(lo, hi, points)
    gaps = np.array([
        1.0 - 2.0 * error_probability(receiver, SignalParams(alpha, d), rule, policy).value
        for d in deltas
    ])
    if np.any(gaps <= 1e-13):
        raise FitError(f"1 - 2P underflows for {receiver.value} at alpha={alpha} in {delta_window}")
    y = np.log(gaps)
    slope, intercept = np.polyfit(deltas**2, y, 1)
    residual = float(np.max(np.abs(y - (intercept + slope * deltas**2))))
    return FitReport(receiver, float(alpha), float(-slope), float(math.exp(intercept)),
                     residual, (lo, hi))


@dataclass(frozen=True)
class PrefactorComparison:
    alpha: float
    g_helstrom: float
    g_kennedy: float
    g_homodyne: float
    fits: tuple[FitReport, ...]

    @property
    def homodyne_below_helstrom(self) -> bool:
        return self.g_homodyne < self.g_helstrom

    @property
    def homodyne_to_helstrom(self) -> float:
        return self.g_homodyne / self.g_helstrom

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "g_helstrom": self.g_helstrom,
            "g_kennedy": self.g_kennedy,
            "g_homodyne": self.g_homodyne,
            "homodyne_below_helstrom": self.homodyne_below_helstrom,
            "fits": [f.to_dict() for f in self.fits],
        }


def prefactor_comparison(alpha: float, delta_window=(2.0, 3.0), points: int = 11,
                         rule=DEFAULT_RULE, policy: TruncationPolicy = TruncationPolicy()
                         ) -> PrefactorComparison:
    fits = tuple(fit_large_delta(r, alpha, delta_window, points, rule, policy) for r in Receiver)
    q, k, h = (f.estimated_prefactor for f in fits)
    return PrefactorComparison(float(alpha), q, k, h, fits)


_DERIVED_DELTA0 = {
    Receiver.HELSTROM: 2.0,
    Receiver.KENNEDY: 4.0,
    Receiver.HOMODYNE: math.sqrt(8.0 / math.pi),
}


def small_alpha_audit(delta: float = 0.0, rule=DEFAULT_RULE) -> list[dict]:
    """Printed vs measured small-amplitude coefficients, one row per receiver."""
    rows = []
    for r in Receiver:
        printed = printed_small_alpha_coefficient(r, delta)
        measured = small_alpha_coefficient(r, delta, rule=rule)
        row = {
            "receiver": r.value,
            "delta": delta,
            "alpha_power": small_alpha_power(r),
            "printed_coefficient": printed,
            "measured_coefficient": measured,
            "ratio_measured_to_printed": measured / printed if printed else math.nan,
        }
        if delta == 0:
            row["series_coefficient"] = _DERIVED_DELTA0[r]
        ratio = row["ratio_measured_to_printed"]
        row["note"] = "agrees" if abs(ratio - 1.0) < 5e-3 else f"discrepancy: factor {ratio:.4f}"
        rows.append(row)
    return rows
