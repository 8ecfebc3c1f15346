"""Noise level above which homodyne detection beats the Kennedy receiver."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .channel import SignalParams, TruncationPolicy
from .receivers import DEFAULT_RULE, homodyne, kennedy

SCAN_STEP = 0.01


class NoCrossingError(RuntimeError):
    """Homodyne stays worse than Kennedy over the whole scanned range."""


@dataclass(frozen=True)
class ThresholdPoint:
    energy: float
    delta_th: float
    bracket_residual: float
    status: str = "ok"
    later_crossings: tuple[float, ...] = field(default=())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["later_crossings"] = list(self.later_crossings)
        return d


def advantage(energy: float, delta: float, rule=DEFAULT_RULE) -> float:
    """``P_H - P_K``; negative where homodyne is the better receiver."""
    p = SignalParams.from_energy(energy, delta)
    return homodyne(p, rule).value - kennedy(p, rule).value


def delta_threshold(energy: float, tol: float = 1e-9, delta_max: float = 4.0,
                    rule=DEFAULT_RULE, policy: TruncationPolicy | None = None) -> ThresholdPoint:
    """Smallest phase-noise level where ``P_H - P_K`` turns negative.

    Scans [0, delta_max] in steps of 0.01 rad and bisects the first sign
    change until ``|P_H - P_K| <= tol``. Later sign changes are recorded in
    ``later_crossings`` rather than treated as errors. ``policy`` is unused
    (neither receiver needs a Fock cutoff) and accepted for a uniform call
    signature.
    """
    if energy <= 0:
        raise ValueError("energy must be > 0")
    if tol < 1e-10:
        raise ValueError("tol must be >= 1e-10")
    if not 0 < delta_max <= 4:
        raise ValueError("delta_max must lie in (0, 4]")

    def D(d):
        return advantage(energy, d, rule)

    d0 = D(0.0)
    grid = np.linspace(0.0, delta_max, int(round(delta_max / SCAN_STEP)) + 1)
    if d0 <= 0:
        vals = np.array([d0] + [D(d) for d in grid[1:]])
        # no root to bracket: homodyne already wins without noise
        return ThresholdPoint(energy, 0.0, 0.0, later_crossings=_crossings(grid, vals))

    vals = [d0]
    for i in range(1, len(grid)):
        vals.append(D(grid[i]))
        if vals[-1] <= 0:
            break
    else:
        raise NoCrossingError(f"P_H > P_K on all of [0, {delta_max}] at N={energy}")
    lo, hi = grid[i - 1], grid[i]
    d_hi = vals[-1]
    root, resid = (hi, abs(d_hi)) if abs(d_hi) <= tol else _bisect(D, lo, hi, tol)
    tail = np.array([D(d) for d in grid[i:]])
    return ThresholdPoint(energy, float(root), float(resid),
                          later_crossings=_crossings(grid[i:], tail))


def _bisect(D, lo: float, hi: float, tol: float) -> tuple[float, float]:
    # invariant: D(lo) > 0 >= D(hi)
    mid, dm = hi, D(hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        dm = D(mid)
        if abs(dm) <= tol or hi - lo < 1e-15:
            break
        if dm > 0:
            lo = mid
        else:
            hi = mid
    return mid, abs(dm)


def _crossings(grid: np.ndarray, vals: np.ndarray) -> tuple[float, ...]:
    s = np.sign(vals)
    idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
    return tuple(float(0.5 * (grid[j] + grid[j + 1])) for j in idx)


def threshold_curve(energies, tol: float = 1e-9, delta_max: float = 4.0,
                    rule=DEFAULT_RULE, policy: TruncationPolicy | None = None) -> list[ThresholdPoint]:
    """One :class:`ThresholdPoint` per energy; failures are kept as rows with a status."""
    energies = [float(e) for e in energies]
    if not energies:
        raise ValueError("energy grid is empty")
    if any(b <= a for a, b in zip(energies, energies[1:])):
        raise ValueError("energy grid must be strictly increasing")
    out = []
    for e in energies:
        try:
            out.append(delta_threshold(e, tol, delta_max, rule, policy))
        except (NoCrossingError, ValueError) as exc:
            out.append(ThresholdPoint(e, math.nan, math.nan, status=f"error: {exc}"))
    return out
