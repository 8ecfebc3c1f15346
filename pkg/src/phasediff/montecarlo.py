"""Shot-by-shot emulation of the PSK experiment under phase diffusion.

Symbols are keyed uniformly at random, each shot gets a fresh Gaussian
phase kick, and the receiver infers the symbol from a homodyne outcome
(sign threshold at 0) or from an on/off click after the Kennedy
displacement. Every run owns an independent ``PCG64`` stream spawned
from the configuration seed, so runs are reproducible in isolation.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .channel import SignalParams

GENERATOR = "PCG64"
QUADRATURE_STD = math.sqrt(0.5)  # vacuum variance 1/2 for x = (a + a^dag)/sqrt(2)


@dataclass(frozen=True)
class RunConfig:
    params: SignalParams
    shots_per_run: int = 5000
    runs: int = 10
    seed: int = 0
    receiver: str = "homodyne"

    def __post_init__(self):
        if self.shots_per_run < 1:
            raise ValueError("shots_per_run must be >= 1")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.receiver not in ("homodyne", "kennedy"):
            raise ValueError("receiver must be 'homodyne' or 'kennedy'")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["params"] = {"alpha": self.params.alpha, "delta": self.params.delta}
        return d


@dataclass(frozen=True)
class ShotRecord:
    true_symbol: int
    phase: float
    outcome: float
    inferred_symbol: int


@dataclass(frozen=True)
class RunSummary:
    per_run_error: list[float]
    mean_error: float
    std_of_mean: float
    degenerate: bool = False
    generator: str = GENERATOR
    seed: int | None = None

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ShotTable:
    """Column-oriented batch of shots."""

    true_symbol: np.ndarray
    phase: np.ndarray
    outcome: np.ndarray
    inferred_symbol: np.ndarray = field(repr=False)

    @property
    def error_rate(self) -> float:
        return float(np.mean(self.true_symbol != self.inferred_symbol))

    def records(self):
        for s, p, o, i in zip(self.true_symbol, self.phase, self.outcome, self.inferred_symbol):
            yield ShotRecord(int(s), float(p), float(o), int(i))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def run_streams(seed: int, runs: int) -> list[np.random.Generator]:
    """One independent generator per run, spawned from ``seed``."""
    return [np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(seed).spawn(runs)]


def _signs(symbols: np.ndarray) -> np.ndarray:
    # symbol 1 -> |alpha>, symbol 0 -> |-alpha>
    return np.where(symbols == 1, 1.0, -1.0)


def homodyne_shots(params: SignalParams, symbols, rng: np.random.Generator) -> ShotTable:
    symbols = np.asarray(symbols, dtype=np.int8)
    phase = rng.normal(0.0, params.delta, symbols.shape)
    mean = _signs(symbols) * math.sqrt(2.0) * params.alpha * np.cos(phase)
    x = rng.normal(mean, QUADRATURE_STD)
    return ShotTable(symbols, phase, x, (x > 0).astype(np.int8))


def kennedy_shots(params: SignalParams, symbols, rng: np.random.Generator) -> ShotTable:
    symbols = np.asarray(symbols, dtype=np.int8)
    phase = rng.normal(0.0, params.delta, symbols.shape)
    a2 = params.alpha**2
    # displaced amplitude |sign*alpha*e^{i phi} + alpha|^2
    mean = np.where(symbols == 1, 4.0 * a2 * np.cos(0.5 * phase) ** 2, 4.0 * a2 * np.sin(0.5 * phase) ** 2)
    counts = rng.poisson(mean)
    return ShotTable(symbols, phase, counts.astype(float), (counts > 0).astype(np.int8))


def simulate_homodyne_shot(params: SignalParams, symbol: int, rng: np.random.Generator) -> ShotRecord:
    return next(homodyne_shots(params, [symbol], rng).records())


def simulate_kennedy_shot(params: SignalParams, symbol: int, rng: np.random.Generator) -> ShotRecord:
    return next(kennedy_shots(params, [symbol], rng).records())


_SHOTS = {"homodyne": homodyne_shots, "kennedy": kennedy_shots}


def simulate_run(config: RunConfig, rng: np.random.Generator) -> ShotTable:
    symbols = rng.integers(0, 2, config.shots_per_run, dtype=np.int8)
    return _SHOTS[config.receiver](config.params, symbols, rng)


def summarize(per_run_error, seed: int | None = None) -> RunSummary:
    errs = [float(e) for e in per_run_error]
    runs = len(errs)
    mean = float(np.mean(errs))
    if runs == 1:
        return RunSummary(errs, mean, 0.0, degenerate=True, seed=seed)
    std = float(np.std(errs, ddof=1) / math.sqrt(runs))
    return RunSummary(errs, mean, std, seed=seed)


def run_experiment(config: RunConfig, keep_shots: bool = False):
    """Run ``config.runs`` independent batches and summarize per-run error rates.

    With ``keep_shots`` the per-run :class:`ShotTable` list is returned as well.
    """
    tables = [simulate_run(config, rng) for rng in run_streams(config.seed, config.runs)]
    summary = summarize([t.error_rate for t in tables], seed=config.seed)
    return (summary, tables) if keep_shots else summary


def generate_trace(params: SignalParams, symbols, angles, rng: np.random.Generator) -> np.ndarray:
    """Homodyne outcomes for quadrature angles ``angles`` with fresh phase noise per point.

    ``symbols`` and ``angles`` broadcast against each other; the outcome is
    drawn from Normal(s*sqrt(2)*alpha*cos(phi - psi), 1/2).
    """
    symbols, angles = np.broadcast_arrays(np.asarray(symbols), np.asarray(angles, dtype=float))
    phase = rng.normal(0.0, params.delta, angles.shape)
    mean = _signs(symbols) * math.sqrt(2.0) * params.alpha * np.cos(phase - angles)
    return rng.normal(mean, QUADRATURE_STD)


def angle_trace(params: SignalParams, count: int, rng: np.random.Generator) -> list[tuple[float, int, float]]:
    """Left-panel style rows ``(psi, symbol, outcome)``: ``count`` angles over [0, 2*pi) per symbol."""
    if count < 1:
        raise ValueError("count must be >= 1")
    psi = 2.0 * np.pi * np.arange(count) / count
    rows = []
    for symbol in (1, 0):
        x = generate_trace(params, symbol, psi, rng)
        rows.extend((float(p), symbol, float(v)) for p, v in zip(psi, x))
    return rows


def shot_trace(params: SignalParams, count: int, rng: np.random.Generator) -> list[tuple[int, int, float]]:
    """Right-panel style rows ``(shot_index, symbol, outcome)`` at psi = 0 with random keying."""
    if count < 1:
        raise ValueError("count must be >= 1")
    symbols = rng.integers(0, 2, count, dtype=np.int8)
    x = generate_trace(params, symbols, 0.0, rng)
    return [(i, int(s), float(v)) for i, (s, v) in enumerate(zip(symbols, x))]
