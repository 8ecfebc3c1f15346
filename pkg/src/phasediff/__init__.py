"""Receivers for phase-shift keyed coherent signals under phase diffusion."""

__version__ = "0.1.0"

from .channel import SignalParams, TruncationPolicy
from .receivers import helstrom, helstrom_pure, homodyne, kennedy

__all__ = ["SignalParams", "TruncationPolicy", "helstrom", "helstrom_pure", "homodyne", "kennedy"]
