import math

import numpy as np
import pytest


def phase_trapezoid(f, delta, points=1_000_001):
    """Brute-force Gaussian phase average over [-8 delta, 8 delta]."""
    phi = np.linspace(-8 * delta, 8 * delta, points)
    g = np.exp(-0.5 * (phi / delta) ** 2) / (math.sqrt(2 * math.pi) * delta)
    return float(np.trapezoid(g * f(phi), phi))


@pytest.fixture
def trapezoid_oracle():
    return phase_trapezoid


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one acceptance line and assert it."""

    def check(label, passed, detail=""):
        ACCEPTANCE_LINES.append(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}".rstrip())
        assert passed, f"{label}: {detail}"

    return check


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
