import math

import pytest
from scipy import stats

from phasediff.channel import SignalParams
from phasediff.receivers import homodyne, kennedy
from phasediff.threshold import NoCrossingError, advantage, delta_threshold, threshold_curve


def closed_form_zero(energy):
    a = math.sqrt(energy)
    return stats.norm.cdf(-2 * a) <= 0.5 * math.exp(-4 * energy)


def test_zero_threshold_small_energy():
    assert stats.norm.cdf(-1.0) < math.exp(-1) / 2
    pt = delta_threshold(0.25)
    assert pt.delta_th == 0.0 and pt.status == "ok"


def test_positive_threshold_with_root_contract():
    pt = delta_threshold(2.0, tol=1e-8)
    assert pt.delta_th > 0
    assert pt.bracket_residual <= 1e-8
    assert abs(advantage(2.0, pt.delta_th)) <= 1e-8


@pytest.mark.parametrize("energy", [0.5, 1.0, 2.0, 4.0])
def test_sign_change_both_sides(energy):
    pt = delta_threshold(energy, tol=1e-9)
    above = SignalParams.from_energy(energy, pt.delta_th + 0.05)
    below = SignalParams.from_energy(energy, max(0.0, pt.delta_th - 0.05))
    assert homodyne(above).value < kennedy(above).value
    assert homodyne(below).value > kennedy(below).value
    assert pt.later_crossings == ()


@pytest.mark.parametrize("energy", [0.05, 0.1, 0.25, 0.3, 0.4, 0.5, 1.0])
def test_zero_region_matches_closed_form(energy):
    assert (delta_threshold(energy).delta_th == 0.0) == closed_form_zero(energy)


def test_no_crossing():
    with pytest.raises(NoCrossingError):
        delta_threshold(2.0, delta_max=0.02)


def test_argument_validation():
    for kwargs in ({"tol": 1e-12}, {"delta_max": 5.0}, {"delta_max": 0.0}):
        with pytest.raises(ValueError):
            delta_threshold(1.0, **kwargs)
    with pytest.raises(ValueError):
        delta_threshold(0.0)


def test_curve():
    small = threshold_curve([0.1, 0.25])
    assert [p.delta_th for p in small] == [0.0, 0.0]
    big = threshold_curve([2.0, 4.0])
    assert all(0 < p.delta_th < math.inf for p in big)
    assert len(threshold_curve([1.0])) == 1
    rows = threshold_curve([0.25, 1.0], delta_max=0.05)
    assert rows[1].status.startswith("error") and math.isnan(rows[1].delta_th)
    with pytest.raises(ValueError):
        threshold_curve([])
    with pytest.raises(ValueError):
        threshold_curve([2.0, 1.0])


def test_threshold_decreases_with_energy():
    pts = threshold_curve([0.5, 1.0, 2.0, 4.0])
    th = [p.delta_th for p in pts]
    assert th == sorted(th, reverse=True)
