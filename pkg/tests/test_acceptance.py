"""Exit criteria, one test per criterion (or sub-claim), with pinned tolerances."""

import math
import time

import numpy as np
import pytest

from phasediff.asymptotics import (
    fit_large_delta,
    prefactor_comparison,
    small_alpha_audit,
    small_alpha_coefficient,
)
from phasediff.channel import SignalParams, TruncationPolicy, choose_truncation
from phasediff.montecarlo import RunConfig, run_experiment
from phasediff.numkit import periodic_rule
from phasediff.receivers import helstrom, helstrom_pure, homodyne, kennedy
from phasediff.threshold import delta_threshold

S = SignalParams
MC_SEEDS = list(range(1, 21))
ALPHAS_7 = (0.5, 1.0, 2.0)


@pytest.fixture(scope="module")
def prefactors():
    return {a: prefactor_comparison(a, (2.0, 3.0)) for a in ALPHAS_7}


def test_c01_closed_form_anchors(criterion):
    t0 = time.perf_counter()
    p = S(1.0, 0.0)
    q, k, h = helstrom(p).value, kennedy(p).value, homodyne(p).value
    dt = time.perf_counter() - t0
    ok = abs(q - 0.0046000) <= 1e-6 and abs(k - 0.0091578) <= 1e-6 and abs(h - 0.0227501) <= 1e-6
    criterion("C1 closed-form anchors", ok and dt < 1.0,
              f"P_Q={q:.7f} P_K={k:.7f} P_H={h:.7f} t={dt:.2f}s")


def test_c02_helstrom_consistency(criterion):
    t0 = time.perf_counter()
    diffs = {a: abs(helstrom(S(a, 1e-6), TruncationPolicy(1e-12)).value - helstrom_pure(a * a).value)
             for a in (0.5, 1.0, 1.5, 2.0)}
    dt = time.perf_counter() - t0
    criterion("C2 helstrom(delta=1e-6) vs pure", max(diffs.values()) <= 1e-6 and dt < 5.0,
              f"max diff={max(diffs.values()):.2e} t={dt:.2f}s")


def test_c03_quantum_limit_dominance(criterion):
    t0 = time.perf_counter()
    worst = -math.inf
    for a in (0.25, 0.5, 1.0, 1.5, 2.0):
        for d in np.round(np.arange(0.0, 2.01, 0.2), 10):
            p = S(a, d)
            q = helstrom(p).value
            worst = max(worst, q - kennedy(p).value, q - homodyne(p).value)
    dt = time.perf_counter() - t0
    criterion("C3 P_Q <= P_K, P_H on grid", worst <= 1e-9 and dt < 30.0,
              f"max(P_Q - P_X)={worst:.2e} t={dt:.2f}s")


def test_c04_kennedy_near_optimality(criterion):
    ratios = {n: kennedy(S.from_energy(n)).value / helstrom(S.from_energy(n)).value for n in (2, 3, 4)}
    criterion("C4 P_K/P_Q ~ 2 at N=2,3,4", all(abs(r - 2) <= 0.05 for r in ratios.values()),
              " ".join(f"N={n}:{r:.4f}" for n, r in ratios.items()))


def test_c05_homodyne_robustness(criterion):
    rh = homodyne(S(1.0, 0.2)).value / homodyne(S(1.0, 0.0)).value
    rk = kennedy(S(1.0, 0.2)).value / kennedy(S(1.0, 0.0)).value
    criterion("C5 P_H flat for delta<=0.2", rh <= 1.25 and rk > rh,
              f"P_H ratio={rh:.4f} P_K ratio={rk:.4f}")


def test_c06a_gap_ratio_grows_with_noise(criterion):
    def ratio(d):
        p = S(1.0, d)
        return (0.5 - homodyne(p).value) / (0.5 - helstrom(p).value)

    r05, r25 = ratio(0.5), ratio(2.5)
    criterion("C6a (1/2-P_H)/(1/2-P_Q) at 2.5 > at 0.5", r25 > r05, f"0.5:{r05:.6f} 2.5:{r25:.6f}")


def test_c06b_large_noise_decay_rates(criterion):
    rates = {r: fit_large_delta(r, 1.0, (2.0, 3.0)).estimated_rate for r in ("helstrom", "homodyne")}
    criterion("C6b decay rates ~ 1/2", all(abs(k - 0.5) <= 0.075 for k in rates.values()),
              " ".join(f"{r}:{k:.5f}" for r, k in rates.items()))


def test_c07a_homodyne_prefactor_below_helstrom(criterion, prefactors):
    detail = " ".join(f"a={a}:{c.g_homodyne:.4f}<{c.g_helstrom:.4f}" for a, c in prefactors.items())
    margins_ok = all(
        c.g_helstrom - c.g_homodyne > max(f.residual for f in c.fits) for c in prefactors.values()
    )
    criterion("C7a g_H < g_Q", margins_ok, detail)


def test_c07b_prefactors_decrease_with_amplitude(criterion, prefactors):
    seqs = {
        "g_Q": [prefactors[a].g_helstrom for a in ALPHAS_7],
        "g_K": [prefactors[a].g_kennedy for a in ALPHAS_7],
        "g_H": [prefactors[a].g_homodyne for a in ALPHAS_7],
    }
    ok = all(all(b < a for a, b in zip(s, s[1:])) for s in seqs.values())
    criterion("C7b each g strictly decreasing in alpha", ok,
              " ".join(f"{k}=" + ",".join(f"{v:.4f}" for v in s) for k, s in seqs.items()))


def test_c07c_prefactor_ratio_increases(criterion, prefactors):
    ratios = [prefactors[a].homodyne_to_helstrom for a in ALPHAS_7]
    criterion("C7c g_H/g_Q increasing in alpha", all(b > a for a, b in zip(ratios, ratios[1:])),
              ",".join(f"{r:.4f}" for r in ratios))


def test_c08_threshold(criterion):
    t0 = time.perf_counter()
    zero = delta_threshold(0.25, tol=1e-8)
    pt = delta_threshold(2.0, tol=1e-8)
    p_th = S.from_energy(2.0, pt.delta_th)
    resid = abs(homodyne(p_th).value - kennedy(p_th).value)
    above = S.from_energy(2.0, pt.delta_th + 0.05)
    below = S.from_energy(2.0, max(0.0, pt.delta_th - 0.05))
    sign_ok = homodyne(above).value < kennedy(above).value and homodyne(below).value > kennedy(below).value
    dt = time.perf_counter() - t0
    ok = zero.delta_th == 0.0 and pt.delta_th > 0 and resid <= 1e-8 and sign_ok and dt < 30.0
    criterion("C8 threshold", ok, f"d_th(0.25)={zero.delta_th} d_th(2)={pt.delta_th:.6f} |D|={resid:.1e} t={dt:.2f}s")


def test_c09_monte_carlo_vs_analytic(criterion):
    t0 = time.perf_counter()
    details, ok = [], True
    for n, d in ((1.0, 0.0), (1.0, 0.7), (1.0, 1.4), (0.5, 0.7)):
        p = S.from_energy(n, d)
        target = homodyne(p).value
        passes = 0
        for seed in MC_SEEDS:
            s = run_experiment(RunConfig(p, 5000, 10, seed))
            passes += abs(s.mean_error - target) / s.std_of_mean <= 4
        ok &= passes >= 18
        details.append(f"(N={n},d={d}):{passes}/20")
    dt = time.perf_counter() - t0
    criterion("C9 Monte Carlo |z|<=4", ok and dt < 60.0, " ".join(details) + f" t={dt:.2f}s")


def test_c10_numerical_stability(criterion):
    r96, r192 = periodic_rule(96), periodic_rule(192)
    dq, dt_ = 0.0, 0.0
    for a in (0.25, 0.5, 1.0, 1.5, 2.0):
        dim = choose_truncation(a)
        for d in np.round(np.arange(0.0, 2.01, 0.25), 10):
            p = S(a, d)
            dq = max(dq, abs(kennedy(p, r96).value - kennedy(p, r192).value),
                     abs(homodyne(p, r96).value - homodyne(p, r192).value))
            dt_ = max(dt_, abs(helstrom(p, dim=dim).value - helstrom(p, dim=dim + 10).value))
    criterion("C10 quadrature/truncation stability", dq <= 1e-10 and dt_ <= 1e-8,
              f"order 96->192: {dq:.1e}; dim->dim+10: {dt_:.1e}")


def test_c11_asymptotics_audit(criterion):
    rows = small_alpha_audit(0.0)
    for r in rows:
        print(f"  {r['receiver']:9s} printed={r['printed_coefficient']:.4f} "
              f"measured={r['measured_coefficient']:.4f} ({r['note']})")
    k = small_alpha_coefficient("kennedy", 0.0)
    notes = "; ".join(f"{r['receiver']}: printed {r['printed_coefficient']:.4f} "
                      f"measured {r['measured_coefficient']:.4f} [{r['note']}]" for r in rows)
    criterion("C11 small-alpha audit (kennedy coefficient = 4)", abs(k / 4 - 1) <= 5e-3, notes)
