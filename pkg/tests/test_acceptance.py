"""Acceptance criteria 1-8, each at its stated tolerance.

Every test registers one PASS/FAIL line that the session summary prints.
"""

import itertools
import math

import numpy as np
import pytest

from corpus import channel_corpus, random_channel
from gaussnogo import channels as ch
from gaussnogo import serialization as ser
from gaussnogo.entanglement import (
    capacity_upper_bound,
    entanglement_degradation,
    finite_r_degradation,
    nu_minus,
    partial_transpose,
)
from gaussnogo.nogo_search import VIOLATION_TOL, search
from gaussnogo.symplectic import random_physical_state, symplectic_form
from gaussnogo.teleport import lemma1_residual

R_SIM = 8.0
R_RATE = np.arange(3.0, 9.0)


def general_solver_nu_minus(gamma):
    """Smallest |Re| eigenvalue of the non-symmetric matrix i Omega gamma~."""
    ev = np.linalg.eigvals(1j * symplectic_form(2) @ partial_transpose(gamma))
    return float(np.sort(np.abs(ev.real))[0])


def fitted_rate(rs, values):
    """``k`` in ``values ~ exp(-k r)`` by least squares on the logarithm."""
    return -float(np.polyfit(rs, np.log(values), 1)[0])


def test_criterion_1_attenuation_curve(record_criterion):
    etas = np.round(np.arange(1, 10) * 0.1, 10)
    closed = np.array([entanglement_degradation(ch.attenuation(eta)).D for eta in etas])
    formula = (1 - etas**2) ** 2 / (1 + etas**2) ** 2
    sim = np.array([min(1.0, finite_r_degradation(ch.attenuation(eta), R_SIM)) for eta in etas])
    rel = np.abs(sim / closed - 1)
    monotone = bool(np.all(np.diff(closed) < 0))
    passed = rel.max() < 1e-5 and monotone and np.allclose(closed, formula, rtol=1e-12)
    record_criterion(1, passed, f"attenuation eta=0.1..0.9, max rel err {rel.max():.2e} (< 1e-5), monotone={monotone}")
    assert passed


def test_criterion_2_classical_noise(record_criterion):
    det_ns = [0.5, 1.0, 2.0, 4.0, 6.0, 9.0]
    rels, clip_errs = [], []
    for det_n in det_ns:
        channel = ch.classical_noise(math.sqrt(det_n))
        closed = entanglement_degradation(channel).D
        sim = min(1.0, finite_r_degradation(channel, R_SIM))
        rels.append(abs(sim / closed - 1))
        assert closed == pytest.approx(min(det_n / 4, 1.0), rel=1e-12)
        if det_n >= 4:
            clip_errs.append(max(abs(closed - 1), abs(sim - 1)))
    passed = max(rels) < 1e-5 and max(clip_errs) <= 1e-9
    record_criterion(
        2, passed,
        f"classical noise det N in {det_ns}, max rel err {max(rels):.2e} (< 1e-5), "
        f"max |D - 1| for det N >= 4 {max(clip_errs):.1e} (<= 1e-9)",
    )
    assert passed


def test_criterion_3_entanglement_breaking(record_criterion):
    rng = np.random.default_rng(3)
    # half rank-deficient, half negative determinant; every other one saturates CP
    channels = [
        random_channel(rng, det_sign=sign, saturate=bool(i % 2))
        for i, sign in enumerate([0] * 10 + [-1] * 10)
    ]
    for channel in channels:
        assert channel.det_M <= 0 and ch.validate(channel).valid
    worst = min(finite_r_degradation(channel, r) for channel in channels for r in (1.0, 2.0, 4.0, 8.0))
    passed = worst >= 1 - 1e-9
    record_criterion(3, passed, f"20 channels with det M <= 0, min nu_-^2 over r in {{1,2,4,8}} = 1 - {1 - worst:.1e}")
    assert passed


def test_criterion_4_limit_rate(record_criterion):
    channel = ch.attenuation(0.5)
    gaps = np.array([abs(finite_r_degradation(channel, r) - 0.36) for r in R_RATE])
    rate = fitted_rate(R_RATE, gaps)
    decreasing = bool(np.all(np.diff(gaps) < 0))
    passed = decreasing and 1.0 <= rate <= 4.0
    record_criterion(4, passed, f"attenuation(0.5) gap fitted rate exp(-{rate:.4f} r), target exp(-2r) within x2, decreasing={decreasing}")
    assert passed


def test_criterion_5_teleportation(record_criterion):
    named = {
        "identity": ch.identity_channel(),
        "attenuation:0.5": ch.attenuation(0.5),
        "attenuation:0.9": ch.attenuation(0.9),
        "amplification:1.5": ch.amplification(1.5),
        "amplification:2": ch.amplification(2.0),
        "classical-noise:1.0": ch.classical_noise(1.0),
        "measure-prepare": ch.measure_prepare(),
        "phase-conjugation:1.0": ch.phase_conjugation(1.0),
        "phase-conjugation:0.5": ch.phase_conjugation(0.5),
    }
    residuals = {name: lemma1_residual(channel, R_SIM) for name, channel in named.items()}
    worst_name = max(residuals, key=residuals.get)
    ratios = np.array([lemma1_residual(ch.identity_channel(), r) / (2 * math.exp(-2 * r)) for r in R_RATE])
    passed = residuals[worst_name] < 1e-5 and bool(np.all((ratios >= 0.5) & (ratios <= 2.0)))
    record_criterion(
        5, passed,
        f"max residual at r=8 {residuals[worst_name]:.2e} ({worst_name}, < 1e-5); identity residual / 2e^-2r "
        f"in [{ratios.min():.4f}, {ratios.max():.4f}] over r=3..8",
    )
    assert passed


SEARCH_CHANNELS = {
    "attenuation:0.3": ch.attenuation(0.3),
    "attenuation:0.5": ch.attenuation(0.5),
    "attenuation:0.7": ch.attenuation(0.7),
    "amplification:1.5": ch.amplification(1.5),
    "classical-noise:detN=1": ch.classical_noise(1.0),
    "classical-noise:detN=3": ch.classical_noise(math.sqrt(3.0)),
}


@pytest.mark.slow
def test_criterion_6_no_gecc_beats_the_channel(record_criterion, tmp_path):
    violations, runs, skipped, evaluations, margin = [], 0, 0, 0, math.inf
    for (name, channel), n, seed in itertools.product(SEARCH_CHANNELS.items(), (1, 2, 3), range(10)):
        res = search(channel, n, 2000, seed)
        runs += 1
        skipped += res.skipped
        evaluations += res.evaluations
        margin = min(margin, res.best_D - res.baseline_D)
        if res.violated or res.best_D < res.baseline_D - VIOLATION_TOL:
            path = tmp_path / f"violation_{name}_{n}_{seed}.json"
            ser.dump_json(ser.search_result_to_dict(res, channel), path)
            violations.append(str(path))
    passed = not violations
    record_criterion(
        6, passed,
        f"{runs} searches (6 channels x n=1..3 x 10 seeds, budget 2000): {len(violations)} violations at tol 1e-6, "
        f"min best_D - baseline {margin:.1e}, skipped {skipped}/{evaluations}",
    )
    assert passed, violations


def test_criterion_7_oracle_equivalence(record_criterion):
    rng = np.random.default_rng(7)
    states = [random_physical_state(2, seed=rng, r_max=1.5, nu_max=4.0) for _ in range(200)]
    diffs = [abs(nu_minus(gamma) - general_solver_nu_minus(gamma)) for gamma in states]
    passed = max(diffs) < 1e-8
    record_criterion(7, passed, f"200 random two-mode states, max |nu_- closed form - general solver| {max(diffs):.1e} (< 1e-8)")
    assert passed


def test_criterion_8_capacity_bound(record_criterion):
    corpus = channel_corpus(seed=8, size=200)
    mismatches, breaking, nonzero = 0, 0, 0
    for channel in corpus:
        report = entanglement_degradation(channel)
        expected = math.inf if report.D == 0 else -0.5 * math.log2(report.D)
        bound = capacity_upper_bound(channel)
        if not (bound == expected or math.isclose(bound, expected, rel_tol=1e-15, abs_tol=0.0)):
            mismatches += 1
        if bound != report.capacity_bound:
            mismatches += 1
        if report.entanglement_breaking:
            breaking += 1
            if bound != 0.0:
                nonzero += 1
    passed = mismatches == 0 and nonzero == 0 and breaking > 0
    record_criterion(
        8, passed,
        f"{len(corpus)} channels: {mismatches} bound mismatches, {breaking} entanglement breaking with "
        f"{nonzero} nonzero bounds",
    )
    assert passed
