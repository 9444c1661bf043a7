"""End-to-end acceptance checks, one recorded PASS/FAIL line per criterion.

The lines are gathered in the "acceptance criteria" section of the
pytest terminal summary (and printed directly when run with ``-s``).
"""

import math
import time

import numpy as np
import pytest
from scipy.special import beta as scipy_beta

from powerwkb import (
    Engine,
    Family,
    GammaRecord,
    Parity,
    ParityScope,
    PotentialSpec,
    TrialParams,
    action_beta_identity_residual,
    asymptotic_coeffs,
    auto_config,
    bse_energy,
    cross_validate,
    energy_functional,
    eval_gamma_fit,
    fit_gamma_model,
    gamma_from_energy,
    modified_bse_energy,
    optimize_params,
    preset,
    richardson_subleading,
    solve_spectrum_dvr,
    solve_spectrum_numerov,
)
from powerwkb.reports import TablePreset, TableRequest, render_table
from powerwkb.special_math import action_closed_form, action_quadrature
from powerwkb.variational import seed_params

from benchmark_data import (
    COLUMN_INDEX,
    LEADING_COEFF,
    QUARTIC_TRIAL_ENERGY,
    RD_AT_100,
    SEXTIC_TRIAL_ENERGY,
    SUBLEADING_COEFF,
    TABLE_ERRATA,
    TABLES,
)

FIGURE_M_GRID = (1, 2, 3, 4, 6, 8, 10, 12, 15, 20, 30, 40)
CHECKED_COLUMNS = ("E_exact", "E_bs", "AD", "RD")


# ---------------------------------------------------------------- 1


def test_criterion_1_harmonic_anchor(verdict):
    spec = PotentialSpec(2.0)
    start = time.perf_counter()
    dvr = solve_spectrum_dvr(spec, auto_config(spec, 20), 21).energies
    num = solve_spectrum_numerov(spec, auto_config(spec, 20, Engine.NUMEROV), 21).energies
    elapsed = time.perf_counter() - start
    exact = 2 * np.arange(21) + 1
    err = max(np.max(np.abs(np.array(dvr) - exact)), np.max(np.abs(np.array(num) - exact)))
    ok = err <= 1e-9 and elapsed <= 10.0
    verdict("criterion 1 harmonic anchor", ok, f"max |E - (2N+1)| = {err:.1e} (N <= 20, both engines), {elapsed:.1f} s")
    assert ok


# ---------------------------------------------------------------- 2


@pytest.fixture(scope="module")
def rendered_tables():
    start = time.perf_counter()
    out = {}
    for name in ("TABLE_I", "TABLE_II", "TABLE_III"):
        lines = render_table(TableRequest(TablePreset(name))).splitlines()[1:]
        out[name] = {int(r.split(",")[0]): r.split(",") for r in lines}
    return out, time.perf_counter() - start


def test_criterion_2_table_reproduction(rendered_tables, verdict):
    tables, elapsed = rendered_tables
    mismatches, checked = [], 0
    for name, (m, rows) in TABLES.items():
        for printed in rows:
            N = int(printed[0])
            ours = tables[name][N]
            for col in CHECKED_COLUMNS:
                if (name, N, col) in TABLE_ERRATA:
                    continue
                checked += 1
                i = COLUMN_INDEX[col]
                if ours[i] != printed[i]:
                    mismatches.append((name, N, col, printed[i], ours[i]))
    # Bohr-Sommerfeld column against the closed form evaluated independently
    worst = 0.0
    for m in (1.0, 4.0, 6.0):
        M = 1 / m + 0.5
        for N in range(101):
            ref = (M * scipy_beta(0.5, M) * (N + 0.5)) ** (1 / M)
            worst = max(worst, abs(bse_energy(PotentialSpec(m), N) / ref - 1))
    ok = not mismatches and worst <= 1e-12 and elapsed <= 300
    verdict(
        "criterion 2 table reproduction",
        ok,
        f"{checked} printed cells match ({len(TABLE_ERRATA)} self-inconsistent cells checked separately), "
        f"E_bs vs closed form {worst:.1e}, {elapsed:.1f} s",
    )
    assert ok, mismatches


@pytest.mark.parametrize("cell", sorted(TABLE_ERRATA), ids=lambda c: f"{c[0]}-N{c[1]}-{c[2]}")
@pytest.mark.xfail(strict=True, reason="printed cell disagrees with the energies printed in the same row")
def test_criterion_2_self_inconsistent_cells(cell, rendered_tables, verdict):
    name, N, col = cell
    tables, _ = rendered_tables
    printed = dict((int(r[0]), r) for r in TABLES[name][1])[N][COLUMN_INDEX[col]]
    ours = tables[name][N][COLUMN_INDEX[col]]
    assert ours == TABLE_ERRATA[cell]
    verdict(f"criterion 2 cell {name} N={N} {col}", ours == printed, f"printed {printed}, row energies give {ours}", True)
    assert ours == printed


# ---------------------------------------------------------------- 3


def test_criterion_3_beta_identity_and_action(verdict):
    residual = max(abs(action_beta_identity_residual(m)) for m in np.geomspace(0.2, 100, 50))
    worst = 0.0
    for m in (0.5, 1, 2, 3, 4, 6, 10, 40):
        spec = PotentialSpec(float(m))
        for E in (0.5, 1.0, 10.0, 1000.0):
            closed = action_closed_form(spec, E)
            worst = max(worst, abs(action_quadrature(spec, E) / closed - 1))
    ok = residual <= 1e-12 and worst <= 1e-10
    verdict("criterion 3 beta identity", ok, f"max identity residual {residual:.1e}, closed form vs quadrature {worst:.1e}")
    assert ok


# ---------------------------------------------------------------- 4


def test_criterion_4_gamma_structure(gamma_records, verdict):
    gammas = {m: [r.gamma for r in gamma_records(float(m), range(41))] for m in FIGURE_M_GRID}
    bound = max(max(abs(g) for g in gs) for gs in gammas.values())
    harmonic = max(abs(g) for g in gammas[2])
    decreasing = all(np.all(np.diff(gammas[m]) < 0) for m in (4, 6, 10))
    g0 = [gammas[m][0] for m in FIGURE_M_GRID]
    g0_ok = bool(np.all(np.diff(g0) > 0) and g0[-1] < 0.5)
    ok = bound < 0.5 and harmonic <= 1e-9 and decreasing and g0_ok
    verdict(
        "criterion 4 gamma structure",
        ok,
        f"max |gamma| {bound:.4f}, |gamma(m=2)| {harmonic:.1e}, decreasing in N for m=4,6,10: {decreasing}, "
        f"gamma_0 increasing {g0[0]:.4f} -> {g0[-1]:.4f}: {g0_ok}",
    )
    assert ok


# ---------------------------------------------------------------- 5


def test_criterion_5_preset_fit_accuracy(spectrum, verdict):
    failures = []
    for table, name in (("TABLE_II", "quartic_gamma_4d"), ("TABLE_III", "sextic_gamma_4d")):
        m, rows = TABLES[table]
        spec = PotentialSpec(m)
        energies = spectrum(m, 101)
        for row in rows:
            N = int(row[0])
            approx = modified_bse_energy(spec, N, eval_gamma_fit(preset(name), N))
            places = 3 if N == 3 else 4
            if f"{approx:.{places}f}" != f"{energies[N]:.{places}f}":
                failures.append(f"{name} N={N}")
    spec = PotentialSpec(4.0)
    certified = cross_validate(spec, 20)
    energies = spectrum(4.0, 21)
    rel = [abs(modified_bse_energy(spec, N, eval_gamma_fit(preset("quartic_gamma_8d"), N)) / energies[N] - 1) for N in range(21)]
    eight_digits = max(rel) <= 5e-9
    ok = not failures and eight_digits and certified <= 1e-8
    verdict(
        "criterion 5 preset fit accuracy",
        ok,
        f"4-decimal misses: {len(failures)} of 20 ({', '.join(failures[:4])}...); "
        f"8-digit preset max rel. error {max(rel):.1e} at N={int(np.argmax(rel))} (engines agree to {certified:.1e})",
    )
    assert ok


# ---------------------------------------------------------------- 6


def test_criterion_6_fit_regeneration(quartic_split_fits, gamma_records, spectrum, verdict):
    spec = PotentialSpec(4.0)
    energies = spectrum(4.0, 101)
    misses = []
    for fit in quartic_split_fits:
        for N in range(101):
            if fit.model.parity_scope.admits(N):
                approx = modified_bse_energy(spec, N, eval_gamma_fit(fit.model, N))
                if f"{approx:.4f}" != f"{energies[N]:.4f}":
                    misses.append(N)
    worst = max(f.max_energy_error for f in quartic_split_fits)
    single = fit_gamma_model(gamma_records(4.0, range(101)), 1, ParityScope.ALL)

    synthetic = preset("sextic_gamma_4d")
    data = [GammaRecord(6.0, N, Parity.of(N), eval_gamma_fit(synthetic, N)) for N in range(41)]
    recovery = fit_gamma_model(data, 1).max_abs_dgamma
    odd = preset("quartic_gamma_odd_10d")
    data = [GammaRecord(4.0, N, Parity.ODD, eval_gamma_fit(odd, N)) for N in range(1, 80, 2)]
    recovery = max(recovery, fit_gamma_model(data, 2, ParityScope.ODD).max_abs_dgamma)

    ok = not misses and recovery <= 1e-10
    verdict(
        "criterion 6 fit regeneration",
        ok,
        f"parity-split n=1 fits reproduce all N <= 100 to 4 decimals (max |dE| {worst:.1e}); "
        f"self-test recovery {recovery:.1e}; single all-parity n=1 model max |dE| {single.max_energy_error:.1e}",
    )
    assert ok


# ---------------------------------------------------------------- 7


def test_criterion_7_variational(spectrum, verdict):
    quartic, sextic = PotentialSpec(4.0), PotentialSpec(6.0)
    e_q = energy_functional(seed_params(Family.QUARTIC), quartic)
    e_s = energy_functional(seed_params(Family.SEXTIC), sextic)
    runs = []
    for seed, spec, target, tol in (
        (TrialParams(Family.QUARTIC, 0, 0, -2.0, 2.0), quartic, QUARTIC_TRIAL_ENERGY, 5e-9),
        (seed_params(Family.QUARTIC), quartic, QUARTIC_TRIAL_ENERGY, 5e-9),
        (seed_params(Family.SEXTIC), sextic, SEXTIC_TRIAL_ENERGY, 1e-8),
    ):
        start = time.perf_counter()
        _, E = optimize_params(seed, spec)
        runs.append((E, target, tol, time.perf_counter() - start, spectrum(spec.m, 1)[0]))
    reached = all(abs(E - t) <= tol and dt <= 60 for E, t, tol, dt, _ in runs)
    above = all(E >= exact for E, *_, exact in runs)
    ok = abs(e_q - QUARTIC_TRIAL_ENERGY) <= 2e-9 and abs(e_s - SEXTIC_TRIAL_ENERGY) <= 1e-8 and reached and above
    verdict(
        "criterion 7 variational benchmarks",
        ok,
        f"quoted parameters give {e_q:.10f} / {e_s:.13f}; optimized "
        + ", ".join(f"{E:.12f} ({dt:.1f} s, {E - exact:.1e} above exact)" for E, _, _, dt, exact in runs),
    )
    assert ok


# ---------------------------------------------------------------- 8


def test_criterion_8_asymptotics(verdict):
    details, ok = [], True
    for m in (1.0, 4.0, 6.0):
        c, _ = asymptotic_coeffs(PotentialSpec(m))
        b = richardson_subleading(PotentialSpec(m))
        ok &= f"{c:.6f}" == LEADING_COEFF[m] and f"{b:.5f}" == f"{float(SUBLEADING_COEFF[m]):.5f}"
        details.append(f"m={m:g}: {c:.6f}, {b:.6f}")
    verdict("criterion 8 asymptotic coefficients", ok, "; ".join(details))
    assert ok


# ---------------------------------------------------------------- 9


def test_criterion_9_relative_deviation_at_100(spectrum, verdict):
    details, ok = [], True
    for m, printed in RD_AT_100.items():
        E = spectrum(m, 101)[100]
        rd = abs(E - bse_energy(PotentialSpec(m), 100)) / E
        ok &= abs(rd / printed - 1) <= 0.2
        details.append(f"m={m:g}: {rd:.2e} vs {printed:.1e}")
    verdict("criterion 9 R.D. at N=100", ok, "; ".join(details))
    assert ok


# --------------------------------------------------------------- 10


@pytest.mark.xfail(strict=True, reason="ten-digit even quartic fit does not match the extracted ground-state correction")
def test_criterion_10_discrepancy_flag(gamma_records, verdict):
    extracted = gamma_records(4.0, [0])[0].gamma
    value = eval_gamma_fit(preset("quartic_gamma_even_10d"), 0)
    others = (eval_gamma_fit(preset("quartic_gamma_4d"), 0), eval_gamma_fit(preset("quartic_gamma_8d"), 0))
    agrees = abs(value - extracted) <= 1e-6
    verdict(
        "criterion 10 discrepancy flag",
        agrees,
        f"even ten-digit preset gives {value:.4f} at N=0; extraction {extracted:.4f}, "
        f"four/eight-digit presets {others[0]:.4f}/{others[1]:.4f}",
        expected_failure=True,
    )
    assert agrees


def test_criterion_10_discrepancy_is_confined_to_ground_state(gamma_records):
    model = preset("quartic_gamma_even_10d")
    recs = gamma_records(4.0, range(0, 41, 2))
    assert abs(eval_gamma_fit(model, 0) - recs[0].gamma) > 5e-3
    assert max(abs(eval_gamma_fit(model, r.N) - r.gamma) for r in recs[1:]) < 1e-8


# ------------------------------------------------------ cross engine


def test_cross_engine_oracle(verdict):
    worst = {m: cross_validate(PotentialSpec(m), 10) for m in (1.0, 4.0, 6.0)}
    ok = max(worst.values()) <= 1e-8
    verdict("cross-engine oracle", ok, ", ".join(f"m={m:g}: {v:.1e}" for m, v in worst.items()))
    assert ok
