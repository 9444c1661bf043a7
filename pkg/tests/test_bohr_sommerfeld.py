import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from powerwkb import (
    DomainError,
    Method,
    Parity,
    PotentialSpec,
    action_integral,
    asymptotic_coeffs,
    bse_energy,
    deviation,
    gamma_from_energy,
    modified_bse_energy,
    richardson_subleading,
    square_well_energies,
)
from powerwkb.bohr_sommerfeld import bs_record, bse_energies

from benchmark_data import LEADING_COEFF, SUBLEADING_COEFF


@pytest.mark.parametrize("N", range(0, 21))
def test_harmonic_bs_is_exact(N):
    assert bse_energy(PotentialSpec(2.0), N) == pytest.approx(2 * N + 1, rel=1e-14)


@pytest.mark.parametrize("m", [0.5, 1.0, 3.0, 4.0, 6.0, 17.0])
@pytest.mark.parametrize("N", [0, 1, 7, 100])
def test_bs_energy_satisfies_quantization(m, N):
    spec = PotentialSpec(m)
    E = bse_energy(spec, N)
    assert action_integral(spec, E) == pytest.approx(math.pi * (N + 0.5), rel=1e-12)


def test_bs_energy_high_precision_reference():
    # (M B(1/2, M) (N + 1/2))^(1/M) for m = 4, N = 0 evaluated in mpmath
    mpmath.mp.dps = 30
    M = mpmath.mpf(3) / 4
    ref = (M * mpmath.beta(0.5, M) * mpmath.mpf(0.5)) ** (1 / M)
    assert bse_energy(PotentialSpec(4.0), 0) == pytest.approx(float(ref), rel=1e-14)


def test_real_quantum_numbers_and_vectorized_form():
    spec = PotentialSpec(3.0)
    Ns = np.array([0.0, 0.25, 1.5, 10.0])
    np.testing.assert_allclose(bse_energies(spec, Ns), [bse_energy(spec, n) for n in Ns], rtol=1e-15)
    with pytest.raises(DomainError):
        bse_energies(spec, [-1.0])


@pytest.mark.parametrize("bad", [-1, -0.5])
def test_negative_quantum_number(bad):
    with pytest.raises(DomainError):
        bse_energy(PotentialSpec(4.0), bad)


def test_integer_index_required_for_modified_energy():
    with pytest.raises(DomainError):
        modified_bse_energy(PotentialSpec(4.0), 1.5, 0.0)
    with pytest.raises(DomainError):
        modified_bse_energy(PotentialSpec(4.0), True, 0.0)


def test_modified_energy_rejects_non_positive_shift():
    with pytest.raises(DomainError):
        modified_bse_energy(PotentialSpec(4.0), 0, -0.5)


def test_zero_correction_reduces_to_bs():
    spec = PotentialSpec(6.0)
    for N in range(10):
        assert modified_bse_energy(spec, N, 0.0) == bse_energy(spec, N)


@given(m=st.floats(0.3, 60), N=st.integers(0, 200), g=st.floats(-0.49, 0.49))
@settings(max_examples=80, deadline=None)
def test_gamma_round_trip(m, N, g):
    spec = PotentialSpec(m)
    E = modified_bse_energy(spec, N, g)
    assert gamma_from_energy(spec, N, E) == pytest.approx(g, abs=1e-10 * (N + 1))


@given(m=st.floats(0.3, 60), N=st.integers(0, 50))
@settings(max_examples=50, deadline=None)
def test_bs_energy_increasing_in_n(m, N):
    spec = PotentialSpec(m)
    assert bse_energy(spec, N + 1) > bse_energy(spec, N)


def test_square_well_limit():
    for N in range(5):
        assert square_well_energies(N, "BS") == pytest.approx(math.pi**2 * (N + 0.5) ** 2 / 4)
        assert square_well_energies(N, "EXACT") == pytest.approx(math.pi**2 * (N + 1) ** 2 / 4)
    with pytest.raises(ValueError):
        square_well_energies(0, "OTHER")


def test_steep_power_approaches_square_well():
    # m -> infinity: BS energies tend to pi^2 (N + 1/2)^2 / 4
    E = bse_energy(PotentialSpec(1e6), 3)
    assert E == pytest.approx(square_well_energies(3, "BS"), rel=1e-4)


@pytest.mark.parametrize("m", [1.0, 4.0, 6.0])
def test_leading_coefficient_printed_digits(m):
    c, a = asymptotic_coeffs(PotentialSpec(m))
    assert abs(c - float(LEADING_COEFF[m])) <= 5e-7
    assert a == pytest.approx(m / (m + 2))


@pytest.mark.parametrize("m", [1.0, 4.0, 6.0])
def test_subleading_coefficient(m):
    spec = PotentialSpec(m)
    c, a = asymptotic_coeffs(spec)
    b = richardson_subleading(spec)
    # analytic value c * a_bs (first-order term of (N + 1/2)^(1/M))
    assert b == pytest.approx(c * a, rel=1e-9)
    assert abs(b - float(SUBLEADING_COEFF[m])) <= 5e-6


def test_deviation_signs():
    d = deviation(1.0188, 1.1155)
    assert d.abs_dev == pytest.approx(-0.0967)
    assert d.rel_dev == pytest.approx(0.0967 / 1.0188)
    with pytest.raises(DomainError):
        deviation(0.0, 1.0)


def test_records_and_enums():
    rec = bs_record(PotentialSpec(4.0), 3)
    assert rec.method is Method.BS and rec.parity is Parity.ODD
    assert Parity.of(0) is Parity.EVEN


# ----------------------------------------- properties against exact spectra

GAMMA_M_GRID = (1, 2, 3, 4, 6, 8, 10, 12, 15, 20, 30, 40)


@pytest.mark.parametrize("m", [1.0, 1.5])
def test_soft_potentials_alternate_deviation_sign(m, spectrum):
    spec = PotentialSpec(m)
    for N, E in enumerate(spectrum(m, 21)):
        ad = deviation(E, bse_energy(spec, N)).abs_dev
        assert (ad > 0) if N % 2 else (ad < 0), N


@pytest.mark.parametrize("m", [3.0, 4.0, 6.0, 10.0])
def test_steep_potentials_lie_above_bs(m, spectrum):
    spec = PotentialSpec(m)
    assert all(deviation(E, bse_energy(spec, N)).abs_dev > 0 for N, E in enumerate(spectrum(m, 21)))


@pytest.mark.parametrize("m", GAMMA_M_GRID)
def test_extracted_gamma_bounded(m, gamma_records):
    assert all(abs(r.gamma) < 0.5 for r in gamma_records(m, range(41)))


def test_harmonic_gamma_vanishes(gamma_records):
    assert max(abs(r.gamma) for r in gamma_records(2.0, range(41))) <= 1e-9


@pytest.mark.parametrize("m", [4.0, 6.0, 10.0])
def test_extracted_gamma_decreases_with_level(m, gamma_records):
    g = [r.gamma for r in gamma_records(m, range(41))]
    assert np.all(np.diff(g) < 0)


def test_sign_alternation_range_below_harmonic(spectrum):
    # at m = 1.5 the odd-level deviation changes sign between N = 13 and 15;
    # even levels stay below the Bohr-Sommerfeld value throughout
    spec = PotentialSpec(1.5)
    ad = [deviation(E, bse_energy(spec, N)).abs_dev for N, E in enumerate(spectrum(1.5, 21))]
    assert all(ad[N] > 0 for N in range(1, 14, 2))
    assert all(ad[N] < 0 for N in range(15, 21, 2))
    assert all(ad[N] < 0 for N in range(0, 21, 2))
