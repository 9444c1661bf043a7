"""Bohr-Sommerfeld quantization, exact spectra and WKB corrections for V(x) = |x|^m."""

from .bohr_sommerfeld import (
    DeviationRecord,
    EnergyRecord,
    GammaRecord,
    GammaSource,
    Method,
    Parity,
    asymptotic_coeffs,
    bse_energy,
    deviation,
    gamma_from_energy,
    modified_bse_energy,
    richardson_subleading,
    square_well_energies,
)
from .errors import BracketError, ConvergenceError, DomainError, FitError
from .fitting import (
    ParityScope,
    PolyRootModel,
    RationalSqrtModel,
    eval_energy_fit,
    eval_gamma0_vs_m,
    eval_gamma_fit,
    fit_energy_model,
    fit_gamma_model,
    load_presets,
    preset,
)
from .special_math import (
    PotentialSpec,
    action_beta_identity_residual,
    action_integral,
    beta,
    log_gamma,
)
from .spectral import (
    Engine,
    ParityChoice,
    SpectralConfig,
    SpectrumResult,
    auto_config,
    cross_validate,
    exact_energy,
    exact_spectrum,
    solve_spectrum_dvr,
    solve_spectrum_numerov,
)
from .variational import Family, TrialParams, energy_functional, optimize_params, orthogonality_polynomial, trial_psi

__version__ = "0.1.0"
