"""Bohr-Sommerfeld energies, the WKB correction gamma, and deviations.

The quantization condition

    (1/hbar) * action(E) = pi * (N + 1/2 + gamma)

is solved in closed form for |x|^m.  With gamma = 0 this gives the plain
Bohr-Sommerfeld energy; read backwards with an exact energy it defines
gamma(m, N).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .special_math import PotentialSpec, beta

CLOSED_FORM_ACCURACY = 1e-12


class Method(str, enum.Enum):
    BS = "BS"
    MODIFIED_BS = "MODIFIED_BS"
    EXACT_DVR = "EXACT_DVR"
    EXACT_NUMEROV = "EXACT_NUMEROV"
    FIT = "FIT"
    VARIATIONAL = "VARIATIONAL"


class Parity(str, enum.Enum):
    EVEN = "even"
    ODD = "odd"

    @classmethod
    def of(cls, N: int) -> "Parity":
        return cls.EVEN if N % 2 == 0 else cls.ODD


class GammaSource(str, enum.Enum):
    EXTRACTED = "EXTRACTED"
    FITTED = "FITTED"


@dataclass(frozen=True)
class EnergyRecord:
    m: float
    N: int
    method: Method
    energy: float
    est_accuracy: float

    @property
    def parity(self) -> Parity:
        return Parity.of(self.N)


@dataclass(frozen=True)
class GammaRecord:
    m: float
    N: int
    parity: Parity
    gamma: float
    source: GammaSource = GammaSource.EXTRACTED


@dataclass(frozen=True)
class DeviationRecord:
    abs_dev: float
    rel_dev: float


def _check_index(N, *, allow_real: bool = False) -> None:
    if allow_real:
        if not (N >= 0):
            raise DomainError(f"quantum number must be >= 0, got {N!r}")
        return
    if isinstance(N, bool) or int(N) != N or N < 0:
        raise DomainError(f"quantum number must be a non-negative integer, got {N!r}")


def _bs_constant(spec: PotentialSpec) -> float:
    M = spec.M
    return spec.hbar * M * beta(0.5, M)


def bse_energy(spec: PotentialSpec, N: float) -> float:
    """Bohr-Sommerfeld energy (hbar*M*B(1/2,M)*(N+1/2))^(1/M).

    ``N`` may be real (the formula continues analytically to N >= 0).
    """
    _check_index(N, allow_real=True)
    return (_bs_constant(spec) * (N + 0.5)) ** (1.0 / spec.M)


def modified_bse_energy(spec: PotentialSpec, N: int, gamma: float) -> float:
    """Bohr-Sommerfeld energy with N + 1/2 shifted by the WKB correction."""
    _check_index(N)
    shifted = N + 0.5 + gamma
    if not (shifted > 0):
        raise DomainError(f"N + 1/2 + gamma must be positive, got {shifted!r}")
    return (_bs_constant(spec) * shifted) ** (1.0 / spec.M)


def gamma_from_energy(spec: PotentialSpec, N: int, E_exact: float) -> float:
    """WKB correction that makes the quantization condition exact at ``E_exact``."""
    _check_index(N)
    if not (E_exact > 0):
        raise DomainError(f"energy must be positive, got {E_exact!r}")
    return E_exact**spec.M / _bs_constant(spec) - N - 0.5


def square_well_energies(N: int, which: str = "BS", hbar: float = 1.0) -> float:
    """m -> infinity limit: infinite square well of width 2.

    ``which`` is ``"BS"`` for the Bohr-Sommerfeld level or ``"EXACT"``.
    """
    _check_index(N)
    which = which.upper()
    if which == "BS":
        k = N + 0.5
    elif which == "EXACT":
        k = N + 1.0
    else:
        raise ValueError(f"which must be 'BS' or 'EXACT', got {which!r}")
    return hbar**2 * math.pi**2 * k**2 / 4.0


def asymptotic_coeffs(spec: PotentialSpec) -> tuple[float, float]:
    """Large-N coefficients: E ~ c_M N^(1/M) (1 + a_bs/N + ...).

    Returns ``(c_M, a_bs)`` with a_bs = m/(m+2).
    """
    c = _bs_constant(spec) ** (1.0 / spec.M)
    return c, spec.m / (spec.m + 2.0)


def richardson_subleading(spec: PotentialSpec, Ns=(1e3, 1e4, 1e5)) -> float:
    """Numerically extract the N^(1/M - 1) coefficient of ``bse_energy``.

    f(N) = (E(N) - c N^(1/M)) / N^(1/M - 1) = b + b1/N + b2/N^2 + ...
    is sampled at three decade-spaced N and the 1/N, 1/N^2 terms are
    eliminated by Richardson extrapolation.
    """
    c, _ = asymptotic_coeffs(spec)
    p = 1.0 / spec.M
    Ns = [float(n) for n in Ns]
    vals = []
    for n in Ns:
        # E(N) - c N^p = c N^p ((1 + 1/(2N))^p - 1), kept free of cancellation
        excess = c * n**p * math.expm1(p * math.log1p(0.5 / n))
        vals.append(excess / n ** (p - 1.0))
    # Richardson table for the expansion in h = 1/N
    hs = [1.0 / n for n in Ns]
    table = list(vals)
    for level in range(1, len(table)):
        table = [
            (hs[i] * table[i + 1] - hs[i + level] * table[i]) / (hs[i] - hs[i + level])
            for i in range(len(table) - 1)
        ]
    return table[0]


def deviation(E_exact: float, E_bs: float) -> DeviationRecord:
    """Absolute (E_exact - E_bs) and relative |E_exact - E_bs|/E_exact deviation."""
    if not (E_exact > 0):
        raise DomainError(f"E_exact must be positive, got {E_exact!r}")
    d = E_exact - E_bs
    return DeviationRecord(abs_dev=d, rel_dev=abs(d) / E_exact)


def bs_record(spec: PotentialSpec, N: int) -> EnergyRecord:
    _check_index(N)
    return EnergyRecord(spec.m, int(N), Method.BS, bse_energy(spec, N), CLOSED_FORM_ACCURACY)


def bse_energies(spec: PotentialSpec, Ns) -> np.ndarray:
    """Vectorized :func:`bse_energy` over an array of (real) quantum numbers."""
    Ns = np.asarray(Ns, dtype=float)
    if np.any(Ns < 0):
        raise DomainError("quantum numbers must be >= 0")
    return (_bs_constant(spec) * (Ns + 0.5)) ** (1.0 / spec.M)
