"""Gamma/Beta functions and the classical action for V(x) = |x|^m.

Units are those of H = -d^2/dx^2 + |x|^m, so the classical momentum at
energy E is sqrt(E - |x|^m) and m = 2 gives E = 2N + 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .quadrature import adaptive_gauss_legendre


@dataclass(frozen=True)
class PotentialSpec:
    """Problem definition: exponent ``m`` of |x|^m and Planck constant ``hbar``."""

    m: float
    hbar: float = 1.0

    def __post_init__(self) -> None:
        if not (self.m > 0) or math.isinf(self.m):
            raise DomainError(f"exponent m must be a finite positive real, got {self.m!r}")
        if not (self.hbar > 0):
            raise DomainError(f"hbar must be positive, got {self.hbar!r}")

    @property
    def M(self) -> float:
        """Exponent ``1/m + 1/2`` of the Bohr-Sommerfeld energy formula."""
        return 1.0 / self.m + 0.5

    def potential(self, x):
        return np.abs(x) ** self.m


def log_gamma(x: float) -> float:
    """Natural log of the Gamma function for positive real ``x``."""
    if not (x > 0):
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def beta(a: float, b: float) -> float:
    """Euler Beta function B(a, b) for positive arguments."""
    if not (a > 0 and b > 0):
        raise DomainError(f"beta requires positive arguments, got ({a!r}, {b!r})")
    return math.exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b))


def action_closed_form(spec: PotentialSpec, E: float) -> float:
    """Action integral over the classically allowed region, via the Beta function."""
    if not (E > 0):
        raise DomainError(f"energy must be positive, got {E!r}")
    m = spec.m
    return 2.0 * E**spec.M * beta(1.0 / m, 1.5) / m


def action_quadrature(spec: PotentialSpec, E: float, rtol: float = 1e-13) -> float:
    """Action integral by adaptive quadrature.

    On [X/2, X], X = E^(1/m), the substitution x = X(1 - t^2) turns the
    square-root edge into a t^2 zero.  On [0, X/2] the cusp of x^m at the
    origin is flattened by x = (X/2) s^q with integer q >= 4/m.
    """
    if not (E > 0):
        raise DomainError(f"energy must be positive, got {E!r}")
    m = spec.m
    X = E ** (1.0 / m)

    def outer(t):
        # 1 - (1 - t^2)^m without cancellation near t = 0
        one_minus = -np.expm1(m * np.log1p(-t * t))
        return np.sqrt(E * np.maximum(one_minus, 0.0)) * 2.0 * X * t

    q = max(1, math.ceil(4.0 / m))
    half_x = 0.5 * X

    def inner(s):
        x = half_x * s**q
        return np.sqrt(E - x**m) * half_x * q * s ** (q - 1)

    t_mid = math.sqrt(0.5)
    a, _ = adaptive_gauss_legendre(outer, 0.0, t_mid, rtol=rtol)
    b, _ = adaptive_gauss_legendre(inner, 0.0, 1.0, rtol=rtol)
    return 2.0 * (a + b)


def action_integral(spec: PotentialSpec, E: float, check_rtol: float = 1e-10) -> float:
    """Integral of sqrt(E - |x|^m) between the turning points -E^(1/m), E^(1/m).

    Both the closed form and the quadrature route are evaluated; a
    disagreement above ``check_rtol`` is an internal error.
    """
    closed = action_closed_form(spec, E)
    numeric = action_quadrature(spec, E)
    if abs(closed - numeric) > check_rtol * abs(closed):
        raise ArithmeticError(
            f"action integral routes disagree for m={spec.m}, E={E}: {closed!r} vs {numeric!r}"
        )
    return closed


def action_beta_identity_residual(m: float) -> float:
    """M*B(1/2, M) - pi*m / (2*B(1/m, 3/2)); zero for every m > 0.

    This identity is what turns the action condition into the explicit
    Bohr-Sommerfeld energy formula.
    """
    if not (m > 0):
        raise DomainError(f"m must be positive, got {m!r}")
    M = 1.0 / m + 0.5
    return M * beta(0.5, M) - math.pi * m / (2.0 * beta(1.0 / m, 1.5))
