"""Closed-form trial wavefunctions for the quartic and sextic oscillators.

For the state N = 2n + p (n nodes on the half-line, parity (-1)^p)

    psi(x) = x^p P(x^2) exp(u(x)),

    quartic: R = B^2 + x^2,             s = sqrt(R), k = 2n + p + 1/2,
             u = -ln(R)/4 - k ln(B + s) - (A + B^2 x^2/6 + x^4/3)/s + A/B
    sextic:  R = D^2 + C^2 x^2 + x^4,   s = sqrt(R), k = n + p/2 + 1/4,
             u = -ln(R)/4 - k ln(D + s) - (A + B x^2 + C^2 x^4/8 + x^6/4)/s + A/D

P is a monic polynomial of degree n in x^2, fixed by orthogonality to the
lower states of the same parity.  Energies are Rayleigh quotients
evaluated by adaptive Gauss-Legendre quadrature on the half-line.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from importlib import resources
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import ConvergenceError, DomainError
from .quadrature import adaptive_gauss_legendre
from .special_math import PotentialSpec

MAX_NODES = 2
# ln(1e-300): the tail cutoff sits where psi^2 has dropped by this much
_UNDERFLOW_LOG = 690.0
QUAD_RTOL = 1e-13


class Family(str, enum.Enum):
    QUARTIC = "quartic"
    SEXTIC = "sextic"

    @property
    def m(self) -> int:
        return 4 if self is Family.QUARTIC else 6


@dataclass(frozen=True)
class TrialParams:
    """Parameters of one trial state; ``P_coeffs`` are ascending in x^2 and monic."""

    family: Family
    n: int
    p: int
    A: float
    B: float
    C: float | None = None
    D: float | None = None
    P_coeffs: tuple[float, ...] = (1.0,)

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", Family(self.family))
        if self.p not in (0, 1):
            raise DomainError(f"parity bit must be 0 or 1, got {self.p!r}")
        if not (0 <= self.n <= MAX_NODES):
            raise DomainError(f"n must lie in [0, {MAX_NODES}], got {self.n!r}")
        if self.family is Family.QUARTIC:
            if not (self.B > 0):
                raise DomainError(f"quartic trial function needs B > 0, got {self.B!r}")
        else:
            if self.C is None or self.D is None:
                raise DomainError("sextic trial function needs C and D")
            if not (self.D > 0):
                raise DomainError(f"sextic trial function needs D > 0, got {self.D!r}")
        if len(self.P_coeffs) != self.n + 1 or self.P_coeffs[-1] != 1.0:
            raise DomainError(f"P must be monic of degree {self.n} in x^2, got {self.P_coeffs!r}")
        if self.n > 0:
            roots = np.roots(self.P_coeffs[::-1])
            if np.any(np.abs(roots.imag) > 1e-12 * np.abs(roots)) or np.any(roots.real <= 0):
                raise DomainError(f"P must have {self.n} positive roots in x^2, got {roots}")

    @property
    def N(self) -> int:
        return 2 * self.n + self.p

    @property
    def shape(self) -> np.ndarray:
        """The free nonlinear parameters as a vector."""
        if self.family is Family.QUARTIC:
            return np.array([self.A, self.B])
        return np.array([self.A, self.B, self.C, self.D])

    def with_shape(self, x: Sequence[float]) -> "TrialParams":
        if self.family is Family.QUARTIC:
            return replace(self, A=float(x[0]), B=float(x[1]))
        return replace(self, A=float(x[0]), B=float(x[1]), C=float(x[2]), D=float(x[3]))


def _log_envelope(params: TrialParams, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """u(x) and du/dx for the exponential envelope exp(u)."""
    x2 = x * x
    if params.family is Family.QUARTIC:
        B = params.B
        R, dR = B * B + x2, 2.0 * x
        F = params.A + B * B * x2 / 6.0 + x2 * x2 / 3.0
        dF = B * B * x / 3.0 + 4.0 * x * x2 / 3.0
        k = 2 * params.n + params.p + 0.5
        base, const = B, params.A / B
    else:
        C2, D = params.C**2, params.D
        R, dR = D * D + C2 * x2 + x2 * x2, 2.0 * C2 * x + 4.0 * x * x2
        F = params.A + params.B * x2 + C2 * x2 * x2 / 8.0 + x2 * x2 * x2 / 4.0
        dF = 2.0 * params.B * x + C2 * x * x2 / 2.0 + 1.5 * x * x2 * x2
        k = params.n + 0.5 * params.p + 0.25
        base, const = D, params.A / D
    s = np.sqrt(R)
    ds = dR / (2.0 * s)
    u = -0.25 * np.log(R) - k * np.log(base + s) - F / s + const
    du = -0.25 * dR / R - k * ds / (base + s) - dF / s + F * ds / R
    return u, du


def _prefactor(params: TrialParams, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """x^p P(x^2) and its derivative."""
    y = x * x
    P = np.polynomial.polynomial.polyval(y, params.P_coeffs)
    dP = np.polynomial.polynomial.polyval(y, np.polynomial.polynomial.polyder(params.P_coeffs)) * 2.0 * x
    if params.p == 0:
        return P, dP
    return x * P, P + x * dP


def trial_psi(params: TrialParams, x):
    """Trial wavefunction at ``x`` (array or scalar), exactly as the closed form reads."""
    xa = np.asarray(x, dtype=float)
    ax = np.abs(xa)
    u, _ = _log_envelope(params, ax)
    pre, _ = _prefactor(params, ax)
    out = pre * np.exp(u)
    if params.p == 1:
        out = np.sign(xa) * out
    return float(out) if out.ndim == 0 else out


def log_abs_trial_psi(params: TrialParams, x):
    """ln|psi(x)|; stays finite where psi itself underflows."""
    ax = np.abs(np.asarray(x, dtype=float))
    u, _ = _log_envelope(params, ax)
    pre, _ = _prefactor(params, ax)
    with np.errstate(divide="ignore"):
        out = u + np.log(np.abs(pre))
    return float(out) if out.ndim == 0 else out


def trial_psi_derivative(params: TrialParams, x):
    """Analytic d(psi)/dx for x >= 0."""
    xa = np.asarray(x, dtype=float)
    u, du = _log_envelope(params, xa)
    pre, dpre = _prefactor(params, xa)
    out = (dpre + pre * du) * np.exp(u)
    return float(out) if out.ndim == 0 else out


def _tail_cutoff(params: TrialParams) -> float:
    """Point beyond which psi^2 is below e^-690 of its peak."""
    xs = np.linspace(0.0, 4.0, 401)
    pre, _ = _prefactor(params, xs)
    u, _ = _log_envelope(params, xs)
    with np.errstate(divide="ignore"):
        logpsi = u + np.log(np.abs(pre))
    peak = np.max(logpsi[np.isfinite(logpsi)])

    def drop(x):
        pre_x, _ = _prefactor(params, np.array([x]))
        return float(_log_envelope(params, np.array([x]))[0][0] + np.log(abs(pre_x[0])) - peak)

    x = 4.0
    while drop(x) > -0.5 * _UNDERFLOW_LOG:
        x *= 1.25
    return x


def _integrals(params: TrialParams, m: float, hbar2: float, x_tail: float) -> tuple[float, float]:
    def kinetic_plus_potential(x):
        u, du = _log_envelope(params, x)
        pre, dpre = _prefactor(params, x)
        w = np.exp(2.0 * u)
        return (hbar2 * (dpre + pre * du) ** 2 + x**m * pre * pre) * w

    def norm(x):
        u, _ = _log_envelope(params, x)
        pre, _ = _prefactor(params, x)
        return pre * pre * np.exp(2.0 * u)

    num, _ = adaptive_gauss_legendre(kinetic_plus_potential, 0.0, x_tail, rtol=QUAD_RTOL, initial_panels=8)
    den, _ = adaptive_gauss_legendre(norm, 0.0, x_tail, rtol=QUAD_RTOL, initial_panels=8)
    return num, den


def energy_functional(params: TrialParams, spec: PotentialSpec, tail_scale: float = 1.0) -> float:
    """Rayleigh quotient (<psi'|psi'> + <psi| |x|^m |psi>) / <psi|psi>.

    The kinetic term carries hbar^2, as in the spectral solvers.
    ``tail_scale`` stretches the integration cutoff; results should not
    depend on it.
    """
    if spec.m != params.family.m:
        raise DomainError(f"{params.family.value} trial function needs m={params.family.m}, got m={spec.m}")
    x_tail = tail_scale * _tail_cutoff(params)
    try:
        num, den = _integrals(params, spec.m, spec.hbar**2, x_tail)
    except ConvergenceError as exc:
        raise ConvergenceError(f"quadrature failed for {params}: {exc}", best_estimate=None) from exc
    return num / den


def overlap(a: TrialParams, b: TrialParams) -> float:
    """Normalized overlap <a|b>/sqrt(<a|a><b|b>) on the full line."""
    if a.p != b.p:
        return 0.0
    x_tail = max(_tail_cutoff(a), _tail_cutoff(b))
    f = lambda x: trial_psi(a, x) * trial_psi(b, x)
    ab, _ = adaptive_gauss_legendre(f, 0.0, x_tail, rtol=QUAD_RTOL, initial_panels=8)
    aa, _ = adaptive_gauss_legendre(lambda x: trial_psi(a, x) ** 2, 0.0, x_tail, rtol=QUAD_RTOL, initial_panels=8)
    bb, _ = adaptive_gauss_legendre(lambda x: trial_psi(b, x) ** 2, 0.0, x_tail, rtol=QUAD_RTOL, initial_panels=8)
    return ab / math.sqrt(aa * bb)


def orthogonality_polynomial(params: TrialParams, lower_states: Sequence[TrialParams]) -> tuple[float, ...]:
    """Monic P of degree n in x^2 making psi orthogonal to the lower same-parity states.

    ``lower_states`` must hold one optimized state for each k < n with the
    same family and parity.  The n unknown coefficients solve the linear
    system sum_j c_j <x^(p+2j) e^u, psi_k> = -<x^(p+2n) e^u, psi_k>.
    """
    n = params.n
    if n == 0:
        return (1.0,)
    lower = sorted((s for s in lower_states if s.p == params.p and s.n < n), key=lambda s: s.n)
    if [s.n for s in lower] != list(range(n)) or any(s.family is not params.family for s in lower):
        raise DomainError(f"need lower states n=0..{n - 1} of the same family and parity")
    x_tail = max(_tail_cutoff(s) for s in [*lower, replace(params, n=0, P_coeffs=(1.0,))])

    def moment(j, k):
        def f(x):
            u, _ = _log_envelope(params, x)
            return x ** (params.p + 2 * j) * np.exp(u) * trial_psi(lower[k], x)

        return adaptive_gauss_legendre(f, 0.0, x_tail, rtol=QUAD_RTOL, initial_panels=8)[0]

    G = np.array([[moment(j, k) for j in range(n + 1)] for k in range(n)])
    lhs, rhs = G[:, :n], -G[:, n]
    if np.linalg.cond(lhs) > 1e12:
        raise DomainError("orthogonality system is singular; lower states are degenerate")
    coeffs = np.linalg.solve(lhs, rhs)
    return tuple(float(c) for c in coeffs) + (1.0,)


def _with_polynomial(params: TrialParams, lower_states: Sequence[TrialParams]) -> TrialParams:
    if params.n == 0:
        return params
    # provisional polynomial so that the instance is valid while moments are built
    probe = replace(params, P_coeffs=tuple(float(c) for c in np.polynomial.polynomial.polyfromroots(np.arange(1, params.n + 1))))
    return replace(params, P_coeffs=orthogonality_polynomial(probe, lower_states))


@dataclass(frozen=True)
class VariationalResult:
    params: TrialParams
    energy: float
    n_evaluations: int

    def __iter__(self):
        return iter((self.params, self.energy))


def optimize_params(
    seed: TrialParams,
    spec: PotentialSpec | None = None,
    lower_states: Sequence[TrialParams] = (),
    xatol: float = 1e-9,
    max_evaluations: int = 4000,
    reference_energy: float | None = None,
    stuck_tol: float = 1e-6,
) -> VariationalResult:
    """Minimize the Rayleigh quotient over the shape parameters, starting at ``seed``.

    For n >= 1 the polynomial is rebuilt by orthogonality at every step.
    With ``reference_energy`` (the exact level) the result is checked
    against the variational bound: falling below it signals a numerical
    fault, ending more than ``stuck_tol`` above it a stuck search; both
    raise :class:`ConvergenceError` with the best point attached.
    """
    spec = spec or PotentialSpec(seed.family.m)
    count = 0

    def objective(x):
        nonlocal count
        count += 1
        try:
            trial = _with_polynomial(seed.with_shape(x), lower_states)
            return energy_functional(trial, spec)
        except (DomainError, ConvergenceError, FloatingPointError):
            return math.inf

    res = minimize(
        objective, seed.shape, method="Nelder-Mead",
        options={"xatol": xatol, "fatol": 1e-15, "maxfev": max_evaluations, "adaptive": True},
    )
    best = _with_polynomial(seed.with_shape(res.x), lower_states)
    energy = float(res.fun)
    result = VariationalResult(best, energy, count)
    if reference_energy is not None:
        if energy < reference_energy - 1e-10:
            raise ConvergenceError(
                f"variational energy {energy!r} lies below the exact level {reference_energy!r}",
                best_estimate=result,
            )
        if energy > reference_energy + stuck_tol:
            raise ConvergenceError(
                f"optimizer stopped {energy - reference_energy:.3e} above the exact level",
                best_estimate=result,
                error_bound=energy - reference_energy,
            )
    return result


# ------------------------------------------------------------------ seeds


@dataclass(frozen=True)
class SeedEntry:
    params: TrialParams
    reference_energy: float | None
    exact_energy: float | None
    source: str


def _opt_float(text: str) -> float | None:
    return None if text == "-" else float(text)


@lru_cache(maxsize=1)
def load_seeds() -> dict[tuple[Family, int, int], SeedEntry]:
    """Seed parameter sets keyed by (family, n, p).

    The fixture's ``C_coeff`` column is the number multiplying x^2 under
    the square root, i.e. C^2 in the closed form.
    """
    text = resources.files("powerwkb").joinpath("data/variational_seeds.tsv").read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    header = lines[0].split("\t")
    seeds = {}
    for ln in lines[1:]:
        row = dict(zip(header, ln.split("\t")))
        fam = Family(row["family"])
        n, p = int(row["n"]), int(row["p"])
        c_coeff = _opt_float(row["C_coeff"])
        params = TrialParams(
            family=fam, n=n, p=p,
            A=float(row["A"]), B=float(row["B"]),
            C=None if c_coeff is None else math.sqrt(c_coeff),
            D=_opt_float(row["D"]),
            P_coeffs=tuple(float(np.polynomial.polynomial.polyfromroots(np.arange(1, n + 1))[i]) for i in range(n + 1)),
        )
        seeds[(fam, n, p)] = SeedEntry(params, _opt_float(row["E_reference"]), _opt_float(row["E_exact"]), row["source"])
    return seeds


def seed_params(family: Family | str, n: int = 0, p: int = 0) -> TrialParams:
    return load_seeds()[(Family(family), n, p)].params
