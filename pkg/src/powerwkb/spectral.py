"""Exact eigenvalues of H = -hbar^2 d^2/dx^2 + |x|^m.

Two independent engines:

* ``solve_spectrum_dvr`` -- uniform-grid sinc DVR on the half-line, with
  the grid offset by h/2 so no point sits on the cusp at x = 0.  Parity is
  imposed by adding (even) or subtracting (odd) the mirror-image kinetic
  couplings.  Every level comes out of one symmetric eigenproblem.
* ``solve_level_numerov`` -- Numerov shooting from x = 0, one level at a
  time, bracketed by node counting and polished with Brent's method on the
  mismatch against an inward solution from the wall.

Both refine the grid by doubling and Richardson-extrapolate the known
error exponents.  ``cross_validate`` compares them.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numba
import numpy as np
import scipy.linalg
from scipy.optimize import brentq
from scipy.special import ai_zeros

from .bohr_sommerfeld import EnergyRecord, Method, bse_energy, square_well_energies
from .errors import BracketError, ConvergenceError, DomainError
from .special_math import PotentialSpec

log = logging.getLogger(__name__)

MAX_M = 100.0
# wavefunction tail: integral of sqrt(V - E) beyond the turning point
TAIL_ACTION = 20.0
# minimum tail action accepted after a Numerov solve
MIN_TAIL_ACTION = 12.0


class Engine(str, enum.Enum):
    DVR = "DVR"
    NUMEROV = "NUMEROV"


class ParityChoice(str, enum.Enum):
    EVEN = "even"
    ODD = "odd"
    BOTH = "both"


@dataclass(frozen=True)
class SpectralConfig:
    """Grid and tolerance settings for one solve.

    ``n_points`` is the number of grid points on the half-line [0, L] at
    the first refinement level; each refinement doubles it, up to
    ``max_points``.
    """

    engine: Engine = Engine.DVR
    half_width_L: float = 10.0
    n_points: int = 64
    parity: ParityChoice = ParityChoice.BOTH
    target_tol: float = 1e-10
    max_points: int = 4096

    def __post_init__(self) -> None:
        if self.n_points < 16:
            raise DomainError(f"n_points must be >= 16, got {self.n_points}")
        if not (self.half_width_L > 0):
            raise DomainError(f"half_width_L must be positive, got {self.half_width_L}")
        if not (self.target_tol > 0):
            raise DomainError(f"target_tol must be positive, got {self.target_tol}")


@dataclass(frozen=True)
class SpectrumResult:
    energies: tuple[float, ...]
    config_used: SpectralConfig
    converged: tuple[bool, ...]
    est_accuracy: tuple[float, ...]

    def records(self, m: float) -> list[EnergyRecord]:
        method = Method.EXACT_DVR if self.config_used.engine is Engine.DVR else Method.EXACT_NUMEROV
        return [
            EnergyRecord(m, N, method, E, max(acc, 1e-15))
            for N, (E, acc) in enumerate(zip(self.energies, self.est_accuracy))
        ]


def default_tolerance(N_max: int) -> float:
    return 1e-10 if N_max <= 20 else 1e-8


def _check_m(spec: PotentialSpec) -> None:
    if spec.m > MAX_M:
        raise DomainError(
            f"m = {spec.m} is too steep for the grid solvers; use square_well_energies for the m -> infinity limit"
        )


def _is_smooth(m: float) -> bool:
    """|x|^m is C-infinity at the origin only for even integer m."""
    return float(m).is_integer() and int(m) % 2 == 0


def _energy_ceiling(spec: PotentialSpec, N_max: int) -> float:
    # gamma < 1/2 puts E_N below the N + 1 Bohr-Sommerfeld level; add a margin
    return 1.1 * bse_energy(spec, N_max + 1) + 1.0


def _tail_length(spec: PotentialSpec, E: float, action: float) -> float:
    """Smallest L with integral_{x_t}^{L} sqrt(V - E)/hbar dx >= action."""
    m, hbar = spec.m, spec.hbar
    x = E ** (1.0 / m)
    dx = max(x, 1.0) / 400.0
    acc = 0.0
    prev = 0.0
    while acc < action:
        x_next = x + dx
        cur = math.sqrt(max(x_next**m - E, 0.0)) / hbar
        acc += 0.5 * (prev + cur) * dx
        prev = cur
        x = x_next
    return x


def auto_config(
    spec: PotentialSpec,
    N_max: int,
    engine: Engine = Engine.DVR,
    tol: float | None = None,
) -> SpectralConfig:
    """Choose L and a starting grid able to resolve levels 0..N_max.

    L puts an action of ``TAIL_ACTION`` between the outermost turning
    point and the wall.  The starting DVR spacing resolves the shortest
    local de Broglie wavelength with 8 points; Numerov starts with a
    spacing five times finer, refined by doubling with h^4 Richardson
    extrapolation.
    """
    _check_m(spec)
    if tol is None:
        tol = default_tolerance(N_max)
    E_max = _energy_ceiling(spec, N_max)
    L = _tail_length(spec, E_max, TAIL_ACTION)
    k_max = math.sqrt(E_max) / spec.hbar
    wavelength = 2.0 * math.pi / k_max
    if engine is Engine.DVR:
        n = max(32, math.ceil(8.0 * L / wavelength), 2 * (N_max + 1))
        return SpectralConfig(Engine.DVR, L, int(n), ParityChoice.BOTH, tol, max_points=max(4096, 4 * n))
    # Numerov: h^2 |V - E| / 12 must stay small all the way to the wall
    f_max = max(L**spec.m, E_max) / spec.hbar**2
    h = min(0.25 / math.sqrt(f_max), wavelength / 40.0)
    n = max(400, math.ceil(L / h))
    return SpectralConfig(Engine.NUMEROV, L, int(n), ParityChoice.BOTH, tol, max_points=64 * n)


# --------------------------------------------------------------------- DVR


def _kinetic_profile(n: int, h: float) -> np.ndarray:
    """Sinc-DVR kinetic elements T(d) for index offsets d = 0..2n."""
    d = np.arange(2 * n + 1, dtype=float)
    t = np.empty_like(d)
    t[0] = math.pi**2 / 3.0
    t[1:] = 2.0 * (-1.0) ** d[1:] / d[1:] ** 2
    return t / h**2


def dvr_hamiltonian(spec: PotentialSpec, L: float, n: int, parity: ParityChoice) -> tuple[np.ndarray, np.ndarray]:
    """Half-line DVR Hamiltonian for one parity sector and its grid."""
    if parity is ParityChoice.BOTH:
        raise ValueError("dvr_hamiltonian needs a single parity sector")
    h = L / n
    x = (np.arange(n) + 0.5) * h
    t = _kinetic_profile(n, h) * spec.hbar**2
    direct = scipy.linalg.toeplitz(t[:n])
    # mirror of x_k is -x_k = x_{-k-1}; offset j - (-k-1) = j + k + 1
    image = scipy.linalg.hankel(t[1 : n + 1], t[n : 2 * n])
    sign = 1.0 if parity is ParityChoice.EVEN else -1.0
    H = direct + sign * image
    H[np.diag_indices(n)] += x**spec.m
    return H, x


def _dvr_sector(spec: PotentialSpec, L: float, n: int, parity: ParityChoice, k: int) -> np.ndarray:
    if k == 0:
        return np.empty(0)
    H, _ = dvr_hamiltonian(spec, L, n, parity)
    return scipy.linalg.eigh(H, eigvals_only=True, subset_by_index=[0, k - 1], driver="evr")


def _dvr_exponents(m: float, parity: ParityChoice) -> list[float]:
    """Leading error exponents in h from the |x|^m cusp at the origin."""
    if _is_smooth(m):
        return []
    if parity is ParityChoice.EVEN:
        return [m + 1.0, m + 3.0, m + 5.0]
    return [m + 3.0, m + 5.0, m + 7.0]


def _richardson(rows: list[np.ndarray], exponents: list[float]) -> np.ndarray:
    """Extrapolate estimates at h, h/2, h/4, ... eliminating h^p terms in order."""
    table = [np.asarray(r, dtype=float) for r in rows]
    for p in exponents[: len(rows) - 1]:
        r = 2.0**p
        table = [(r * table[i + 1] - table[i]) / (r - 1.0) for i in range(len(table) - 1)]
    return table[-1]


def _interleave(even: np.ndarray, odd: np.ndarray, n_levels: int) -> np.ndarray:
    out = np.empty(n_levels)
    out[0::2] = even[: len(out[0::2])]
    out[1::2] = odd[: len(out[1::2])]
    return out


def solve_spectrum_dvr(spec: PotentialSpec, config: SpectralConfig, n_levels: int) -> SpectrumResult:
    """Lowest ``n_levels`` eigenvalues (N = 0, 1, ...) by grid-doubled sinc DVR.

    With ``config.parity`` set to one sector, only that sector's levels are
    returned, in increasing order.
    """
    _check_m(spec)
    if n_levels < 1:
        raise DomainError("n_levels must be positive")
    if n_levels > config.n_points / 2:
        raise DomainError(
            f"n_levels={n_levels} exceeds n_points/2={config.n_points / 2}; upper half of the matrix spectrum is unreliable"
        )
    if config.parity is ParityChoice.BOTH:
        sectors = [(ParityChoice.EVEN, (n_levels + 1) // 2), (ParityChoice.ODD, n_levels // 2)]
    else:
        sectors = [(config.parity, n_levels)]

    L = config.half_width_L
    n = config.n_points
    raw: dict[ParityChoice, list[np.ndarray]] = {p: [] for p, _ in sectors}
    best_prev: dict[ParityChoice, np.ndarray] = {}
    best: dict[ParityChoice, np.ndarray] = {}
    diffs: dict[ParityChoice, np.ndarray] = {}
    while True:
        for parity, k in sectors:
            raw[parity].append(_dvr_sector(spec, L, n, parity, k))
            ests = raw[parity]
            exps = _dvr_exponents(spec.m, parity)
            best[parity] = _richardson(ests[-(len(exps) + 1) :], exps)
        if all(p in best_prev for p, _ in sectors):
            diffs = {p: np.abs(best[p] - best_prev[p]) for p, _ in sectors}
            if all(np.all(diffs[p] < config.target_tol) for p, _ in sectors):
                break
        if 2 * n > config.max_points:
            break
        best_prev = {p: v.copy() for p, v in best.items()}
        n *= 2
        log.debug("DVR refine m=%s L=%.3f n=%d", spec.m, L, n)

    used = replace(config, n_points=n)
    if not diffs:
        diffs = {p: np.full(k, np.inf) for p, k in sectors}
    if config.parity is ParityChoice.BOTH:
        energies = _interleave(best[ParityChoice.EVEN], best[ParityChoice.ODD], n_levels)
        acc = _interleave(diffs[ParityChoice.EVEN], diffs[ParityChoice.ODD], n_levels)
    else:
        energies = best[config.parity]
        acc = diffs[config.parity]
    converged = tuple(bool(a < config.target_tol) for a in acc)
    if not all(converged):
        raise ConvergenceError(
            f"DVR did not reach tol={config.target_tol} for m={spec.m} with n={n}",
            best_estimate=SpectrumResult(tuple(energies), used, converged, tuple(acc)),
            error_bound=float(np.max(acc)),
        )
    # report at least the round-off floor of the eigensolver
    floor = np.finfo(float).eps * (math.pi**2 / 3.0 * (n / L) ** 2 * spec.hbar**2 + L**spec.m)
    acc = np.maximum(acc, floor)
    return SpectrumResult(tuple(float(e) for e in energies), used, converged, tuple(float(a) for a in acc))


# ----------------------------------------------------------------- Numerov


@numba.njit(cache=True)
def _start_step(m, E, h, odd, hbar2, nsub):
    """psi(h) from psi(0) = 1, psi'(0) = 0 (even) or psi(0) = 0, psi'(0) = 1 (odd) by RK4."""
    y = 1.0
    yp = 0.0
    if odd:
        y = 0.0
        yp = 1.0
    dx = h / nsub
    x = 0.0
    for _ in range(nsub):
        xm = x + 0.5 * dx
        xe = x + dx
        k1y = yp
        k1p = (x**m - E) / hbar2 * y
        k2y = yp + 0.5 * dx * k1p
        k2p = (xm**m - E) / hbar2 * (y + 0.5 * dx * k1y)
        k3y = yp + 0.5 * dx * k2p
        k3p = (xm**m - E) / hbar2 * (y + 0.5 * dx * k2y)
        k4y = yp + dx * k3p
        k4p = (xe**m - E) / hbar2 * (y + dx * k3y)
        y += dx * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0
        yp += dx * (k1p + 2.0 * k2p + 2.0 * k3p + k4p) / 6.0
        x = xe
    return y


@numba.njit(cache=True)
def _shoot(m, E, L, n, odd, hbar2):
    """Integrate outward to x = L; return (psi(L) rescaled, node count on (0, L]).

    Summed Numerov form: with w = (1 - h^2 f / 12) psi the recurrence is
    carried on the first difference of w, which keeps round-off from
    growing like 1/h^2.
    """
    h = L / n
    c = h * h / 12.0
    h2 = h * h
    p0 = 1.0
    if odd:
        p0 = 0.0
    p1 = _start_step(m, E, h, odd, hbar2, 64)
    f0 = -E / hbar2
    f1 = (h**m - E) / hbar2
    w1 = (1.0 - c * f1) * p1
    dw = w1 - (1.0 - c * f0) * p0
    nodes = 0
    for i in range(1, n):
        dw += h2 * f1 * p1
        w1 += dw
        f1 = (((i + 1) * h) ** m - E) / hbar2
        p2 = w1 / (1.0 - c * f1)
        if (p2 < 0.0 and p1 > 0.0) or (p2 > 0.0 and p1 < 0.0):
            nodes += 1
        p1 = p2
        if abs(p1) > 1e150:
            p1 *= 1e-150
            w1 *= 1e-150
            dw *= 1e-150
    return p1, nodes


@numba.njit(cache=True)
def _mismatch(m, E, L, n, odd, hbar2, ic):
    """Normalized Wronskian of the outward and inward solutions at grid points ic, ic+1.

    Zero exactly at eigenvalues of the box [0, L]; independent of how
    either solution is scaled, so overflow rescaling does not disturb it.
    """
    h = L / n
    c = h * h / 12.0
    h2 = h * h
    # outward from 0
    a0 = 1.0
    if odd:
        a0 = 0.0
    a1 = _start_step(m, E, h, odd, hbar2, 64)
    f1 = (h**m - E) / hbar2
    w = (1.0 - c * f1) * a1
    dw = w - (1.0 + c * E / hbar2) * a0
    for i in range(1, ic + 1):
        dw += h2 * f1 * a1
        w += dw
        f1 = (((i + 1) * h) ** m - E) / hbar2
        a0 = a1
        a1 = w / (1.0 - c * f1)
        if abs(a1) > 1e150:
            a0 *= 1e-150
            a1 *= 1e-150
            w *= 1e-150
            dw *= 1e-150
    # a0 = psi_out(x_ic), a1 = psi_out(x_ic+1); inward from psi(L) = 0
    b1 = 1.0
    g1 = ((L - h) ** m - E) / hbar2
    w = (1.0 - c * g1) * b1
    dw = w
    b0 = b1
    for i in range(n - 2, ic - 1, -1):
        dw += h2 * g1 * b1
        w += dw
        g1 = ((i * h) ** m - E) / hbar2
        b0 = b1
        b1 = w / (1.0 - c * g1)
        if abs(b1) > 1e150:
            b0 *= 1e-150
            b1 *= 1e-150
            w *= 1e-150
            dw *= 1e-150
    # b1 = psi_in(x_ic), b0 = psi_in(x_ic+1)
    na = math.sqrt(a0 * a0 + a1 * a1)
    nb = math.sqrt(b0 * b0 + b1 * b1)
    return (a1 * b1 - b0 * a0) / (na * nb)


def _numerov_raw(spec: PotentialSpec, N: int, L: float, n: int, guess: float) -> float:
    """Eigenvalue of the Dirichlet box [0, L] for one grid size."""
    odd = N % 2 == 1
    k = N // 2
    m, hbar2 = float(spec.m), spec.hbar**2

    def count(E):
        return _shoot(m, E, L, n, odd, hbar2)[1]

    lo, hi = 0.0, max(guess, 1e-3)
    for _ in range(60):
        if count(hi) >= k + 1:
            break
        lo = hi
        hi *= 1.5
    else:
        raise BracketError(f"no bracket for N={N}, m={m}; retry with larger L", best_estimate=hi)

    c_lo, c_hi = count(lo), count(hi)
    for _ in range(60):
        if c_lo == k and c_hi == k + 1:
            break
        mid = 0.5 * (lo + hi)
        c_mid = count(mid)
        if c_mid < c_lo or c_mid > c_hi:
            raise BracketError(f"non-monotone node count for N={N}, m={m}; grid too coarse", best_estimate=mid)
        if c_mid <= k:
            lo, c_lo = mid, c_mid
        else:
            hi, c_hi = mid, c_mid
    else:
        raise BracketError(f"bisection did not isolate N={N}, m={m}", best_estimate=0.5 * (lo + hi))

    # match at the outer turning point of the bracket
    x_c = min(hi ** (1.0 / m), 0.9 * L)
    ic = min(max(int(x_c / (L / n)), 1), n - 3)
    f = lambda E: _mismatch(m, E, L, n, odd, hbar2, ic)
    return brentq(f, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)


def _numerov_exponents(m: float, odd: bool) -> list[float]:
    """Error exponents in h: the scheme's h^4, h^6 plus, for non-integer m,
    the terms from x^m being non-analytic at the start of the half-line."""
    exps = {4.0, 6.0}
    if not float(m).is_integer():
        exps |= {m + 3.0, m + 5.0} if odd else {m + 1.0, m + 3.0}
    return sorted(exps)[:3]


def _tail_action(spec: PotentialSpec, E: float, L: float) -> float:
    x_t = E ** (1.0 / spec.m)
    if L <= x_t:
        return 0.0
    x = np.linspace(x_t, L, 2001)
    return float(np.trapezoid(np.sqrt(np.maximum(x**spec.m - E, 0.0)), x)) / spec.hbar


def solve_level_numerov(spec: PotentialSpec, N: int, config: SpectralConfig) -> EnergyRecord:
    """Single level N by Numerov shooting with h -> h/2 Richardson refinement."""
    _check_m(spec)
    if config.engine is not Engine.NUMEROV:
        raise DomainError("solve_level_numerov needs a NUMEROV config")
    if int(N) != N or N < 0:
        raise DomainError(f"N must be a non-negative integer, got {N!r}")
    N = int(N)
    L = config.half_width_L
    guess = 1.5 * bse_energy(spec, N + 1) + 1.0
    exps = _numerov_exponents(spec.m, N % 2 == 1)
    n = config.n_points
    raws: list[float] = []
    best_prev = None
    diff = math.inf
    while True:
        raws.append(_numerov_raw(spec, N, L, n, guess))
        best = float(_richardson([np.array([r]) for r in raws[-(len(exps) + 1) :]], exps)[0])
        if best_prev is not None:
            diff = abs(best - best_prev)
            if diff < config.target_tol:
                break
        if 2 * n > config.max_points:
            raise ConvergenceError(
                f"Numerov did not reach tol={config.target_tol} for m={spec.m}, N={N}",
                best_estimate=best,
                error_bound=diff,
            )
        best_prev = best
        n *= 2
    if _tail_action(spec, best, L) < MIN_TAIL_ACTION:
        raise BracketError(f"L={L} too close to the turning point for N={N}; retry with larger L", best_estimate=best)
    return EnergyRecord(spec.m, N, Method.EXACT_NUMEROV, best, max(diff, 4 * np.finfo(float).eps * best))


def solve_spectrum_numerov(spec: PotentialSpec, config: SpectralConfig, n_levels: int) -> SpectrumResult:
    recs = [solve_level_numerov(spec, N, config) for N in range(n_levels)]
    return SpectrumResult(
        tuple(r.energy for r in recs),
        config,
        tuple(r.est_accuracy < config.target_tol for r in recs),
        tuple(r.est_accuracy for r in recs),
    )


# --------------------------------------------------------------- anchors


def harmonic_energy(N: int, hbar: float = 1.0) -> float:
    return hbar * (2 * N + 1)


def airy_energy(N: int) -> float:
    """Exact m = 1 level: zeros of Ai' (even N) or Ai (odd N), hbar = 1."""
    k = N // 2 + 1
    a, ap, _, _ = ai_zeros(k)
    return float(-ap[-1] if N % 2 == 0 else -a[-1])


def analytic_energy(m: float, N: int) -> float:
    """Closed-form anchors for m = 1, 2 and infinity (hbar = 1)."""
    if math.isinf(m):
        return square_well_energies(N, "EXACT")
    if m == 2:
        return harmonic_energy(N)
    if m == 1:
        return airy_energy(N)
    raise DomainError(f"no analytic spectrum for m={m}")


# ------------------------------------------------------------ front ends


@lru_cache(maxsize=64)
def _cached_spectrum(m: float, hbar: float, n_levels: int, tol: float, engine: Engine) -> SpectrumResult:
    spec = PotentialSpec(m, hbar)
    config = auto_config(spec, n_levels - 1, engine, tol)
    if engine is Engine.DVR:
        return solve_spectrum_dvr(spec, config, n_levels)
    return solve_spectrum_numerov(spec, config, n_levels)


def exact_spectrum(
    spec: PotentialSpec,
    n_levels: int,
    tol: float | None = None,
    engine: Engine = Engine.DVR,
) -> SpectrumResult:
    """Auto-configured spectrum for levels 0..n_levels-1 (memoized)."""
    if tol is None:
        tol = default_tolerance(n_levels - 1)
    return _cached_spectrum(float(spec.m), float(spec.hbar), int(n_levels), float(tol), Engine(engine))


def exact_energy(spec: PotentialSpec, N: int, tol: float | None = None, engine: Engine = Engine.DVR) -> float:
    return exact_spectrum(spec, N + 1, tol, engine).energies[N]


def cross_validate(spec: PotentialSpec, N_max: int, tol: float | None = None) -> float:
    """Largest relative disagreement between the DVR and Numerov engines for N <= N_max."""
    dvr = exact_spectrum(spec, N_max + 1, tol, Engine.DVR)
    num = exact_spectrum(spec, N_max + 1, tol, Engine.NUMEROV)
    a = np.array(dvr.energies)
    b = np.array(num.energies)
    return float(np.max(np.abs(a - b) / np.abs(a)))


def dvr_eigenstate(
    spec: PotentialSpec, N: int, half_width_L: float | None = None, n_points: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Level N sampled on the half-line DVR grid, normalized on the full line.

    Sinc-DVR eigenvector components equal sqrt(h) times the wavefunction
    at the grid points; the sign is fixed so psi > 0 just right of 0.
    The automatic wall position is tuned for eigenvalues; pointwise
    comparisons deep in the tail need a larger ``half_width_L``.
    """
    _check_m(spec)
    config = auto_config(spec, N)
    L = half_width_L or config.half_width_L
    n = n_points or 4 * max(config.n_points, math.ceil(config.n_points * L / config.half_width_L))
    parity = ParityChoice.EVEN if N % 2 == 0 else ParityChoice.ODD
    H, x = dvr_hamiltonian(spec, L, n, parity)
    k = N // 2
    _, vec = scipy.linalg.eigh(H, subset_by_index=[k, k], driver="evr")
    h = L / n
    # half-line sum of c^2 is 1; the full line doubles the weight
    psi = vec[:, 0] / math.sqrt(2.0 * h)
    if psi[0] < 0:
        psi = -psi
    return x, psi
