"""Closed-form interpolations of energies and WKB corrections.

Two model families:

* :class:`PolyRootModel` -- E(N) = c * (a_0 + a_1 N + ... + N^d)^r with
  d*r = 1/M, so the large-N growth matches the Bohr-Sommerfeld law.
* :class:`RationalSqrtModel` -- gamma(N) = P_n(N) / sqrt(Q_{2n+2}(N)) with
  Q monic, which decays like 1/N.

Published coefficient sets ship in ``data/presets.tsv``; the fitters
regenerate such models from spectra computed here.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import least_squares, minimize

from .bohr_sommerfeld import EnergyRecord, GammaRecord, GammaSource, Parity, modified_bse_energy
from .errors import DomainError, FitError
from .special_math import PotentialSpec

# Shifts a of the starting denominators Q(N) = (N + a)^(2n+2); one
# Nelder-Mead run per shift, best objective wins, ties by position.
GAMMA_SEED_SHIFTS = (0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0)
POSITIVITY_N_MAX = 100
_RNG_SEED = 20240101


class ParityScope(str, enum.Enum):
    ALL = "all"
    EVEN = "even"
    ODD = "odd"

    def admits(self, N: int) -> bool:
        if self is ParityScope.ALL:
            return True
        return Parity.of(N).value == self.value


def _polyval(coeffs_asc: Sequence[float], x):
    """Horner evaluation with ascending coefficients."""
    out = np.zeros_like(np.asarray(x, dtype=float))
    for c in reversed(coeffs_asc):
        out = out * x + c
    return out


@lru_cache(maxsize=4)
def _positivity_grid(n_max: int) -> np.ndarray:
    rng = np.random.default_rng(_RNG_SEED)
    return np.concatenate([np.arange(n_max + 1, dtype=float), rng.uniform(0.0, n_max, 1000)])


@dataclass(frozen=True)
class PolyRootModel:
    """E(N) = scale_c * P(N)^root_power with monic P of degree d."""

    m: float
    scale_c: float
    poly_coeffs: tuple[float, ...]
    root_power: Fraction
    name: str = ""

    def __post_init__(self) -> None:
        if self.poly_coeffs[-1] != 1.0:
            raise DomainError("polynomial must be monic")
        if self.scale_c <= 0:
            raise DomainError("scale_c must be positive")
        M = 1.0 / self.m + 0.5
        if abs(self.degree * float(self.root_power) - 1.0 / M) > 1e-12:
            raise DomainError(f"degree*root_power = {self.degree * float(self.root_power)} does not equal 1/M = {1.0 / M}")

    @property
    def degree(self) -> int:
        return len(self.poly_coeffs) - 1

    def __call__(self, N):
        return eval_energy_fit(self, N)


@dataclass(frozen=True)
class RationalSqrtModel:
    """gamma(N) = P(N) / sqrt(Q(N)); coefficient tuples are ascending in N."""

    num_coeffs: tuple[float, ...]
    den_coeffs: tuple[float, ...]
    parity_scope: ParityScope = ParityScope.ALL
    m: float | None = None
    name: str = ""

    def __post_init__(self) -> None:
        n = len(self.num_coeffs) - 1
        if len(self.den_coeffs) - 1 != 2 * n + 2:
            raise DomainError(f"denominator degree must be 2n+2 = {2 * n + 2}, got {len(self.den_coeffs) - 1}")
        if self.den_coeffs[-1] != 1.0:
            raise DomainError("denominator polynomial must be monic")

    @property
    def numerator_degree(self) -> int:
        return len(self.num_coeffs) - 1

    def denominator_positive(self, n_max: int = POSITIVITY_N_MAX) -> bool:
        """Q > 0 on integer N in [0, n_max] and on 1000 fixed random reals there."""
        return bool(np.all(_polyval(self.den_coeffs, _positivity_grid(n_max)) > 0))

    def __call__(self, N):
        return eval_gamma_fit(self, N)


def eval_energy_fit(model: PolyRootModel, N) -> float:
    """Energy predicted by a polynomial-root model."""
    if np.any(np.asarray(N) < 0):
        raise DomainError("N must be non-negative")
    p = _polyval(model.poly_coeffs, np.asarray(N, dtype=float))
    if np.any(p <= 0):
        raise DomainError(f"model polynomial is not positive at N={N}")
    out = model.scale_c * p ** float(model.root_power)
    return float(out) if np.ndim(out) == 0 else out


def eval_gamma_fit(model: RationalSqrtModel, N: int) -> float:
    """WKB correction predicted by a rational-over-sqrt model."""
    if not model.parity_scope.admits(N):
        raise DomainError(f"N={N} lies outside the model's parity scope ({model.parity_scope.value})")
    q = float(_polyval(model.den_coeffs, float(N)))
    if q <= 0:
        raise DomainError(f"denominator is not positive at N={N}")
    return float(_polyval(model.num_coeffs, float(N))) / math.sqrt(q)


def eval_gamma0_vs_m(m: float) -> float:
    """Interpolated gamma(m, N=0); tends to 1/2 as m -> infinity."""
    if not (m > 0):
        raise DomainError(f"m must be positive, got {m!r}")
    num, den = _gamma0_coefficients()
    if math.isinf(m):
        return 0.5 * num[-1] / den[-1]
    mu = m - 2.0
    return mu / (2.0 * m) * float(_polyval(num, mu)) / float(_polyval(den, mu))


def _gamma0_coefficients() -> tuple[tuple[float, ...], tuple[float, ...]]:
    row = load_presets()["gamma0_vs_m"]
    return row.num_coeffs, row.den_coeffs


@dataclass(frozen=True)
class Gamma0Model:
    num_coeffs: tuple[float, ...]
    den_coeffs: tuple[float, ...]
    name: str = "gamma0_vs_m"


# ------------------------------------------------------------- presets I/O

PRESET_COLUMNS = (
    "name", "m", "parity_scope", "kind", "degree", "order",
    "prefactor", "numerator", "denominator", "exponent",
)


def _parse_coeffs(text: str, order: str) -> tuple[float, ...]:
    vals = tuple(float(t) for t in text.split())
    return vals if order == "asc" else vals[::-1]


def parse_presets(text: str) -> dict[str, PolyRootModel | RationalSqrtModel | Gamma0Model]:
    models: dict = {}
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    header = tuple(lines[0].split("\t"))
    if header != PRESET_COLUMNS:
        raise ValueError(f"unexpected preset header {header}")
    for ln in lines[1:]:
        row = dict(zip(header, ln.split("\t")))
        kind, order = row["kind"], row["order"]
        num = _parse_coeffs(row["numerator"], order)
        if kind == "poly_root":
            model = PolyRootModel(
                m=float(row["m"]),
                scale_c=float(row["prefactor"]),
                poly_coeffs=num,
                root_power=Fraction(row["exponent"]),
                name=row["name"],
            )
            if model.degree != int(row["degree"]):
                raise ValueError(f"degree mismatch in preset {row['name']}")
        elif kind == "rational_sqrt":
            sign = float(row["prefactor"])
            model = RationalSqrtModel(
                num_coeffs=tuple(sign * c for c in num),
                den_coeffs=_parse_coeffs(row["denominator"], order),
                parity_scope=ParityScope(row["parity_scope"]),
                m=float(row["m"]),
                name=row["name"],
            )
            if model.numerator_degree != int(row["degree"]):
                raise ValueError(f"degree mismatch in preset {row['name']}")
        elif kind == "gamma0_rational":
            model = Gamma0Model(num, _parse_coeffs(row["denominator"], order), row["name"])
        else:
            raise ValueError(f"unknown model kind {kind!r}")
        models[row["name"]] = model
    return models


def _fmt(vals: Iterable[float]) -> str:
    return " ".join(repr(float(v)) for v in vals)


def dump_presets(models: dict) -> str:
    """Serialize models to the fixture format (ascending order, shortest float repr)."""
    out = io.StringIO()
    out.write("\t".join(PRESET_COLUMNS) + "\n")
    for name, mdl in models.items():
        if isinstance(mdl, PolyRootModel):
            fields = [name, repr(mdl.m), "all", "poly_root", str(mdl.degree), "asc",
                      repr(mdl.scale_c), _fmt(mdl.poly_coeffs), "-", str(mdl.root_power)]
        elif isinstance(mdl, RationalSqrtModel):
            fields = [name, repr(mdl.m) if mdl.m is not None else "any", mdl.parity_scope.value,
                      "rational_sqrt", str(mdl.numerator_degree), "asc", "+1",
                      _fmt(mdl.num_coeffs), _fmt(mdl.den_coeffs), "-"]
        else:
            fields = [name, "any", "all", "gamma0_rational", str(len(mdl.num_coeffs) - 1), "asc", "-",
                      _fmt(mdl.num_coeffs), _fmt(mdl.den_coeffs), "-"]
        out.write("\t".join(fields) + "\n")
    return out.getvalue()


@lru_cache(maxsize=1)
def _preset_text() -> str:
    return resources.files("powerwkb").joinpath("data/presets.tsv").read_text(encoding="utf-8")


def load_presets() -> dict:
    return parse_presets(_preset_text())


def preset(name: str):
    return load_presets()[name]


# ------------------------------------------------------------------ fitting


@dataclass(frozen=True)
class GammaFit:
    """Fitted gamma model with its quality figures on the fitted data."""

    model: RationalSqrtModel
    objective: float
    max_abs_dgamma: float
    max_energy_error: float
    seed_index: int


@dataclass(frozen=True)
class EnergyFit:
    model: PolyRootModel
    objective: float
    max_rel_dev: float


_PENALTY = 1e3
_NM_EVALS = 800


def _minimize_residual(residual, x0):
    """Simplex search on |r|^2 followed by a Levenberg-Marquardt polish.

    ``residual`` returns None outside the admissible region; such points
    are rejected (infinite objective for the simplex, a large constant
    residual for the polish, which then shortens its step).  The simplex
    alone stalls in the long flat valleys of these models.
    """

    def cost(x):
        r = residual(x)
        return math.inf if r is None else float(r @ r)

    nm = minimize(
        cost, np.asarray(x0, dtype=float), method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-30, "maxfev": _NM_EVALS, "adaptive": True},
    )
    if not np.isfinite(nm.fun):
        return nm.x, math.inf
    n_res = len(residual(nm.x))

    def safe(x):
        r = residual(x)
        return np.full(n_res, _PENALTY) if r is None else r

    ls = least_squares(safe, nm.x, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000 * (len(nm.x) + 1))
    best = ls.x if cost(ls.x) <= nm.fun else nm.x
    return best, cost(best)


def _scale_coeffs(coeffs_t: np.ndarray, scale: float, shift_power: int) -> np.ndarray:
    """Convert ascending coefficients in t = N/scale to coefficients in N.

    The polynomial is multiplied by scale**shift_power, so a monic
    polynomial of degree shift_power in t stays monic in N.
    """
    k = np.arange(len(coeffs_t))
    return coeffs_t * scale ** (shift_power - k)


def fit_gamma_model(
    data: Sequence[GammaRecord],
    numerator_degree: int = 1,
    parity_scope: ParityScope | str = ParityScope.ALL,
    seed_shifts: Sequence[float] = GAMMA_SEED_SHIFTS,
    spec: PotentialSpec | None = None,
) -> GammaFit:
    """Least-squares fit of gamma(N) = P_n(N)/sqrt(Q_{2n+2}(N)).

    The numerator enters linearly, so for each trial denominator it is
    the exact linear least-squares solution (variable projection); only
    the 2n+2 free denominator coefficients are searched.  Seeds are
    Q = (N + a)^(2n+2), the denominators for which gamma * sqrt(Q) is a
    polynomial, one per shift a.  Work is done in t = N/N_max for
    conditioning.  Denominators that are not positive on
    [0, max(100, N_max)] are rejected.
    """
    parity_scope = ParityScope(parity_scope)
    n = int(numerator_degree)
    data = list(data)
    if len(data) < 2 * n + 4:
        raise DomainError(f"need at least {2 * n + 4} points for numerator degree {n}, got {len(data)}")
    ms = {d.m for d in data}
    if len(ms) != 1:
        raise DomainError(f"data mixes several m values: {sorted(ms)}")
    bad = [d.N for d in data if not parity_scope.admits(d.N)]
    if bad:
        raise DomainError(f"states {bad} lie outside parity scope {parity_scope.value}")
    m = ms.pop()
    N = np.array([d.N for d in data], dtype=float)
    g = np.array([d.gamma for d in data], dtype=float)
    deg_q = 2 * n + 2
    scale = max(1.0, float(N.max()))
    t = N / scale
    grid = _positivity_grid(max(POSITIVITY_N_MAX, int(N.max()))) / scale
    V = np.vander(t, n + 1, increasing=True)

    def project(q_low):
        den = np.append(q_low, 1.0)
        if np.any(_polyval(den, grid) <= 0):
            return None, None
        A = V / np.sqrt(_polyval(den, t))[:, None]
        coef, *_ = np.linalg.lstsq(A, g, rcond=None)
        return A @ coef - g, coef

    def residual(q_low):
        return project(q_low)[0]

    best_val, best_x, best_idx = math.inf, None, -1
    for idx, a in enumerate(seed_shifts):
        q0 = np.polynomial.polynomial.polypow([a / scale, 1.0], deg_q)[:-1]
        x, val = _minimize_residual(residual, q0)
        if val < best_val:
            best_val, best_x, best_idx = val, x, idx
    if best_x is None:
        raise FitError("no admissible denominator found from any seed")
    _, num_t = project(best_x)
    # P(t)/sqrt(Q(t)) with t = N/s equals s^(n+1) P(N/s) / sqrt(s^(2n+2) Q(N/s))
    num = _scale_coeffs(num_t, scale, n + 1)
    den = _scale_coeffs(np.append(best_x, 1.0), scale, deg_q)
    den[-1] = 1.0
    model = RationalSqrtModel(
        num_coeffs=tuple(float(c) for c in num),
        den_coeffs=tuple(float(c) for c in den),
        parity_scope=parity_scope,
        m=m,
        name=f"fit_m{m:g}_{parity_scope.value}_n{n}",
    )
    if not model.denominator_positive(max(POSITIVITY_N_MAX, int(N.max()))):
        raise FitError("denominator lost positivity when rescaled back to N", best_estimate=model)
    fitted = np.array([eval_gamma_fit(model, int(k)) for k in N])
    if np.any(np.abs(fitted) >= 0.5):
        raise FitError("fitted model reaches |gamma| >= 1/2 on its data range", best_estimate=model)
    spec = spec or PotentialSpec(m)
    e_err = max(
        abs(modified_bse_energy(spec, int(k), gf) - modified_bse_energy(spec, int(k), ge))
        for k, gf, ge in zip(N, fitted, g)
    )
    return GammaFit(model, best_val, float(np.max(np.abs(fitted - g))), float(e_err), best_idx)


def fit_energy_model(data: Sequence[EnergyRecord], degree: int) -> EnergyFit:
    """Fit E(N) = c * (monic degree-d polynomial)^(1/(d M)) to energies.

    E^(1/r) is a plain polynomial whose leading coefficient is c^(1/r);
    a weighted linear least-squares fit of it seeds the minimization of
    the relative energy residuals.
    """
    data = list(data)
    d = int(degree)
    if len(data) < d + 2:
        raise DomainError(f"need at least {d + 2} points for degree {d}, got {len(data)}")
    ms = {rec.m for rec in data}
    if len(ms) != 1:
        raise DomainError(f"data mixes several m values: {sorted(ms)}")
    m = ms.pop()
    M = 1.0 / m + 0.5
    r = 1 / (d * Fraction(M).limit_denominator(10**6))
    rf = float(r)
    N = np.array([rec.N for rec in data], dtype=float)
    E = np.array([rec.energy for rec in data], dtype=float)
    scale = max(1.0, float(N.max()))
    t = N / scale
    grid = _positivity_grid(max(POSITIVITY_N_MAX, int(N.max()))) / scale

    # E^(1/r) = sum b_k t^k; divide rows by E^(1/r) to weight relatively
    y = E ** (1.0 / rf)
    A = np.vander(t, d + 1, increasing=True) / y[:, None]
    b, *_ = np.linalg.lstsq(A, np.ones_like(y), rcond=None)
    if b[-1] <= 0:
        raise FitError("linearized fit produced a non-positive leading coefficient", best_estimate=b)
    x0 = np.concatenate([[b[-1] ** rf], b[:-1] / b[-1]])

    def residual(x):
        poly = np.append(x[1:], 1.0)
        if x[0] <= 0 or np.any(_polyval(poly, grid) <= 0):
            return None
        return x[0] * _polyval(poly, t) ** rf / E - 1.0

    x, val = _minimize_residual(residual, x0)
    if not np.isfinite(val):
        raise FitError("energy fit left the admissible region", best_estimate=x)
    # c_t * P(t)^r = c_t * s^(-d r) * (s^d P(N/s))^r
    coeffs = _scale_coeffs(np.append(x[1:], 1.0), scale, d)
    coeffs[-1] = 1.0
    model = PolyRootModel(m, float(x[0] * scale ** (-d * rf)), tuple(float(c) for c in coeffs), r, name=f"fit_m{m:g}_d{d}")
    return EnergyFit(model, val, float(np.max(np.abs(residual(x)))))
