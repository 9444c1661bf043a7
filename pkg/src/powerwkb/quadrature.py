"""Adaptive Gauss-Legendre quadrature on finite intervals.

Panels are bisected until the fixed-order rule on a panel agrees with the
sum over its two halves.  The integrand must accept a numpy array.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import ConvergenceError

Integrand = Callable[[np.ndarray], np.ndarray]


@lru_cache(maxsize=8)
def _rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(order)


def _panel(f: Integrand, a: float, b: float, order: int) -> float:
    nodes, weights = _rule(order)
    half = 0.5 * (b - a)
    x = a + half * (nodes + 1.0)
    return float(half * np.dot(weights, f(x)))


def adaptive_gauss_legendre(
    f: Integrand,
    a: float,
    b: float,
    rtol: float = 1e-13,
    atol: float = 0.0,
    order: int = 20,
    max_depth: int = 50,
    initial_panels: int = 4,
) -> tuple[float, float]:
    """Integrate ``f`` over ``[a, b]``.

    Returns ``(value, error_estimate)``.  The acceptance test on a panel is
    local: its error must fall below its share of ``max(atol, rtol*|I|)``,
    where ``|I|`` is the running estimate of the integral of ``|f|``.
    Raises :class:`ConvergenceError` if ``max_depth`` bisections do not
    suffice.
    """
    if b == a:
        return 0.0, 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0

    edges = np.linspace(a, b, initial_panels + 1)
    stack = [(float(lo), float(hi), _panel(f, lo, hi, order), 0) for lo, hi in zip(edges[:-1], edges[1:])]
    # scale of the integral, used for the relative criterion
    scale = sum(abs(p[2]) for p in stack)
    total = 0.0
    err_total = 0.0
    length = b - a
    while stack:
        lo, hi, whole, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left = _panel(f, lo, mid, order)
        right = _panel(f, mid, hi, order)
        err = abs(left + right - whole)
        allowed = max(atol, rtol * scale) * (hi - lo) / length
        if err <= allowed or (err <= 64 * np.finfo(float).eps * (abs(left) + abs(right))):
            total += left + right
            err_total += err
            continue
        if depth >= max_depth:
            raise ConvergenceError(
                f"adaptive quadrature did not converge on [{lo}, {hi}]",
                best_estimate=sign * (total + left + right),
                error_bound=err_total + err,
            )
        scale = max(scale, abs(total) + abs(left) + abs(right))
        stack.append((lo, mid, left, depth + 1))
        stack.append((mid, hi, right, depth + 1))
    return sign * total, err_total
