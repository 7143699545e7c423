"""Lobachevsky function, Catalan's constant and maximal simplex volumes.

The Lobachevsky function is

    L(theta) = -int_0^theta log|2 sin u| du,

an odd, pi-periodic function.  The primary evaluator reduces the angle to
[-pi/2, pi/2] and uses the Taylor expansion

    L(theta) = theta - theta log(2|theta|)
               + sum_{k>=1} zeta(2k) theta^(2k+1) / (k (2k+1) pi^(2k)),

which converges geometrically with ratio (theta/pi)^2 <= 1/4.  The defining
integral and the Clausen sine series are kept as independent cross-checks.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.special import zeta

DEFAULT_TOL = 1e-9

# zeta(2k) for k = 1..60; beyond that zeta(2k) == 1 in double precision.
_ZETA_EVEN = [float(z) for z in zeta(2.0 * np.arange(1, 61))]


def _check_tol(tol: float) -> None:
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol!r}")


def reduce_angle(theta: float) -> float:
    """Reduce ``theta`` modulo pi into the interval [-pi/2, pi/2)."""
    r = math.remainder(theta, math.pi)
    if r >= math.pi / 2:
        r -= math.pi
    return r


def lobachevsky(theta: float, tol: float = DEFAULT_TOL) -> float:
    """L(theta) with absolute error at most ``tol``.

    Raises ValueError for non-finite input or non-positive tolerance.
    """
    _check_tol(tol)
    if not math.isfinite(theta):
        raise ValueError(f"lobachevsky: non-finite angle {theta!r}")
    x = reduce_angle(theta)
    if x == 0.0:
        return 0.0
    sign = 1.0 if x > 0 else -1.0
    x = abs(x)
    # Float rounding alone contributes ~1e-16; never ask for less.
    tol = max(tol, 1e-15)
    q = (x / math.pi) ** 2
    total = x - x * math.log(2 * x)
    power = x
    for k in range(1, len(_ZETA_EVEN) + 1):
        power *= q
        term = _ZETA_EVEN[k - 1] * power / (k * (2 * k + 1))
        total += term
        # Remaining terms are bounded by a geometric series with ratio q.
        if term * q / (1 - q) < tol:
            break
    return sign * total


def lobachevsky_integral(theta: float, tol: float = DEFAULT_TOL) -> float:
    """L(theta) by direct adaptive quadrature of the defining integral.

    On each stretch between consecutive multiples of pi, with x the offset
    from the left end, log|2 sin u| = log x + log(pi - x) + h(x) where h is
    smooth.  The two logarithms are integrated in closed form and h by
    adaptive quadrature.
    """
    _check_tol(tol)
    if not math.isfinite(theta):
        raise ValueError(f"lobachevsky_integral: non-finite angle {theta!r}")
    if theta == 0.0:
        return 0.0
    sign = 1.0 if theta > 0 else -1.0
    b = abs(theta)
    full = int(b // math.pi)
    rest = b - full * math.pi

    def xlogx(x: float) -> float:
        return x * math.log(x) - x if x > 0 else 0.0

    def smooth(x: float) -> float:
        if x <= 0.0 or x >= math.pi:
            return math.log(2 / math.pi)
        y = math.pi - x
        # sin(y) rather than sin(x): near pi the latter carries the rounding of pi.
        s = math.sin(x) if x <= y else math.sin(y)
        return math.log(2 * s) - math.log(x) - math.log(y)

    def piece(x1: float) -> float:
        logs = xlogx(x1) + xlogx(math.pi) - xlogx(math.pi - x1)
        if x1 < 1e-4:
            # h is smooth with bounded h'', so the trapezoid error is O(x1^3).
            return logs + 0.5 * x1 * (smooth(0.0) + smooth(x1))
        val, _ =integrate.quad(smooth, 0.0, x1, epsabs=tol / 4, epsrel=0.0, limit=200)
        return logs + val

    # A whole period integrates to zero; it is still evaluated as a check.
    total = full * piece(math.pi) + (piece(rest) if rest > 0 else 0.0)
    return -sign * total


def lobachevsky_sine_series(theta: float, terms: int = 200_000) -> float:
    """Partial sum of (1/2) sum_k sin(2k theta)/k^2.

    The truncation error is of order 1/terms, so this only serves as a
    coarse cross-check.
    """
    k = np.arange(1, terms + 1, dtype=float)
    return float(0.5 * np.sum(np.sin(2 * k * theta) / k**2))


def catalan_partial_sums(terms: int) -> np.ndarray:
    """Partial sums of 1 - 1/9 + 1/25 - ... with ``terms`` entries."""
    k = np.arange(terms, dtype=float)
    return np.cumsum((-1.0) ** k / (2 * k + 1) ** 2)


def catalan(tol: float = DEFAULT_TOL) -> float:
    """Catalan's constant G from the alternating series.

    Consecutive partial sums bracket G, so the midpoint of the last bracket
    is within half its width; enough terms are taken for that width to be
    below ``2 tol``.  The result is cross-checked
    against L(pi/2) + 2 L(pi/4).
    """
    _check_tol(tol)
    tol = max(tol, 1e-14)
    # Bracket width after m terms is 1/(2m+1)^2.
    m = int(math.ceil((1.0 / math.sqrt(2 * tol) - 1) / 2)) + 1
    sums = catalan_partial_sums(m + 1)
    value = float(0.5 * (sums[-1] + sums[-2]))
    check = lobachevsky(math.pi / 2, tol / 4) + 2 * lobachevsky(math.pi / 4, tol / 4)
    if abs(value - check) > 2 * tol:
        raise ArithmeticError(
            f"catalan: series {value!r} disagrees with L(pi/2)+2L(pi/4) = {check!r}")
    return value


@lru_cache(maxsize=64)
def v_n(n: int, tol: float = DEFAULT_TOL) -> float:
    """Volume of the regular ideal n-simplex.

    n=2 gives pi, n=3 gives 3 L(pi/3); higher dimensions are integrated
    numerically over an explicitly constructed regular ideal simplex.
    """
    if n < 2:
        raise ValueError(f"v_n requires n >= 2, got {n}")
    _check_tol(tol)
    if n == 2:
        return math.pi
    if n == 3:
        return 3 * lobachevsky(math.pi / 3, tol / 3)
    from .hypgeom import regular_ideal_simplex, signed_volume

    return float(abs(signed_volume(regular_ideal_simplex(n), tol=tol)))


def special_constants(tol: float = DEFAULT_TOL) -> dict[str, float]:
    return {"v2": math.pi, "v3": v_n(3, tol), "catalan_G": catalan(tol), "tolerance": tol}
