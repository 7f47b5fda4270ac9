"""Adaptive quadrature wrappers around QUADPACK plus a fixed Gauss-Legendre rule."""

from functools import lru_cache
from typing import Callable

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import integrate

from relaylab.exceptions import DomainError, NonConvergenceError
from relaylab.relay_logger import get_logger

logger = get_logger(__name__)

# QUADPACK reports roundoff trouble with this phrase; the estimate is still the best available
_ROUNDOFF_MARKER = "roundoff"


class QuadratureSettings(BaseModel):
    """Tolerances and subdivision budget shared by every integral in the package."""

    model_config = ConfigDict(frozen=True)

    rel_tol: float = Field(1e-9, gt=0)
    abs_tol: float = Field(1e-12, gt=0)
    max_subdivisions: int = Field(2000, ge=1)


DEFAULT_SETTINGS = QuadratureSettings()


def _semi_infinite(f: Callable[[float], float], a: float) -> Callable[[float], float]:
    # x = a + u / (1 - u) maps [0, 1) onto [a, inf)
    def mapped(u: float) -> float:
        if u >= 1.0:
            return 0.0
        one_minus = 1.0 - u
        return f(a + u / one_minus) / (one_minus * one_minus)

    return mapped


def quad_1d(
    f: Callable[[float], float],
    a: float,
    b: float,
    s: QuadratureSettings = DEFAULT_SETTINGS,
) -> tuple[float, float]:
    """Integrate ``f`` over ``[a, b]``; ``b`` may be ``+inf``.

    Args:
        f: Scalar integrand, finite on the interval.
        a: Lower limit (finite).
        b: Upper limit, ``a <= b``.
        s: Tolerances and subdivision budget.

    Returns:
        ``(value, err_est)``.

    Raises:
        DomainError: If ``a > b`` or ``a`` is not finite.
        NonConvergenceError: If the subdivision budget runs out; carries the best estimate.
    """
    if not np.isfinite(a):
        raise DomainError(f"Lower limit must be finite, got {a}")
    if b < a:
        raise DomainError(f"Integration limits out of order: a={a} > b={b}")
    if b == a:
        return 0.0, 0.0

    integrand, lo, hi = f, a, b
    if np.isinf(b):
        integrand, lo, hi = _semi_infinite(f, a), 0.0, 1.0

    result = integrate.quad(
        integrand,
        lo,
        hi,
        epsabs=s.abs_tol,
        epsrel=s.rel_tol,
        limit=s.max_subdivisions,
        full_output=1,
    )
    value, err_est = float(result[0]), float(result[1])
    if len(result) > 3:
        message = str(result[3])
        if _ROUNDOFF_MARKER in message.lower():
            logger.debug(f"Quadrature on [{a}, {b}] hit roundoff limit; keeping {value:.6g} (err {err_est:.2g})")
        else:
            raise NonConvergenceError(
                f"Quadrature on [{a}, {b}] did not converge: {message.strip()}",
                best_estimate=value,
                error_estimate=err_est,
            )
    return value, err_est


def quad_2d_region(
    f: Callable[[float, float], float],
    upper: float,
    inner_upper: Callable[[float], float],
    s: QuadratureSettings = DEFAULT_SETTINGS,
) -> float:
    """Iterated integral of ``f(x, y)`` over ``0 <= x <= upper``, ``0 <= y <= [inner_upper(x)]^+``."""

    def outer(x: float) -> float:
        h = max(float(inner_upper(x)), 0.0)
        if h == 0.0:
            return 0.0
        value, _ = quad_1d(lambda y: f(x, y), 0.0, h, s)
        return value

    value, _ = quad_1d(outer, 0.0, upper, s)
    return value


@lru_cache(maxsize=8)
def _legendre_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return nodes, weights


def gauss_legendre(
    integrand: Callable[[np.ndarray], np.ndarray],
    upper: np.ndarray,
    order: int = 64,
) -> np.ndarray:
    """Fixed-order Gauss-Legendre integral over ``[0, upper]`` for every entry of ``upper``.

    ``integrand`` receives nodes of shape ``upper.shape + (order,)`` and returns that shape,
    optionally with extra trailing axes for vector-valued integrands. Meant for smooth
    integrands on short intervals, where it keeps full relative precision.
    """
    upper = np.asarray(upper, dtype=float)
    nodes, weights = _legendre_rule(order)
    half = 0.5 * upper
    beta = half[..., None] * (nodes + 1.0)
    values = np.asarray(integrand(beta))
    extra = values.ndim - beta.ndim
    w = weights.reshape(weights.shape + (1,) * extra)
    scale = half.reshape(half.shape + (1,) * extra)
    return np.sum(values * w, axis=upper.ndim) * scale
