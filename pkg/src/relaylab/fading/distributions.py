"""Distributions of the selected relay's link gains and of the bounding max-min variables.

Every relay has an exponential source gain ``gamma_f_i`` and destination gain
``gamma_g_i``; the relay with the largest ``min(gamma_f_i, gamma_g_i)`` is selected.
This module gives CDFs and PDFs of the selected relay's source gain (``SELECTED_SOURCE``),
its destination gain (``SELECTED_DEST``), the largest min-gain (``MIN_MAX``) and the
largest source gain (``SOURCE_MAX``).

All evaluators are vectorised over ``gamma`` and accept ``+inf`` (CDF 1, density 0).
"""

from __future__ import annotations

from enum import Enum
from functools import lru_cache

import numpy as np
from pydantic import BaseModel, ConfigDict

from relaylab.constants import EXPANSION_MAX_RELAYS
from relaylab.exceptions import ConfigurationError, DomainError
from relaylab.fading.profile import NetworkProfile
from relaylab.numerics import expand_product, gauss_legendre, incomplete_beta, integrate_mixture, quad_1d
from relaylab.relay_logger import get_logger

logger = get_logger(__name__)

# Integrals over [0, gamma] with sum(c) * gamma below this use Gauss-Legendre; the
# inclusion-exclusion sum cancels catastrophically on short intervals
_SHORT_INTERVAL = 32.0
_NEGATIVE_DENSITY_TOL = 1e-12
# Caps the element count of intermediate (points x terms) arrays
_CHUNK_ELEMENTS = 1 << 22


class GainKind(str, Enum):
    SELECTED_SOURCE = "selected_source"
    SELECTED_DEST = "selected_dest"
    MIN_MAX = "min_max"
    SOURCE_MAX = "source_max"


class GainMethod(str, Enum):
    EXACT = "exact"
    EQUAL_VARIANCE = "equal_variance"
    APPROX = "approx"
    HIGH_SNR = "high_snr"


class GainDistribution(BaseModel):
    """One distribution: which gain, which formula, which network.

    ``approx_override`` lets the approximate method run on asymmetric links by using
    the geometric mean ``sqrt(sigma2_f[i] * sigma2_g[i])`` as the per-relay variance.
    """

    model_config = ConfigDict(frozen=True)

    kind: GainKind
    method: GainMethod = GainMethod.EXACT
    profile: NetworkProfile
    approx_override: bool = False


def check_supported(d: GainDistribution) -> None:
    """Raise :class:`ConfigurationError` if the kind, method and profile do not fit together."""
    selected = d.kind in (GainKind.SELECTED_SOURCE, GainKind.SELECTED_DEST)
    if not selected and d.method != GainMethod.EXACT:
        raise ConfigurationError(f"{d.kind.value} only has an exact form, got method {d.method.value}")
    if d.method == GainMethod.EQUAL_VARIANCE and not d.profile.has_uniform_hops():
        raise ConfigurationError(
            "equal_variance needs identical sigma2_f across relays and identical sigma2_g across relays"
        )
    if d.method == GainMethod.APPROX and not d.approx_override and not d.profile.has_symmetric_links():
        raise ConfigurationError(
            "approx needs sigma2_f[i] == sigma2_g[i] for every relay; set approx_override to use the geometric mean"
        )


def _as_gamma(gamma) -> tuple[np.ndarray, bool]:
    arr = np.asarray(gamma, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise DomainError(f"Gain argument must be nonnegative, got {gamma}")
    return arr, arr.ndim == 0


def _finish(values: np.ndarray, scalar: bool):
    return float(values) if scalar else values


def _one_minus_exp(rates: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """``1 - exp(-rates * gamma)`` with a trailing relay axis."""
    return -np.expm1(-gamma[..., None] * rates)


def _log_one_minus_exp(x: np.ndarray) -> np.ndarray:
    """``log(1 - exp(-x))`` accurate at both ends of ``x >= 0``."""
    small = x < np.log(2.0)
    with np.errstate(divide="ignore"):
        near_zero = np.log(-np.expm1(-np.where(small, x, 1.0)))
    far = np.log1p(-np.exp(-np.where(small, 1.0, x)))
    return np.where(small, near_zero, far)


def _exclusive_products(factors: np.ndarray) -> np.ndarray:
    """Column ``j`` holds the product of every factor except ``j`` along the last axis."""
    ones = np.ones_like(factors[..., :1])
    left = np.cumprod(np.concatenate([ones, factors[..., :-1]], axis=-1), axis=-1)
    right = np.cumprod(np.concatenate([ones, factors[..., :0:-1]], axis=-1), axis=-1)[..., ::-1]
    return left * right


class _HelperIntegrals:
    """``I_j(gamma) = int_0^gamma exp(-b / sigma2_g[j]) * prod_{i != j} (1 - exp(-c_i b)) db`` for every relay ``j``."""

    def __init__(self, profile: NetworkProfile):
        self.rates = profile.min_rates
        self.decay = 1.0 / profile.g
        self.total_rate = float(self.rates.sum())
        n = profile.n_relays
        self.mixtures = None
        if n <= EXPANSION_MAX_RELAYS:
            self.mixtures = [expand_product(np.delete(self.rates, j)).times_exp(self.decay[j]) for j in range(n)]
        else:
            logger.debug(f"{n} relays exceed the expansion limit {EXPANSION_MAX_RELAYS}; integrating by quadrature")

    def integrand(self, beta: np.ndarray) -> np.ndarray:
        factors = _one_minus_exp(self.rates, beta)
        return np.exp(-beta[..., None] * self.decay) * _exclusive_products(factors)

    def __call__(self, gamma: np.ndarray) -> np.ndarray:
        """``gamma`` is a finite 1-D array; returns shape ``(gamma.size, N)``."""
        out = np.empty((gamma.size, self.rates.size))
        short_idx = np.flatnonzero(self.total_rate * gamma <= _SHORT_INTERVAL)
        step = max(1, _CHUNK_ELEMENTS // (64 * self.rates.size))
        for start in range(0, short_idx.size, step):
            idx = short_idx[start : start + step]
            out[idx] = gauss_legendre(self.integrand, gamma[idx])
        long_idx = np.setdiff1d(np.arange(gamma.size), short_idx)
        if long_idx.size == 0:
            return out

        if self.mixtures is not None:
            for j, mixture in enumerate(self.mixtures):
                step = max(1, _CHUNK_ELEMENTS // max(len(mixture), 1))
                for start in range(0, long_idx.size, step):
                    idx = long_idx[start : start + step]
                    out[idx, j] = integrate_mixture(mixture, gamma[idx])
        else:
            for j in range(self.rates.size):

                def term(b: float, j: int = j) -> float:
                    return float(self.integrand(np.asarray(b))[j])

                for i in long_idx:
                    out[i, j], _ = quad_1d(term, 0.0, float(gamma[i]))
        return out


@lru_cache(maxsize=64)
def _helper_integrals(profile: NetworkProfile) -> _HelperIntegrals:
    return _HelperIntegrals(profile)


def _selected_exact(profile: NetworkProfile, gamma: np.ndarray, density: bool) -> np.ndarray:
    finite = np.isfinite(gamma)
    out = np.full(gamma.shape, 0.0 if density else 1.0)
    g = gamma[finite]
    if g.size == 0:
        return out

    rates, f, s_g = profile.min_rates, profile.f, profile.g
    helper = _helper_integrals(profile)(g)
    tilt = np.exp(-g[:, None] / f)
    if density:
        factors = _one_minus_exp(rates, g)
        direct = np.exp(-g[:, None] * rates) * _exclusive_products(factors) / f
        values = np.sum(direct + tilt * helper / (f * s_g), axis=-1)
    else:
        product = np.prod(_one_minus_exp(rates, g), axis=-1)
        values = product - np.sum(tilt * helper / s_g, axis=-1)
    out[finite] = values
    return out


def _selected_equal_variance(profile: NetworkProfile, gamma: np.ndarray, density: bool) -> np.ndarray:
    n = profile.n_relays
    s_f, s_g = float(profile.f[0]), float(profile.g[0])
    c = 1.0 / s_f + 1.0 / s_g
    b = s_f / (s_f + s_g)

    x = -np.expm1(-c * gamma)
    tilt = np.exp(-gamma / s_f)
    beta_part = tilt * incomplete_beta(x, n, b)
    if density:
        return (n / s_f) * np.exp(-c * gamma) * x ** (n - 1) + (n / (s_f + s_g)) * beta_part
    return x**n - (n * b) * beta_part


def _approx_variances(d: GainDistribution) -> np.ndarray:
    if d.profile.has_symmetric_links():
        return d.profile.f
    return np.sqrt(d.profile.f * d.profile.g)


def _selected_approx(d: GainDistribution, gamma: np.ndarray, density: bool) -> np.ndarray:
    # F = 1 - sqrt(1 - P) with P = prod(1 - exp(-2 gamma / sigma2_i)), evaluated as P / (1 + sqrt(1 - P))
    sigma2 = _approx_variances(d)
    finite = np.isfinite(gamma)
    out = np.full(gamma.shape, 0.0 if density else 1.0)
    g = gamma[finite]
    if g.size == 0:
        return out

    rates = 2.0 / sigma2
    factors = _one_minus_exp(rates, g)
    log_p = np.sum(_log_one_minus_exp(g[:, None] * rates), axis=-1)
    p = np.exp(log_p)
    q = -np.expm1(log_p)
    root = np.sqrt(q)
    if density:
        numer = np.sum(np.exp(-g[:, None] * rates) / sigma2 * _exclusive_products(factors), axis=-1)
        safe_root = np.where(root > 0, root, 1.0)
        values = np.where(root > 0, numer / safe_root, 0.0)
    else:
        values = p / (1.0 + root)
    out[finite] = values
    return out


def _selected_high_snr(profile: NetworkProfile, gamma: np.ndarray) -> np.ndarray:
    n = profile.n_relays
    weight = float(np.mean(profile.g / (profile.f + profile.g)))
    with np.errstate(over="ignore"):
        values = gamma**n * float(np.prod(profile.min_rates)) * weight
    return np.minimum(values, 1.0)


def _max_of_exponentials(rates: np.ndarray, gamma: np.ndarray, density: bool) -> np.ndarray:
    """CDF or PDF of the largest of independent exponentials with the given rates."""
    finite = np.isfinite(gamma)
    out = np.full(gamma.shape, 0.0 if density else 1.0)
    g = gamma[finite]
    factors = _one_minus_exp(rates, g)
    if density:
        out[finite] = np.sum(rates * np.exp(-g[:, None] * rates) * _exclusive_products(factors), axis=-1)
    else:
        out[finite] = np.prod(factors, axis=-1)
    return out


def _evaluate(d: GainDistribution, gamma: np.ndarray, density: bool) -> np.ndarray:
    check_supported(d)
    profile = d.profile.swapped() if d.kind == GainKind.SELECTED_DEST else d.profile
    flat = np.atleast_1d(gamma).ravel()

    if d.kind == GainKind.MIN_MAX:
        values = _max_of_exponentials(profile.min_rates, flat, density)
    elif d.kind == GainKind.SOURCE_MAX:
        values = _max_of_exponentials(1.0 / profile.f, flat, density)
    elif d.method == GainMethod.EXACT:
        values = _selected_exact(profile, flat, density)
    elif d.method == GainMethod.EQUAL_VARIANCE:
        values = _selected_equal_variance(profile, flat, density)
    elif d.method == GainMethod.APPROX:
        values = _selected_approx(d, flat, density)
    else:
        if density:
            raise ConfigurationError("high_snr is a small-gain CDF expansion and has no density")
        values = _selected_high_snr(profile, flat)
    return values.reshape(gamma.shape)


def cdf(d: GainDistribution, gamma):
    """``Pr[gain < gamma]`` for a scalar or array ``gamma >= 0``."""
    arr, scalar = _as_gamma(gamma)
    values = _evaluate(d, arr, density=False)
    return _finish(values, scalar)


def pdf(d: GainDistribution, gamma):
    """Density of the gain at ``gamma >= 0``.

    Cancellation can leave values a hair below zero; those down to ``-1e-12`` are
    truncated to 0.
    """
    arr, scalar = _as_gamma(gamma)
    values = _evaluate(d, arr, density=True)
    slightly_negative = (values < 0) & (values >= -_NEGATIVE_DENSITY_TOL)
    if np.any(slightly_negative):
        logger.debug(f"Truncated {int(slightly_negative.sum())} negative density values for {d.kind.value}")
        values = np.where(slightly_negative, 0.0, values)
    return _finish(values, scalar)


def pdf_minmax_upper(profile: NetworkProfile, gamma):
    """Small-gain upper bound ``N * gamma^(N-1) * prod_i c_i`` on the max-min density."""
    arr, scalar = _as_gamma(gamma)
    n = profile.n_relays
    values = n * arr ** (n - 1) * float(np.prod(profile.min_rates))
    return _finish(np.asarray(values, dtype=float), scalar)


def sandwich_check(profile: NetworkProfile, gamma: float) -> tuple[float, float, float]:
    """Return ``(F_source_max, F_selected_source, F_min_max)`` at ``gamma``.

    The selected relay's source gain lies between the largest min-gain and the largest
    source gain, so the three CDF values come out ordered.
    """
    lower = cdf(GainDistribution(kind=GainKind.SOURCE_MAX, profile=profile), gamma)
    mid = cdf(GainDistribution(kind=GainKind.SELECTED_SOURCE, profile=profile), gamma)
    upper = cdf(GainDistribution(kind=GainKind.MIN_MAX, profile=profile), gamma)
    return lower, mid, upper
