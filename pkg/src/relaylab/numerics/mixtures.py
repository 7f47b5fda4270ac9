"""Sums of decaying exponentials and their exact integrals.

A mixture represents ``f(beta) = sum_i w_i * exp(-rate_i * beta)``. Products of
``(1 - exp(-c * beta))`` factors expand into mixtures by inclusion-exclusion over
subsets, which turns the selected-relay CDF integrals into closed sums.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from relaylab.exceptions import DomainError, ExpansionTooLargeError

MAX_EXPANSION_FACTORS = 30


@dataclass(frozen=True)
class ExpMixture:
    weights: np.ndarray
    rates: np.ndarray

    def __post_init__(self):
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        rates = np.atleast_1d(np.asarray(self.rates, dtype=float))
        if weights.shape != rates.shape or weights.ndim != 1:
            raise DomainError(f"Weights {weights.shape} and rates {rates.shape} must be matching 1-D arrays")
        if not np.all(np.isfinite(weights)):
            raise DomainError("Mixture weights must be finite")
        if np.any(~np.isfinite(rates)) or np.any(rates < 0):
            raise DomainError("Mixture rates must be finite and nonnegative")

        # Canonical form: one term per distinct rate, no zero weights, rates ascending
        unique_rates, inverse = np.unique(rates, return_inverse=True)
        merged = np.bincount(inverse, weights=weights, minlength=unique_rates.size)
        keep = merged != 0.0
        object.__setattr__(self, "weights", merged[keep])
        object.__setattr__(self, "rates", unique_rates[keep])

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[float, float]]) -> ExpMixture:
        pairs = list(terms)
        if not pairs:
            return cls(np.empty(0), np.empty(0))
        weights, rates = zip(*pairs)
        return cls(np.array(weights, dtype=float), np.array(rates, dtype=float))

    @property
    def terms(self) -> list[tuple[float, float]]:
        return [(float(w), float(r)) for w, r in zip(self.weights, self.rates)]

    def __len__(self) -> int:
        return int(self.weights.size)

    def __call__(self, beta):
        beta = np.asarray(beta, dtype=float)
        values = np.exp(-np.multiply.outer(beta, self.rates)) @ self.weights
        return float(values) if values.ndim == 0 else values

    def scaled(self, factor: float) -> ExpMixture:
        return ExpMixture(self.weights * factor, self.rates)

    def times_exp(self, rate: float) -> ExpMixture:
        """Multiply every term by ``exp(-rate * beta)``."""
        return ExpMixture(self.weights, self.rates + rate)


def expand_product(rates: Sequence[float]) -> ExpMixture:
    """Expand ``prod_i (1 - exp(-rates[i] * beta))`` into an :class:`ExpMixture`.

    Raises:
        ExpansionTooLargeError: More than ``MAX_EXPANSION_FACTORS`` factors; integrate the
            unexpanded product with :func:`relaylab.numerics.quadrature.quad_1d` instead.
    """
    rates = np.asarray(rates, dtype=float).ravel()
    if rates.size > MAX_EXPANSION_FACTORS:
        raise ExpansionTooLargeError(
            f"expansion too large: {rates.size} factors exceed the budget of {MAX_EXPANSION_FACTORS} "
            f"(2^{rates.size} terms); evaluate the integral by quadrature"
        )
    if np.any(~np.isfinite(rates)) or np.any(rates < 0):
        raise DomainError("Product rates must be finite and nonnegative")

    mixture = ExpMixture(np.array([1.0]), np.array([0.0]))
    for c in rates:
        mixture = ExpMixture(
            np.concatenate([mixture.weights, -mixture.weights]),
            np.concatenate([mixture.rates, mixture.rates + c]),
        )
    return mixture


def integrate_mixture(m: ExpMixture, upper):
    """Exact ``int_0^upper m(beta) d beta``; ``upper`` may be ``+inf`` or an array.

    Raises:
        DomainError: Negative upper limit, or a nonzero constant term integrated to infinity.
    """
    upper = np.asarray(upper, dtype=float)
    if np.any(upper < 0) or np.any(np.isnan(upper)):
        raise DomainError("Upper limit must be nonnegative")
    if np.any(np.isinf(upper)) and np.any(m.rates == 0.0):
        raise DomainError("Integral diverges: constant term with nonzero weight up to infinity")

    u = upper[..., None]
    positive = m.rates > 0
    safe_rates = np.where(positive, m.rates, 1.0)
    with np.errstate(invalid="ignore"):
        decayed = -np.expm1(-u * safe_rates) / safe_rates
        constant = np.where(np.isinf(u), 0.0, u)
    per_term = np.where(positive, decayed, constant)
    values = per_term @ m.weights
    return float(values) if values.ndim == 0 else values
