import math

import numpy as np
import pytest

from relaylab.exceptions import DomainError, ExpansionTooLargeError, NonConvergenceError
from relaylab.numerics import (
    ExpMixture,
    QuadratureSettings,
    complete_beta,
    expand_product,
    gauss_legendre,
    incomplete_beta,
    integrate_mixture,
    quad_1d,
    quad_2d_region,
)

# -------------------------------------------------------------------------
# 1. Exponential mixtures
# -------------------------------------------------------------------------


def test_expand_product_small_cases():
    """Empty, single and two-factor products expand by hand."""
    assert expand_product([]).terms == [(1.0, 0.0)]
    assert expand_product([2.5]).terms == [(1.0, 0.0), (-1.0, 2.5)]
    assert expand_product([1.0, 2.0]).terms == [(1.0, 0.0), (-1.0, 1.0), (-1.0, 2.0), (1.0, 3.0)]


def test_expand_product_merges_equal_rates():
    """(1 - e^{-b})^2 = 1 - 2e^{-b} + e^{-2b}: equal rates collapse to three terms."""
    m = expand_product([1.0, 1.0])
    assert m.terms == [(1.0, 0.0), (-2.0, 1.0), (1.0, 2.0)]


def test_mixture_drops_zero_weights():
    m = ExpMixture.from_terms([(1.0, 0.5), (-1.0, 0.5), (2.0, 1.0)])
    assert m.terms == [(2.0, 1.0)]
    assert len(ExpMixture.from_terms([])) == 0


def test_mixture_rejects_negative_rates():
    with pytest.raises(DomainError):
        ExpMixture(np.array([1.0]), np.array([-0.5]))


def test_expand_product_budget():
    with pytest.raises(ExpansionTooLargeError, match="expansion too large"):
        expand_product([1.0] * 31)


def test_expanded_product_matches_pointwise():
    rates = [0.3, 1.7, 4.0]
    m = expand_product(rates)
    beta = np.linspace(0.0, 5.0, 11)
    expected = np.prod([1 - np.exp(-c * beta) for c in rates], axis=0)
    assert np.max(np.abs(m(beta) - expected)) < 1e-14


def test_integrate_mixture_closed_cases():
    assert abs(integrate_mixture(ExpMixture.from_terms([(1.0, 1.0)]), math.inf) - 1.0) < 1e-15
    assert integrate_mixture(ExpMixture.from_terms([(1.0, 0.0)]), 2.5) == 2.5
    assert integrate_mixture(ExpMixture.from_terms([(3.0, 2.0)]), 0.0) == 0.0


def test_integrate_mixture_diverges():
    with pytest.raises(DomainError):
        integrate_mixture(ExpMixture.from_terms([(1.0, 0.0)]), math.inf)


def test_integrate_mixture_vectorised():
    m = ExpMixture.from_terms([(2.0, 1.0)])
    upper = np.array([0.0, 1.0, math.inf])
    np.testing.assert_allclose(integrate_mixture(m, upper), [0.0, 2 * (1 - math.exp(-1)), 2.0], rtol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 4, 8])
def test_mixture_agrees_with_quadrature(n):
    """Expansion and adaptive quadrature of the raw product agree to 1e-9."""
    rng = np.random.default_rng(1234 + n)
    rates = rng.uniform(0.1, 10.0, size=n)
    m = expand_product(rates).times_exp(1.0)

    def raw(beta):
        return math.exp(-beta) * float(np.prod(-np.expm1(-rates * beta)))

    for upper in (0.3, 1.0, 4.0, math.inf):
        expected, _ = quad_1d(raw, 0.0, upper)
        assert abs(integrate_mixture(m, upper) - expected) < 1e-9


# -------------------------------------------------------------------------
# 2. Incomplete beta
# -------------------------------------------------------------------------


def test_incomplete_beta_endpoints():
    assert incomplete_beta(0.0, 2.0, 3.0) == 0.0
    assert abs(incomplete_beta(1.0, 1.0, 1.0) - 1.0) < 1e-15


def test_incomplete_beta_against_substituted_quadrature():
    """t = 1 - u^2 removes the endpoint singularity of (1 - t)^(b - 1)."""
    a, b, x = 2.0, 0.5, 0.5

    def integrand(u):
        return 2.0 * (1.0 - u * u) ** (a - 1) * u ** (2 * b - 1)

    expected, _ = quad_1d(integrand, math.sqrt(1.0 - x), 1.0)
    assert abs(incomplete_beta(x, a, b) - expected) < 1e-10


def test_incomplete_beta_monotone():
    x = np.linspace(0.0, 1.0, 501)
    values = incomplete_beta(x, 3.0, 0.3)
    assert np.all(np.diff(values) >= 0.0)


@pytest.mark.parametrize("a", range(1, 11))
def test_complete_beta_identity(a):
    for b in (0.25, 0.5, 1.0, 2.7):
        expected = math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))
        assert abs(incomplete_beta(1.0, a, b) - expected) <= 1e-10 * expected
        assert abs(complete_beta(a, b) - expected) <= 1e-12 * expected


def test_incomplete_beta_out_of_range():
    with pytest.raises(DomainError):
        incomplete_beta(1.5, 1.0, 1.0)
    with pytest.raises(DomainError):
        incomplete_beta(0.5, 0.0, 1.0)


# -------------------------------------------------------------------------
# 3. Quadrature
# -------------------------------------------------------------------------


def test_quad_1d_basic():
    value, err = quad_1d(lambda x: 1.0, 0.0, 3.0)
    assert abs(value - 3.0) < 1e-12
    assert err >= 0.0

    value, _ = quad_1d(lambda x: math.exp(-x), 0.0, math.inf)
    assert abs(value - 1.0) < 1e-9


def test_quad_1d_empty_interval():
    assert quad_1d(lambda x: 1.0 / 0.0, 2.0, 2.0) == (0.0, 0.0)


@pytest.mark.parametrize("degree", range(6))
def test_quad_1d_polynomials_exact(degree):
    coeffs = np.arange(1, degree + 2, dtype=float)
    poly = np.polynomial.Polynomial(coeffs)
    antiderivative = poly.integ()
    value, _ = quad_1d(lambda x: float(poly(x)), -1.0, 2.0)
    assert abs(value - (antiderivative(2.0) - antiderivative(-1.0))) <= QuadratureSettings().abs_tol * 10


def test_quad_1d_rejects_reversed_limits():
    with pytest.raises(DomainError):
        quad_1d(lambda x: x, 1.0, 0.0)


def test_quad_1d_non_convergence_keeps_estimate():
    """A single subdivision cannot resolve an oscillating integrand."""
    settings = QuadratureSettings(max_subdivisions=1, rel_tol=1e-12, abs_tol=1e-14)
    with pytest.raises(NonConvergenceError) as info:
        quad_1d(lambda x: math.sin(80.0 * x) ** 2, 0.0, 10.0, settings)
    assert math.isfinite(info.value.best_estimate)


def test_quadrature_settings_validation():
    with pytest.raises(ValueError):
        QuadratureSettings(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSettings(max_subdivisions=0)


def test_quad_2d_square_and_triangle():
    assert abs(quad_2d_region(lambda x, y: 1.0, 1.0, lambda x: 1.0) - 1.0) < 1e-12
    assert abs(quad_2d_region(lambda x, y: 1.0, 1.0, lambda x: 1.0 - x) - 0.5) < 1e-12


def test_quad_2d_clamps_negative_inner_limit():
    """Inner limits below zero contribute nothing."""
    value = quad_2d_region(lambda x, y: 1.0, 2.0, lambda x: 1.0 - x)
    assert abs(value - 0.5) < 1e-10


def test_gauss_legendre_vector_upper():
    upper = np.array([0.1, 1.0, 3.0])
    values = gauss_legendre(lambda b: np.exp(-b), upper)
    np.testing.assert_allclose(values, -np.expm1(-upper), rtol=1e-14)
