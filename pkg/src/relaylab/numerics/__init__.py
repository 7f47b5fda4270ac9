from relaylab.numerics.mixtures import ExpMixture, expand_product, integrate_mixture
from relaylab.numerics.quadrature import (
    DEFAULT_SETTINGS,
    QuadratureSettings,
    gauss_legendre,
    quad_1d,
    quad_2d_region,
)
from relaylab.numerics.special import complete_beta, incomplete_beta

__all__ = [
    "DEFAULT_SETTINGS",
    "ExpMixture",
    "QuadratureSettings",
    "complete_beta",
    "expand_product",
    "gauss_legendre",
    "incomplete_beta",
    "integrate_mixture",
    "quad_1d",
    "quad_2d_region",
]
