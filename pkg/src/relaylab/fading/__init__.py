from relaylab.fading.distributions import (
    GainDistribution,
    GainKind,
    GainMethod,
    cdf,
    check_supported,
    pdf,
    pdf_minmax_upper,
    sandwich_check,
)
from relaylab.fading.profile import NetworkProfile

__all__ = [
    "GainDistribution",
    "GainKind",
    "GainMethod",
    "NetworkProfile",
    "cdf",
    "check_supported",
    "pdf",
    "pdf_minmax_upper",
    "sandwich_check",
]
