"""Outage probability of HARQ with a selected decode-and-forward relay.

After round ``l`` the destination is in outage if the accumulated mutual information is
still below ``R``. The relay joins (Alamouti) once it has decoded, after round ``chi``;
conditioning on ``chi`` splits the outage into a sum over decode rounds ``k < l`` of
``Pr[chi = k] * Pr[outage | relay helps from round k + 1]`` plus the tail ``chi >= l``
where the direct link carries the packet alone.

The SNR thresholds ``mu_k = (2^(R/k) - 1) / rho`` turn every mutual-information event into a
gain event: ``k * log2(1 + rho * gamma) < R`` iff ``gamma < mu_k``.
"""

import math

import numpy as np

from relaylab.analysis.models import (
    ChiTail,
    ChiVariant,
    HelpVariant,
    LinkBudget,
    OutageKind,
    OutageMethod,
    OutagePoint,
)
from relaylab.exceptions import ConfigurationError, DomainError
from relaylab.fading import GainDistribution, GainKind, GainMethod, NetworkProfile, cdf, pdf
from relaylab.numerics import DEFAULT_SETTINGS, QuadratureSettings, quad_1d, quad_2d_region
from relaylab.relay_logger import get_logger

logger = get_logger(__name__)

_LN2 = math.log(2.0)


def snr_threshold(k: int, b: LinkBudget) -> float:
    """``mu_k``: the gain below which ``k`` rounds of a single link cannot carry ``R`` bits; ``mu_0 = inf``."""
    if k < 0:
        raise DomainError(f"Round count must be nonnegative, got {k}")
    if k == 0:
        return math.inf
    return math.expm1(_LN2 * b.rate / k) / b.rho


def _check_round(name: str, value: int, b: LinkBudget) -> None:
    if not 1 <= value <= b.max_rounds:
        raise DomainError(f"{name}={value} outside 1..{b.max_rounds}")


def _selected_source(p: NetworkProfile, method: GainMethod) -> GainDistribution:
    return GainDistribution(kind=GainKind.SELECTED_SOURCE, method=method, profile=p)


def pr_chi(k: int, l: int, b: LinkBudget, p: NetworkProfile, variant: ChiVariant = ChiVariant.EXACT) -> float:
    """Probability that the relay decodes after round ``k``, as it enters the round-``l`` outage.

    For ``k < l`` this is ``F(mu_{k-1}) - F(mu_k)`` with ``F`` the selected relay's source
    gain CDF; for ``k >= l`` every decode round from ``l`` on is equivalent and the value
    is ``F(mu_{l-1})``. ``BOUND`` replaces ``F`` by the max-min CDF on the left
    threshold and the source-max CDF on the right.
    """
    _check_round("k", k, b)
    _check_round("l", l, b)

    if variant == ChiVariant.BOUND:
        upper = GainDistribution(kind=GainKind.MIN_MAX, profile=p)
        if k >= l:
            return cdf(upper, snr_threshold(l - 1, b))
        lower = GainDistribution(kind=GainKind.SOURCE_MAX, profile=p)
        return cdf(upper, snr_threshold(k - 1, b)) - cdf(lower, snr_threshold(k, b))

    method = GainMethod.EXACT if variant == ChiVariant.EXACT else GainMethod.APPROX
    d = _selected_source(p, method)
    if k >= l:
        return cdf(d, snr_threshold(l - 1, b))
    return cdf(d, snr_threshold(k - 1, b)) - cdf(d, snr_threshold(k, b))


def cond_outage_no_help(l: int, b: LinkBudget, p: NetworkProfile) -> float:
    """Outage after ``l`` rounds on the direct link alone."""
    _check_round("l", l, b)
    return -math.expm1(-snr_threshold(l, b) / p.sigma2_f0)


def relay_gain_limit(x: float, l: int, k: int, b: LinkBudget) -> float:
    """Largest relay gain that still leaves the destination in outage after round ``l``.

    Given direct gain ``x`` and a relay helping from round ``k + 1``, outage means
    ``k * log2(1 + rho x) + (l - k) * log2(1 + rho x + rho y) < R``; solved for ``y`` and
    clamped at 0. It is ``mu_{l-k}`` at ``x = 0`` and 0 at ``x = mu_l``.
    """
    rho_x = b.rho * x
    exponent = _LN2 * b.rate / (l - k) - (k / (l - k)) * math.log1p(rho_x)
    return max((math.expm1(exponent) - rho_x) / b.rho, 0.0)


def psi_bound(l: int, k: int, b: LinkBudget, p: NetworkProfile) -> float:
    """Closed-form upper bound on the with-help outage; may exceed 1 at low SNR."""
    mu_l = snr_threshold(l, b)
    mu_lk = snr_threshold(l - k, b)
    return (mu_l / p.sigma2_f0) * mu_lk**p.n_relays * float(np.prod(p.min_rates))


def cond_outage_with_help(
    l: int,
    k: int,
    b: LinkBudget,
    p: NetworkProfile,
    variant: HelpVariant = HelpVariant.EXACT,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
    inner_quadrature: bool = False,
) -> float:
    """Joint probability that the direct gain is below ``mu_l`` and the relay gain is below the outage limit.

    The relay helps from round ``k + 1``. ``EXACT`` and ``APPROX`` integrate the direct-link
    density against the selected relay's destination-gain CDF (exact or approximate form);
    with ``inner_quadrature`` the inner integral over that gain's density is done
    numerically as well. ``PSI_BOUND`` is :func:`psi_bound`.
    """
    _check_round("l", l, b)
    if not 1 <= k < l:
        raise DomainError(f"With-help outage needs 1 <= k < l, got k={k}, l={l}")

    bound = psi_bound(l, k, b, p)
    if variant == HelpVariant.PSI_BOUND:
        return bound

    method = GainMethod.EXACT if variant == HelpVariant.EXACT else GainMethod.APPROX
    d = GainDistribution(kind=GainKind.SELECTED_DEST, method=method, profile=p)
    mu_l = snr_threshold(l, b)
    s0 = p.sigma2_f0
    # Integrate a rescaled integrand so the absolute tolerance is meaningful at high SNR
    scale = min(bound, 1.0)

    if inner_quadrature:

        def joint(x: float, y: float) -> float:
            return math.exp(-x / s0) / s0 * pdf(d, y) / scale

        value = quad_2d_region(joint, mu_l, lambda x: relay_gain_limit(x, l, k, b), settings)
    else:

        def integrand(x: float) -> float:
            return math.exp(-x / s0) / s0 * cdf(d, relay_gain_limit(x, l, k, b)) / scale

        value, _ = quad_1d(integrand, 0.0, mu_l, settings)
    return value * scale


def asymptotic_constant(l: int, b: LinkBudget, p: NetworkProfile) -> float:
    """High-SNR constant: the outage behaves as ``asymptotic_constant / rho^(N+1)``; defined for ``l >= 2``."""
    _check_round("l", l, b)
    if l < 2:
        raise ConfigurationError("The asymptotic outage is defined for l >= 2")
    n = p.n_relays
    return (
        math.expm1(_LN2 * b.rate / l)
        * math.expm1(_LN2 * b.rate / (l - 1)) ** n
        * (b.max_rounds - l + 1)
        / p.sigma2_f0
        * float(np.prod(p.min_rates))
    )


# Per outage kind: (decode-round weights, with-help term)
_COMPONENTS = {
    OutageKind.EXACT: (ChiVariant.EXACT, HelpVariant.EXACT),
    OutageKind.APPROX: (ChiVariant.APPROX, HelpVariant.APPROX),
    OutageKind.UPPER_BOUND: (ChiVariant.BOUND, HelpVariant.PSI_BOUND),
    OutageKind.CLOSED_APPROX: (ChiVariant.APPROX, HelpVariant.PSI_BOUND),
}


def _tail_multiplicity(l: int, b: LinkBudget, chi_tail: ChiTail) -> int:
    return b.max_rounds - l + 1 if chi_tail == ChiTail.VERBATIM else 1


def outage(
    l: int,
    b: LinkBudget,
    p: NetworkProfile,
    m: OutageMethod,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> OutagePoint:
    """Outage probability after ``l`` rounds with method ``m``.

    Values above 1 (bounds at low SNR, or the repeated tail) are kept unclamped and flagged.
    """
    _check_round("l", l, b)

    if m.kind == OutageKind.DIRECT:
        value = cond_outage_no_help(l, b, p)
    elif m.kind == OutageKind.ASYMPTOTIC:
        value = asymptotic_constant(l, b, p) / b.rho ** (p.n_relays + 1)
    else:
        chi_variant, help_variant = _COMPONENTS[m.kind]
        # 1. relay decoded in time and helps from round k + 1
        value = 0.0
        for k in range(1, l):
            weight = pr_chi(k, l, b, p, chi_variant)
            if weight == 0.0:
                continue
            value += weight * cond_outage_with_help(l, k, b, p, help_variant, settings)
        # 2. relay silent through round l
        tail = pr_chi(l, l, b, p, chi_variant) * cond_outage_no_help(l, b, p)
        value += _tail_multiplicity(l, b, m.chi_tail) * tail

    exceeds_one = value > 1.0
    if exceeds_one:
        logger.warning(
            f"Outage {m.kind.value} at l={l}, rho_db={b.rho_db:.2f} is {value:.4g} > 1; reported unclamped"
        )
    return OutagePoint(l=l, method=m, value=value, exceeds_one=exceeds_one)


def outage_profile(
    b: LinkBudget,
    p: NetworkProfile,
    m: OutageMethod,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> np.ndarray:
    """``P_out(0..L)`` as an array of length ``L + 1``; ``P_out(0) = 1`` since zero rounds never decode."""
    values = np.empty(b.max_rounds + 1)
    values[0] = 1.0
    for l in range(1, b.max_rounds + 1):
        values[l] = outage(l, b, p, m, settings).value
    return values
