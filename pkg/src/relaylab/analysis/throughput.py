"""Long-term (LT) and delay-limited (DL) throughput from an outage profile ``P_out(0..L)``."""

import numpy as np

from relaylab.analysis.models import DelayLimitedThroughput, LinkBudget, OutageMethod, QosThroughput
from relaylab.analysis.outage import outage_profile
from relaylab.exceptions import DomainError
from relaylab.fading import NetworkProfile
from relaylab.numerics import DEFAULT_SETTINGS, QuadratureSettings
from relaylab.relay_logger import get_logger

logger = get_logger(__name__)


def lt_from_outages(outages: np.ndarray, rate: float) -> float:
    """``R / sum_{l=0}^{L-1} P_out(l)``: bits per channel use averaged over many packets."""
    outages = np.asarray(outages, dtype=float)
    return float(rate / np.sum(outages[:-1]))


def dl_from_outages(outages: np.ndarray, rate: float) -> DelayLimitedThroughput:
    """``sum_l (R / l) [P_out(l-1) - P_out(l)]``: expected rate of a single packet."""
    outages = np.asarray(outages, dtype=float)
    drops = outages[:-1] - outages[1:]
    rounds = np.arange(1, outages.size)
    monotone = bool(np.all(drops >= 0.0))
    if not monotone:
        logger.warning("Outage profile increases with the round index; delay-limited throughput is flagged")
    return DelayLimitedThroughput(value=float(np.sum(rate / rounds * drops)), monotone=monotone)


def throughput_lt(
    b: LinkBudget,
    p: NetworkProfile,
    m: OutageMethod,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> float:
    return lt_from_outages(outage_profile(b, p, m, settings), b.rate)


def throughput_dl(
    b: LinkBudget,
    p: NetworkProfile,
    m: OutageMethod,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> DelayLimitedThroughput:
    return dl_from_outages(outage_profile(b, p, m, settings), b.rate)


def throughput_qos(
    b: LinkBudget,
    p: NetworkProfile,
    m: OutageMethod,
    rho_max: float,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> QosThroughput:
    """Both throughputs plus whether the final outage ``P_out(L)`` meets the target ``rho_max``."""
    if not 0.0 < rho_max <= 1.0:
        raise DomainError(f"Target outage must lie in (0, 1], got {rho_max}")
    outages = outage_profile(b, p, m, settings)
    feasible = bool(outages[-1] <= rho_max)
    if not feasible:
        logger.debug(f"P_out(L)={outages[-1]:.3g} misses target {rho_max:g} at rho_db={b.rho_db:.2f}")
    return QosThroughput(
        lt=lt_from_outages(outages, b.rate),
        dl=dl_from_outages(outages, b.rate).value,
        feasible=feasible,
    )
