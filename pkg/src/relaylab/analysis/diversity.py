import math
from typing import Sequence

import numpy as np
from scipy import optimize

from relaylab.analysis.models import LinkBudget, OutageMethod
from relaylab.analysis.outage import outage
from relaylab.constants import DEFAULT_MAX_ROUNDS, DEFAULT_RATE
from relaylab.exceptions import DomainError
from relaylab.fading import NetworkProfile
from relaylab.relay_logger import get_logger

logger = get_logger(__name__)

_FLOOR = 1e-300


def diversity_fit(points: Sequence[tuple[float, float]]) -> float:
    """Negated least-squares slope of ``log P_out`` against ``log rho``.

    Args:
        points: ``(rho, P_out)`` pairs with linear ``rho`` strictly increasing; pass only the
            high-SNR end of a curve.

    Raises:
        DomainError: Fewer than three points, a nonpositive value, or unsorted ``rho``.
    """
    if len(points) < 3:
        raise DomainError(f"Diversity fit needs at least 3 points, got {len(points)}")
    rho, prob = (np.asarray(col, dtype=float) for col in zip(*points))
    if np.any(prob <= 0) or np.any(rho <= 0):
        raise DomainError("Diversity fit needs positive SNRs and outage probabilities")
    if np.any(np.diff(rho) <= 0):
        raise DomainError("SNR values must be strictly increasing")
    slope, _ = np.polyfit(np.log(rho), np.log(prob), 1)
    return float(-slope)


def required_snr_db(
    l: int,
    p: NetworkProfile,
    m: OutageMethod,
    target: float,
    rate: float = DEFAULT_RATE,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    lo_db: float = -20.0,
    hi_db: float = 80.0,
) -> float:
    """SNR in dB at which ``outage(l)`` falls to ``target``, by bracketed root search on the dB axis."""
    if not 0.0 < target < 1.0:
        raise DomainError(f"Target outage must lie in (0, 1), got {target}")

    def gap(rho_db: float) -> float:
        b = LinkBudget.from_db(rho_db, rate=rate, max_rounds=max_rounds)
        return math.log10(max(outage(l, b, p, m).value, _FLOOR)) - math.log10(target)

    lo_gap, hi_gap = gap(lo_db), gap(hi_db)
    if lo_gap < 0 or hi_gap > 0:
        raise DomainError(f"Target {target:g} is not bracketed by [{lo_db}, {hi_db}] dB")
    root = optimize.brentq(gap, lo_db, hi_db, xtol=1e-6)
    logger.debug(f"{m.kind.value}: P_out({l}) = {target:g} at {root:.3f} dB")
    return float(root)
