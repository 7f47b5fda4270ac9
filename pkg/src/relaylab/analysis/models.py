from __future__ import annotations

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

from relaylab.constants import DEFAULT_MAX_ROUNDS, DEFAULT_RATE
from relaylab.util import db_to_linear, linear_to_db

MAX_ROUNDS_LIMIT = 64


class LinkBudget(BaseModel):
    """Transmit SNR ``rho`` (linear), first-round rate ``rate`` in bps/Hz and the round limit ``max_rounds``."""

    model_config = ConfigDict(frozen=True)

    rho: float = Field(..., gt=0, allow_inf_nan=False)
    rate: float = Field(DEFAULT_RATE, gt=0, allow_inf_nan=False)
    max_rounds: int = Field(DEFAULT_MAX_ROUNDS, ge=1, le=MAX_ROUNDS_LIMIT)

    @classmethod
    def from_db(cls, rho_db: float, rate: float = DEFAULT_RATE, max_rounds: int = DEFAULT_MAX_ROUNDS) -> LinkBudget:
        return cls(rho=float(db_to_linear(rho_db)), rate=rate, max_rounds=max_rounds)

    @property
    def rho_db(self) -> float:
        return float(linear_to_db(self.rho))


class OutageKind(str, Enum):
    EXACT = "exact"
    APPROX = "approx"
    UPPER_BOUND = "upper_bound"
    CLOSED_APPROX = "closed_approx"
    ASYMPTOTIC = "asymptotic"
    DIRECT = "direct"


class ChiTail(str, Enum):
    """How often the relay-never-decoded-in-time term enters the outage sum.

    ``VERBATIM`` repeats it ``L - l + 1`` times, once per decode round ``k >= l``;
    ``COLLAPSED`` counts the event once.
    """

    VERBATIM = "verbatim"
    COLLAPSED = "collapsed"


class ChiVariant(str, Enum):
    EXACT = "exact"
    APPROX = "approx"
    BOUND = "bound"


class HelpVariant(str, Enum):
    EXACT = "exact"
    APPROX = "approx"
    PSI_BOUND = "psi_bound"


_TAILED = {OutageKind.EXACT, OutageKind.APPROX, OutageKind.UPPER_BOUND, OutageKind.CLOSED_APPROX}


class OutageMethod(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: OutageKind
    chi_tail: ChiTail = ChiTail.VERBATIM

    @property
    def uses_tail(self) -> bool:
        return self.kind in _TAILED

    @property
    def tail_tag(self) -> str | None:
        """The chi_tail value when it applies to this kind, else ``None``."""
        return self.chi_tail.value if self.uses_tail else None


class OutagePoint(BaseModel):
    """Outage probability after ``l`` rounds; ``exceeds_one`` flags unclamped values above 1."""

    model_config = ConfigDict(frozen=True)

    l: int = Field(..., ge=1)
    method: OutageMethod
    value: float
    exceeds_one: bool = False


class DelayLimitedThroughput(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float
    monotone: bool = True


class QosThroughput(BaseModel):
    model_config = ConfigDict(frozen=True)

    lt: float
    dl: float
    feasible: bool
