from relaylab.analysis.diversity import diversity_fit, required_snr_db
from relaylab.analysis.models import (
    ChiTail,
    ChiVariant,
    DelayLimitedThroughput,
    HelpVariant,
    LinkBudget,
    OutageKind,
    OutageMethod,
    OutagePoint,
    QosThroughput,
)
from relaylab.analysis.outage import (
    asymptotic_constant,
    cond_outage_no_help,
    cond_outage_with_help,
    outage,
    outage_profile,
    pr_chi,
    psi_bound,
    relay_gain_limit,
    snr_threshold,
)
from relaylab.analysis.throughput import (
    dl_from_outages,
    lt_from_outages,
    throughput_dl,
    throughput_lt,
    throughput_qos,
)

__all__ = [
    "ChiTail",
    "ChiVariant",
    "DelayLimitedThroughput",
    "HelpVariant",
    "LinkBudget",
    "OutageKind",
    "OutageMethod",
    "OutagePoint",
    "QosThroughput",
    "asymptotic_constant",
    "cond_outage_no_help",
    "cond_outage_with_help",
    "diversity_fit",
    "dl_from_outages",
    "lt_from_outages",
    "outage",
    "outage_profile",
    "pr_chi",
    "psi_bound",
    "relay_gain_limit",
    "required_snr_db",
    "snr_threshold",
    "throughput_dl",
    "throughput_lt",
    "throughput_qos",
]
