from relaylab.simulation.channel import ChannelBatch, ChannelRealization, Combining, draw_batch, draw_realization
from relaylab.simulation.estimators import (
    OutageEstimate,
    SelectedGainHistogram,
    empirical_selected_pdf,
    estimate_chi_frequencies,
    estimate_outage,
    estimate_outage_rounds,
    selected_gains,
    simulated_throughput,
)
from relaylab.simulation.protocol import (
    PacketBatch,
    PacketTrace,
    decode_round,
    round_mutual_info,
    run_packet,
    run_packets,
)
from relaylab.simulation.rng import RngStream, derive_seed
from relaylab.simulation.selection import select_relay_centralized, select_relay_distributed

__all__ = [
    "ChannelBatch",
    "ChannelRealization",
    "Combining",
    "OutageEstimate",
    "PacketBatch",
    "PacketTrace",
    "RngStream",
    "SelectedGainHistogram",
    "decode_round",
    "derive_seed",
    "draw_batch",
    "draw_realization",
    "empirical_selected_pdf",
    "estimate_chi_frequencies",
    "estimate_outage",
    "estimate_outage_rounds",
    "round_mutual_info",
    "run_packet",
    "run_packets",
    "select_relay_centralized",
    "select_relay_distributed",
    "selected_gains",
    "simulated_throughput",
]
