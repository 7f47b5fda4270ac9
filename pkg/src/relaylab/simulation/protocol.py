"""Per-packet HARQ protocol at the mutual-information level.

Round 1 is a direct transmission. On a NACK the best relay is selected; it listens
until it has accumulated ``R`` bits itself (after round ``chi``) and from round
``chi + 1`` on transmits together with the source. The destination adds the round's
mutual information each round and ACKs as soon as the total reaches ``R``. Feedback
is error-free and instantaneous; the channel is fixed for the whole packet.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from relaylab.analysis import LinkBudget
from relaylab.simulation.channel import ChannelBatch, ChannelRealization, Combining
from relaylab.simulation.selection import select_relay_centralized

_LN2 = math.log(2.0)


class PacketTrace(BaseModel):
    """Outcome of one packet.

    ``chi`` and ``dest_decode_round`` use ``L + 1`` for "never within the round limit".
    ``selected_relay`` is ``None`` in direct mode and when round 1 decodes, since no NACK
    triggers a selection then; ``chi`` is still the decode round of the best relay by min-gain.
    ``info_rounds[i]`` is the destination's accumulated mutual information after round ``i + 1``.
    """

    model_config = ConfigDict(frozen=True)

    selected_relay: Optional[int]
    chi: int
    dest_decode_round: int
    info_rounds: tuple[float, ...]
    combining: Combining
    max_rounds: int

    @property
    def in_outage(self) -> bool:
        return self.dest_decode_round > self.max_rounds


@dataclass(frozen=True)
class PacketBatch:
    """Vectorised traces.

    ``selected_relay`` (-1 when no relay is selected), ``chi`` and ``dest_decode_round`` have
    shape ``(T,)``; ``info`` has shape ``(T, L)``.
    """

    selected_relay: np.ndarray
    chi: np.ndarray
    dest_decode_round: np.ndarray
    info: np.ndarray


def _mutual_info(gain_f0, gain_gr, active, rho: float, combining: Combining):
    """Bits per channel use delivered to the destination in one round."""
    gain_f0 = np.asarray(gain_f0, dtype=float)
    alone = np.log1p(rho * gain_f0) / _LN2
    if combining == Combining.DIRECT:
        return alone
    gain_gr = np.asarray(gain_gr, dtype=float)
    if combining == Combining.ALAMOUTI:
        helped = np.log1p(rho * (gain_f0 + gain_gr)) / _LN2
    else:
        helped = np.log1p(rho * (np.sqrt(gain_f0) + np.sqrt(gain_gr)) ** 2) / _LN2
    return np.where(active, helped, alone)


def round_mutual_info(
    c: ChannelRealization,
    r: int,
    relay_active: bool,
    b: LinkBudget,
    combining: Combining,
) -> float:
    """Mutual information of one round with relay ``r`` silent or transmitting."""
    if not 0 <= r < c.n_relays:
        raise IndexError(f"Relay index {r} out of range for {c.n_relays} relays")
    return float(_mutual_info(c.gain_f0, c.gain_g[r], relay_active, b.rho, combining))


def decode_round(info_per_round, b: LinkBudget) -> np.ndarray:
    """First ``k`` with ``k * info >= R`` (ties decode), or ``L + 1``."""
    info = np.asarray(info_per_round, dtype=float)
    rounds = np.full(info.shape, b.max_rounds + 1, dtype=np.int64)
    positive = info > 0
    k = np.ceil(b.rate / np.where(positive, info, 1.0))
    # ceil of a rounded quotient can be off by one either way
    k = np.where((k - 1) * info >= b.rate, k - 1, k)
    k = np.where(k * info < b.rate, k + 1, k)
    k = np.maximum(k, 1)
    decodes = positive & (k <= b.max_rounds)
    rounds[decodes] = k[decodes].astype(np.int64)
    return rounds


def run_packets(batch: ChannelBatch, b: LinkBudget, combining: Combining) -> PacketBatch:
    """:func:`run_packet` over a whole batch of realizations."""
    size = len(batch)
    L = b.max_rounds
    round_index = np.arange(1, L + 1)

    if combining == Combining.DIRECT:
        selected = np.full(size, -1, dtype=np.int64)
        chi = np.full(size, L + 1, dtype=np.int64)
        gain_gr = np.zeros(size)
    else:
        selected = np.argmax(np.minimum(batch.gain_f, batch.gain_g), axis=1)
        rows = np.arange(size)
        gain_fr = batch.gain_f[rows, selected]
        gain_gr = batch.gain_g[rows, selected]
        chi = decode_round(np.log1p(b.rho * gain_fr) / _LN2, b)

    active = chi[:, None] < round_index[None, :]
    per_round = _mutual_info(batch.gain_f0[:, None], gain_gr[:, None], active, b.rho, combining)
    per_round = np.broadcast_to(per_round, (size, L))
    info = np.cumsum(per_round, axis=1)

    decoded = info >= b.rate
    dest = np.where(decoded.any(axis=1), np.argmax(decoded, axis=1) + 1, L + 1)
    selected = np.where(dest == 1, -1, selected)
    return PacketBatch(selected_relay=selected, chi=chi, dest_decode_round=dest, info=info)


def run_packet(c: ChannelRealization, b: LinkBudget, combining: Combining) -> PacketTrace:
    """Play one packet through the protocol."""
    L = b.max_rounds
    batch = ChannelBatch.of(c)
    result = run_packets(batch, b, combining)

    dest = int(result.dest_decode_round[0])
    selected = None if combining == Combining.DIRECT or dest == 1 else select_relay_centralized(c)
    return PacketTrace(
        selected_relay=selected,
        chi=int(result.chi[0]),
        dest_decode_round=dest,
        info_rounds=tuple(float(v) for v in result.info[0, : min(dest, L)]),
        combining=combining,
        max_rounds=L,
    )
