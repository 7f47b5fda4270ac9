from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from relaylab.fading import NetworkProfile
from relaylab.simulation.rng import RngStream


class Combining(str, Enum):
    """How source and relay share a round once the relay has decoded."""

    ALAMOUTI = "alamouti"
    BEAMFORMING = "beamforming"
    # relay never transmits; direct-transmission baseline
    DIRECT = "direct"


class ChannelRealization(BaseModel):
    """Squared link magnitudes for one packet; constant over all of its rounds."""

    model_config = ConfigDict(frozen=True)

    gain_f0: float
    gain_f: tuple[float, ...]
    gain_g: tuple[float, ...]

    @model_validator(mode="after")
    def check_gains(self) -> ChannelRealization:
        if len(self.gain_f) != len(self.gain_g) or not self.gain_f:
            raise ValueError(f"Need matching nonempty relay gains, got {len(self.gain_f)} and {len(self.gain_g)}")
        gains = np.array((self.gain_f0, *self.gain_f, *self.gain_g))
        if not np.all(np.isfinite(gains)) or np.any(gains < 0):
            raise ValueError("Channel gains must be finite and nonnegative")
        return self

    @property
    def n_relays(self) -> int:
        return len(self.gain_f)

    @property
    def min_gains(self) -> np.ndarray:
        return np.minimum(np.asarray(self.gain_f), np.asarray(self.gain_g))


@dataclass(frozen=True)
class ChannelBatch:
    """Many realizations at once: ``gain_f0`` has shape ``(T,)``, ``gain_f`` and ``gain_g`` ``(T, N)``."""

    gain_f0: np.ndarray
    gain_f: np.ndarray
    gain_g: np.ndarray

    def __len__(self) -> int:
        return int(self.gain_f0.size)

    @classmethod
    def of(cls, c: ChannelRealization) -> ChannelBatch:
        return cls(
            gain_f0=np.array([c.gain_f0]),
            gain_f=np.array([c.gain_f], dtype=float),
            gain_g=np.array([c.gain_g], dtype=float),
        )


def _scales(p: NetworkProfile) -> np.ndarray:
    return np.concatenate([[p.sigma2_f0], p.f, p.g])


def draw_realization(p: NetworkProfile, s: RngStream) -> ChannelRealization:
    """Rayleigh draw: every gain exponential with its profile mean, in the order f0, f, g."""
    n = p.n_relays
    gains = s.generator().standard_exponential(1 + 2 * n) * _scales(p)
    return ChannelRealization(gain_f0=gains[0], gain_f=tuple(gains[1 : 1 + n]), gain_g=tuple(gains[1 + n :]))


def draw_batch(p: NetworkProfile, generator: np.random.Generator, size: int) -> ChannelBatch:
    n = p.n_relays
    gains = generator.standard_exponential((size, 1 + 2 * n)) * _scales(p)
    return ChannelBatch(gain_f0=gains[:, 0], gain_f=gains[:, 1 : 1 + n], gain_g=gains[:, 1 + n :])
