import numpy as np
from pydantic import BaseModel, ConfigDict, Field

_U64 = 1 << 64


class RngStream(BaseModel):
    """Counter-based random stream addressed by ``(seed, trial_index)``.

    The seed is the Philox key and the trial index sits in the counter, so streams for
    different indices never overlap and any stream can be rebuilt without replaying others.
    """

    model_config = ConfigDict(frozen=True)

    seed: int = Field(..., ge=0, lt=_U64)
    trial_index: int = Field(0, ge=0, lt=_U64)

    def generator(self) -> np.random.Generator:
        bit_generator = np.random.Philox(key=self.seed, counter=[0, self.trial_index, 0, 0])
        return np.random.Generator(bit_generator)


def derive_seed(seed: int, *path: int) -> int:
    """Child seed for a sub-experiment, e.g. one SNR point of a sweep."""
    return int(np.random.SeedSequence([seed, *path]).generate_state(1, dtype=np.uint64)[0])
