from __future__ import annotations

from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from relaylab.constants import DEFAULT_SIGMA2


class NetworkProfile(BaseModel):
    """Link variances of the relay network; each gain is exponential with the given mean.

    ``sigma2_f[i]`` is the source to relay ``i`` mean, ``sigma2_g[i]`` relay ``i`` to
    destination, ``sigma2_f0`` the direct source to destination link. A scalar
    ``sigma2_f`` or ``sigma2_g`` is broadcast to every relay.
    """

    model_config = ConfigDict(frozen=True)

    n_relays: int = Field(..., ge=1)
    sigma2_f: tuple[float, ...]
    sigma2_g: tuple[float, ...]
    sigma2_f0: float = Field(DEFAULT_SIGMA2, gt=0, allow_inf_nan=False)

    @model_validator(mode="before")
    @classmethod
    def broadcast_scalars(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        n = data.get("n_relays")
        for key in ("sigma2_f", "sigma2_g"):
            value = data.get(key, DEFAULT_SIGMA2)
            if isinstance(value, (int, float)) and isinstance(n, int) and n >= 1:
                value = (float(value),) * n
            data[key] = value
        return data

    @model_validator(mode="after")
    def check_variances(self) -> NetworkProfile:
        for key in ("sigma2_f", "sigma2_g"):
            values = getattr(self, key)
            if len(values) != self.n_relays:
                raise ValueError(f"{key} has {len(values)} entries, expected n_relays={self.n_relays}")
            if not all(np.isfinite(v) and v > 0 for v in values):
                raise ValueError(f"{key} must contain positive finite variances, got {values}")
        return self

    @classmethod
    def uniform(cls, n_relays: int, sigma2: float = DEFAULT_SIGMA2) -> NetworkProfile:
        return cls(n_relays=n_relays, sigma2_f=sigma2, sigma2_g=sigma2, sigma2_f0=sigma2)

    @property
    def f(self) -> np.ndarray:
        return np.asarray(self.sigma2_f, dtype=float)

    @property
    def g(self) -> np.ndarray:
        return np.asarray(self.sigma2_g, dtype=float)

    @property
    def min_rates(self) -> np.ndarray:
        """Rates ``c_i = 1/sigma2_f[i] + 1/sigma2_g[i]`` of the exponential ``min(gamma_f_i, gamma_g_i)``."""
        return 1.0 / self.f + 1.0 / self.g

    def swapped(self) -> NetworkProfile:
        """Profile with the two hops exchanged; the selected relay's destination gain becomes its source gain."""
        return NetworkProfile(
            n_relays=self.n_relays,
            sigma2_f=self.sigma2_g,
            sigma2_g=self.sigma2_f,
            sigma2_f0=self.sigma2_f0,
        )

    def has_uniform_hops(self) -> bool:
        """All source-side variances equal and all destination-side variances equal."""
        return bool(np.all(self.f == self.f[0]) and np.all(self.g == self.g[0]))

    def has_symmetric_links(self) -> bool:
        """``sigma2_f[i] == sigma2_g[i]`` for every relay."""
        return bool(np.allclose(self.f, self.g, rtol=1e-12, atol=0.0))
