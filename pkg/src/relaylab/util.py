import math
import os
from datetime import datetime

import numpy as np

from relaylab.constants import THREADS_ENV


def get_timestamp_suffix() -> str:
    """
    Returns a timestamp string suitable for filenames (YYYYMMDD_HHMMSS).
    """
    return datetime.now().strftime("%Y%m%d_%H%M%S")


def db_to_linear(value_db):
    return np.power(10.0, np.asarray(value_db, dtype=float) / 10.0)


def linear_to_db(value):
    return 10.0 * np.log10(np.asarray(value, dtype=float))


def parse_range(text: str) -> list[float]:
    """Parse ``start:step:stop`` (inclusive) or a comma list into floats.

    ``"0:2:6"`` -> ``[0, 2, 4, 6]``; ``"1, 3"`` -> ``[1, 3]``; ``"5"`` -> ``[5]``.
    """
    text = text.strip()
    if ":" in text:
        parts = [p.strip() for p in text.split(":")]
        if len(parts) != 3:
            raise ValueError(f"Range must be start:step:stop, got '{text}'")
        start, step, stop = (float(p) for p in parts)
        if step <= 0:
            raise ValueError(f"Range step must be positive, got {step}")
        if stop < start:
            raise ValueError(f"Range stop {stop} is below start {start}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(count)]
    return [float(p) for p in text.split(",") if p.strip()]


def resolve_workers(requested=None) -> int:
    """Worker count: ``requested`` if given, else ``RELAYLAB_THREADS`` (0 or unset means all cores)."""
    if requested is None:
        raw = os.environ.get(THREADS_ENV, "").strip()
        try:
            requested = int(raw) if raw else 0
        except ValueError as exc:
            raise ValueError(f"{THREADS_ENV} must be an integer, got '{raw}'") from exc
    if requested < 0:
        raise ValueError(f"Worker count must be nonnegative, got {requested}")
    return requested or (os.cpu_count() or 1)
