import numpy as np
from scipy import special

from relaylab.exceptions import DomainError


def incomplete_beta(x, a: float, b: float):
    """Non-regularised incomplete beta ``B(x; a, b) = int_0^x t^(a-1) (1-t)^(b-1) dt``.

    Works on scalars or arrays of ``x``; the regularised value from scipy is scaled by
    the complete beta function.
    """
    if a <= 0 or b <= 0:
        raise DomainError(f"Beta parameters must be positive, got a={a}, b={b}")
    x_arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(x_arr)) or np.any(x_arr < 0.0) or np.any(x_arr > 1.0):
        raise DomainError(f"Incomplete beta argument must lie in [0, 1], got {x}")
    values = special.betainc(a, b, x_arr) * special.beta(a, b)
    return float(values) if np.ndim(values) == 0 else values


def complete_beta(a: float, b: float) -> float:
    return float(np.exp(special.betaln(a, b)))
