"""Fast invariant suite behind ``relaylab selfcheck``.

Each check is small enough to run in seconds and reports pass/fail with a detail line;
the full acceptance-sized runs live in the test suite under the ``slow`` marker.
"""

from __future__ import annotations

import math
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from relaylab.analysis import ChiTail, LinkBudget, OutageKind, OutageMethod, diversity_fit, outage
from relaylab.exceptions import RelayLabError
from relaylab.fading import GainDistribution, GainKind, GainMethod, NetworkProfile, cdf, pdf
from relaylab.harness.config import parse_config
from relaylab.harness.report import emit_csv, read_csv
from relaylab.harness.sweep import run_sweep
from relaylab.numerics import quad_1d
from relaylab.relay_logger import get_logger
from relaylab.simulation import (
    ChannelRealization,
    Combining,
    RngStream,
    draw_batch,
    estimate_outage_rounds,
    select_relay_centralized,
    select_relay_distributed,
)

logger = get_logger(__name__)

SEED = 12345


class CheckFailed(RelayLabError):
    """An invariant did not hold."""


def _expect(condition: bool, message: str) -> None:
    if not condition:
        raise CheckFailed(message)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def check_single_relay_collapse() -> str:
    p = NetworkProfile.uniform(1)
    gamma = np.linspace(0.0, 20.0, 1000)
    reference = -np.expm1(-gamma)
    worst = 0.0
    for method in (GainMethod.EXACT, GainMethod.APPROX, GainMethod.EQUAL_VARIANCE):
        values = cdf(GainDistribution(kind=GainKind.SELECTED_SOURCE, method=method, profile=p), gamma)
        worst = max(worst, float(np.max(np.abs(values - reference))))
    _expect(worst < 1e-12, f"max deviation {worst:.2e}")
    return f"max deviation {worst:.2e}"


def check_pdf_normalised() -> str:
    p = NetworkProfile(n_relays=3, sigma2_f=[1.0, 2.0, 0.5], sigma2_g=[1.5, 0.7, 1.0])
    d = GainDistribution(kind=GainKind.SELECTED_SOURCE, profile=p)
    total, _ = quad_1d(lambda x: float(pdf(d, x)), 0.0, math.inf)
    _expect(abs(total - 1.0) < 1e-6, f"integral {total:.9f}")
    return f"integral {total:.9f}"


def check_bound_ordering() -> str:
    p = NetworkProfile.uniform(2)
    for tail in ChiTail:
        exact = OutageMethod(kind=OutageKind.EXACT, chi_tail=tail)
        bound = OutageMethod(kind=OutageKind.UPPER_BOUND, chi_tail=tail)
        for rho_db in range(0, 31, 5):
            b = LinkBudget.from_db(rho_db)
            e, u = outage(2, b, p, exact).value, outage(2, b, p, bound).value
            _expect(u >= e, f"{tail.value} at {rho_db} dB: bound {u:.4g} < exact {e:.4g}")
    return "upper bound above exact on 0..30 dB"


def check_direct_diversity() -> str:
    p = NetworkProfile.uniform(1)
    m = OutageMethod(kind=OutageKind.DIRECT)
    points = []
    for rho_db in np.arange(35.0, 50.1, 2.5):
        b = LinkBudget.from_db(float(rho_db))
        points.append((b.rho, outage(b.max_rounds, b, p, m).value))
    slope = diversity_fit(points)
    _expect(abs(slope - 1.0) < 0.05, f"slope {slope:.3f}")
    return f"slope {slope:.3f}"


def check_selection_equivalence() -> str:
    p = NetworkProfile.uniform(4)
    batch = draw_batch(p, RngStream(seed=SEED).generator(), 2000)
    for t in range(len(batch)):
        c = ChannelRealization(gain_f0=batch.gain_f0[t], gain_f=tuple(batch.gain_f[t]), gain_g=tuple(batch.gain_g[t]))
        _expect(select_relay_distributed(c)[0] == select_relay_centralized(c), f"mismatch at realization {t}")
    return f"{len(batch)} realizations agree"


def check_worker_independence() -> str:
    b = LinkBudget.from_db(5.0)
    p = NetworkProfile.uniform(2)
    one = estimate_outage_rounds(b, p, Combining.ALAMOUTI, 40_000, SEED, workers=1)
    many = estimate_outage_rounds(b, p, Combining.ALAMOUTI, 40_000, SEED, workers=3)
    _expect(np.array_equal(one.p_hat, many.p_hat), "estimates differ across worker counts")
    return "identical for 1 and 3 workers"


def check_csv_round_trip() -> str:
    cfg = parse_config(
        "profile.n_relays = 2\nbudget.rho_db = 0:5:10\nanalysis.methods = exact, upper_bound\n"
        "sim.enabled = true\nsim.trials = 2000\n"
    )
    rows = run_sweep(cfg, workers=1)
    with tempfile.TemporaryDirectory() as tmp:
        first = emit_csv(rows, Path(tmp) / "first.csv")
        second = emit_csv(read_csv(first), Path(tmp) / "second.csv")
        _expect(first.read_bytes() == second.read_bytes(), "re-emitted CSV differs")
    return f"{len(rows)} rows re-emit byte-identically"


CHECKS: dict[str, Callable[[], str]] = {
    "single-relay-collapse": check_single_relay_collapse,
    "pdf-normalised": check_pdf_normalised,
    "bound-ordering": check_bound_ordering,
    "direct-diversity": check_direct_diversity,
    "selection-equivalence": check_selection_equivalence,
    "worker-independence": check_worker_independence,
    "csv-round-trip": check_csv_round_trip,
}


def run_selfcheck() -> list[CheckResult]:
    results = []
    for name, check in CHECKS.items():
        try:
            detail = check()
            passed = True
        except RelayLabError as exc:
            detail, passed = str(exc), False
        level = logger.info if passed else logger.error
        level(f"{name}: {'ok' if passed else 'FAILED'} ({detail})")
        results.append(CheckResult(name=name, passed=passed, detail=detail))
    return results
