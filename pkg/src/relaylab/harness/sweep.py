"""Sweep orchestration: every SNR point of a config through every analytical method, plus simulation.

Grid points run on a thread pool. Each point's simulation seed is derived from the
config seed and the point's index, and rows are sorted before they are returned, so
the output does not depend on scheduling or worker count.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from relaylab.analysis import (
    LinkBudget,
    OutageKind,
    OutageMethod,
    dl_from_outages,
    lt_from_outages,
    outage,
)
from relaylab.constants import Tags
from relaylab.exceptions import NonConvergenceError
from relaylab.harness.config import ExperimentConfig
from relaylab.relay_logger import get_logger
from relaylab.simulation import derive_seed, estimate_outage_rounds
from relaylab.util import resolve_workers

logger = get_logger(__name__)


class ResultRow(BaseModel):
    """One output line. ``ci3`` is set for simulation rows only; ``chi_tail`` only where the method has a tail.

    ``converged`` is False when the value is the best estimate of a quadrature that
    missed its tolerance. ``feasible`` is False on throughput rows whose ``P_out(L)`` misses
    ``rho_max``; the throughput is still reported. Neither flag is written to CSV.
    """

    model_config = ConfigDict(frozen=True)

    rho_db: float = Field(..., allow_inf_nan=False)
    n_relays: int = Field(..., ge=1)
    l: int = Field(..., ge=0)
    method: str
    chi_tail: Optional[str] = None
    value: float = Field(..., allow_inf_nan=False)
    ci3: Optional[float] = None
    wall_time_ms: float = 0.0
    converged: bool = True
    feasible: bool = True

    @property
    def is_simulation(self) -> bool:
        return self.ci3 is not None


def sort_key(row: ResultRow) -> tuple:
    return (row.n_relays, row.l, row.method, row.chi_tail or "", row.rho_db)


class _Clock:
    """Milliseconds since the last call when timing is on, else always 0."""

    def __init__(self, enabled: bool):
        self.enabled = enabled
        self._start = time.perf_counter()

    def lap(self) -> float:
        if not self.enabled:
            return 0.0
        now = time.perf_counter()
        elapsed, self._start = (now - self._start) * 1e3, now
        return elapsed


def _throughput_tags(kind: str) -> tuple[str, str]:
    return f"{kind}_{Tags.LT}", f"{kind}_{Tags.DL}"


def _guarded_outage(l: int, b: LinkBudget, cfg: ExperimentConfig, m: OutageMethod, rho_db: float) -> tuple[float, bool]:
    """``(value, converged)``; a quadrature failure keeps its finite best estimate."""
    try:
        return outage(l, b, cfg.profile, m).value, True
    except NonConvergenceError as exc:
        if not math.isfinite(exc.best_estimate):
            raise
        logger.warning(f"{m.kind.value} at l={l}, rho_db={rho_db:g}: {exc}; keeping best estimate")
        return exc.best_estimate, False


def _analysis_rows(cfg: ExperimentConfig, b: LinkBudget, rho_db: float, m: OutageMethod) -> list[ResultRow]:
    n = cfg.profile.n_relays
    clock = _Clock(cfg.timing)
    computed: dict[int, tuple[float, bool]] = {}
    rows = []
    for l in cfg.l_values:
        computed[l] = _guarded_outage(l, b, cfg, m, rho_db)
        value, converged = computed[l]
        rows.append(
            ResultRow(
                rho_db=rho_db,
                n_relays=n,
                l=l,
                method=m.kind.value,
                chi_tail=m.tail_tag,
                value=value,
                wall_time_ms=clock.lap(),
                converged=converged,
            )
        )

    # throughput needs P_out at every round, which the asymptotic form lacks for l = 1
    if cfg.rho_max is not None and m.kind != OutageKind.ASYMPTOTIC:
        for l in range(1, cfg.max_rounds + 1):
            if l not in computed:
                computed[l] = _guarded_outage(l, b, cfg, m, rho_db)
        outages = np.array([1.0] + [computed[l][0] for l in range(1, cfg.max_rounds + 1)])
        converged = all(ok for _, ok in computed.values())
        rows.extend(_throughput_rows(cfg, rho_db, m.kind.value, m.tail_tag, outages, clock.lap(), converged))
    return rows


def _throughput_rows(
    cfg: ExperimentConfig,
    rho_db: float,
    kind: str,
    tail: Optional[str],
    outages: np.ndarray,
    wall_time_ms: float,
    converged: bool = True,
) -> list[ResultRow]:
    """LT and DL rows at every point; ``feasible`` records whether ``P_out(L) <= rho_max``."""
    rho_max = cfg.rho_max if cfg.rho_max is not None else 1.0
    feasible = bool(outages[-1] <= rho_max)
    if not feasible:
        logger.info(f"{kind} at rho_db={rho_db:g}: P_out(L)={outages[-1]:.3g} misses {rho_max:g}; flagged infeasible")
    lt_tag, dl_tag = _throughput_tags(kind)
    common = {
        "rho_db": rho_db,
        "n_relays": cfg.profile.n_relays,
        "l": cfg.max_rounds,
        "chi_tail": tail,
        "wall_time_ms": wall_time_ms,
        "converged": converged,
        "feasible": feasible,
    }
    return [
        ResultRow(method=lt_tag, value=lt_from_outages(outages, cfg.rate), **common),
        ResultRow(method=dl_tag, value=dl_from_outages(outages, cfg.rate).value, **common),
    ]


def _simulation_rows(cfg: ExperimentConfig, b: LinkBudget, rho_db: float, index: int) -> list[ResultRow]:
    clock = _Clock(cfg.timing)
    # one worker per point; the sweep already runs points in parallel
    estimate = estimate_outage_rounds(
        b, cfg.profile, cfg.combining, cfg.trials, derive_seed(cfg.seed, index), workers=1
    )
    elapsed = clock.lap()
    rows = [
        ResultRow(
            rho_db=rho_db,
            n_relays=cfg.profile.n_relays,
            l=l,
            method=Tags.SIM,
            value=float(estimate.p_hat[l - 1]),
            ci3=float(estimate.ci3[l - 1]),
            wall_time_ms=elapsed,
        )
        for l in cfg.l_values
    ]
    if cfg.rho_max is not None:
        outages = np.concatenate([[1.0], estimate.p_hat])
        rows.extend(_throughput_rows(cfg, rho_db, Tags.SIM, None, outages, elapsed))
    return rows


def _point_rows(cfg: ExperimentConfig, index: int, include_analysis: bool) -> list[ResultRow]:
    rho_db = cfg.rho_db[index]
    b = cfg.budgets[index]
    rows = []
    if include_analysis:
        for m in cfg.outage_methods:
            rows.extend(_analysis_rows(cfg, b, rho_db, m))
    if cfg.sim_enabled:
        rows.extend(_simulation_rows(cfg, b, rho_db, index))
    return rows


def run_sweep(
    cfg: ExperimentConfig,
    workers: Optional[int] = None,
    include_analysis: bool = True,
) -> list[ResultRow]:
    """Rows for every grid point, analytical method and (if enabled) the simulation.

    With ``include_analysis`` off only the simulation rows are produced.
    """
    n_points = len(cfg.rho_db)
    n_workers = min(resolve_workers(workers), n_points)
    logger.info(
        f"Sweeping N={cfg.profile.n_relays} over {n_points} SNR points, "
        f"methods={[m.value for m in cfg.methods]}, simulation={'on' if cfg.sim_enabled else 'off'}"
    )

    def one_point(index: int) -> list[ResultRow]:
        rows = _point_rows(cfg, index, include_analysis)
        logger.debug(f"rho_db={cfg.rho_db[index]:g} done ({len(rows)} rows)")
        return rows

    if n_workers <= 1:
        per_point = [one_point(i) for i in range(n_points)]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            per_point = list(pool.map(one_point, range(n_points)))

    rows = sorted((row for chunk in per_point for row in chunk), key=sort_key)
    failed = sum(not row.converged for row in rows)
    if failed:
        logger.warning(f"{failed} rows carry non-converged quadrature estimates")
    logger.info(f"Sweep finished: {len(rows)} rows")
    return rows
