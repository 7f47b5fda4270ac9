"""Data behind the published figures, with their default settings.

Every figure uses unit variances and ``R = 1``:

- ``f1-pdf``: density of the selected relay's source gain, analytical (exact and
  approximate) against a simulated histogram. These rows carry the gain ``gamma`` in the
  ``rho_db`` column and ``l = 0``.
- ``f3-outage-l2``: ``P_out(2)`` with ``L = 5`` for N = 2, 4 under every analytical method.
- ``g2-outage-sweep``: ``P_out(5)`` with ``L = 5`` for N = 1..4 and the direct link.
- ``g3-throughput``: LT and DL throughput with ``L = 3`` and target outage ``1e-3``,
  relays against the direct link; infeasible points are masked.
"""

from __future__ import annotations

from enum import Enum
from typing import Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from relaylab.analysis import ChiTail, OutageKind, OutageMethod, required_snr_db
from relaylab.constants import DEFAULT_SEED, FIGURE_TRIALS, Tags
from relaylab.exceptions import DomainError
from relaylab.fading import GainDistribution, GainKind, GainMethod, NetworkProfile, pdf
from relaylab.harness.config import ExperimentConfig, validate_config
from relaylab.harness.sweep import ResultRow, run_sweep, sort_key
from relaylab.relay_logger import get_logger
from relaylab.simulation import Combining, derive_seed, empirical_selected_pdf
from relaylab.util import parse_range

logger = get_logger(__name__)

PDF_BINS = 50
PDF_UPPER = 5.0
TARGET_OUTAGE = 1e-3


class FigureName(str, Enum):
    F1_PDF = "f1-pdf"
    F3_OUTAGE_L2 = "f3-outage-l2"
    G2_OUTAGE_SWEEP = "g2-outage-sweep"
    G3_THROUGHPUT = "g3-throughput"


class FigureOverrides(BaseModel):
    """Settings that replace a figure's defaults; ``None`` keeps the default."""

    model_config = ConfigDict(frozen=True)

    n_relays: Optional[tuple[int, ...]] = None
    rho_db: Optional[tuple[float, ...]] = None
    trials: Optional[int] = Field(None, ge=1)
    seed: int = Field(DEFAULT_SEED, ge=0, lt=1 << 64)
    chi_tail: Optional[ChiTail] = None
    combining: Optional[Combining] = None
    simulate: bool = True
    timing: bool = False

    @classmethod
    def from_config(cls, cfg: ExperimentConfig, simulate: bool = True) -> FigureOverrides:
        """Overrides taken from an experiment file: relay count, SNR grid and simulation settings.

        Figures keep unit variances; a profile with other variances is reduced to its relay count.
        """
        if cfg.profile != NetworkProfile.uniform(cfg.profile.n_relays):
            logger.warning("Figures use unit variances; only profile.n_relays is taken from the config")
        return cls(
            n_relays=(cfg.profile.n_relays,),
            rho_db=tuple(cfg.rho_db),
            trials=cfg.trials,
            seed=cfg.seed,
            chi_tail=cfg.chi_tail,
            combining=cfg.combining,
            simulate=simulate,
            timing=cfg.timing,
        )


# name -> (relay counts, SNR grid, max_rounds, l_values, methods, rho_max)
_SWEEP_DEFAULTS = {
    FigureName.F3_OUTAGE_L2: (
        (2, 4),
        "0:2:30",
        5,
        (2,),
        (
            OutageKind.EXACT,
            OutageKind.APPROX,
            OutageKind.UPPER_BOUND,
            OutageKind.CLOSED_APPROX,
            OutageKind.ASYMPTOTIC,
        ),
        None,
    ),
    FigureName.G2_OUTAGE_SWEEP: ((1, 2, 3, 4), "0:2:40", 5, (5,), (OutageKind.EXACT, OutageKind.DIRECT), None),
    FigureName.G3_THROUGHPUT: ((2, 4), "0:2:30", 3, (3,), (OutageKind.EXACT, OutageKind.DIRECT), TARGET_OUTAGE),
}


def figure_configs(name: FigureName, overrides: Optional[FigureOverrides] = None) -> list[ExperimentConfig]:
    """One sweep config per relay count for the outage and throughput figures."""
    if name == FigureName.F1_PDF:
        raise DomainError("f1-pdf is a density figure and has no sweep config")
    o = overrides or FigureOverrides()
    relays, grid, max_rounds, l_values, methods, rho_max = _SWEEP_DEFAULTS[name]
    configs = []
    for n in o.n_relays or relays:
        data = {
            "profile": {"n_relays": n, "sigma2_f": 1.0, "sigma2_g": 1.0},
            "rho_db": o.rho_db or tuple(parse_range(grid)),
            "max_rounds": max_rounds,
            "methods": methods,
            "l_values": l_values,
            "rho_max": rho_max,
            "sim_enabled": o.simulate,
            "trials": o.trials or FIGURE_TRIALS,
            "seed": derive_seed(o.seed, n),
            "timing": o.timing,
        }
        if o.chi_tail is not None:
            data["chi_tail"] = o.chi_tail
        if o.combining is not None:
            data["combining"] = o.combining
        configs.append(validate_config(data))
    return configs


def _pdf_rows(overrides: FigureOverrides) -> list[ResultRow]:
    rows = []
    for n in overrides.n_relays or (1, 2, 4):
        p = NetworkProfile.uniform(n)
        edges = np.linspace(0.0, PDF_UPPER, PDF_BINS + 1)
        centres = 0.5 * (edges[:-1] + edges[1:])
        for method in (GainMethod.EXACT, GainMethod.APPROX):
            values = pdf(GainDistribution(kind=GainKind.SELECTED_SOURCE, method=method, profile=p), centres)
            rows.extend(
                ResultRow(rho_db=float(x), n_relays=n, l=0, method=f"{Tags.PDF}_{method.value}", value=float(v))
                for x, v in zip(centres, values)
            )
        if not overrides.simulate:
            continue
        trials = overrides.trials or FIGURE_TRIALS
        hist = empirical_selected_pdf(p, trials, PDF_BINS, derive_seed(overrides.seed, n), upper=PDF_UPPER)
        widths = np.diff(hist.edges)
        ci3 = 3.0 * np.sqrt(hist.mass * (1.0 - hist.mass) / trials) / widths
        rows.extend(
            ResultRow(rho_db=float(x), n_relays=n, l=0, method=Tags.SIM, value=float(v), ci3=float(c))
            for x, v, c in zip(centres, hist.density, ci3)
        )
    return rows


def fig_data(
    name: FigureName,
    overrides: Optional[FigureOverrides] = None,
    workers: Optional[int] = None,
) -> list[ResultRow]:
    """Rows of one figure, simulation overlay included unless ``overrides.simulate`` is off."""
    o = overrides or FigureOverrides()
    logger.info(f"Generating {name.value}")
    if name == FigureName.F1_PDF:
        rows = _pdf_rows(o)
    else:
        rows = [row for cfg in figure_configs(name, o) for row in run_sweep(cfg, workers)]
        masked = sum(not row.feasible for row in rows)
        if masked:
            logger.info(f"Masking {masked} throughput rows that miss the target outage")
            rows = [row for row in rows if row.feasible]
    return sorted(rows, key=sort_key)


def required_snr_summary(
    overrides: Optional[FigureOverrides] = None,
    target: float = TARGET_OUTAGE,
) -> pd.DataFrame:
    """SNR needed for ``P_out(L) = target`` per relay count, with the gain over a single relay.

    The direct link is reported once with ``n_relays = 0``.
    """
    o = overrides or FigureOverrides()
    chi_tail = o.chi_tail or ChiTail.VERBATIM
    relays, _, max_rounds, _, _, _ = _SWEEP_DEFAULTS[FigureName.G2_OUTAGE_SWEEP]
    cases = [(0, OutageMethod(kind=OutageKind.DIRECT))]
    cases += [(n, OutageMethod(kind=OutageKind.EXACT, chi_tail=chi_tail)) for n in o.n_relays or relays]

    records = []
    for n, m in cases:
        p = NetworkProfile.uniform(max(n, 1))
        try:
            snr = required_snr_db(max_rounds, p, m, target, max_rounds=max_rounds)
        except DomainError as exc:
            logger.warning(f"No SNR reaches {target:g} for N={n}: {exc}")
            snr = float("nan")
        records.append({"n_relays": n, "method": m.kind.value, Tags.REQUIRED_SNR: snr})

    summary = pd.DataFrame.from_records(records)
    single = summary.loc[summary["n_relays"] == 1, Tags.REQUIRED_SNR]
    reference = float(single.iloc[0]) if not single.empty else float("nan")
    summary["saving_vs_one_relay_db"] = reference - summary[Tags.REQUIRED_SNR]
    return summary
