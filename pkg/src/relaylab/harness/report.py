"""CSV persistence of sweep rows and the analysis-vs-simulation comparison."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np
import pandas as pd

from relaylab.analysis import OutageKind
from relaylab.constants import Columns, Tags
from relaylab.exceptions import GridMismatchError
from relaylab.harness.sweep import ResultRow
from relaylab.relay_logger import get_logger

logger = get_logger(__name__)

FLOAT_FORMAT = "%.12g"
KEY = [Columns.RHO_DB, Columns.N_RELAYS, Columns.L]

_OUTAGE_METHODS = {kind.value for kind in OutageKind}


def rows_to_frame(rows: Iterable[ResultRow]) -> pd.DataFrame:
    """Rows as a DataFrame in the frozen CSV column order."""
    records = [row.model_dump(include=set(Columns.ORDER)) for row in rows]
    df = pd.DataFrame.from_records(records, columns=Columns.ORDER)
    for col in (Columns.RHO_DB, Columns.VALUE, Columns.CI3, Columns.WALL_TIME_MS):
        df[col] = df[col].astype(float)
    for col in (Columns.N_RELAYS, Columns.L):
        df[col] = df[col].astype("int64")
    return df


def emit_csv(rows: Iterable[ResultRow], path: Path) -> Path:
    """Write rows with header ``rho_db,n_relays,l,method,chi_tail,value,ci3,wall_time_ms``.

    Floats carry 12 significant digits, empty fields stand for "not applicable", lines end
    in ``\\n`` and the file is UTF-8.
    """
    path = Path(path)
    df = rows_to_frame(rows)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"Cannot write results to {path}: {exc}") from exc
    logger.info(f"Wrote {len(df)} rows to {path}")
    return path


def read_csv(path: Path) -> list[ResultRow]:
    """Parse a file written by :func:`emit_csv` back into rows."""
    header = list(pd.read_csv(path, nrows=0).columns)
    if header != Columns.ORDER:
        raise ValueError(f"{path}: unexpected header {header}")
    df = pd.read_csv(
        path,
        dtype={Columns.METHOD: str, Columns.CHI_TAIL: str},
        keep_default_na=False,
        na_values={Columns.CI3: [""], Columns.CHI_TAIL: [""]},
        encoding="utf-8",
    )
    df = df.astype(object).where(df.notna(), None)
    return [ResultRow.model_validate(record) for record in df.to_dict(orient="records")]


@dataclass(frozen=True)
class CompareReport:
    """Per-point z-scores of each analytical series against the simulation.

    ``points`` has one line per (grid point, method, chi_tail) with ``z = (value - p_hat) / (ci3 / 3)``;
    ``summary`` holds the largest ``|z|`` per series; ``bound_violations`` counts points where the
    simulation exceeds the upper bound by more than ``ci3``.
    """

    points: pd.DataFrame
    summary: pd.DataFrame
    bound_violations: int


def _z_scores(value: np.ndarray, p_hat: np.ndarray, ci3: np.ndarray) -> np.ndarray:
    diff = value - p_hat
    sigma = ci3 / 3.0
    z = np.divide(diff, sigma, out=np.zeros_like(diff), where=sigma > 0)
    # zero spread: any disagreement is infinitely many sigmas
    return np.where((sigma <= 0) & (diff != 0), np.sign(diff) * np.inf, z)


def compare_report(rows: Iterable[ResultRow]) -> CompareReport:
    """Compare every analytical outage series with the simulated one on their shared grid."""
    df = rows_to_frame(rows)
    sim = df[df[Columns.METHOD] == Tags.SIM]
    analysis = df[df[Columns.METHOD].isin(_OUTAGE_METHODS)]
    if sim.empty or analysis.empty:
        raise GridMismatchError("Comparison needs a simulation series and at least one analysis series")
    if sim.duplicated(KEY).any():
        raise GridMismatchError("Simulation series has repeated grid points")

    sim_keys = set(sim[KEY].itertuples(index=False, name=None))
    series_cols = [Columns.METHOD, Columns.CHI_TAIL]
    analysis = analysis.fillna({Columns.CHI_TAIL: ""})
    for (method, tail), series in analysis.groupby(series_cols, sort=True):
        keys = set(series[KEY].itertuples(index=False, name=None))
        if keys != sim_keys:
            missing = len(sim_keys - keys) + len(keys - sim_keys)
            raise GridMismatchError(f"Series {method}/{tail or '-'} and the simulation differ on {missing} grid points")

    merged = analysis[[*KEY, *series_cols, Columns.VALUE]].merge(
        sim[[*KEY, Columns.VALUE, Columns.CI3]].rename(columns={Columns.VALUE: "p_hat"}),
        on=KEY,
        how="inner",
    )
    merged["z"] = _z_scores(
        merged[Columns.VALUE].to_numpy(), merged["p_hat"].to_numpy(), merged[Columns.CI3].to_numpy()
    )
    points = merged[[*KEY, *series_cols, Columns.VALUE, "p_hat", Columns.CI3, "z"]].sort_values(
        [*series_cols, *KEY], kind="stable", ignore_index=True
    )

    summary = (
        points.assign(abs_z=points["z"].abs())
        .groupby(series_cols, sort=True)
        .agg(max_abs_z=("abs_z", "max"), points=("z", "size"))
        .reset_index()
    )

    bound = points[points[Columns.METHOD] == OutageKind.UPPER_BOUND.value]
    violations = int((bound["p_hat"] - bound[Columns.VALUE] > bound[Columns.CI3]).sum())
    if violations:
        logger.warning(f"Simulation exceeds the upper bound beyond 3 sigma at {violations} points")
    return CompareReport(points=points, summary=summary, bound_violations=violations)
