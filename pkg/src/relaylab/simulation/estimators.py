"""Monte Carlo estimators built on :func:`run_packets`.

Trials are cut into fixed blocks of ``TRIAL_BLOCK``; block ``i`` always draws from
``RngStream(seed, i)``. Blocks run on a thread pool and only integer counts are
summed, so results are identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, TypeVar

import numpy as np

from relaylab.analysis import LinkBudget, dl_from_outages, lt_from_outages
from relaylab.constants import TRIAL_BLOCK
from relaylab.exceptions import DomainError
from relaylab.fading import NetworkProfile
from relaylab.relay_logger import get_logger
from relaylab.simulation.channel import ChannelBatch, Combining, draw_batch
from relaylab.simulation.protocol import run_packets
from relaylab.simulation.rng import RngStream
from relaylab.util import resolve_workers

logger = get_logger(__name__)

MIN_TRIALS = 1_000
MIN_PDF_TRIALS = 100_000

T = TypeVar("T")


@dataclass(frozen=True)
class OutageEstimate:
    """Empirical ``P_out(1..L)`` with 3-sigma binomial half-widths."""

    p_hat: np.ndarray
    ci3: np.ndarray
    trials: int


@dataclass(frozen=True)
class SelectedGainHistogram:
    edges: np.ndarray
    density: np.ndarray
    mass: np.ndarray


def ci3(p_hat, trials: int):
    return 3.0 * np.sqrt(np.asarray(p_hat) * (1.0 - np.asarray(p_hat)) / trials)


def _check_trials(trials: int, minimum: int) -> None:
    if trials < minimum:
        raise DomainError(f"Need at least {minimum} trials, got {trials}")


def _block_sizes(trials: int) -> list[int]:
    full, rest = divmod(trials, TRIAL_BLOCK)
    return [TRIAL_BLOCK] * full + ([rest] if rest else [])


def _map_blocks(
    p: NetworkProfile,
    trials: int,
    seed: int,
    work: Callable[[ChannelBatch], T],
    workers: Optional[int] = None,
) -> list[T]:
    """Apply ``work`` to the channel batch of every block, in block order."""

    def one_block(item: tuple[int, int]) -> T:
        index, size = item
        generator = RngStream(seed=seed, trial_index=index).generator()
        return work(draw_batch(p, generator, size))

    blocks = list(enumerate(_block_sizes(trials)))
    n_workers = min(resolve_workers(workers), len(blocks))
    if n_workers <= 1:
        return [one_block(item) for item in blocks]
    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(one_block, blocks))


def _dest_round_counts(
    b: LinkBudget, p: NetworkProfile, combining: Combining, trials: int, seed: int, workers: Optional[int]
) -> np.ndarray:
    L = b.max_rounds

    def count(batch: ChannelBatch) -> np.ndarray:
        return np.bincount(run_packets(batch, b, combining).dest_decode_round, minlength=L + 2)

    return np.sum(_map_blocks(p, trials, seed, count, workers), axis=0)


def estimate_outage_rounds(
    b: LinkBudget,
    p: NetworkProfile,
    combining: Combining,
    trials: int,
    seed: int,
    workers: Optional[int] = None,
) -> OutageEstimate:
    """Fraction of packets still undecoded after each round ``l = 1..L``, from one set of traces."""
    _check_trials(trials, MIN_TRIALS)
    counts = _dest_round_counts(b, p, combining, trials, seed, workers)
    decoded_by = np.cumsum(counts[1 : b.max_rounds + 1])
    p_hat = 1.0 - decoded_by / trials
    logger.debug(f"Simulated {trials} packets at rho_db={b.rho_db:.2f}: P_out(L)={p_hat[-1]:.3g}")
    return OutageEstimate(p_hat=p_hat, ci3=ci3(p_hat, trials), trials=trials)


def estimate_outage(
    l: int,
    b: LinkBudget,
    p: NetworkProfile,
    combining: Combining,
    trials: int,
    seed: int,
    workers: Optional[int] = None,
) -> tuple[float, float]:
    """``(p_hat, ci3)`` for the outage after round ``l``."""
    if not 1 <= l <= b.max_rounds:
        raise DomainError(f"l={l} outside 1..{b.max_rounds}")
    estimate = estimate_outage_rounds(b, p, combining, trials, seed, workers)
    return float(estimate.p_hat[l - 1]), float(estimate.ci3[l - 1])


def estimate_chi_frequencies(
    b: LinkBudget,
    p: NetworkProfile,
    trials: int,
    seed: int,
    workers: Optional[int] = None,
) -> np.ndarray:
    """Empirical ``Pr[chi = k]`` for ``k = 1..L``; the last entry (index ``L``) is "not within L rounds"."""
    _check_trials(trials, MIN_TRIALS)
    L = b.max_rounds

    def count(batch: ChannelBatch) -> np.ndarray:
        return np.bincount(run_packets(batch, b, Combining.ALAMOUTI).chi, minlength=L + 2)

    counts = np.sum(_map_blocks(p, trials, seed, count, workers), axis=0)
    return counts[1:] / trials


def selected_gains(
    p: NetworkProfile,
    trials: int,
    seed: int,
    workers: Optional[int] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Samples of the selected relay's source-side and destination-side gains."""

    def pick(batch: ChannelBatch) -> np.ndarray:
        selected = np.argmax(np.minimum(batch.gain_f, batch.gain_g), axis=1)
        rows = np.arange(len(batch))
        return np.stack([batch.gain_f[rows, selected], batch.gain_g[rows, selected]])

    samples = np.concatenate(_map_blocks(p, trials, seed, pick, workers), axis=1)
    return samples[0], samples[1]


def empirical_selected_pdf(
    p: NetworkProfile,
    trials: int,
    bins: int,
    seed: int,
    upper: Optional[float] = None,
) -> SelectedGainHistogram:
    """Normalised histogram of the selected relay's source gain.

    Bins span ``[0, upper]``; by default ``upper`` is the largest sample, so the bin masses
    sum to 1. With an explicit ``upper`` the samples beyond it are left out of the masses.
    """
    _check_trials(trials, MIN_PDF_TRIALS)
    if bins < 1:
        raise DomainError(f"Need at least one bin, got {bins}")
    gamma_fr, _ = selected_gains(p, trials, seed)
    top = float(gamma_fr.max()) if upper is None else upper
    edges = np.linspace(0.0, top, bins + 1)
    counts, _ = np.histogram(gamma_fr, bins=edges)
    mass = counts / trials
    return SelectedGainHistogram(edges=edges, density=mass / np.diff(edges), mass=mass)


def simulated_throughput(
    b: LinkBudget,
    p: NetworkProfile,
    combining: Combining,
    trials: int,
    seed: int,
    workers: Optional[int] = None,
) -> tuple[float, float]:
    """``(LT, DL)`` throughput from the simulated outage profile."""
    estimate = estimate_outage_rounds(b, p, combining, trials, seed, workers)
    outages = np.concatenate([[1.0], estimate.p_hat])
    return lt_from_outages(outages, b.rate), dl_from_outages(outages, b.rate).value
