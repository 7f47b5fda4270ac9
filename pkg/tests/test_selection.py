import numpy as np
import pytest

from relaylab.exceptions import DegenerateChannelError
from relaylab.fading import NetworkProfile
from relaylab.simulation import (
    ChannelRealization,
    RngStream,
    draw_batch,
    select_relay_centralized,
    select_relay_distributed,
)


def test_centralized_picks_best_min_gain():
    c = ChannelRealization(gain_f0=1.0, gain_f=(2.0, 1.0), gain_g=(3.0, 5.0))
    assert select_relay_centralized(c) == 0


def test_centralized_ignores_common_scaling():
    c = ChannelRealization(gain_f0=1.0, gain_f=(0.3, 0.9, 0.4), gain_g=(2.0, 0.5, 0.7))
    scaled = ChannelRealization(
        gain_f0=7.0, gain_f=tuple(7 * x for x in c.gain_f), gain_g=tuple(7 * x for x in c.gain_g)
    )
    assert select_relay_centralized(c) == select_relay_centralized(scaled) == 1


def test_tie_goes_to_lowest_index():
    c = ChannelRealization(gain_f0=1.0, gain_f=(1.0, 2.0, 2.0), gain_g=(1.0, 2.0, 2.0))
    assert select_relay_centralized(c) == 1
    assert select_relay_distributed(c)[0] == 1


def test_distributed_timer_expiry():
    c = ChannelRealization(gain_f0=1.0, gain_f=(0.5, 4.0), gain_g=(2.0, 0.25))
    winner, elapsed = select_relay_distributed(c, timer_scale=2.0)
    assert winner == 0
    assert abs(elapsed - 2.0 / 0.5) < 1e-12


@pytest.mark.parametrize("realizations", [10_000, pytest.param(1_000_000, marks=pytest.mark.slow)])
def test_distributed_matches_centralized(realizations):
    p = NetworkProfile(n_relays=4, sigma2_f=[1.0, 2.0, 0.5, 1.0], sigma2_g=[1.0, 1.0, 3.0, 0.2])
    batch = draw_batch(p, RngStream(seed=7).generator(), realizations)
    for t in range(len(batch)):
        c = ChannelRealization(gain_f0=batch.gain_f0[t], gain_f=tuple(batch.gain_f[t]), gain_g=tuple(batch.gain_g[t]))
        winner, elapsed = select_relay_distributed(c)
        assert winner == select_relay_centralized(c)
        assert elapsed == pytest.approx(1.0 / np.max(c.min_gains), rel=1e-12)


def test_zero_min_gain_is_degenerate():
    c = ChannelRealization(gain_f0=1.0, gain_f=(1.0, 0.0), gain_g=(1.0, 1.0))
    assert select_relay_centralized(c) == 0
    with pytest.raises(DegenerateChannelError):
        select_relay_distributed(c)


def test_timer_scale_must_be_positive():
    c = ChannelRealization(gain_f0=1.0, gain_f=(1.0,), gain_g=(1.0,))
    with pytest.raises(ValueError):
        select_relay_distributed(c, timer_scale=0.0)
