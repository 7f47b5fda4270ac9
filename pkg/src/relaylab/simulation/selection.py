"""Relay selection: the relay with the largest ``min(gamma_f_i, gamma_g_i)`` wins.

The distributed variant runs the timer race as a discrete-event simulation: every relay
starts a timer inversely proportional to its min-gain, and the first to expire
broadcasts a flag packet that silences the rest.
"""

import numpy as np
import simpy

from relaylab.exceptions import DegenerateChannelError
from relaylab.simulation.channel import ChannelRealization

FLAG = "flag"


def select_relay_centralized(c: ChannelRealization) -> int:
    """0-based index of the best relay; ties go to the lowest index."""
    return int(np.argmax(c.min_gains))


def select_relay_distributed(c: ChannelRealization, timer_scale: float = 1.0) -> tuple[int, float]:
    """Run the timer race and return ``(winner, virtual time of its flag)``."""
    mins = c.min_gains
    if np.any(mins <= 0):
        raise DegenerateChannelError(f"Relay {int(np.argmin(mins))} has zero min-gain; its timer never expires")
    if timer_scale <= 0:
        raise ValueError(f"Timer scale must be positive, got {timer_scale}")

    env = simpy.Environment()
    flag: dict[str, tuple[int, float]] = {}
    timers: list[simpy.Process] = []

    def relay_timer(index: int, delay: float):
        try:
            yield env.timeout(delay)
        except simpy.Interrupt:
            return
        if FLAG in flag:
            return
        flag[FLAG] = (index, env.now)
        for other, timer in enumerate(timers):
            if other != index and timer.is_alive:
                timer.interrupt(FLAG)

    # Timers start in index order, so equal expiry times resolve to the lowest index
    for index, m in enumerate(mins):
        timers.append(env.process(relay_timer(index, timer_scale / float(m))))
    env.run()
    return flag[FLAG]
