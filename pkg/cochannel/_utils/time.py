""" cochannel: co-channel speech detection toolkit

    Wall-clock helpers used for per-epoch and per-stage timing.

    Licensed under the GNU Lesser General Public License v2.1 or later.
"""


import time


def current_time_millis() -> float:
    """Current monotonic time in milliseconds"""
    return time.monotonic() * 1000


def millis_to_seconds(millis: float) -> float:
    """Convert milliseconds to seconds."""
    return millis / 1000.0


class Stopwatch:
    """Measure elapsed wall-clock time between laps."""

    __slots__ = ('_start', '_lap')

    def __init__(self) -> None:
        self._start = current_time_millis()
        self._lap = self._start

    def lap(self) -> float:
        """Seconds since the previous lap (or since creation)."""
        now = current_time_millis()
        elapsed = millis_to_seconds(now - self._lap)
        self._lap = now
        return elapsed

    @property
    def total(self) -> float:
        """Seconds since creation."""
        return millis_to_seconds(current_time_millis() - self._start)
