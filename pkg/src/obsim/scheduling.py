"""Per-output-link wavelength reservation books and channel selection.

Two book flavours implement the two reservation protocols in use.  A
HorizonBook remembers, per channel, only the end of the latest reservation;
a VoidBook remembers every outstanding reservation interval so a request can
be placed into a gap between reservations (void filling).  Both use delayed
reservation: a request carries the future start time of the burst, and the
reservation covers exactly [start, start + duration).

Channel selection is latest-available-unscheduled: among the channels that
can take the request, pick the one whose preceding reservation ends latest,
minimising the idle gap opened in front of the new reservation.  Ties go to
the lowest channel index.  Intervals are half-open, so a request starting
exactly at a reservation end fits.
"""

from __future__ import annotations

from bisect import bisect_right, insort
from typing import Optional


class HorizonBook:
    """Channel state reduced to one time per channel: the end of its latest
    reservation.  Sufficient when requests arrive in non-decreasing start
    order, where no usable gap can ever form."""

    __slots__ = ("horizon",)

    def __init__(self, channels: int):
        if channels < 1:
            raise ValueError("a reservation book needs at least one channel")
        self.horizon = [0] * channels

    @property
    def channel_count(self) -> int:
        return len(self.horizon)

    def reserve(self, start: int, duration: int) -> Optional[int]:
        """Book [start, start+duration) on the eligible channel with the
        largest horizon; returns the channel index, or None when every
        channel's horizon lies beyond ``start`` (the request is blocked and
        the book is left unchanged)."""
        best = -1
        best_h = -1
        for ch, h in enumerate(self.horizon):
            if h <= start and h > best_h:
                best = ch
                best_h = h
        if best < 0:
            return None
        self.horizon[best] = start + duration
        return best


class VoidBook:
    """Per-channel ordered reservation intervals, supporting void filling.

    Expired intervals can be pruned; each channel keeps the end of the
    latest pruned reservation as a floor so that the leading-gap reference
    (and therefore every future selection) is unaffected by pruning.
    """

    __slots__ = ("starts", "ends", "floors")

    def __init__(self, channels: int):
        if channels < 1:
            raise ValueError("a reservation book needs at least one channel")
        self.starts = [[] for _ in range(channels)]
        self.ends = [[] for _ in range(channels)]
        self.floors = [0] * channels

    @property
    def channel_count(self) -> int:
        return len(self.starts)

    def intervals(self, channel: int) -> list:
        return list(zip(self.starts[channel], self.ends[channel]))

    def prune(self, now: int) -> None:
        """Drop reservations with end <= now.  Within a channel the intervals
        are disjoint and sorted, so ends are sorted too and the last dropped
        end becomes the channel floor."""
        for ch, ends in enumerate(self.ends):
            k = 0
            n = len(ends)
            while k < n and ends[k] <= now:
                k += 1
            if k:
                self.floors[ch] = ends[k - 1]
                del self.starts[ch][:k]
                del ends[:k]

    def reserve(self, start: int, duration: int, now: int = 0) -> Optional[int]:
        """Void-filling selection of [start, start+duration).

        Among channels where the interval overlaps no reservation, picks the
        one whose latest reservation ending at or before ``start`` ends
        latest (a channel with no prior reservation scores its floor, 0 when
        nothing was ever pruned).  Expired intervals are pruned on the fly
        using ``now``, which must not exceed ``start``.
        """
        end = start + duration
        best = -1
        best_lead = -1
        best_pos = 0
        for ch in range(len(self.starts)):
            starts = self.starts[ch]
            ends = self.ends[ch]
            # lazy prune of expired intervals
            k = 0
            n = len(ends)
            while k < n and ends[k] <= now:
                k += 1
            if k:
                self.floors[ch] = ends[k - 1]
                del starts[:k]
                del ends[:k]
            i = bisect_right(starts, start)
            if i and ends[i - 1] > start:
                continue
            if i < len(starts) and starts[i] < end:
                continue
            lead = ends[i - 1] if i else self.floors[ch]
            if lead > best_lead:
                best = ch
                best_lead = lead
                best_pos = i
        if best < 0:
            return None
        self.starts[best].insert(best_pos, start)
        self.ends[best].insert(best_pos, end)
        return best


class ControlChannelBook:
    """Occupancy of one control wavelength on one directed link.

    Committed transmissions never overlap; an attempt overlapping a committed
    interval is rejected (the later attempt always loses).
    """

    __slots__ = ("starts", "ends")

    def __init__(self):
        self.starts = []
        self.ends = []

    def try_commit(self, start: int, end: int, now: int = 0) -> bool:
        """Commit [start, end) if it overlaps no committed transmission.

        ``now`` lower-bounds every future attempt start, letting expired
        intervals be dropped; intervals are half-open so back-to-back
        transmissions are fine.
        """
        starts = self.starts
        ends = self.ends
        k = 0
        n = len(ends)
        while k < n and ends[k] <= now:
            k += 1
        if k:
            del starts[:k]
            del ends[:k]
        i = bisect_right(starts, start)
        if i and ends[i - 1] > start:
            return False
        if i < len(starts) and starts[i] < end:
            return False
        starts.insert(i, start)
        ends.insert(i, end)
        return True
