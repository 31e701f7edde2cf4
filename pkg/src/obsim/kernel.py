"""Deterministic discrete-event core: integer picosecond clock, totally
ordered event queue and reproducible random substreams.

All durations and timestamps in the simulator are integer picoseconds, so a
multi-second run accumulates no floating-point drift and 64-bit range is
never approached.  Events fire in strict (time, insertion sequence) order;
modules that need causally ordered simultaneous events must therefore insert
the causally earlier event first.
"""

from __future__ import annotations

import hashlib
import heapq
import random
from dataclasses import dataclass
from typing import Any, Callable, Optional

# Time units expressed in ticks (picoseconds).
PS = 1
NS = 1_000
US = 1_000_000
MS = 1_000_000_000
SEC = 1_000_000_000_000


class SchedulingInPastError(RuntimeError):
    """An event was scheduled before the current clock: a logic error that
    invalidates the run."""


@dataclass
class DispatchSummary:
    """What a run call did: number of events dispatched and the final clock."""

    dispatched: int
    clock: int


class Event:
    """A queued occurrence; fires ``fn(arg)`` at ``fire_at``.

    ``(fire_at, seq)`` is a strict total order.  Cancelled events stay in the
    heap but are skipped (and not counted) at dispatch time.
    """

    __slots__ = ("fire_at", "seq", "fn", "arg", "kind", "cancelled")

    def __init__(self, fire_at: int, seq: int, fn: Callable, arg: Any, kind: str):
        self.fire_at = fire_at
        self.seq = seq
        self.fn = fn
        self.arg = arg
        self.kind = kind
        self.cancelled = False

    def cancel(self) -> None:
        self.cancelled = True

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Event(t={self.fire_at}, seq={self.seq}, kind={self.kind!r})"


class Kernel:
    """Single-threaded event loop with a monotonic integer clock.

    A kernel instance owns all mutable state of one replication; concurrent
    replications each use their own instance.
    """

    def __init__(self, trace: bool = False):
        self.now: int = 0
        self.dispatched: int = 0
        self._heap: list = []
        self._seq: int = 0
        #: optional list of (fire_at, seq, kind) tuples, for determinism checks
        self.trace: Optional[list] = [] if trace else None

    def schedule(self, fire_at: int, fn: Callable, arg: Any = None, kind: str = "") -> Event:
        """Queue ``fn(arg)`` to run at ``fire_at``.

        Raises :class:`SchedulingInPastError` if ``fire_at`` precedes the
        current clock.
        """
        if fire_at < self.now:
            raise SchedulingInPastError(
                f"event {kind!r} at t={fire_at} scheduled while clock is {self.now}"
            )
        ev = Event(fire_at, self._seq, fn, arg, kind)
        self._seq += 1
        heapq.heappush(self._heap, (fire_at, ev.seq, ev))
        return ev

    def _dispatch_until(self, limit: Optional[int]) -> int:
        heap = self._heap
        trace = self.trace
        count = 0
        while heap and (limit is None or heap[0][0] <= limit):
            fire_at, seq, ev = heapq.heappop(heap)
            if ev.cancelled:
                continue
            self.now = fire_at
            if trace is not None:
                trace.append((fire_at, seq, ev.kind))
            count += 1
            ev.fn(ev.arg)
        return count

    def run_until(self, limit: int) -> DispatchSummary:
        """Dispatch every event with ``fire_at <= limit``; the clock ends at
        ``limit`` even when the queue empties earlier."""
        if limit < self.now:
            raise SchedulingInPastError(f"run_until({limit}) while clock is {self.now}")
        count = self._dispatch_until(limit)
        self.now = limit
        self.dispatched += count
        return DispatchSummary(count, self.now)

    def run_to_exhaustion(self) -> DispatchSummary:
        """Dispatch until the queue is empty; the clock ends at the last
        event's time."""
        count = self._dispatch_until(None)
        self.dispatched += count
        return DispatchSummary(count, self.now)

    def pending(self) -> int:
        return sum(1 for _, _, ev in self._heap if not ev.cancelled)


def derive_seed(master_seed: int, stream_id: str) -> int:
    """Stable 128-bit seed for a named substream of a master seed.

    Uses a cryptographic digest rather than ``hash()`` so the derivation does
    not depend on the process hash salt; adding new stream names never
    perturbs existing streams.
    """
    digest = hashlib.sha256(f"{master_seed}:{stream_id}".encode()).digest()
    return int.from_bytes(digest[:16], "big")


class RandomStream:
    """Reproducible random substream keyed by (master_seed, stream_id)."""

    __slots__ = ("stream_id", "_rng")

    def __init__(self, master_seed: int, stream_id: str):
        self.stream_id = stream_id
        self._rng = random.Random(derive_seed(master_seed, stream_id))

    def exponential(self, mean: float) -> float:
        """One draw from Exp(mean); mean must be positive."""
        if mean <= 0:
            raise ValueError(f"exponential mean must be > 0, got {mean}")
        return self._rng.expovariate(1.0 / mean)

    def exponential_ticks(self, mean: float) -> int:
        """Exponential draw rounded to a strictly positive tick count."""
        draw = round(self.exponential(mean))
        return draw if draw > 0 else 1

    def randrange(self, n: int) -> int:
        return self._rng.randrange(n)

    def random(self) -> float:
        return self._rng.random()
