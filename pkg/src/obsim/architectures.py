"""Node models for the three signalling architectures.

The two out-of-band architectures send a control packet on a dedicated
control wavelength ahead of each burst.  With variable offsets the time
advance is set at the ingress to cover control processing at every node on
the path and shrinks hop by hop; with offset emulation the advance is fixed
at the switching time and input fibre delay lines absorb the per-hop
processing.  The in-band architecture carries the control header (label) on
the data wavelength directly in front of the burst, and delay lines absorb
processing plus switching at every hop.

Scheduling decisions happen when the node's control unit is done with a
message: immediately at control arrival for variable offsets (processing is
fixed, so decision order equals arrival order), and at the control-unit exit
instant for the fixed-offset and in-band variants, which keeps reservation
start times at any given output link non-decreasing in decision order even
where locally injected and transit bursts share a link.

Fixed processing time means a control packet can never be delayed, so two
packets needing the same output control wavelength at overlapping times
collide: the earlier committed transmission wins and the other burst is
lost.  Reservations already made for a lost burst are not released; the
burst physically occupies them up to the last configured node and they are
accounted as wasted capacity.
"""

from __future__ import annotations

from enum import Enum
from typing import Callable, Optional

from .errors import ConfigurationError, ProtocolInvariantError
from .kernel import Kernel, US
from .scheduling import ControlChannelBook, HorizonBook, VoidBook
from .topology import DirectedLink, RouteTable
from .traffic import Burst, Fate, LoadSpec


class Architecture(str, Enum):
    """Signalling architecture selector; values match configuration keys."""

    C_OBS = "c-obs"
    E_OBS = "e-obs"
    L_OBS = "l-obs"


def min_offset(t_sw: int, t_proc: int, nb_hop: int) -> int:
    """Smallest time advance between control packet and burst that keeps the
    burst behind its control information over an ``nb_hop`` path: one switch
    configuration plus one control processing per hop."""
    if nb_hop < 1:
        raise ValueError(f"nb_hop must be >= 1, got {nb_hop}")
    return t_sw + nb_hop * t_proc


class ArchitectureParams:
    """Architecture choice plus the node timing constants."""

    __slots__ = ("arch", "t_sw", "t_proc")

    def __init__(self, arch: Architecture, t_sw: int = 1 * US, t_proc: int = 10 * US):
        if t_sw < 0 or t_proc < 0:
            raise ConfigurationError("switching and processing times must be >= 0")
        self.arch = Architecture(arch)
        self.t_sw = t_sw
        self.t_proc = t_proc

    @property
    def uses_control_wavelength(self) -> bool:
        return self.arch is not Architecture.L_OBS

    def data_channels(self, link: DirectedLink) -> int:
        """Wavelengths available to bursts on ``link``: all of them in-band,
        all but the control wavelengths out-of-band."""
        if self.arch is Architecture.L_OBS:
            return link.wavelengths
        return link.wavelengths - link.control_wavelengths

    def added_latency(self, nb_hop: int) -> int:
        """End-to-end delay added on top of propagation for a delivered burst
        on an ``nb_hop`` route."""
        if self.arch is Architecture.L_OBS:
            return nb_hop * (self.t_proc + self.t_sw)
        return self.t_sw + nb_hop * self.t_proc


class ControlUnitMessage:
    """A control packet or label in flight, tracking its burst, the hops its
    control information has crossed, and (out-of-band only) the remaining
    offset to its burst."""

    __slots__ = ("kind", "burst", "remaining_offset", "hop", "arrived_at")

    def __init__(self, kind: str, burst: Burst, remaining_offset: Optional[int]):
        self.kind = kind
        self.burst = burst
        self.remaining_offset = remaining_offset
        self.hop = 1
        self.arrived_at = 0


class ObsNetwork:
    """Shared wiring for all architectures: per-link reservation books,
    control-wavelength occupancy, fate recording and the metrics ledger."""

    book_class = HorizonBook

    def __init__(
        self,
        kernel: Kernel,
        routes: RouteTable,
        params: ArchitectureParams,
        spec: LoadSpec,
        ledger,
        record_requests: bool = False,
        record_reservations: bool = False,
        on_fate: Optional[Callable[[Burst], None]] = None,
    ):
        self.kernel = kernel
        self.routes = routes
        self.topology = routes.topology
        self.params = params
        self.spec = spec
        self.ledger = ledger
        self.on_fate = on_fate
        self.t_sw = params.t_sw
        self.t_proc = params.t_proc
        self.d_control = spec.control_packet_duration()
        self.data_books = []
        for link in self.topology.links:
            channels = params.data_channels(link)
            if channels < 1:
                raise ConfigurationError(
                    f"link {link.src}->{link.dst}: no data wavelength left "
                    f"(W={link.wavelengths}, CW={link.control_wavelengths})"
                )
            self.data_books.append(self.book_class(channels))
        self.control_books = None
        if params.uses_control_wavelength:
            for link in self.topology.links:
                if link.control_wavelengths < 1:
                    raise ConfigurationError(
                        f"link {link.src}->{link.dst}: out-of-band signalling "
                        "requires a control wavelength on every link"
                    )
            max_hops = routes.max_hop_count()
            if self.t_sw < max_hops * self.d_control:
                raise ConfigurationError(
                    "switching time must cover the control packet serialisation "
                    f"accumulated over the longest route ({max_hops} hops x "
                    f"{self.d_control} ps); raise t_sw_ps or the control bit rate"
                )
            self.control_books = [ControlChannelBook() for _ in self.topology.links]
        self.request_log = {link.id: [] for link in self.topology.links} if record_requests else None
        self.reservation_log = [] if record_reservations else None

    # -- bookkeeping ----------------------------------------------------

    def _reserve(
        self, link: DirectedLink, start: int, duration: int, burst: Burst, now: int, remaining_hops: int
    ):
        """One data-wavelength reservation attempt; returns the channel or
        None, recording the attempt against the burst's remaining hops."""
        self.ledger.record_attempt(burst, remaining_hops)
        if self.request_log is not None:
            self.request_log[link.id].append((start, duration))
        book = self.data_books[link.id]
        if isinstance(book, VoidBook):
            channel = book.reserve(start, duration, now)
        else:
            channel = book.reserve(start, duration)
        if channel is None:
            return None
        burst.reservations.append((link.id, channel, start, start + duration))
        if self.reservation_log is not None:
            self.reservation_log.append((link.id, channel, start, start + duration, burst.id))
        return channel

    def _finish(self, burst: Burst, fate: Fate) -> None:
        if burst.fate != Fate.IN_FLIGHT:
            raise ProtocolInvariantError(f"burst {burst.id} fate recorded twice")
        burst.fate = fate

    def _lose_burst_contention(self, burst: Burst, hops_done: int) -> None:
        burst.hops_done = hops_done
        self._finish(burst, Fate.LOST_BURST_CONTENTION)
        self.ledger.record_burst_loss(burst)
        if self.on_fate is not None:
            self.on_fate(burst)

    def _lose_bcp_contention(self, burst: Burst, hops_done: int) -> None:
        burst.hops_done = hops_done
        self._finish(burst, Fate.LOST_BCP_CONTENTION)
        self.ledger.record_bcp_loss(burst)
        if self.on_fate is not None:
            self.on_fate(burst)

    def _deliver(self, burst: Burst) -> None:
        burst.hops_done = burst.route.hop_count
        self._finish(burst, Fate.DELIVERED)
        delay = self.params.added_latency(burst.route.hop_count) + burst.route.total_propagation
        self.ledger.record_delivery(burst, delay)
        if self.on_fate is not None:
            self.on_fate(burst)

    # -- entry point -----------------------------------------------------

    def ingress_emit(self, burst: Burst) -> None:
        """Accept a freshly assembled burst at its source node."""
        self.ledger.record_offered(burst)
        self._inject(burst)

    def _inject(self, burst: Burst) -> None:  # pragma: no cover - overridden
        raise NotImplementedError


class CObsNetwork(ObsNetwork):
    """Variable-offset out-of-band signalling.

    The ingress computes the minimum offset for the whole path; every node
    decrements it by the control processing time.  Because offsets differ
    between bursts, reservation requests reach a link out of start order and
    gaps form between reservations, so this architecture runs void-filling
    books.
    """

    book_class = VoidBook

    def _inject(self, burst: Burst) -> None:
        t0 = self.kernel.now
        route = burst.route
        offset = min_offset(self.t_sw, self.t_proc, route.hop_count)
        link = route.links[0]
        channel = self._reserve(link, t0 + offset, burst.duration, burst, t0, route.hop_count)
        if channel is None:
            self._lose_burst_contention(burst, hops_done=0)
            return
        if not self.control_books[link.id].try_commit(t0, t0 + self.d_control, t0):
            self._lose_bcp_contention(burst, hops_done=1)
            return
        msg = ControlUnitMessage("bcp", burst, offset)
        msg.arrived_at = t0
        self.kernel.schedule(
            t0 + self.d_control + link.propagation_delay, self._hop, msg, "hop"
        )

    def _hop(self, msg: ControlUnitMessage) -> None:
        # Fires when the control packet is fully received at the next node.
        t = self.kernel.now
        burst = msg.burst
        route = burst.route
        hops_total = route.hop_count
        i = msg.hop
        msg.arrived_at = t
        expected = self.t_sw + (hops_total - i + 1) * self.t_proc
        if msg.remaining_offset != expected:
            raise ProtocolInvariantError(
                f"burst {burst.id}: offset {msg.remaining_offset} at downstream node "
                f"{i}, expected {expected}"
            )
        if i == hops_total:
            # Egress: processing consumes the last slice of offset; the burst
            # is recorded delivered when its tail arrives.
            tail = (
                burst.created_at
                + min_offset(self.t_sw, self.t_proc, hops_total)
                + route.total_propagation
                + burst.duration
            )
            self.kernel.schedule(tail, self._deliver, burst, "tail")
            return
        if msg.remaining_offset < self.t_proc + self.t_sw:
            raise ProtocolInvariantError(
                f"burst {burst.id}: remaining offset {msg.remaining_offset} cannot "
                f"cover processing plus switching at a non-egress node"
            )
        link = route.links[i]
        channel = self._reserve(link, t + msg.remaining_offset, burst.duration, burst, t, hops_total - i)
        if channel is None:
            self._lose_burst_contention(burst, hops_done=i)
            return
        exit_t = t + self.t_proc
        if not self.control_books[link.id].try_commit(exit_t, exit_t + self.d_control, t):
            self._lose_bcp_contention(burst, hops_done=i + 1)
            return
        msg.remaining_offset -= self.t_proc
        msg.hop = i + 1
        self.kernel.schedule(
            exit_t + self.d_control + link.propagation_delay, self._hop, msg, "hop"
        )


class EObsNetwork(ObsNetwork):
    """Fixed-offset out-of-band signalling.

    The offset equals the switching time everywhere; an input delay line at
    each node absorbs the control processing time.  All reservation requests
    at a link carry start = decision time + switching time, so they arrive
    in start order and plain horizon books suffice.
    """

    book_class = HorizonBook

    def _inject(self, burst: Burst) -> None:
        t0 = self.kernel.now
        route = burst.route
        link = route.links[0]
        channel = self._reserve(link, t0 + self.t_sw, burst.duration, burst, t0, route.hop_count)
        if channel is None:
            self._lose_burst_contention(burst, hops_done=0)
            return
        if not self.control_books[link.id].try_commit(t0, t0 + self.d_control, t0):
            self._lose_bcp_contention(burst, hops_done=1)
            return
        msg = ControlUnitMessage("bcp", burst, self.t_sw)
        msg.arrived_at = t0
        self.kernel.schedule(
            t0 + self.d_control + link.propagation_delay + self.t_proc, self._hop, msg, "hop"
        )

    def _hop(self, msg: ControlUnitMessage) -> None:
        # Fires when the control unit finishes processing: arrival + t_proc.
        exit_t = self.kernel.now
        burst = msg.burst
        route = burst.route
        i = msg.hop
        msg.arrived_at = exit_t - self.t_proc
        if msg.remaining_offset != self.t_sw:
            raise ProtocolInvariantError(
                f"burst {burst.id}: fixed offset drifted to {msg.remaining_offset}"
            )
        if i == route.hop_count:
            tail = (
                burst.created_at
                + self.t_sw
                + route.hop_count * self.t_proc
                + route.total_propagation
                + burst.duration
            )
            self.kernel.schedule(tail, self._deliver, burst, "tail")
            return
        link = route.links[i]
        channel = self._reserve(link, exit_t + self.t_sw, burst.duration, burst, exit_t, route.hop_count - i)
        if channel is None:
            self._lose_burst_contention(burst, hops_done=i)
            return
        if not self.control_books[link.id].try_commit(exit_t, exit_t + self.d_control, exit_t):
            self._lose_bcp_contention(burst, hops_done=i + 1)
            return
        msg.hop = i + 1
        self.kernel.schedule(
            exit_t + self.d_control + link.propagation_delay + self.t_proc, self._hop, msg, "hop"
        )


class LObsNetwork(ObsNetwork):
    """In-band signalling: the label travels contiguously ahead of its burst
    on the same data wavelength, so no control wavelength exists and a
    control-plane contention cannot occur.  Each reservation covers label
    plus burst; input delay lines absorb processing plus switching per hop.
    """

    book_class = HorizonBook

    def _inject(self, burst: Burst) -> None:
        t0 = self.kernel.now
        route = burst.route
        link = route.links[0]
        channel = self._reserve(link, t0, self.d_control + burst.duration, burst, t0, route.hop_count)
        if channel is None:
            self._lose_burst_contention(burst, hops_done=0)
            return
        msg = ControlUnitMessage("label", burst, None)
        msg.arrived_at = t0
        self.kernel.schedule(
            t0 + self.d_control + link.propagation_delay + self.t_proc + self.t_sw,
            self._hop,
            msg,
            "hop",
        )

    def _hop(self, msg: ControlUnitMessage) -> None:
        # Fires when the unit leaves the input delay line: label arrival +
        # processing + switching; the reservation starts at this instant.
        forward_t = self.kernel.now
        burst = msg.burst
        route = burst.route
        i = msg.hop
        msg.arrived_at = forward_t - self.t_proc - self.t_sw
        if i == route.hop_count:
            self.kernel.schedule(forward_t + burst.duration, self._deliver, burst, "tail")
            return
        link = route.links[i]
        channel = self._reserve(link, forward_t, self.d_control + burst.duration, burst, forward_t, route.hop_count - i)
        if channel is None:
            self._lose_burst_contention(burst, hops_done=i)
            return
        msg.hop = i + 1
        self.kernel.schedule(
            forward_t + self.d_control + link.propagation_delay + self.t_proc + self.t_sw,
            self._hop,
            msg,
            "hop",
        )


_NETWORK_CLASSES = {
    Architecture.C_OBS: CObsNetwork,
    Architecture.E_OBS: EObsNetwork,
    Architecture.L_OBS: LObsNetwork,
}


def build_network(
    kernel: Kernel,
    routes: RouteTable,
    params: ArchitectureParams,
    spec: LoadSpec,
    ledger,
    **kwargs,
) -> ObsNetwork:
    """Instantiate the node model matching ``params.arch``."""
    cls = _NETWORK_CLASSES[Architecture(params.arch)]
    return cls(kernel, routes, params, spec, ledger, **kwargs)
