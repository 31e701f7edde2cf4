"""Burst generation: per-node Poisson arrival processes with exponentially
distributed burst lengths and uniform destination choice.

Offered load is expressed per edge node, normalised to the capacity of one
full link: load 1.0 means a node offers enough traffic to keep all W
wavelengths of one link busy.  Every architecture therefore receives the
same offered traffic for a given load.
"""

from __future__ import annotations

from enum import IntEnum
from typing import Callable, Optional

from .errors import ConfigurationError
from .kernel import Kernel, RandomStream, SEC
from .topology import Route, RouteTable

#: fixed control header size in bits, shared by out-of-band control packets
#: and in-band labels
CONTROL_PACKET_BITS = 100


def transmission_ticks(bits: float, bit_rate: float) -> int:
    """Serialisation time of ``bits`` at ``bit_rate`` (bits/s), rounded to
    the nearest tick."""
    if bit_rate <= 0:
        raise ConfigurationError(f"bit rate must be > 0, got {bit_rate}")
    return round(bits * SEC / bit_rate)


class Fate(IntEnum):
    IN_FLIGHT = 0
    DELIVERED = 1
    LOST_BURST_CONTENTION = 2
    LOST_BCP_CONTENTION = 3


class LoadSpec:
    """Traffic parameters for one run."""

    __slots__ = ("offered_load", "mean_burst_bits", "data_bit_rate", "control_bit_rate")

    def __init__(
        self,
        offered_load: float,
        mean_burst_bits: float = 1_000_000,
        data_bit_rate: float = 10e9,
        control_bit_rate: float = 10e9,
    ):
        if offered_load <= 0:
            raise ConfigurationError(f"load must be > 0, got {offered_load}")
        if mean_burst_bits <= 0:
            raise ConfigurationError(f"mean_burst_bits must be > 0, got {mean_burst_bits}")
        if data_bit_rate <= 0:
            raise ConfigurationError(f"data_bit_rate must be > 0, got {data_bit_rate}")
        if control_bit_rate <= 0:
            raise ConfigurationError(f"control_bit_rate must be > 0, got {control_bit_rate}")
        self.offered_load = offered_load
        self.mean_burst_bits = mean_burst_bits
        self.data_bit_rate = data_bit_rate
        self.control_bit_rate = control_bit_rate

    def mean_burst_duration_ticks(self) -> float:
        return self.mean_burst_bits * SEC / self.data_bit_rate

    def control_packet_duration(self) -> int:
        return transmission_ticks(CONTROL_PACKET_BITS, self.control_bit_rate)

    def node_arrival_rate(self, wavelengths: int) -> float:
        """Burst arrivals per second at one node so that the node offers
        ``offered_load`` links' worth of traffic."""
        mean_duration_s = self.mean_burst_bits / self.data_bit_rate
        return self.offered_load * wavelengths / mean_duration_s

    def mean_interarrival_ticks(self, wavelengths: int) -> float:
        return self.mean_burst_duration_ticks() / (self.offered_load * wavelengths)


class Burst:
    """An assembled data unit and its per-run bookkeeping state."""

    __slots__ = (
        "id",
        "source",
        "destination",
        "route",
        "length_bits",
        "duration",
        "created_at",
        "measured",
        "hops_done",
        "reservations",
        "fate",
    )

    def __init__(
        self,
        burst_id: int,
        route: Route,
        length_bits: int,
        duration: int,
        created_at: int,
        measured: bool,
    ):
        self.id = burst_id
        self.source = route.source
        self.destination = route.destination
        self.route = route
        self.length_bits = length_bits
        self.duration = duration
        self.created_at = created_at
        self.measured = measured
        self.hops_done = 0
        self.reservations = []  # (link_id, channel, start, end)
        self.fate = Fate.IN_FLIGHT


class Source:
    """Poisson burst source at one node, drawing from its own substream."""

    __slots__ = ("node", "destinations", "spec", "stream", "mean_interarrival", "data_rate")

    def __init__(self, node: int, destinations: list, spec: LoadSpec, stream: RandomStream, wavelengths: int):
        if not destinations:
            raise ConfigurationError(f"source {node} has no reachable destination")
        self.node = node
        self.destinations = destinations
        self.spec = spec
        self.stream = stream
        self.mean_interarrival = spec.mean_interarrival_ticks(wavelengths)
        self.data_rate = spec.data_bit_rate

    def next_arrival(self):
        """Draw (interarrival ticks, destination, length bits, duration ticks)
        for the next burst from this node."""
        dt = self.stream.exponential_ticks(self.mean_interarrival)
        dest = self.destinations[self.stream.randrange(len(self.destinations))]
        bits = round(self.stream.exponential(self.spec.mean_burst_bits))
        if bits < 1:
            bits = 1
        duration = transmission_ticks(bits, self.data_rate)
        if duration < 1:
            duration = 1
        return dt, dest, bits, duration


class TrafficGenerator:
    """Drives every source and stops after a fixed number of bursts.

    The first ``warmup_bursts`` bursts are generated but flagged unmeasured,
    so they exercise the network without entering any statistics.
    """

    def __init__(
        self,
        kernel: Kernel,
        routes: RouteTable,
        spec: LoadSpec,
        wavelengths: int,
        sink: Callable[[Burst], None],
        total_bursts: int,
        warmup_bursts: int = 0,
        master_seed: int = 1,
        stream_prefix: str = "src",
    ):
        if total_bursts < 1:
            raise ConfigurationError(f"total_bursts must be >= 1, got {total_bursts}")
        if routes.topology.node_count < 2:
            raise ConfigurationError("traffic needs at least 2 nodes")
        self.kernel = kernel
        self.routes = routes
        self.sink = sink
        self.total_bursts = total_bursts
        self.warmup_bursts = warmup_bursts
        self.created = 0
        self.sources = []
        for node in range(routes.topology.node_count):
            dests = routes.destinations(node)
            if not dests:
                continue
            stream = RandomStream(master_seed, f"{stream_prefix}-{node}")
            self.sources.append(Source(node, dests, spec, stream, wavelengths))
        if not self.sources:
            raise ConfigurationError("no node has a reachable destination")

    def start(self) -> None:
        for source in self.sources:
            dt, dest, bits, duration = source.next_arrival()
            self.kernel.schedule(
                self.kernel.now + dt, self._fire, (source, dest, bits, duration), "source"
            )

    def _fire(self, pending) -> None:
        source, dest, bits, duration = pending
        if self.created >= self.total_bursts:
            return
        burst = Burst(
            burst_id=self.created,
            route=self.routes.route(source.node, dest),
            length_bits=bits,
            duration=duration,
            created_at=self.kernel.now,
            measured=self.created >= self.warmup_bursts,
        )
        self.created += 1
        if self.created < self.total_bursts:
            dt, ndest, nbits, ndur = source.next_arrival()
            self.kernel.schedule(
                self.kernel.now + dt, self._fire, (source, ndest, nbits, ndur), "source"
            )
        self.sink(burst)
