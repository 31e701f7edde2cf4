"""Discrete-event simulator of optical burst switching networks.

Compares three signalling architectures on shared topologies and traffic:
out-of-band control with variable offsets (c-obs), out-of-band control with
a fixed emulated offset (e-obs), and in-band labels (l-obs).  Reports loss
decomposed by cause (data-wavelength contention vs control-wavelength
contention), per-remaining-hop fairness, end-to-end delay and network
resource utilization.
"""

from .architectures import (
    Architecture,
    ArchitectureParams,
    ControlUnitMessage,
    build_network,
    min_offset,
)
from .errors import ConfigurationError, ProtocolInvariantError
from .kernel import (
    MS,
    NS,
    PS,
    SEC,
    US,
    DispatchSummary,
    Event,
    Kernel,
    RandomStream,
    SchedulingInPastError,
    derive_seed,
)
from .metrics import MetricsLedger, aggregate_replications, intervals_overlap
from .scheduling import ControlChannelBook, HorizonBook, VoidBook
from .topology import (
    DirectedLink,
    Route,
    RouteTable,
    Topology,
    build_custom,
    build_nsfnet,
    build_torus,
    load_topology_file,
    shortest_routes,
)
from .traffic import Burst, CONTROL_PACKET_BITS, Fate, LoadSpec, Source, TrafficGenerator, transmission_ticks

__version__ = "0.1.0"
