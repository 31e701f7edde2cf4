"""Network graphs and routing: torus and backbone construction, per-link
wavelength parameters, and hop-count shortest paths with deterministic
tie-breaking.

Topologies and route tables are immutable after construction and safe to
share across concurrently running replications.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Optional, Sequence

from .errors import ConfigurationError
from .kernel import MS

DEFAULT_WAVELENGTHS = 32
DEFAULT_CONTROL_WAVELENGTHS = 1
DEFAULT_BIT_RATE = 10e9
DEFAULT_PROPAGATION_DELAY = 1 * MS  # one millisecond of fibre per link


@dataclass(frozen=True)
class DirectedLink:
    """One direction of a fibre link.

    ``wavelengths`` counts every wavelength including any control wavelength;
    how many of them carry bursts depends on the signalling architecture.
    """

    id: int
    src: int
    dst: int
    wavelengths: int
    control_wavelengths: int
    bit_rate: float
    propagation_delay: int


@dataclass(frozen=True)
class Route:
    """A shortest path between two nodes, as an ordered list of links."""

    source: int
    destination: int
    nodes: tuple
    links: tuple
    hop_count: int
    total_propagation: int


class Topology:
    """Directed-link graph; every bidirectional link contributes two
    DirectedLinks with identical parameters."""

    def __init__(self, node_count: int, links: Sequence[DirectedLink], name: str = "custom"):
        if node_count < 2:
            raise ConfigurationError(f"topology needs at least 2 nodes, got {node_count}")
        for link in links:
            if link.wavelengths < 1:
                raise ConfigurationError(
                    f"link {link.src}->{link.dst}: wavelengths must be >= 1"
                )
            if not 0 <= link.control_wavelengths < link.wavelengths:
                raise ConfigurationError(
                    f"link {link.src}->{link.dst}: control_wavelengths must satisfy "
                    f"0 <= CW < W (got CW={link.control_wavelengths}, W={link.wavelengths})"
                )
            if not (0 <= link.src < node_count and 0 <= link.dst < node_count):
                raise ConfigurationError(f"link {link.src}->{link.dst}: node out of range")
        self.node_count = node_count
        self.links = tuple(links)
        self.name = name
        out: list = [[] for _ in range(node_count)]
        for link in self.links:
            out[link.src].append(link)
        self.out_links = tuple(tuple(ls) for ls in out)

    @property
    def directed_link_count(self) -> int:
        return len(self.links)

    def degrees(self) -> list:
        """Out-degree per node (equals in-degree on symmetric topologies)."""
        return [len(ls) for ls in self.out_links]

    def is_connected(self) -> bool:
        """True when every node reaches every other over directed links."""
        for start in range(self.node_count):
            seen = {start}
            queue = deque([start])
            while queue:
                u = queue.popleft()
                for link in self.out_links[u]:
                    if link.dst not in seen:
                        seen.add(link.dst)
                        queue.append(link.dst)
            if len(seen) != self.node_count:
                return False
        return True


def _make_links(
    edges: Iterable[tuple],
    *,
    wavelengths: int,
    control_wavelengths: int,
    bit_rate: float,
    propagation_delay: int,
    bidirectional: bool,
) -> list:
    links = []
    for edge in edges:
        a, b = edge[0], edge[1]
        delay = edge[2] if len(edge) > 2 and edge[2] is not None else propagation_delay
        w = edge[3] if len(edge) > 3 and edge[3] is not None else wavelengths
        cw = edge[4] if len(edge) > 4 and edge[4] is not None else control_wavelengths
        links.append(DirectedLink(len(links), a, b, w, cw, bit_rate, delay))
        if bidirectional:
            links.append(DirectedLink(len(links), b, a, w, cw, bit_rate, delay))
    return links


def build_custom(
    node_count: int,
    edges: Iterable[tuple],
    *,
    wavelengths: int = DEFAULT_WAVELENGTHS,
    control_wavelengths: int = DEFAULT_CONTROL_WAVELENGTHS,
    bit_rate: float = DEFAULT_BIT_RATE,
    propagation_delay: int = DEFAULT_PROPAGATION_DELAY,
    bidirectional: bool = True,
    name: str = "custom",
) -> Topology:
    """Build a topology from an edge list.

    Each edge is ``(a, b)`` or ``(a, b, delay, W, CW)`` with trailing fields
    optional.  With ``bidirectional=False`` the edges are taken as directed,
    which test harnesses use to build single-feed loss systems.
    """
    links = _make_links(
        edges,
        wavelengths=wavelengths,
        control_wavelengths=control_wavelengths,
        bit_rate=bit_rate,
        propagation_delay=propagation_delay,
        bidirectional=bidirectional,
    )
    return Topology(node_count, links, name=name)


def build_torus(rows: int, cols: int, **link_params) -> Topology:
    """Regular wrap-around grid: rows*cols nodes, degree 4 everywhere,
    2*rows*cols bidirectional links.

    The construction rule is applied uniformly, so a width-2 torus keeps its
    duplicate wrap edges as distinct parallel links.
    """
    if rows < 2 or cols < 2:
        raise ConfigurationError(f"torus dimensions must be >= 2, got {rows}x{cols}")
    edges = []
    for r in range(rows):
        for c in range(cols):
            node = r * cols + c
            right = r * cols + (c + 1) % cols
            down = ((r + 1) % rows) * cols + c
            edges.append((node, right))
            edges.append((node, down))
    topo = build_custom(rows * cols, edges, name=f"torus{rows}x{cols}", **link_params)
    return topo


def _parse_topology_lines(lines: Iterable[str], source_name: str):
    nodes = {}
    edges = []
    max_node = -1
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        try:
            if kind == "node":
                idx = int(parts[1])
                nodes[idx] = parts[2] if len(parts) > 2 else str(idx)
                max_node = max(max_node, idx)
            elif kind == "link":
                a, b = int(parts[1]), int(parts[2])
                delay = int(parts[3]) if len(parts) > 3 else None
                w = int(parts[4]) if len(parts) > 4 else None
                cw = int(parts[5]) if len(parts) > 5 else None
                edges.append((a, b, delay, w, cw))
                max_node = max(max_node, a, b)
            else:
                raise ValueError(f"unknown record {kind!r}")
        except (ValueError, IndexError) as exc:
            raise ConfigurationError(f"{source_name}:{lineno}: {exc}") from exc
    return max_node + 1, edges


def load_topology_file(path, **link_params) -> Topology:
    """Read a line-oriented topology file.

    Records: ``link <a> <b> [delay_ps] [W] [CW]`` (one per bidirectional
    link) and optional ``node <id> [name]``; ``#`` starts a comment.
    """
    with open(path, encoding="utf-8") as fh:
        node_count, edges = _parse_topology_lines(fh, str(path))
    if not edges:
        raise ConfigurationError(f"{path}: no links defined")
    name = link_params.pop("name", str(path))
    topo = build_custom(node_count, edges, name=name, **link_params)
    if not topo.is_connected():
        raise ConfigurationError(f"{path}: topology is not connected")
    return topo


def build_nsfnet(**link_params) -> Topology:
    """The 14-node, 21-bidirectional-link US research backbone, loaded from
    the data file shipped with the package."""
    text = resources.files("obsim.data").joinpath("nsfnet.topo").read_text(encoding="utf-8")
    node_count, edges = _parse_topology_lines(text.splitlines(), "nsfnet.topo")
    link_params.setdefault("name", "nsfnet")
    name = link_params.pop("name")
    topo = build_custom(node_count, edges, name=name, **link_params)
    if not topo.is_connected():  # pragma: no cover - shipped data is connected
        raise ConfigurationError("nsfnet data file is not connected")
    return topo


class RouteTable:
    """One shortest route per reachable ordered node pair.

    Hop count ties are broken by choosing the lowest next-hop node index at
    every step (and the lowest link id between parallel links), so two
    constructions of the same topology yield identical tables.
    """

    def __init__(self, topology: Topology):
        self.topology = topology
        self._routes = {}
        self._build()

    def _distances_to(self, dest: int) -> list:
        # BFS over reversed edges gives hop distance from every node to dest.
        dist = [-1] * self.topology.node_count
        dist[dest] = 0
        incoming: list = [[] for _ in range(self.topology.node_count)]
        for link in self.topology.links:
            incoming[link.dst].append(link.src)
        queue = deque([dest])
        while queue:
            v = queue.popleft()
            for u in incoming[v]:
                if dist[u] < 0:
                    dist[u] = dist[v] + 1
                    queue.append(u)
        return dist

    def _build(self) -> None:
        topo = self.topology
        for dest in range(topo.node_count):
            dist = self._distances_to(dest)
            for src in range(topo.node_count):
                if src == dest or dist[src] < 0:
                    continue
                nodes = [src]
                links = []
                u = src
                while u != dest:
                    best_link = None
                    for link in topo.out_links[u]:
                        if dist[link.dst] != dist[u] - 1:
                            continue
                        if (
                            best_link is None
                            or link.dst < best_link.dst
                            or (link.dst == best_link.dst and link.id < best_link.id)
                        ):
                            best_link = link
                    if best_link is None:  # pragma: no cover - BFS guarantees progress
                        raise ConfigurationError(f"no progress from {u} toward {dest}")
                    links.append(best_link)
                    u = best_link.dst
                    nodes.append(u)
                self._routes[(src, dest)] = Route(
                    source=src,
                    destination=dest,
                    nodes=tuple(nodes),
                    links=tuple(links),
                    hop_count=len(links),
                    total_propagation=sum(l.propagation_delay for l in links),
                )

    def route(self, src: int, dest: int) -> Route:
        try:
            return self._routes[(src, dest)]
        except KeyError:
            raise ConfigurationError(f"no route from {src} to {dest}") from None

    def has_route(self, src: int, dest: int) -> bool:
        return (src, dest) in self._routes

    def destinations(self, src: int) -> list:
        return sorted(d for (s, d) in self._routes if s == src)

    def pairs(self):
        return self._routes.items()

    def max_hop_count(self) -> int:
        return max(r.hop_count for r in self._routes.values())

    @property
    def complete(self) -> bool:
        n = self.topology.node_count
        return len(self._routes) == n * (n - 1)


def shortest_routes(topology: Topology, require_complete: bool = False) -> RouteTable:
    """Build the route table; with ``require_complete`` an unreachable pair is
    a configuration error."""
    table = RouteTable(topology)
    if require_complete and not table.complete:
        raise ConfigurationError(f"topology {topology.name!r} has unreachable node pairs")
    return table
