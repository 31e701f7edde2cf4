"""Arrival process rates, destination uniformity, burst length statistics
and control packet serialisation times."""

import pytest

from obsim.errors import ConfigurationError
from obsim.kernel import Kernel, RandomStream, SEC, US
from obsim.topology import build_custom, build_nsfnet, shortest_routes
from obsim.traffic import (
    CONTROL_PACKET_BITS,
    Burst,
    Fate,
    LoadSpec,
    Source,
    TrafficGenerator,
    transmission_ticks,
)


def make_source(seed=1, load=0.65, wavelengths=32, n_dest=13):
    spec = LoadSpec(offered_load=load)
    stream = RandomStream(seed, "src-test")
    return Source(0, list(range(1, n_dest + 1)), spec, stream, wavelengths), spec


class TestControlPacketDuration:
    def test_100_bits_at_10_gbps_is_10_ns(self):
        assert LoadSpec(0.5).control_packet_duration() == 10_000  # 10 ns in ps

    def test_100_bits_at_622_mbps(self):
        spec = LoadSpec(0.5, control_bit_rate=622e6)
        assert spec.control_packet_duration() == 160_772  # ps, ~160.77 ns

    def test_zero_bits_zero_duration(self):
        assert transmission_ticks(0, 10e9) == 0

    def test_control_packet_is_100_bits(self):
        assert CONTROL_PACKET_BITS == 100


class TestLoadSpec:
    def test_arrival_rate_from_load(self):
        # load 0.65 on W=32 with 100 us mean bursts: 208,000 bursts/s
        spec = LoadSpec(0.65)
        assert spec.node_arrival_rate(32) == pytest.approx(208_000.0)
        assert spec.mean_burst_duration_ticks() == pytest.approx(100 * US)

    def test_validation_names_bad_values(self):
        with pytest.raises(ConfigurationError, match="load"):
            LoadSpec(0)
        with pytest.raises(ConfigurationError, match="mean_burst_bits"):
            LoadSpec(0.5, mean_burst_bits=0)
        with pytest.raises(ConfigurationError, match="control_bit_rate"):
            LoadSpec(0.5, control_bit_rate=-1)


class TestSourceDistributions:
    N = 10**6

    def test_empirical_rate_within_one_percent(self):
        source, spec = make_source()
        total_ticks = sum(source.next_arrival()[0] for _ in range(self.N))
        rate = self.N * SEC / total_ticks
        assert rate == pytest.approx(208_000.0, rel=0.01)

    def test_destination_uniform_over_thirteen(self):
        source, _ = make_source(seed=2)
        counts = {d: 0 for d in source.destinations}
        for _ in range(self.N):
            counts[source.next_arrival()[1]] += 1
        for d, count in counts.items():
            share = count / self.N
            assert abs(share - 1 / 13) < 0.005, f"destination {d} share {share}"

    def test_mean_duration_100_us(self):
        source, _ = make_source(seed=3)
        total = sum(source.next_arrival()[3] for _ in range(self.N))
        assert total / self.N == pytest.approx(100 * US, rel=0.01)

    def test_duration_is_rounded_bit_time(self):
        source, spec = make_source(seed=4)
        for _ in range(1000):
            _, _, bits, duration = source.next_arrival()
            assert bits >= 1
            assert duration == max(1, round(bits * SEC / spec.data_bit_rate))


class TestTrafficGenerator:
    def build(self, total=500, warmup=50, seed=9):
        topo = build_nsfnet()
        routes = shortest_routes(topo)
        kernel = Kernel()
        bursts = []
        gen = TrafficGenerator(
            kernel,
            routes,
            LoadSpec(0.65),
            wavelengths=32,
            sink=bursts.append,
            total_bursts=total,
            warmup_bursts=warmup,
            master_seed=seed,
        )
        gen.start()
        kernel.run_to_exhaustion()
        return bursts

    def test_exact_burst_budget_and_unique_ids(self):
        bursts = self.build()
        assert len(bursts) == 500
        assert len({b.id for b in bursts}) == 500

    def test_warmup_flagging(self):
        bursts = self.build()
        by_id = sorted(bursts, key=lambda b: b.id)
        assert all(not b.measured for b in by_id[:50])
        assert all(b.measured for b in by_id[50:])

    def test_no_self_destined_bursts_and_valid_routes(self):
        for burst in self.build():
            assert burst.source != burst.destination
            assert burst.route.source == burst.source
            assert burst.route.destination == burst.destination
            assert burst.fate is Fate.IN_FLIGHT

    def test_creation_times_non_decreasing_per_id(self):
        bursts = self.build()
        by_id = sorted(bursts, key=lambda b: b.id)
        for earlier, later in zip(by_id, by_id[1:]):
            assert earlier.created_at <= later.created_at

    def test_sources_skip_nodes_without_destinations(self):
        topo = build_custom(2, [(0, 1)], bidirectional=False, wavelengths=4)
        routes = shortest_routes(topo)
        kernel = Kernel()
        bursts = []
        gen = TrafficGenerator(
            kernel, routes, LoadSpec(0.5), 4, bursts.append, total_bursts=100, master_seed=1
        )
        gen.start()
        kernel.run_to_exhaustion()
        assert len(bursts) == 100
        assert all(b.source == 0 and b.destination == 1 for b in bursts)

    def test_offered_bits_accounting(self):
        # total offered traffic approximates load * W * bit_rate per node
        topo = build_custom(2, [(0, 1)], bidirectional=False, wavelengths=8)
        routes = shortest_routes(topo)
        kernel = Kernel()
        bursts = []
        gen = TrafficGenerator(
            kernel, routes, LoadSpec(0.5), 8, bursts.append, total_bursts=200_000, master_seed=3
        )
        gen.start()
        kernel.run_to_exhaustion()
        elapsed_s = kernel.now / SEC
        offered_bits_per_s = sum(b.length_bits for b in bursts) / elapsed_s
        assert offered_bits_per_s == pytest.approx(0.5 * 8 * 10e9, rel=0.02)
