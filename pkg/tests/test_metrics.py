"""Ledger arithmetic, conservation, the wavelength-time partition and
replication aggregation."""

import pytest

from obsim.errors import ProtocolInvariantError
from obsim.kernel import Kernel, MS, SEC, US
from obsim.metrics import (
    MetricsLedger,
    aggregate_replications,
    intervals_overlap,
    student_t_halfwidth,
)
from obsim.topology import build_custom, build_nsfnet, shortest_routes
from obsim.traffic import Burst, LoadSpec, TrafficGenerator
from obsim.architectures import Architecture, ArchitectureParams, build_network


def single_link_ledger():
    topo = build_custom(2, [(0, 1)], bidirectional=False, wavelengths=1,
                        control_wavelengths=0)
    return topo, MetricsLedger(topo)


def make_burst(routes, duration=100 * US, burst_id=0, created_at=0, measured=True):
    return Burst(burst_id, routes.route(0, 1), duration // 100, duration, created_at, measured)


class TestRatioArithmetic:
    def test_loss_probability_components(self):
        topo, ledger = single_link_ledger()
        ledger.offered = 10**6
        ledger.lost_burst = 2000
        ledger.lost_bcp = 500
        total, burst, bcp = ledger.loss_probability()
        assert total == pytest.approx(2.5e-3)
        assert burst == pytest.approx(2.0e-3)
        assert bcp == pytest.approx(5.0e-4)
        assert total == pytest.approx(burst + bcp)

    def test_no_losses_zero(self):
        topo, ledger = single_link_ledger()
        ledger.offered = 10
        assert ledger.loss_probability() == (0.0, 0.0, 0.0)

    def test_zero_offered_reports_absent(self):
        topo, ledger = single_link_ledger()
        assert ledger.loss_probability() is None

    def test_fairness_curve_ratios(self):
        topo, ledger = single_link_ledger()
        ledger.attempts[1] = 10**4
        ledger.attempts[2] = 10**4
        ledger.drops[1] = 30
        ledger.drops[2] = 10
        assert ledger.fairness_curve() == {1: 3e-3, 2: 1e-3}

    def test_fairness_curve_omits_unattempted_hops(self):
        topo, ledger = single_link_ledger()
        ledger.attempts[1] = 100
        ledger.drops[0] = 5  # control loss at the egress: no attempt at h=0
        assert set(ledger.fairness_curve()) == {1}


class TestUtilization:
    def test_single_reservation_fraction(self):
        # one directed link, W=1, one delivered 100 us burst in a 1 s window
        topo, ledger = single_link_ledger()
        routes = shortest_routes(topo)
        burst = make_burst(routes, duration=100 * US)
        ledger.record_offered(burst)
        burst.reservations.append((0, 0, 0, 100 * US))
        ledger.record_delivery(burst, 100 * US)
        ledger.window_start = 0
        ledger.window_end = 1 * SEC
        ledger._finalized = True
        delivered, wasted = ledger.utilization()
        assert delivered == pytest.approx(1e-4)
        assert wasted == 0.0

    def test_partition_sums_to_total(self):
        topo, ledger = single_link_ledger()
        routes = shortest_routes(topo)
        delivered = make_burst(routes, burst_id=0)
        delivered.reservations.append((0, 0, 0, 40))
        lost = make_burst(routes, burst_id=1)
        lost.hops_done = 0
        lost.reservations.append((0, 0, 50, 90))
        ledger.record_offered(delivered)
        ledger.record_offered(lost)
        ledger.record_delivery(delivered, 10)
        ledger.record_burst_loss(lost)
        ledger.finalize(clock=200)
        d, w, idle = ledger.link_partition(0)
        assert (d, w) == (40, 40)
        assert d + w + idle == ledger.window_length() * 1


class TestConservationAndGuards:
    def test_conservation_checked_at_finalize(self):
        topo, ledger = single_link_ledger()
        routes = shortest_routes(topo)
        burst = make_burst(routes)
        ledger.record_offered(burst)
        ledger.delivered += 1  # tamper: delivery without decrementing alive
        with pytest.raises(ProtocolInvariantError):
            ledger.finalize(clock=10)

    def test_unmeasured_bursts_touch_no_counters(self):
        topo, ledger = single_link_ledger()
        routes = shortest_routes(topo)
        burst = make_burst(routes, measured=False)
        ledger.record_offered(burst)
        ledger.record_attempt(burst, 1)
        ledger.record_delivery(burst, 5)
        assert ledger.offered == 0
        assert ledger.delivered == 0
        assert dict(ledger.attempts) == {}

    def test_in_flight_counts_unresolved(self):
        topo, ledger = single_link_ledger()
        routes = shortest_routes(topo)
        ledger.record_offered(make_burst(routes, burst_id=0))
        ledger.record_offered(make_burst(routes, burst_id=1))
        ledger.finalize(clock=10)
        assert ledger.in_flight == 2

    def test_window_extends_to_latest_reservation(self):
        topo, ledger = single_link_ledger()
        routes = shortest_routes(topo)
        lost = make_burst(routes)
        lost.hops_done = 0
        lost.reservations.append((0, 0, 100, 5000))
        ledger.record_offered(lost)
        ledger.record_burst_loss(lost)
        ledger.finalize(clock=300)  # loss event fired before the interval ended
        assert ledger.window_end == 5000


class TestAggregation:
    def test_halfwidth_requires_two_replications(self):
        assert student_t_halfwidth([1.0]) is None
        assert student_t_halfwidth([]) is None

    def test_halfwidth_matches_t_quantile(self):
        # n=5, sample std 1, mean CI half-width = t_{.975,4}/sqrt(5)
        values = [-2.0, -1.0, 0.0, 1.0, 2.0]  # std = sqrt(2.5)
        from scipy import stats
        expected = stats.t.ppf(0.975, 4) * (2.5 / 5) ** 0.5
        assert student_t_halfwidth(values) == pytest.approx(expected)

    def test_aggregate_counts_and_means(self):
        base = {
            "offered": 100, "delivered": 90, "lost_burst": 6, "lost_bcp": 4,
            "in_flight": 0, "loss_total": 0.1, "loss_burst": 0.06, "loss_bcp": 0.04,
            "utilization": 0.3, "utilization_wasted": 0.01, "mean_delay_ps": 5e9,
            "hops": {1: (50, 5), 2: (50, 5)},
        }
        other = dict(base)
        other.update(loss_total=0.2, loss_burst=0.12, loss_bcp=0.08,
                     hops={1: (40, 8), 2: (60, 2)})
        agg = aggregate_replications([base, other])
        assert agg["offered"] == 200
        assert agg["loss_total"] == pytest.approx(0.15)
        assert agg["ci_loss_total"] > 0
        assert agg["hops"][1]["attempts"] == 90
        assert agg["hops"][1]["drops"] == 13
        assert agg["hops"][1]["loss"] == pytest.approx((5 / 50 + 8 / 40) / 2)

    def test_interval_overlap_helper(self):
        assert intervals_overlap(1.0, 0.2, 1.3, 0.2)
        assert not intervals_overlap(1.0, 0.1, 1.3, 0.1)
        assert intervals_overlap(1.0, None, 1.0, None)


class TestFullRunPartition:
    def test_wavelength_time_partition_over_a_run(self):
        routes = shortest_routes(build_nsfnet(), require_complete=True)
        kernel = Kernel()
        ledger = MetricsLedger(routes.topology)
        spec = LoadSpec(0.8)
        net = build_network(
            kernel, routes, ArchitectureParams(Architecture.C_OBS), spec, ledger
        )
        gen = TrafficGenerator(
            kernel, routes, spec, 32, net.ingress_emit, 20_000,
            warmup_bursts=2_000, master_seed=13,
        )
        gen.start()
        kernel.run_to_exhaustion()
        ledger.finalize(kernel.now)
        assert ledger.in_flight == 0
        window = ledger.window_length()
        for link in routes.topology.links:
            d, w, idle = ledger.link_partition(link.id)
            assert d >= 0 and w >= 0 and idle >= 0
            assert d + w + idle == window * link.wavelengths
        util, wasted = ledger.utilization()
        assert 0 < util < 1
        assert 0 < wasted < util
