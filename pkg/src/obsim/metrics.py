"""Loss, fairness, delay and resource-utilization accounting.

One ledger per replication.  Counters cover only bursts created inside the
measurement window (the generator flags warm-up bursts as unmeasured).
Wavelength-time is partitioned exactly into reserved-by-delivered,
reserved-by-lost (wasted) and idle; the utilization denominator always
counts every wavelength of every link, so an architecture that dedicates a
control wavelength pays for it in this metric.
"""

from __future__ import annotations

import math
from collections import defaultdict
from typing import Optional

from .errors import ProtocolInvariantError
from .topology import Topology
from .traffic import Burst


class MetricsLedger:
    """Counters and accumulators for one replication."""

    def __init__(self, topology: Topology):
        self.topology = topology
        self.offered = 0
        self.delivered = 0
        self.lost_burst = 0
        self.lost_bcp = 0
        self.attempts = defaultdict(int)  # remaining hops -> reservation attempts
        self.drops = defaultdict(int)  # remaining hops -> losses
        self.delay_sum = 0
        # wavelength-time accumulators, per (link id, channel)
        self.reserved_delivered = defaultdict(int)
        self.reserved_wasted = defaultdict(int)
        self._reserved_delivered_total = 0
        self._reserved_wasted_total = 0
        self._alive = 0
        self.window_start: Optional[int] = None
        self.window_end: Optional[int] = None
        self._max_reservation_end = 0
        self._finalized = False

    # -- recording --------------------------------------------------------

    def record_offered(self, burst: Burst) -> None:
        if not burst.measured:
            return
        if self.window_start is None:
            self.window_start = burst.created_at
        self.offered += 1
        self._alive += 1

    def record_attempt(self, burst: Burst, remaining_hops: int) -> None:
        if burst.measured:
            self.attempts[remaining_hops] += 1

    def _absorb_reservations(self, burst: Burst, delivered: bool) -> None:
        bucket = self.reserved_delivered if delivered else self.reserved_wasted
        total = 0
        for link_id, channel, start, end in burst.reservations:
            bucket[(link_id, channel)] += end - start
            total += end - start
            if end > self._max_reservation_end:
                self._max_reservation_end = end
        if delivered:
            self._reserved_delivered_total += total
        else:
            self._reserved_wasted_total += total

    def _record_loss(self, burst: Burst) -> None:
        remaining = burst.route.hop_count - burst.hops_done
        self.drops[remaining] += 1
        self._alive -= 1
        self._absorb_reservations(burst, delivered=False)

    def record_burst_loss(self, burst: Burst) -> None:
        if not burst.measured:
            return
        self.lost_burst += 1
        self._record_loss(burst)

    def record_bcp_loss(self, burst: Burst) -> None:
        if not burst.measured:
            return
        self.lost_bcp += 1
        self._record_loss(burst)

    def record_delivery(self, burst: Burst, delay: int) -> None:
        if not burst.measured:
            return
        self.delivered += 1
        self.delay_sum += delay
        self._alive -= 1
        self._absorb_reservations(burst, delivered=True)

    def finalize(self, clock: int) -> None:
        """Close the measurement window and check conservation."""
        if self.offered and self._alive != self.offered - (
            self.delivered + self.lost_burst + self.lost_bcp
        ):
            raise ProtocolInvariantError("burst conservation violated")
        self.window_end = max(clock, self._max_reservation_end)
        self._finalized = True

    @property
    def in_flight(self) -> int:
        return self._alive

    # -- derived metrics ---------------------------------------------------

    def loss_probability(self):
        """(total, burst-contention, control-contention) loss probabilities,
        or None when nothing was offered."""
        if self.offered == 0:
            return None
        total = (self.lost_burst + self.lost_bcp) / self.offered
        return total, self.lost_burst / self.offered, self.lost_bcp / self.offered

    def fairness_curve(self) -> dict:
        """Loss probability conditioned on the number of remaining hops;
        hop counts with no attempts are omitted."""
        return {
            h: self.drops[h] / self.attempts[h]
            for h in sorted(self.attempts)
            if self.attempts[h] > 0
        }

    def window_length(self) -> int:
        if self.window_start is None or self.window_end is None:
            return 0
        return max(0, self.window_end - self.window_start)

    def total_capacity(self) -> int:
        """Wavelength-time available in the window over every link and every
        wavelength, control wavelengths included."""
        window = self.window_length()
        return window * sum(link.wavelengths for link in self.topology.links)

    def utilization(self):
        """(delivered fraction, wasted fraction) of total wavelength-time."""
        capacity = self.total_capacity()
        if capacity == 0:
            return 0.0, 0.0
        return (
            self._reserved_delivered_total / capacity,
            self._reserved_wasted_total / capacity,
        )

    def link_partition(self, link_id: int):
        """(delivered, wasted, idle) wavelength-time for one link; the three
        parts sum exactly to the link's wavelength-time in the window."""
        delivered = sum(
            v for (l, _), v in self.reserved_delivered.items() if l == link_id
        )
        wasted = sum(v for (l, _), v in self.reserved_wasted.items() if l == link_id)
        total = self.window_length() * self.topology.links[link_id].wavelengths
        return delivered, wasted, total - delivered - wasted

    def mean_delay(self) -> Optional[float]:
        if self.delivered == 0:
            return None
        return self.delay_sum / self.delivered

    def summary(self) -> dict:
        """Plain-value snapshot used for aggregation and serialization."""
        loss = self.loss_probability()
        util_delivered, util_wasted = self.utilization()
        return {
            "offered": self.offered,
            "delivered": self.delivered,
            "lost_burst": self.lost_burst,
            "lost_bcp": self.lost_bcp,
            "in_flight": self.in_flight,
            "loss_total": loss[0] if loss else None,
            "loss_burst": loss[1] if loss else None,
            "loss_bcp": loss[2] if loss else None,
            "utilization": util_delivered,
            "utilization_wasted": util_wasted,
            "mean_delay_ps": self.mean_delay(),
            "hops": {h: (self.attempts[h], self.drops[h]) for h in sorted(self.attempts)},
        }


def student_t_halfwidth(values, confidence: float = 0.95) -> Optional[float]:
    """Half-width of the two-sided confidence interval of the mean across
    replications; None with fewer than two values."""
    xs = [v for v in values if v is not None]
    n = len(xs)
    if n < 2:
        return None
    mean = sum(xs) / n
    var = sum((x - mean) ** 2 for x in xs) / (n - 1)
    if var == 0:
        return 0.0
    from scipy import stats  # deferred: workers never need it

    quantile = stats.t.ppf(0.5 + confidence / 2.0, n - 1)
    return float(quantile * math.sqrt(var / n))


MEAN_METRICS = (
    "loss_total",
    "loss_burst",
    "loss_bcp",
    "utilization",
    "utilization_wasted",
    "mean_delay_ps",
)


def aggregate_replications(summaries) -> dict:
    """Fold per-replication summaries into means plus CI half-widths.

    Count fields are summed; probability and delay fields are averaged with
    a Student-t confidence interval across replications.
    """
    if not summaries:
        raise ValueError("nothing to aggregate")
    agg = {
        "offered": sum(s["offered"] for s in summaries),
        "delivered": sum(s["delivered"] for s in summaries),
        "lost_burst": sum(s["lost_burst"] for s in summaries),
        "lost_bcp": sum(s["lost_bcp"] for s in summaries),
        "in_flight": sum(s["in_flight"] for s in summaries),
        "replications": len(summaries),
    }
    for key in MEAN_METRICS:
        values = [s[key] for s in summaries if s[key] is not None]
        agg[key] = sum(values) / len(values) if values else None
        agg["ci_" + key] = student_t_halfwidth(values)
    hops = defaultdict(lambda: [0, 0, []])
    for s in summaries:
        for h, (attempts, drops) in s["hops"].items():
            hops[h][0] += attempts
            hops[h][1] += drops
            if attempts > 0:
                hops[h][2].append(drops / attempts)
    agg["hops"] = {
        h: {
            "attempts": a,
            "drops": d,
            "loss": sum(ratios) / len(ratios) if ratios else None,
            "ci_loss": student_t_halfwidth(ratios),
        }
        for h, (a, d, ratios) in sorted(hops.items())
    }
    return agg


def intervals_overlap(mean_a, half_a, mean_b, half_b) -> bool:
    """True when the two confidence intervals share at least one point;
    missing half-widths are treated as zero-width intervals."""
    ha = half_a or 0.0
    hb = half_b or 0.0
    return abs(mean_a - mean_b) <= ha + hb
