"""Per-run counters and the three performance metrics."""

import math
from dataclasses import dataclass, field
from typing import List, Optional

from .engine import S, US


@dataclass
class RunMetrics:
    sent_total: int = 0
    n_succpacket: int = 0
    dropped_retry: int = 0
    dropped_overflow: int = 0
    unresolved: int = 0  # still outstanding at the max_sim_time cutoff
    t_start: int = 0  # ns
    t_end: int = 0  # ns
    rtt_samples: List[int] = field(default_factory=list)  # ns
    payload_bytes: int = 0
    transmissions: int = 0
    collided_tx: int = 0
    collision_events: int = 0
    collision_time: int = 0  # ns of channel time spent in collided busy periods
    cutoff: bool = False

    @property
    def dropped_total(self):
        # unresolved packets at the cutoff count as lost
        return self.dropped_retry + self.dropped_overflow + self.unresolved

    @property
    def duration(self):
        return self.t_end - self.t_start

    def conserved(self):
        return self.sent_total == (self.n_succpacket + self.dropped_retry
                                   + self.dropped_overflow + self.unresolved)

    def mean_collision_time(self):
        if not self.collision_events:
            return None
        return self.collision_time / self.collision_events


def effective_data_rate(m, payload_bytes=None):
    """Delivered payload per second, in bit/s."""
    if payload_bytes is None:
        payload_bytes = m.payload_bytes
    if m.t_end <= m.t_start:
        raise ValueError(f"zero-length run: t_start={m.t_start}, t_end={m.t_end}")
    return m.n_succpacket * payload_bytes * 8 / ((m.t_end - m.t_start) / S)


def packet_loss_rate(m):
    if m.sent_total <= 0:
        raise ValueError("no packets were sent")
    return m.dropped_total / m.sent_total


@dataclass(frozen=True)
class RttSummary:
    count: int
    mean: Optional[float] = None  # ns
    p50: Optional[int] = None
    p95: Optional[int] = None
    max: Optional[int] = None

    @property
    def has_data(self):
        return self.count > 0

    def us(self, name):
        v = getattr(self, name)
        return None if v is None else v / US


NO_DATA = RttSummary(0)


def nearest_rank(sorted_samples, pct):
    rank = max(1, math.ceil(pct / 100 * len(sorted_samples)))
    return sorted_samples[rank - 1]


def rtt_summary(m):
    samples = sorted(m.rtt_samples)
    if not samples:
        return NO_DATA
    return RttSummary(
        count=len(samples),
        mean=sum(samples) / len(samples),
        p50=nearest_rank(samples, 50),
        p95=nearest_rank(samples, 95),
        max=samples[-1],
    )
