import pytest

from dcfsim.config import ScenarioConfig
from dcfsim.engine import MS, S, US
from dcfsim.metrics import (RunMetrics, effective_data_rate, nearest_rank, packet_loss_rate,
                            rtt_summary)
from dcfsim.simulation import Simulation


def test_effective_data_rate_example():
    m = RunMetrics(n_succpacket=4750, payload_bytes=512, t_start=0, t_end=50 * S)
    assert effective_data_rate(m) == 389_120
    assert effective_data_rate(m, payload_bytes=1024) == 2 * 389_120


def test_effective_data_rate_zero():
    assert effective_data_rate(RunMetrics(payload_bytes=512, t_end=S)) == 0


def test_zero_duration_rejected():
    with pytest.raises(ValueError):
        effective_data_rate(RunMetrics(n_succpacket=1, payload_bytes=1))


def test_loss_rate():
    assert packet_loss_rate(RunMetrics(sent_total=5000, dropped_retry=200, dropped_overflow=50)) == 0.05
    assert packet_loss_rate(RunMetrics(sent_total=10)) == 0
    with pytest.raises(ValueError):
        packet_loss_rate(RunMetrics())


def test_rate_decreases_with_drops():
    rates = [effective_data_rate(RunMetrics(sent_total=100, n_succpacket=100 - d, dropped_retry=d,
                                            payload_bytes=512, t_end=S)) for d in range(5)]
    assert rates == sorted(rates, reverse=True) and len(set(rates)) == 5


def test_rtt_single_sample():
    r = rtt_summary(RunMetrics(rtt_samples=[10 * MS]))
    assert r.mean == r.p50 == r.p95 == r.max == 10 * MS


def test_rtt_no_data():
    assert not rtt_summary(RunMetrics()).has_data
    assert rtt_summary(RunMetrics()).us("mean") is None


def test_nearest_rank():
    xs = list(range(1, 101))
    assert nearest_rank(xs, 50) == 50 and nearest_rank(xs, 95) == 95 and nearest_rank(xs, 0) == 1


def zero_backoff_rtt(corrupt=None):
    sim = Simulation(ScenarioConfig(n_hosts=2, packets_per_host=0), draw=lambda cw: 0, corrupt=corrupt)
    sim.inject_request(0, 1, 10 * MS)
    m = sim.run()
    assert m.n_succpacket == 1
    return m.rtt_samples


def test_zero_backoff_rtt_exact():
    assert zero_backoff_rtt() == [4 * (50 + 2352 + 10 + 304) * US]


def test_one_retransmission_on_hop1():
    hit = []

    def first_data(tx):
        if not hit and tx.frame.kind.value == "data":
            hit.append(tx)
            return True
        return False

    (rtt,) = zero_backoff_rtt(first_data)
    timeout, difs, backoff, t_data = 334 * US, 50 * US, 0, 2352 * US
    assert rtt == 10_864 * US + timeout + difs + backoff + t_data


def test_zero_contention_run():
    m = Simulation(ScenarioConfig(n_hosts=2, interval_s=1.0), seed=1).run()
    assert packet_loss_rate(m) == 0 and m.collided_tx == 0 and m.conserved()
