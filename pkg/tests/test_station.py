import numpy as np
import pytest
from scipy.stats import chi2

from dcfsim.config import ScenarioConfig
from dcfsim.engine import MS, SimulationError
from dcfsim.mac import Frame, FrameKind
from dcfsim.simulation import Simulation
from dcfsim.station import (AppPacket, Enqueue, MobilityState, Resolved, RttSample, StationKind,
                            app_receive, draw_speed, mobility_step, pick_destination)

AP = 10


def test_two_hosts_always_other():
    rng = np.random.default_rng(1)
    assert {pick_destination(0, 2, rng) for _ in range(100)} == {1}


def test_never_self():
    rng = np.random.default_rng(2)
    assert all(pick_destination(4, 10, rng) != 4 for _ in range(10 ** 5))


def test_destination_uniform():
    rng = np.random.default_rng(3)
    draws = np.array([pick_destination(3, 10, rng) for _ in range(90_000)])
    counts = np.delete(np.bincount(draws, minlength=10), 3)
    expected = len(draws) / 9
    assert ((counts - expected) ** 2 / expected).sum() < chi2.ppf(0.999, 8)


def request(tag=42, origin=3, target=7, created=0):
    return AppPacket(tag, "request", origin, target, created, 512)


def test_ap_relays_toward_final_destination():
    f = Frame(FrameKind.DATA, 3, AP, payload_bytes=512, app=request())
    (act,) = app_receive(AP, StationKind.ACCESS_POINT, f, 0, AP)
    assert isinstance(act, Enqueue) and act.frame.dst == 7 and act.frame.src == AP


def test_host_echoes_request():
    f = Frame(FrameKind.DATA, AP, 7, payload_bytes=512, app=request())
    (act,) = app_receive(7, StationKind.HOST, f, 0, AP)
    reply = act.frame
    assert reply.app.kind == "reply" and reply.app_tag == 42
    assert reply.payload_bytes == 512 and reply.dst == AP
    assert reply.app.final_destination() == 3


def test_host_records_rtt_on_reply():
    app = AppPacket(42, "reply", 3, 7, 1000, 512)
    f = Frame(FrameKind.DATA, AP, 3, payload_bytes=512, app=app)
    acts = app_receive(3, StationKind.HOST, f, 5000, AP)
    assert acts == [RttSample(42, 4000), Resolved(42)]


def test_malformed_descriptor():
    with pytest.raises(SimulationError):
        app_receive(3, StationKind.HOST, Frame(FrameKind.DATA, AP, 3), 0, AP)


def test_mobility_dt_zero():
    m = MobilityState(10.0, 20.0, 5.0, 1.0, 0.5)
    assert mobility_step(m, 0.0, np.random.default_rng(0)) == m


def test_mobility_stays_in_playground():
    rng = np.random.default_rng(4)
    m = MobilityState(100.0, 100.0, draw_speed(rng), 0.3, 1.0)
    for _ in range(10 ** 4):
        m = mobility_step(m, 0.7, rng)
        assert 0 <= m.x <= 200 and 0 <= m.y <= 200
        assert m.speed >= 0


def test_speeds_nonnegative():
    rng = np.random.default_rng(5)
    assert min(draw_speed(rng) for _ in range(10 ** 4)) >= 0


def test_ap_has_no_own_traffic_and_exact_generation_count():
    cfg = ScenarioConfig(n_hosts=3, interval_s=1.0, packets_per_host=7)
    sim = Simulation(cfg, seed=3)
    m = sim.run()
    assert [h.generated for h in sim.hosts] == [7, 7, 7]
    assert sim.ap.generated == 0
    assert m.sent_total == 21


def test_ping_flow_four_hops():
    cfg = ScenarioConfig(n_hosts=2, packets_per_host=0)
    seen = []
    sim = Simulation(cfg, draw=lambda cw: 0,
                     trace=lambda tx, o: seen.append((tx.source, tx.frame.dst, tx.frame.kind)))
    sim.inject_request(0, 1, 10 * MS)
    sim.run()
    data = [(s, d) for s, d, k in seen if k is FrameKind.DATA]
    assert data == [(0, 2), (2, 1), (1, 2), (2, 0)]
    acks = [k for *_, k in seen].count(FrameKind.ACK)
    assert acks == 4
