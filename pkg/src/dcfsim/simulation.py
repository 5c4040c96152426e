"""One seeded run of the infrastructure WLAN: n hosts and an AP on one channel.

Random streams: the run seed feeds ``numpy.random.SeedSequence`` and every
station draws from its own children keyed by ``(role, index, stream)``, with
role 0 for hosts and 1 for the AP, and stream 0 traffic, 1 backoff,
2 mobility. Adding a host leaves every other station's draws unchanged.
"""

import math

import numpy as np

from .channel import Channel
from .engine import S, Scheduler, SimulationError, to_ns
from .mac import Dcf, Frame, FrameKind
from .metrics import RunMetrics
from .station import AppPacket, MobilityState, Station, StationKind, draw_speed, pick_destination

HOST, AP = 0, 1
TRAFFIC, BACKOFF, MOBILITY = 0, 1, 2


def stream(seed, role, index, kind):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(role, index, kind)))


class Simulation:
    """Wire up scheduler, channel and stations for ``cfg``; call :meth:`run`.

    ``draw`` replaces every station's backoff draw (``draw(cw) -> slots``) and
    ``corrupt`` marks chosen transmissions as lost; both are test hooks.
    ``trace(tx, outcome)`` and ``mac_trace(now, addr, old, new)`` observe the run.
    """

    def __init__(self, cfg, seed=None, draw=None, corrupt=None, trace=None, mac_trace=None):
        self.cfg = cfg
        self.seed = cfg.seed if seed is None else seed
        self.sched = Scheduler()
        self.channel = Channel(self.sched, trace=trace, corrupt=corrupt)
        self.mac_trace = mac_trace
        self.params = cfg.mac_params()
        self.limit = to_ns(cfg.max_sim_time_s)
        self.interval = to_ns(cfg.interval_s)
        self.mobility_kwargs = dict(size=cfg.playground_m, epoch=cfg.mobility_epoch_s,
                                    mean=cfg.speed_mean_mps, std=cfg.speed_std_mps)
        n = cfg.n_hosts
        self.ap_addr = n
        self.hosts = []
        for i in range(n):
            mac = Dcf(i, self.params, rng=stream(self.seed, HOST, i, BACKOFF),
                      queue_capacity=cfg.queue_capacity, draw=draw)
            mrng = stream(self.seed, HOST, i, MOBILITY)
            size = cfg.playground_m
            mob = MobilityState(float(mrng.uniform(0, size)), float(mrng.uniform(0, size)),
                                draw_speed(mrng, cfg.speed_mean_mps, cfg.speed_std_mps),
                                float(mrng.uniform(0, 2 * math.pi)), cfg.mobility_epoch_s)
            st = Station(self, i, StationKind.HOST, mac, mobility=mob,
                         rng_traffic=stream(self.seed, HOST, i, TRAFFIC), rng_mobility=mrng)
            self.hosts.append(st)
            self.channel.attach(st)
        ap_mac = Dcf(self.ap_addr, self.params, rng=stream(self.seed, AP, 0, BACKOFF),
                     queue_capacity=cfg.queue_capacity, draw=draw)
        centre = cfg.playground_m / 2
        self.ap = Station(self, self.ap_addr, StationKind.ACCESS_POINT, ap_mac,
                          mobility=MobilityState(centre, centre, 0.0, 0.0, math.inf))
        self.channel.attach(self.ap)
        self.stations = self.hosts + [self.ap]

        self.outstanding = {}
        self._next_tag = 0
        self._to_generate = 0
        self._done = False
        self.metrics = RunMetrics(payload_bytes=cfg.payload_bytes)
        self._t_start = None
        self._t_last = 0
        self.hop_offered = 0
        self.hop_success = 0
        self.hop_dropped = {"retry": 0, "overflow": 0}
        self.hop_delivered = 0
        self._started = False

    # -- traffic ---------------------------------------------------------

    def _start_traffic(self):
        cfg = self.cfg
        if cfg.traffic == "saturated":
            self._t_start = 0
            for h in self.hosts:
                self._saturate(h, 0)
        else:
            for h in self.hosts:
                if cfg.packets_per_host == 0:
                    continue
                first = int(h.rng_traffic.random() * self.interval)
                self._to_generate += cfg.packets_per_host
                self.sched.at(first, h, "gen")
        tick = cfg.mobility_tick_s
        for h in self.hosts:
            self.sched.at(to_ns(tick), h, "move", tick)

    def generate(self, host, now):
        cfg = self.cfg
        dst = pick_destination(host.addr, cfg.n_hosts, host.rng_traffic)
        self.send_request(host, dst, now)
        host.generated += 1
        self._to_generate -= 1
        if host.generated < cfg.packets_per_host:
            self.sched.at(now + self.interval, host, "gen")
        else:
            self._check_done()

    def send_request(self, host, dst, now):
        tag = self._new_packet(now)
        app = AppPacket(tag, "request", host.addr, dst, now, self.cfg.payload_bytes)
        self.outstanding[tag] = app
        host.enqueue(Frame(FrameKind.DATA, host.addr, self.ap_addr,
                           payload_bytes=self.cfg.payload_bytes, app=app), now)
        return tag

    def inject_request(self, src, dst, at):
        """Schedule one extra request from host ``src`` to host ``dst`` at time ``at``."""
        self._to_generate += 1

        class _Once:
            def handle(_, ev):
                self._to_generate -= 1
                self.send_request(self.hosts[src], dst, ev.fire_at)

        self.sched.at(at, _Once(), "inject")

    def _new_packet(self, now):
        tag = self._next_tag
        self._next_tag += 1
        self.metrics.sent_total += 1
        if self._t_start is None:
            self._t_start = now
        return tag

    def _saturate(self, host, now):
        if now >= self.limit:
            return
        tag = self._new_packet(now)
        app = AppPacket(tag, "saturation", host.addr, self.ap_addr, now, self.cfg.payload_bytes)
        self.outstanding[tag] = app
        host.enqueue(Frame(FrameKind.DATA, host.addr, self.ap_addr,
                           payload_bytes=self.cfg.payload_bytes, app=app), now)

    # -- callbacks from stations -----------------------------------------

    def on_hop_offered(self, frame):
        self.hop_offered += 1

    def on_hop_delivered(self, frame):
        self.hop_delivered += 1

    def on_hop_success(self, station, frame, now):
        self.hop_success += 1
        app = frame.app
        if app.kind == "saturation":
            self._saturate(station, now)
        elif (self.cfg.rtt_mode == "mac_ack" and app.kind == "request"
              and station.addr == app.origin):
            self.metrics.rtt_samples.append(now - app.created)

    def on_hop_dropped(self, station, frame, reason, now):
        self.hop_dropped[reason] += 1
        app = frame.app
        if app.tag in self.outstanding:
            self._resolve(app.tag, now, reason)
        if app.kind == "saturation":
            self._saturate(station, now)

    def on_rtt(self, tag, rtt):
        if tag in self.outstanding:
            self.metrics.rtt_samples.append(rtt)

    def on_resolved(self, tag, now, delivered=True):
        if tag in self.outstanding:
            self._resolve(tag, now, "delivered")

    def _resolve(self, tag, now, how):
        del self.outstanding[tag]
        m = self.metrics
        if how == "delivered":
            m.n_succpacket += 1
        elif how == "retry":
            m.dropped_retry += 1
        elif how == "overflow":
            m.dropped_overflow += 1
        else:
            raise SimulationError(f"unknown resolution {how!r}")
        self._t_last = now
        self._check_done()

    def _check_done(self):
        if self.cfg.traffic == "periodic" and self._to_generate == 0 and not self.outstanding:
            self._done = True

    # -- main loop -------------------------------------------------------

    def run(self):
        if self._started:
            raise SimulationError("a Simulation runs once")
        self._started = True
        self._start_traffic()
        self._check_done()
        sched = self.sched
        limit = self.limit
        cutoff = False
        while not self._done:
            t = sched.peek_time()
            if t is None:
                break
            if t > limit:
                cutoff = True
                break
            ev = sched.pop_next()
            ev.target.handle(ev)
        if self._to_generate and not cutoff:
            raise SimulationError("event set drained before all traffic was generated")
        return self._finish(cutoff)

    def _finish(self, cutoff):
        m = self.metrics
        ch = self.channel
        m.transmissions = ch.transmissions
        m.collided_tx = ch.collided_tx
        m.collision_events = ch.collision_events
        m.collision_time = ch.collision_time
        m.cutoff = cutoff or bool(self.outstanding)
        m.t_start = self._t_start or 0
        saturated = self.cfg.traffic == "saturated"
        m.t_end = self.limit if (cutoff or saturated) else self._t_last
        m.unresolved = len(self.outstanding)
        if self.cfg.loss_accounting == "hop":
            queued = sum(st.mac.pending() for st in self.stations)
            m.sent_total = self.hop_offered
            m.n_succpacket = self.hop_success
            m.dropped_retry = self.hop_dropped["retry"]
            m.dropped_overflow = self.hop_dropped["overflow"]
            m.unresolved = queued
        return m


def run_scenario(cfg, seed=None, **hooks):
    return Simulation(cfg, seed=seed, **hooks).run()
