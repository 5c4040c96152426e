"""Hosts and the access point above the MAC: traffic, relay, echo and mobility."""

import enum
import math
from dataclasses import dataclass, replace
from typing import NamedTuple

from .engine import S, SimulationError
from .mac import (CancelTimer, Dcf, Deliver, Drop, Frame, FrameKind, RESPOND, SetTimer,
                  Success, Transmit)


class StationKind(enum.Enum):
    HOST = "host"
    ACCESS_POINT = "ap"


@dataclass(frozen=True)
class TrafficConfig:
    generation_interval: float = 0.1  # s
    packets_per_host: int = 500
    payload_bytes: int = 512

    def __post_init__(self):
        if self.generation_interval <= 0:
            raise ValueError("generation_interval must be > 0")
        if self.packets_per_host < 0:
            raise ValueError("packets_per_host must be >= 0")
        if not 0 <= self.payload_bytes <= 1500:
            raise ValueError(f"payload_bytes {self.payload_bytes} outside [0, 1500]")


@dataclass(frozen=True)
class AppPacket:
    """Application descriptor carried inside a data frame.

    ``target`` is the final destination of a request; the MAC destination of
    the first hop is always the AP.
    """
    tag: int
    kind: str  # "request", "reply" or "saturation"
    origin: int
    target: int
    created: int  # ns
    payload_bytes: int

    def final_destination(self):
        return self.origin if self.kind == "reply" else self.target


def pick_destination(self_idx, n, rng):
    """Uniform choice among the other ``n - 1`` hosts."""
    if n < 2:
        raise ValueError("need at least two hosts")
    j = int(rng.integers(0, n - 1))
    return j + 1 if j >= self_idx else j


# application-level actions

class Enqueue(NamedTuple):
    frame: Frame


class RttSample(NamedTuple):
    tag: int
    rtt: int  # ns


class Resolved(NamedTuple):
    tag: int


def app_receive(addr, kind, frame, now, ap_addr, rtt_mode="ping"):
    """React to a data frame handed up by the MAC of station ``addr``."""
    app = frame.app
    if app is None or app.kind not in ("request", "reply", "saturation"):
        raise SimulationError(f"station {addr}: malformed relay descriptor in {frame!r}")
    if kind is StationKind.ACCESS_POINT:
        if app.kind == "saturation":
            return [Resolved(app.tag)]
        dst = app.final_destination()
        if dst == ap_addr:
            raise SimulationError(f"relay descriptor of {frame!r} points back at the AP")
        relay = Frame(FrameKind.DATA, ap_addr, dst, payload_bytes=frame.payload_bytes, app=app)
        return [Enqueue(relay)]
    if app.final_destination() != addr:
        raise SimulationError(f"host {addr} got {frame!r} meant for {app.final_destination()}")
    if app.kind == "request":
        if rtt_mode != "ping":
            return [Resolved(app.tag)]
        reply_app = replace(app, kind="reply")
        reply = Frame(FrameKind.DATA, addr, ap_addr, payload_bytes=app.payload_bytes, app=reply_app)
        return [Enqueue(reply)]
    if app.kind == "reply":
        return [RttSample(app.tag, now - app.created), Resolved(app.tag)]
    raise SimulationError(f"host {addr} received saturation traffic {frame!r}")


@dataclass(frozen=True)
class MobilityState:
    x: float
    y: float
    speed: float  # m/s
    heading: float  # rad
    epoch_left: float  # s until speed and heading are redrawn


MEAN_SPEED = 20.0
SPEED_STD = 8.0


def draw_speed(rng, mean=MEAN_SPEED, std=SPEED_STD):
    return abs(float(rng.normal(mean, std)))


def _reflect(pos, vel, size):
    # fold an unbounded coordinate back into [0, size]
    period = 2.0 * size
    pos = math.fmod(pos, period)
    if pos < 0:
        pos += period
    if pos > size:
        return period - pos, -vel
    return pos, vel


def mobility_step(m, dt, rng, size=200.0, epoch=1.0, mean=MEAN_SPEED, std=SPEED_STD):
    """Advance a random-direction walk by ``dt`` seconds, reflecting at the walls."""
    if dt < 0:
        raise ValueError("dt must be >= 0")
    x, y, speed, heading, left = m.x, m.y, m.speed, m.heading, m.epoch_left
    while dt > 0:
        step = min(dt, left)
        vx = speed * math.cos(heading)
        vy = speed * math.sin(heading)
        x, vx = _reflect(x + vx * step, vx, size)
        y, vy = _reflect(y + vy * step, vy, size)
        heading = math.atan2(vy, vx)
        dt -= step
        left -= step
        if left <= 0:
            speed = draw_speed(rng, mean, std)
            heading = float(rng.uniform(0.0, 2.0 * math.pi))
            left = epoch
    return MobilityState(x, y, speed, heading, left)


class Station:
    """One node: a DCF MAC plus the application behaviour of a host or the AP."""

    def __init__(self, sim, addr, kind, mac, mobility=None, rng_traffic=None, rng_mobility=None):
        self.sim = sim
        self.addr = addr
        self.kind = kind
        self.mac = mac
        self.mobility = mobility
        self.rng_traffic = rng_traffic
        self.rng_mobility = rng_mobility
        self._timers = {}
        self.generated = 0

    # channel callbacks

    def on_busy(self, now):
        acts = self.mac.medium_busy(now)
        if acts:
            self._run(acts, now)

    def on_idle(self, now, after_collision):
        acts = self.mac.medium_idle(now, after_collision)
        if acts:
            self._run(acts, now)

    def on_tx_end(self, now):
        self._run(self.mac.tx_end(now), now)

    def on_receive(self, frame, now):
        acts = self.mac.receive(frame, now)
        if acts:
            self._run(acts, now)

    # scheduler callback

    def handle(self, ev):
        now = ev.fire_at
        kind = ev.kind
        if kind == "timer":
            del self._timers[ev.data]
            self._run(self.mac.timer(ev.data, now), now)
        elif kind == "gen":
            self.sim.generate(self, now)
        elif kind == "move":
            dt = ev.data
            self.mobility = mobility_step(self.mobility, dt, self.rng_mobility,
                                          **self.sim.mobility_kwargs)
            self.sim.sched.at(now + int(dt * S), self, "move", dt)
        else:
            raise SimulationError(f"station {self.addr}: unknown event {kind!r}")

    def enqueue(self, frame, now):
        self.sim.on_hop_offered(frame)
        self._run(self.mac.enqueue(frame, now), now)

    def _run(self, acts, now):
        sim = self.sim
        trace = sim.mac_trace
        before = self.mac.phase if trace is not None else None
        for a in acts:
            t = type(a)
            if t is SetTimer:
                old = self._timers.get(a.name)
                if old is not None:
                    sim.sched.cancel(old)
                self._timers[a.name] = sim.sched.at(a.at, self, "timer", a.name)
                if a.name == RESPOND:
                    sim.channel.reserve()
            elif t is CancelTimer:
                ev = self._timers.pop(a.name, None)
                if ev is not None:
                    sim.sched.cancel(ev)
            elif t is Transmit:
                sim.channel.begin_tx(self.addr, a.frame, now, a.airtime)
            elif t is Deliver:
                sim.on_hop_delivered(a.frame)
                for app_act in app_receive(self.addr, self.kind, a.frame, now, sim.ap_addr,
                                           sim.cfg.rtt_mode):
                    ta = type(app_act)
                    if ta is Enqueue:
                        self.enqueue(app_act.frame, now)
                    elif ta is RttSample:
                        sim.on_rtt(app_act.tag, app_act.rtt)
                    else:
                        sim.on_resolved(app_act.tag, now, delivered=True)
            elif t is Success:
                sim.on_hop_success(self, a.frame, now)
            elif t is Drop:
                sim.on_hop_dropped(self, a.frame, a.reason, now)
            else:
                raise SimulationError(f"station {self.addr}: unknown action {a!r}")
        if trace is not None and self.mac.phase is not before:
            trace(now, self.addr, before, self.mac.phase)
