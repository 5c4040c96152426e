"""IEEE 802.11 DCF: backoff arithmetic, airtimes and the per-station state machine.

The :class:`Dcf` machine never touches the scheduler or the channel. Every
input method returns a list of actions (:class:`Transmit`, :class:`SetTimer`,
...) that the owning station carries out, so the machine can be driven
directly from tests.
"""

import enum
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

import numpy as np

from .engine import US, SimulationError

MAC_MTU = 1500


class AccessMethod(str, enum.Enum):
    BASIC = "basic"
    RTS_CTS = "rts_cts"


class FrameKind(enum.Enum):
    DATA = "data"
    ACK = "ack"
    RTS = "rts"
    CTS = "cts"


class Phase(enum.Enum):
    IDLE = "idle"
    WAIT_DIFS = "wait_difs"
    BACKOFF = "backoff"
    TRANSMITTING = "transmitting"
    AWAIT_CTS = "await_cts"
    AWAIT_ACK = "await_ack"
    POST_BACKOFF = "post_backoff"


_TX_PHASES = (Phase.TRANSMITTING, Phase.AWAIT_CTS, Phase.AWAIT_ACK)


class Frame:
    __slots__ = ("kind", "src", "dst", "payload_bytes", "duration", "seq", "app")

    def __init__(self, kind, src, dst, payload_bytes=0, duration=0, seq=0, app=None):
        self.kind = kind
        self.src = src
        self.dst = dst
        self.payload_bytes = payload_bytes
        self.duration = duration
        self.seq = seq
        self.app = app

    @property
    def app_tag(self):
        return None if self.app is None else self.app.tag

    def __repr__(self):
        return (f"Frame({self.kind.value}, {self.src}->{self.dst}, "
                f"{self.payload_bytes}B, seq={self.seq}, dur={self.duration})")


def _is_cw(v):
    return v >= 0 and (v + 1) & v == 0


@dataclass(frozen=True)
class MacParams:
    # durations in ns, rates in bit/s
    slot: int = 20 * US
    sifs: int = 10 * US
    difs: int = 50 * US
    cw_min: int = 31
    cw_max: int = 1023
    retry_limit: int = 7
    phy_header_bits: int = 192
    mac_header_bits: int = 224
    data_bitrate: int = 2_000_000
    basic_rate: int = 1_000_000
    access_method: AccessMethod = AccessMethod.BASIC
    ack_timeout_extra: Optional[int] = None  # defaults to one slot
    ack_bits: int = 112
    cts_bits: int = 112
    rts_bits: int = 160
    mtu: int = MAC_MTU
    use_eifs: bool = False
    # sense a fresh DIFS before an access that needs no backoff
    defer_on_arrival: bool = True

    def __post_init__(self):
        if not (_is_cw(self.cw_min) and _is_cw(self.cw_max)):
            raise ValueError(f"cw_min/cw_max must be 2^k-1, got {self.cw_min}/{self.cw_max}")
        if self.cw_min > self.cw_max:
            raise ValueError(f"cw_min {self.cw_min} exceeds cw_max {self.cw_max}")
        for name in ("slot", "sifs", "difs", "data_bitrate", "basic_rate"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.retry_limit < 0:
            raise ValueError("retry_limit must be >= 0")
        if self.ack_timeout_extra is None:
            object.__setattr__(self, "ack_timeout_extra", self.slot)
        elif self.ack_timeout_extra < 0:
            raise ValueError("ack_timeout_extra must be >= 0")
        object.__setattr__(self, "access_method", AccessMethod(self.access_method))


def draw_backoff(cw, rng):
    """Uniform integer on [0, cw]."""
    if cw < 0:
        raise ValueError("cw must be >= 0")
    if cw == 0:
        return 0
    return int(rng.integers(0, cw + 1))


def cw_after_failure(cw, cw_max):
    return min(2 * cw + 1, cw_max)


def cw_after_success(params):
    return params.cw_min


def _ceil_ns(bits_over_rate):
    return math.ceil(bits_over_rate)


def frame_airtime(kind, payload_bytes, params):
    """Airtime in ns. PHY preamble/header always goes at the basic rate."""
    kind = FrameKind(kind)
    phy = Fraction(params.phy_header_bits * 10**9, params.basic_rate)
    if kind is FrameKind.DATA:
        if payload_bytes < 0 or payload_bytes > params.mtu:
            raise ValueError(f"payload {payload_bytes} B outside [0, {params.mtu}]")
        body = Fraction((params.mac_header_bits + 8 * payload_bytes) * 10**9, params.data_bitrate)
    else:
        if payload_bytes:
            raise ValueError("control frames carry no payload")
        bits = {FrameKind.ACK: params.ack_bits, FrameKind.CTS: params.cts_bits,
                FrameKind.RTS: params.rts_bits}[kind]
        body = Fraction(bits * 10**9, params.basic_rate)
    return _ceil_ns(phy + body)


def ack_timeout(params):
    return params.sifs + frame_airtime(FrameKind.ACK, 0, params) + params.ack_timeout_extra


def cts_timeout(params):
    return params.sifs + frame_airtime(FrameKind.CTS, 0, params) + params.ack_timeout_extra


def nav_update(nav_until, duration_field, now):
    return max(nav_until, now + duration_field)


# actions emitted by Dcf

class Transmit(NamedTuple):
    frame: Frame
    airtime: int


class SetTimer(NamedTuple):
    name: str
    at: int


class CancelTimer(NamedTuple):
    name: str


class Deliver(NamedTuple):
    frame: Frame


class Success(NamedTuple):
    frame: Frame


class Drop(NamedTuple):
    frame: Frame
    reason: str  # "retry" or "overflow"


DIFS, BACKOFF, TIMEOUT, RESPOND, NAV = "difs", "backoff", "timeout", "respond", "nav"


class IllegalTransition(SimulationError):
    pass


class Dcf:
    """DCF state machine of one station.

    Inputs: :meth:`enqueue`, :meth:`medium_busy`, :meth:`medium_idle`,
    :meth:`timer`, :meth:`tx_end` and :meth:`receive`. Backoff is not driven
    by per-slot ticks; the machine arms a single timer at the slot boundary
    where the counter reaches zero and, when frozen, recovers the number of
    idle slots that elapsed since the countdown was anchored.
    """

    def __init__(self, addr, params, rng=None, queue_capacity=50, draw=None):
        self.addr = addr
        self.params = params
        if draw is None:
            if rng is None:
                raise ValueError("need an rng or a draw function")
            draw = lambda cw: draw_backoff(cw, rng)  # noqa: E731
        self.draw = draw
        self.queue_capacity = queue_capacity
        self.queue = deque()

        self.phase = Phase.IDLE
        self.head_of_queue = None
        self.cw_current = params.cw_min
        self.retry_count = 0
        self.backoff_remaining = None  # None: no backoff owed
        self.nav_until = 0
        self.timers = {}  # armed timer name -> fire time

        self.busy = False
        self.idle_since = 0
        self._anchor = 0
        self._draw_pending = False
        self._eifs = False
        self._tx = None
        self._response = None
        self._responding = None
        self._rx_up = None
        self._next_seq = 0
        self._last_rx_seq = {}

        p = params
        self._air_ack = frame_airtime(FrameKind.ACK, 0, p)
        self._air_cts = frame_airtime(FrameKind.CTS, 0, p)
        self._air_rts = frame_airtime(FrameKind.RTS, 0, p)
        self._ack_timeout = ack_timeout(p)
        self._cts_timeout = cts_timeout(p)
        self._eifs_len = p.sifs + self._air_ack + p.difs
        self._rts = p.access_method is AccessMethod.RTS_CTS

    # -- helpers ---------------------------------------------------------

    def medium_idle_at(self, now):
        return not self.busy and now >= self.nav_until

    def backoff_at(self, now):
        """Backoff slots still owed at ``now`` (counts idle slots already served)."""
        if self.backoff_remaining is None:
            return None
        if BACKOFF in self.timers:
            return self.backoff_remaining - (now - self._anchor) // self.params.slot
        return self.backoff_remaining

    def pending(self):
        return len(self.queue) + (self.head_of_queue is not None)

    def _arm(self, acts, name, at):
        self.timers[name] = at
        acts.append(SetTimer(name, at))

    def _disarm(self, acts, name):
        if self.timers.pop(name, None) is not None:
            acts.append(CancelTimer(name))

    def _settle(self):
        if self.phase in _TX_PHASES:
            return
        if self.head_of_queue is None:
            self.phase = Phase.IDLE if self.backoff_remaining is None else Phase.POST_BACKOFF
        else:
            self.phase = Phase.WAIT_DIFS if self.backoff_remaining is None else Phase.BACKOFF

    def _resume(self, now, acts):
        """Start (or keep) deferring toward an access once the medium is idle."""
        if self.phase in _TX_PHASES:
            return acts
        if self.head_of_queue is None and self.backoff_remaining is None:
            return acts
        if self.busy:
            return acts
        if now < self.nav_until:
            if self.timers.get(NAV) != self.nav_until:
                self._arm(acts, NAV, self.nav_until)
            return acts
        if DIFS in self.timers or BACKOFF in self.timers:
            return acts
        ifs = self._eifs_len if self._eifs else self.params.difs
        self._arm(acts, DIFS, now + ifs)
        return acts

    def _freeze(self, now, acts):
        at = self.timers.get(DIFS)
        if at is not None and at > now:
            self._disarm(acts, DIFS)
            if self.backoff_remaining is None and self.head_of_queue is not None:
                self._draw_pending = True
        at = self.timers.get(BACKOFF)
        if at is not None and at > now:
            self.backoff_remaining -= (now - self._anchor) // self.params.slot
            self._disarm(acts, BACKOFF)
        return acts

    def _start_countdown(self, now, acts):
        self._anchor = now
        if self.backoff_remaining == 0:
            return self._backoff_done(now, acts)
        if self.medium_idle_at(now):
            self._arm(acts, BACKOFF, now + self.backoff_remaining * self.params.slot)
        return acts

    def _backoff_done(self, now, acts):
        self.backoff_remaining = None
        if self.head_of_queue is None:
            self._settle()
            return acts
        return self._transmit(now, acts)

    def _transmit(self, now, acts):
        p = self.params
        data = self.head_of_queue
        if self._rts:
            air_data = frame_airtime(FrameKind.DATA, data.payload_bytes, p)
            duration = 3 * p.sifs + self._air_cts + air_data + self._air_ack
            frame = Frame(FrameKind.RTS, self.addr, data.dst, duration=duration, seq=data.seq)
            airtime = self._air_rts
        else:
            frame = data
            frame.duration = p.sifs + self._air_ack
            airtime = frame_airtime(FrameKind.DATA, data.payload_bytes, p)
        self.phase = Phase.TRANSMITTING
        self._tx = frame
        acts.append(Transmit(frame, airtime))
        return acts

    def _new_head(self):
        self.head_of_queue = self.queue.popleft() if self.queue else None

    def _after_exchange(self, now, acts):
        self.backoff_remaining = self.draw(self.cw_current)
        self._draw_pending = False
        self.phase = Phase.IDLE
        self._settle()
        return self._resume(now, acts)

    # -- inputs ----------------------------------------------------------

    def enqueue(self, frame, now):
        if self.pending() >= self.queue_capacity:
            return [Drop(frame, "overflow")]
        frame.seq = self._next_seq
        self._next_seq += 1
        if self.head_of_queue is not None:
            self.queue.append(frame)
            return []
        self.head_of_queue = frame
        acts = []
        if self.backoff_remaining is not None:
            # post-backoff in progress: the packet waits for it
            self._settle()
            return acts
        self._settle()
        if not self.medium_idle_at(now):
            self._draw_pending = True
            return self._resume(now, acts)
        if DIFS in self.timers:
            return acts
        p = self.params
        if p.defer_on_arrival:
            self._arm(acts, DIFS, now + p.difs)
            return acts
        idle_from = max(self.idle_since, self.nav_until)
        if now - idle_from >= p.difs:
            return self._transmit(now, acts)
        self._arm(acts, DIFS, idle_from + p.difs)
        return acts

    def medium_busy(self, now):
        self.busy = True
        if self.phase in _TX_PHASES:
            return []
        return self._freeze(now, [])

    def medium_idle(self, now, after_collision=False):
        self.busy = False
        self.idle_since = now
        self._eifs = self.params.use_eifs and after_collision
        return self._resume(now, [])

    def timer(self, name, now):
        at = self.timers.pop(name, None)
        if at is None or at != now:
            raise IllegalTransition(
                f"station {self.addr}: timer {name!r} fired at {now} in phase {self.phase.value} "
                f"(armed: {at})")
        acts = []
        if name == DIFS:
            self._eifs = False
            if self.backoff_remaining is None:
                if self.head_of_queue is None:
                    self._settle()
                    return acts
                if not self._draw_pending:
                    return self._transmit(now, acts)
                self._draw_pending = False
                self.backoff_remaining = self.draw(self.cw_current)
                self._settle()
            return self._start_countdown(now, acts)
        if name == BACKOFF:
            if self.phase not in (Phase.BACKOFF, Phase.POST_BACKOFF):
                raise IllegalTransition(f"station {self.addr}: backoff expiry in phase {self.phase.value}")
            self.backoff_remaining = 0
            return self._backoff_done(now, acts)
        if name == TIMEOUT:
            return self._failure(now, acts)
        if name == RESPOND:
            frame, self._response = self._response, None
            if frame.kind is FrameKind.DATA:
                if self.phase is not Phase.AWAIT_CTS:
                    raise IllegalTransition(f"station {self.addr}: data after CTS in phase {self.phase.value}")
                self.phase = Phase.TRANSMITTING
                self._tx = frame
            else:
                self._responding = frame
            acts.append(Transmit(frame, self._airtime(frame)))
            return acts
        if name == NAV:
            return self._resume(now, acts)
        raise IllegalTransition(f"station {self.addr}: unknown timer {name!r}")

    def _airtime(self, frame):
        if frame.kind is FrameKind.DATA:
            return frame_airtime(FrameKind.DATA, frame.payload_bytes, self.params)
        return {FrameKind.ACK: self._air_ack, FrameKind.CTS: self._air_cts,
                FrameKind.RTS: self._air_rts}[frame.kind]

    def tx_end(self, now):
        if self._responding is not None:
            frame, self._responding = self._responding, None
            if frame.kind is FrameKind.ACK and self._rx_up is not None:
                up, self._rx_up = self._rx_up, None
                return [Deliver(up)]
            return []
        if self.phase is not Phase.TRANSMITTING:
            raise IllegalTransition(f"station {self.addr}: tx_end in phase {self.phase.value}")
        acts = []
        if self._tx.kind is FrameKind.RTS:
            self.phase = Phase.AWAIT_CTS
            self._arm(acts, TIMEOUT, now + self._cts_timeout)
        else:
            self.phase = Phase.AWAIT_ACK
            self._arm(acts, TIMEOUT, now + self._ack_timeout)
        return acts

    def receive(self, frame, now):
        acts = []
        kind = frame.kind
        if frame.dst != self.addr:
            if kind is FrameKind.RTS or kind is FrameKind.CTS:
                self.nav_until = nav_update(self.nav_until, frame.duration, now)
                if not self.busy and self.phase not in _TX_PHASES:
                    self._freeze(now, acts)
                    self._resume(now, acts)
            return acts
        p = self.params
        if kind is FrameKind.DATA:
            if self._last_rx_seq.get(frame.src) != frame.seq:
                self._last_rx_seq[frame.src] = frame.seq
                self._rx_up = frame
            self._respond(Frame(FrameKind.ACK, self.addr, frame.src, seq=frame.seq), now, acts)
        elif kind is FrameKind.RTS:
            if now >= self.nav_until:
                cts = Frame(FrameKind.CTS, self.addr, frame.src, seq=frame.seq,
                            duration=frame.duration - p.sifs - self._air_cts)
                self._respond(cts, now, acts)
        elif kind is FrameKind.CTS:
            if self.phase is Phase.AWAIT_CTS and frame.seq == self._tx.seq:
                self._disarm(acts, TIMEOUT)
                data = self.head_of_queue
                data.duration = p.sifs + self._air_ack
                self._respond(data, now, acts)
        elif kind is FrameKind.ACK:
            head = self.head_of_queue
            if self.phase is Phase.AWAIT_ACK and head is not None and frame.seq == head.seq:
                self._disarm(acts, TIMEOUT)
                acts.append(Success(head))
                self.cw_current = cw_after_success(p)
                self.retry_count = 0
                self._new_head()
                self._after_exchange(now, acts)
        return acts

    def _respond(self, frame, now, acts):
        if self._response is not None or RESPOND in self.timers:
            raise IllegalTransition(f"station {self.addr}: overlapping SIFS responses")
        self._response = frame
        self._arm(acts, RESPOND, now + self.params.sifs)

    def _failure(self, now, acts):
        if self.phase not in (Phase.AWAIT_ACK, Phase.AWAIT_CTS):
            raise IllegalTransition(f"station {self.addr}: timeout in phase {self.phase.value}")
        p = self.params
        self.retry_count += 1
        if self.retry_count > p.retry_limit:
            acts.append(Drop(self.head_of_queue, "retry"))
            self.cw_current = cw_after_success(p)
            self.retry_count = 0
            self._new_head()
        else:
            self.cw_current = cw_after_failure(self.cw_current, p.cw_max)
        return self._after_exchange(now, acts)

    def step(self, now, kind, arg=None):
        """Single entry point: ``kind`` names the input, ``arg`` its payload."""
        if kind == "enqueue":
            return self.enqueue(arg, now)
        if kind == "busy":
            return self.medium_busy(now)
        if kind == "idle":
            return self.medium_idle(now, bool(arg))
        if kind == "timer":
            return self.timer(arg, now)
        if kind == "tx_end":
            return self.tx_end(now)
        if kind == "receive":
            return self.receive(arg, now)
        raise IllegalTransition(f"station {self.addr}: unknown input {kind!r} in phase {self.phase.value}")
