"""Single shared broadcast medium: global carrier sense and collision-only loss."""

import enum

from .engine import SimulationError


class Outcome(enum.Enum):
    DELIVERED = "delivered"
    COLLIDED = "collided"
    CORRUPTED = "corrupted"  # fault injection only


class Transmission:
    __slots__ = ("source", "frame", "start", "end", "collided", "corrupted")

    def __init__(self, source, frame, start, end):
        if not start < end:
            raise SimulationError(f"transmission from {source} has empty interval [{start}, {end})")
        self.source = source
        self.frame = frame
        self.start = start
        self.end = end
        self.collided = False
        self.corrupted = False

    def overlaps(self, other):
        return self.start < other.end and other.start < self.end

    def __repr__(self):
        return f"Transmission({self.source}, {self.frame!r}, [{self.start}, {self.end}))"


class Channel:
    """Every station hears every other one; any overlap destroys all frames involved.

    Stations are objects exposing ``addr``, ``on_busy(now)``,
    ``on_idle(now, after_collision)``, ``on_tx_end(now)`` and
    ``on_receive(frame, now)``.

    A SIFS response (ACK, CTS, or data after CTS) that a receiver has committed
    to is announced with :meth:`reserve`. Observers are then not told about
    the SIFS gap: it is shorter than a DIFS, so no deferral could complete in
    it anyway.
    """

    def __init__(self, scheduler, trace=None, corrupt=None):
        self.sched = scheduler
        self.stations = []
        self._by_addr = {}
        self.active = []
        self.trace = trace  # callable(tx, outcome) or None
        self.corrupt = corrupt  # callable(tx) -> bool, fault injection
        self._reserved = False
        self._notified_busy = False
        self._period_start = 0
        self._period_collided = False
        self.transmissions = 0
        self.collided_tx = 0
        self.collision_events = 0
        self.collision_time = 0

    def attach(self, station):
        if station.addr in self._by_addr:
            raise SimulationError(f"duplicate station address {station.addr}")
        self.stations.append(station)
        self._by_addr[station.addr] = station

    def is_busy(self, now):
        return any(tx.start <= now < tx.end for tx in self.active)

    def reserve(self):
        self._reserved = True

    def begin_tx(self, source, frame, now, airtime):
        if airtime <= 0:
            raise SimulationError(f"non-positive airtime {airtime} for {frame!r}")
        for tx in self.active:
            if tx.source == source and tx.end > now:
                raise SimulationError(f"station {source} started {frame!r} while still sending {tx.frame!r}")
        tx = Transmission(source, frame, now, now + airtime)
        for other in self.active:
            if other.end > now:
                other.collided = True
                tx.collided = True
                self._period_collided = True
        if self.corrupt is not None and self.corrupt(tx):
            tx.corrupted = True
        self.active.append(tx)
        self.transmissions += 1
        self.sched.at(tx.end, self, "tx_end", tx)
        self._reserved = False
        if not self._notified_busy:
            self._notified_busy = True
            self._period_start = now
            self._period_collided = False
            for st in self.stations:
                st.on_busy(now)
        return tx

    def reception_outcome(self, tx, now):
        if now < tx.end:
            raise SimulationError(f"outcome of {tx!r} queried at {now}, before it ended")
        if tx.collided:
            return Outcome.COLLIDED
        if tx.corrupted:
            return Outcome.CORRUPTED
        return Outcome.DELIVERED

    def handle(self, ev):
        tx = ev.data
        now = ev.fire_at
        self.active.remove(tx)
        outcome = self.reception_outcome(tx, now)
        if outcome is Outcome.COLLIDED:
            self.collided_tx += 1
        if self.trace is not None:
            self.trace(tx, outcome)
        src = self._by_addr[tx.source]
        src.on_tx_end(now)
        if outcome is Outcome.DELIVERED:
            frame = tx.frame
            for st in self.stations:
                if st is not src:
                    st.on_receive(frame, now)
        if not self.active and not self._reserved:
            self._notified_busy = False
            collided = self._period_collided
            if collided:
                self.collision_events += 1
                self.collision_time += now - self._period_start
            for st in self.stations:
                st.on_idle(now, collided)
