"""Discrete-event scheduler with integer-nanosecond virtual time."""

import heapq

NS = 1
US = 1_000
MS = 1_000_000
S = 1_000_000_000


class SimulationError(RuntimeError):
    """Internal contract violation; the run must be aborted."""


def seconds(t_ns):
    return t_ns / S


def to_ns(value, unit=S):
    """Convert a duration in ``unit`` to whole nanoseconds (rounded)."""
    return int(round(value * unit))


class Event:
    __slots__ = ("fire_at", "seq", "target", "kind", "data", "cancelled")

    def __init__(self, fire_at, target, kind, data=None):
        self.fire_at = fire_at
        self.seq = -1
        self.target = target
        self.kind = kind
        self.data = data
        self.cancelled = False

    def __repr__(self):
        return f"Event(t={self.fire_at}, seq={self.seq}, kind={self.kind!r})"


class Scheduler:
    """Pending-event set ordered by ``(fire_at, seq)``.

    Cancellation is lazy: cancelled events stay in the heap and are skipped
    by :meth:`pop_next`.
    """

    def __init__(self):
        self.now = 0
        self._heap = []
        self._seq = 0
        self._live = 0

    def __len__(self):
        return self._live

    def schedule(self, ev):
        if ev.fire_at < self.now:
            raise SimulationError(
                f"time reversal: event {ev.kind!r} at {ev.fire_at} ns scheduled at now={self.now} ns")
        if ev.seq >= 0:
            raise SimulationError(f"event {ev!r} scheduled twice")
        ev.seq = self._seq
        self._seq += 1
        heapq.heappush(self._heap, (ev.fire_at, ev.seq, ev))
        self._live += 1
        return ev.seq

    def at(self, fire_at, target, kind, data=None):
        """Create and schedule an event; returns the event so it can be cancelled."""
        ev = Event(fire_at, target, kind, data)
        self.schedule(ev)
        return ev

    def cancel(self, ev):
        if not ev.cancelled:
            ev.cancelled = True
            self._live -= 1

    def pop_next(self):
        heap = self._heap
        while heap:
            t, _, ev = heapq.heappop(heap)
            if ev.cancelled:
                continue
            self._live -= 1
            # mark consumed so a late cancel() is a no-op
            ev.cancelled = True
            self.now = t
            return ev
        return None

    def peek_time(self):
        heap = self._heap
        while heap and heap[0][2].cancelled:
            heapq.heappop(heap)
        return heap[0][0] if heap else None
