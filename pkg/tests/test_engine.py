import random

import pytest
from hypothesis import given, strategies as st

from dcfsim.engine import Scheduler, SimulationError


def test_schedule_at_now_fires_first():
    s = Scheduler()
    a = s.at(0, None, "a")
    s.at(5, None, "b")
    assert s.pop_next() is a
    assert s.now == 0


def test_ties_in_scheduling_order():
    s = Scheduler()
    evs = [s.at(7, None, k) for k in "xyz"]
    assert [s.pop_next() for _ in evs] == evs


def test_time_reversal_rejected():
    s = Scheduler()
    s.at(10, None, "a")
    s.pop_next()
    with pytest.raises(SimulationError, match="time reversal"):
        s.at(9, None, "late")


def test_min_order():
    s = Scheduler()
    s.at(10, None, "ten")
    s.at(5, None, "five")
    assert s.pop_next().kind == "five"


def test_only_event_cancelled():
    s = Scheduler()
    ev = s.at(3, None, "a")
    s.cancel(ev)
    assert s.pop_next() is None
    assert len(s) == 0 and s.peek_time() is None


def test_cancel_after_pop_is_noop():
    s = Scheduler()
    ev = s.at(1, None, "a")
    s.at(2, None, "b")
    s.pop_next()
    s.cancel(ev)
    assert len(s) == 1


def test_million_random_schedules_sorted():
    rng = random.Random(12345)
    s = Scheduler()
    keys = []
    for i in range(10 ** 6):
        t = rng.randrange(10 ** 5)
        keys.append((t, s.at(t, None, "e").seq))
    keys.sort()
    popped = []
    while True:
        ev = s.pop_next()
        if ev is None:
            break
        popped.append((ev.fire_at, ev.seq))
    assert popped == keys


@given(st.lists(st.tuples(st.integers(0, 1000), st.booleans()), max_size=200))
def test_pop_order_and_monotone_time(items):
    s = Scheduler()
    live = []
    for t, cancel in items:
        ev = s.at(t, None, "e")
        if cancel:
            s.cancel(ev)
        else:
            live.append((t, ev.seq))
    out = []
    last = 0
    while (ev := s.pop_next()) is not None:
        assert s.now >= last
        last = s.now
        out.append((ev.fire_at, ev.seq))
    assert out == sorted(live)
