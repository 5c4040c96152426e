"""Slot-synchronous saturation model, used to cross-check the event-driven engine.

Only the contention process is simulated: backoff counters, collisions when
two or more counters hit zero in the same slot, and the CW ladder. Each
success occupies the medium for data + SIFS + ACK followed by DIFS; a
collision for the data airtime followed by DIFS, while the colliding stations
sit out their ACK timeout before deferring again. Shares only the airtime and
CW-ladder helpers with :mod:`dcfsim.mac`.
"""

import math
from dataclasses import dataclass

import numpy as np

from .mac import FrameKind, ack_timeout, cw_after_failure, frame_airtime


@dataclass(frozen=True)
class SlotModel:
    n: int
    params: object  # MacParams
    payload_bytes: int = 512
    horizon: int = 1_000_000  # virtual slots (idle slots plus one per busy period)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")


@dataclass
class OracleResult:
    throughput: float  # bit/s
    successes: int
    collisions: int  # busy periods with >= 2 senders
    drops: int
    elapsed: int  # ns

    @property
    def collision_fraction(self):
        events = self.successes + self.collisions
        return self.collisions / events if events else 0.0


def run_slot_oracle(model, seed):
    p = model.params
    n = model.n
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(7,)))
    t_data = frame_airtime(FrameKind.DATA, model.payload_bytes, p)
    t_ack = frame_airtime(FrameKind.ACK, 0, p)
    t_success = t_data + p.sifs + t_ack + p.difs
    t_collision = t_data + p.difs
    timeout = ack_timeout(p)
    slot, difs = p.slot, p.difs

    cw = [p.cw_min] * n
    retries = [0] * n
    counter = [int(rng.integers(0, p.cw_min + 1)) for _ in range(n)]
    ready = [0] * n  # time a station may start sensing DIFS again
    t = difs  # counting starts after the first DIFS
    slots = successes = collisions = drops = 0

    while slots < model.horizon:
        # stations still inside an ACK timeout join the slot grid late
        offset = [max(0, math.ceil((ready[i] + difs - t) / slot)) for i in range(n)]
        eff = [offset[i] + counter[i] for i in range(n)]
        m = min(eff)
        senders = [i for i in range(n) if eff[i] == m]
        for i in range(n):
            counter[i] -= max(0, m - offset[i])
        slots += m + 1
        t_tx = t + m * slot
        if len(senders) == 1:
            i = senders[0]
            successes += 1
            cw[i] = p.cw_min
            retries[i] = 0
            counter[i] = int(rng.integers(0, cw[i] + 1))
            t = t_tx + t_success
            ready[i] = t - difs
        else:
            collisions += 1
            end = t_tx + t_data
            for i in senders:
                retries[i] += 1
                if retries[i] > p.retry_limit:
                    drops += 1
                    cw[i] = p.cw_min
                    retries[i] = 0
                else:
                    cw[i] = cw_after_failure(cw[i], p.cw_max)
                counter[i] = int(rng.integers(0, cw[i] + 1))
                ready[i] = end + timeout
            t = end + difs
    bits = successes * model.payload_bytes * 8
    return OracleResult(bits / (t / 1e9), successes, collisions, drops, t)


def slot_oracle_throughput(model, seed):
    """Saturated single-hop payload throughput in bit/s."""
    return run_slot_oracle(model, seed).throughput


@dataclass(frozen=True)
class Comparison:
    engine: float
    oracle: float
    rel_err: float
    rel_tol: float

    @property
    def passed(self):
        return self.rel_err <= self.rel_tol

    def __str__(self):
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{verdict} engine={self.engine:.6g} oracle={self.oracle:.6g} "
                f"rel_err={self.rel_err:.4f} tol={self.rel_tol}")


def compare(engine_result, oracle_result, rel_tol):
    if oracle_result == 0:
        err = 0.0 if engine_result == 0 else math.inf
    else:
        err = abs(engine_result - oracle_result) / abs(oracle_result)
    return Comparison(engine_result, oracle_result, err, rel_tol)


def engine_saturation_throughput(cfg, seed, sim_time_s=30.0):
    """Engine counterpart: every host backlogged toward the AP, no relay or echo."""
    from .metrics import effective_data_rate
    from .simulation import run_scenario

    sat = cfg.with_(traffic="saturated", max_sim_time_s=sim_time_s)
    return effective_data_rate(run_scenario(sat, seed=seed))


def validate(cfg=None, hosts=(2, 5, 10), rel_tol=0.05, seed=1, sim_time_s=30.0, horizon=1_000_000):
    """Compare engine and oracle saturation throughput for each host count."""
    from .config import ScenarioConfig

    cfg = cfg or ScenarioConfig()
    rows = []
    for n in hosts:
        c = cfg.with_(n_hosts=n)
        eng = engine_saturation_throughput(c, seed, sim_time_s)
        orc = slot_oracle_throughput(SlotModel(n, c.mac_params(), c.payload_bytes, horizon), seed)
        rows.append((n, compare(eng, orc, rel_tol)))
    return rows
