"""Parameter sweeps, presets and CSV / gnuplot output."""

import csv
import io
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Tuple

from .config import ConfigError, ScenarioConfig, coerce
from .metrics import effective_data_rate, packet_loss_rate, rtt_summary
from .simulation import run_scenario

HOSTS = (5, 10, 15, 20, 25, 30)

PRESETS = {
    "fig4": ("payload_bytes", (64, 128, 256, 512, 1024)),
    "fig5": ("interval_s", (0.05, 0.1, 0.25, 0.5, 1.0)),
    "fig6": ("bitrate_bps", (1_000_000, 2_000_000, 5_500_000, 11_000_000)),
    "fig7": ("cw_min", (7, 15, 31, 63, 127)),
}

COLUMNS = ("run_id", "seed", "n_hosts", "payload_bytes", "interval_s", "bitrate_bps", "cw_min",
           "access_method", "sent", "delivered", "dropped", "loss_rate", "eff_data_rate_bps",
           "rtt_mean_us", "rtt_p50_us", "rtt_p95_us", "duration_s")

NA = "NA"


@dataclass(frozen=True)
class SweepSpec:
    base: ScenarioConfig
    param: str
    values: Tuple
    hosts: Tuple = HOSTS
    seeds: int = 1

    def __post_init__(self):
        if not self.values:
            raise ConfigError("sweep needs at least one value")
        if not self.hosts:
            raise ConfigError("sweep needs at least one host count")
        if self.seeds < 1:
            raise ConfigError("seeds must be >= 1")
        if not hasattr(self.base, self.param):
            raise ConfigError(f"unknown sweep parameter {self.param!r}")

    def cells(self):
        for v in self.values:
            for n in self.hosts:
                cfg = self.base.with_(**{self.param: v, "n_hosts": n})
                for seed in range(1, self.seeds + 1):
                    yield cfg, seed


def preset(name, base=None, hosts=HOSTS, seeds=1):
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    param, values = PRESETS[name]
    return SweepSpec(base or ScenarioConfig(), param, values, tuple(hosts), seeds)


@dataclass
class RunResult:
    cfg: ScenarioConfig
    seed: int
    metrics: object  # RunMetrics

    @property
    def loss_rate(self):
        return packet_loss_rate(self.metrics)

    @property
    def eff_data_rate(self):
        return effective_data_rate(self.metrics)

    @property
    def rtt_mean_us(self):
        return rtt_summary(self.metrics).us("mean")


def execute(cell):
    cfg, seed = cell
    return RunResult(cfg, seed, run_scenario(cfg, seed=seed))


def canonical_key(result, param=None):
    c = result.cfg
    lead = (getattr(c, param),) if param else ()
    return lead + (c.n_hosts, c.payload_bytes, c.interval_s, c.bitrate_bps, c.cw_min,
                   c.access_method, result.seed)


def sweep(spec, jobs=1):
    """Run every (value, host count, seed) cell; results come back in canonical order."""
    cells = list(spec.cells())
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(execute, cells))
    else:
        results = [execute(c) for c in cells]
    return sorted(results, key=lambda r: canonical_key(r, spec.param))


def _g(x):
    return NA if x is None else f"{x:.6g}"


def run_id(cfg, seed):
    return (f"n{cfg.n_hosts}-p{cfg.payload_bytes}-i{cfg.interval_s:g}-b{cfg.bitrate_bps}"
            f"-cw{cfg.cw_min}-{cfg.access_method}-s{seed}")


def csv_row(cfg, seed, m):
    r = rtt_summary(m)
    duration = m.duration / 1e9
    rate = effective_data_rate(m) if m.t_end > m.t_start else 0.0
    return [run_id(cfg, seed), str(seed), str(cfg.n_hosts), str(cfg.payload_bytes),
            _g(cfg.interval_s), str(cfg.bitrate_bps), str(cfg.cw_min), cfg.access_method,
            str(m.sent_total), str(m.n_succpacket), str(m.dropped_total),
            _g(packet_loss_rate(m)), _g(rate), _g(r.us("mean")), _g(r.us("p50")),
            _g(r.us("p95")), _g(duration)]


def format_csv(results, header=True):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(COLUMNS)
    for res in results:
        w.writerow(csv_row(res.cfg, res.seed, res.metrics))
    return buf.getvalue()


def format_dat(results, param):
    """gnuplot data: one block per swept value (select with ``index``), seeds averaged."""
    groups = {}
    for res in results:
        groups.setdefault(getattr(res.cfg, param), {}).setdefault(res.cfg.n_hosts, []).append(res)
    out = []
    for value, by_n in groups.items():
        out.append(f"# {param} = {value:g}\n" if isinstance(value, (int, float)) else f"# {param} = {value}\n")
        out.append("# n_hosts loss_rate eff_data_rate_bps rtt_mean_us\n")
        for n, runs in sorted(by_n.items()):
            rtts = [r.rtt_mean_us for r in runs if r.rtt_mean_us is not None]
            rtt = statistics.fmean(rtts) if rtts else None
            out.append(f"{n} {statistics.fmean(r.loss_rate for r in runs):.6g} "
                       f"{statistics.fmean(r.eff_data_rate for r in runs):.6g} {_g(rtt)}\n")
        out.append("\n\n")
    return "".join(out)


def write_outputs(results, param, out_dir, name):
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, f"{name}.csv")
    dat_path = os.path.join(out_dir, f"{name}.dat")
    with open(csv_path, "w") as fh:
        fh.write(format_csv(results))
    with open(dat_path, "w") as fh:
        fh.write(format_dat(results, param))
    return csv_path, dat_path


def parse_vary(text):
    """``KEY=V1,V2,...`` -> (key, values) with values coerced to the field type."""
    if "=" not in text:
        raise ConfigError(f"--vary expects KEY=V1,V2,..., got {text!r}")
    key, raw = text.split("=", 1)
    key = key.strip()
    values = tuple(coerce(key, v) for v in raw.split(",") if v.strip())
    if not values:
        raise ConfigError(f"--vary {key}: no values")
    return key, values
