"""Scenario configuration and its ``key = value`` file format."""

import dataclasses
from dataclasses import dataclass, fields

from .engine import US, to_ns
from .mac import MAC_MTU, AccessMethod, MacParams

B_RATES_BPS = (1_000_000, 2_000_000, 5_500_000, 11_000_000)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioConfig:
    n_hosts: int = 10
    payload_bytes: int = 512
    interval_s: float = 0.1
    bitrate_bps: int = 2_000_000
    cw_min: int = 31
    cw_max: int = 1023
    retry_limit: int = 7
    access_method: str = "basic"
    queue_capacity: int = 50
    rtt_mode: str = "ping"  # ping | mac_ack
    packets_per_host: int = 500
    max_sim_time_s: float = 1000.0
    seed: int = 1
    traffic: str = "periodic"  # periodic | saturated
    loss_accounting: str = "ping"  # ping | hop

    slot_us: float = 20.0
    sifs_us: float = 10.0
    difs_us: float = 50.0
    phy_header_bits: int = 192
    mac_header_bits: int = 224
    basic_rate_bps: int = 1_000_000
    ack_timeout_extra_us: float = 20.0
    use_eifs: bool = False
    defer_on_arrival: bool = True

    # carried for fidelity; every node is in range of every other one
    playground_m: float = 200.0
    tx_range_m: float = 300.0
    tx_power_mw: float = 9.0
    cs_sensitivity_dbm: float = -85.0
    carrier_ghz: float = 2.4
    speed_mean_mps: float = 20.0
    speed_std_mps: float = 8.0
    mobility_epoch_s: float = 1.0
    mobility_tick_s: float = 1.0

    def __post_init__(self):
        self.validate()

    def validate(self):
        def bad(msg):
            raise ConfigError(msg)

        if self.n_hosts < 2:
            bad(f"n_hosts must be >= 2, got {self.n_hosts}")
        if not 0 <= self.payload_bytes <= MAC_MTU:
            bad(f"payload_bytes {self.payload_bytes} exceeds macMTU {MAC_MTU} B"
                if self.payload_bytes > MAC_MTU else "payload_bytes must be >= 0")
        if self.interval_s <= 0:
            bad("interval_s must be > 0")
        for name in ("bitrate_bps", "basic_rate_bps"):
            if getattr(self, name) not in B_RATES_BPS:
                bad(f"{name} must be one of the 802.11b rates {B_RATES_BPS}, got {getattr(self, name)}")
        if self.access_method not in {m.value for m in AccessMethod}:
            bad(f"access_method must be basic or rts_cts, got {self.access_method!r}")
        if self.rtt_mode not in ("ping", "mac_ack"):
            bad(f"rtt_mode must be ping or mac_ack, got {self.rtt_mode!r}")
        if self.traffic not in ("periodic", "saturated"):
            bad(f"traffic must be periodic or saturated, got {self.traffic!r}")
        if self.loss_accounting not in ("ping", "hop"):
            bad(f"loss_accounting must be ping or hop, got {self.loss_accounting!r}")
        if self.queue_capacity < 1:
            bad("queue_capacity must be >= 1")
        if self.packets_per_host < 0:
            bad("packets_per_host must be >= 0")
        if self.max_sim_time_s <= 0:
            bad("max_sim_time_s must be > 0")
        if self.playground_m <= 0 or self.tx_range_m <= 0:
            bad("playground_m and tx_range_m must be > 0")
        if self.tx_range_m < self.playground_m * 2 ** 0.5:
            bad("tx_range_m must cover the playground diagonal: the model has no hidden terminals")
        if self.speed_std_mps < 0 or self.mobility_epoch_s <= 0 or self.mobility_tick_s <= 0:
            bad("mobility parameters must be positive")
        if self.sifs_us >= self.difs_us:
            bad("sifs_us must be shorter than difs_us")
        try:
            self.mac_params()
        except ValueError as e:
            bad(str(e))

    def mac_params(self):
        return MacParams(
            slot=to_ns(self.slot_us, US),
            sifs=to_ns(self.sifs_us, US),
            difs=to_ns(self.difs_us, US),
            cw_min=self.cw_min,
            cw_max=self.cw_max,
            retry_limit=self.retry_limit,
            phy_header_bits=self.phy_header_bits,
            mac_header_bits=self.mac_header_bits,
            data_bitrate=self.bitrate_bps,
            basic_rate=self.basic_rate_bps,
            access_method=AccessMethod(self.access_method),
            ack_timeout_extra=to_ns(self.ack_timeout_extra_us, US),
            use_eifs=self.use_eifs,
            defer_on_arrival=self.defer_on_arrival,
        )

    def with_(self, **changes):
        try:
            return dataclasses.replace(self, **changes)
        except TypeError as e:
            raise ConfigError(str(e)) from None

    def to_text(self):
        return "".join(f"{f.name} = {_render(getattr(self, f.name))}\n" for f in fields(self))


FIELD_TYPES = {f.name: f.type for f in fields(ScenarioConfig)}


def _render(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def coerce(key, raw):
    """Convert the string ``raw`` to the type of config field ``key``."""
    if key not in FIELD_TYPES:
        raise ConfigError(f"unknown key {key!r}")
    typ = FIELD_TYPES[key]
    raw = raw.strip()
    try:
        if typ in (bool, "bool"):
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if typ in (int, "int"):
            v = float(raw)
            if v != int(v):
                raise ValueError(raw)
            return int(v)
        if typ in (float, "float"):
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"bad value {raw!r} for {key}") from None


def parse_config(text, base=None):
    """Parse a line-oriented ``key = value`` document; ``#`` starts a comment.

    Missing keys keep their defaults. Errors name the offending line.
    """
    base = base or ScenarioConfig()
    entries = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        try:
            entries.append((lineno, key, coerce(key, raw)))
        except ConfigError as e:
            raise ConfigError(f"line {lineno}: {e}") from None
    values = {key: value for _, key, value in entries}
    try:
        return base.with_(**values)
    except ConfigError as e:
        err = e
    # blame the first line after which the document no longer validates
    partial = {}
    for lineno, key, value in entries:
        partial[key] = value
        try:
            base.with_(**partial)
        except ConfigError as e:
            raise ConfigError(f"line {lineno}: {e}") from None
    raise ConfigError(f"invalid configuration: {err}")


def load_config(path):
    with open(path) as fh:
        return parse_config(fh.read())
