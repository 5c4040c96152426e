import csv
import io

import pytest

from dcfsim.config import ConfigError, ScenarioConfig
from dcfsim.experiment import (COLUMNS, SweepSpec, format_csv, format_dat, parse_vary, preset, sweep,
                               write_outputs)

SMALL = ScenarioConfig(packets_per_host=20)


@pytest.fixture(scope="module")
def fig6():
    return sweep(preset("fig6", SMALL, hosts=(5, 30), seeds=3))


def test_fig6_cardinality(fig6):
    assert len(fig6) == 24
    rows = list(csv.DictReader(io.StringIO(format_csv(fig6))))
    assert len(rows) == 24 and tuple(rows[0]) == COLUMNS
    assert all(int(r["sent"]) == int(r["delivered"]) + int(r["dropped"]) for r in rows)


def test_csv_deterministic(fig6):
    again = sweep(preset("fig6", SMALL, hosts=(5, 30), seeds=3))
    assert format_csv(again) == format_csv(fig6)


def test_parallel_matches_serial():
    spec = SweepSpec(SMALL, "cw_min", (15, 63), hosts=(5,), seeds=2)
    assert format_csv(sweep(spec, jobs=2)) == format_csv(sweep(spec))


def test_dat_blocks(fig6, tmp_path):
    dat = format_dat(fig6, "bitrate_bps")
    assert dat.count("# bitrate_bps =") == 4
    csv_path, dat_path = write_outputs(fig6, "bitrate_bps", tmp_path, "fig6")
    assert open(dat_path).read() == dat


def test_presets_and_errors():
    assert preset("fig4").values == (64, 128, 256, 512, 1024)
    assert preset("fig7").hosts == (5, 10, 15, 20, 25, 30)
    with pytest.raises(ConfigError):
        preset("fig9")
    with pytest.raises(ConfigError):
        SweepSpec(SMALL, "nope", (1,))


def test_parse_vary():
    assert parse_vary("payload_bytes=64,128") == ("payload_bytes", (64, 128))
    with pytest.raises(ConfigError):
        parse_vary("payload_bytes")
