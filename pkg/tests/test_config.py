import pytest

from dcfsim.config import ConfigError, ScenarioConfig, coerce, load_config, parse_config


def test_empty_is_default():
    assert parse_config("") == ScenarioConfig()
    d = ScenarioConfig()
    assert (d.n_hosts, d.payload_bytes, d.interval_s, d.bitrate_bps, d.cw_min, d.cw_max,
            d.retry_limit) == (10, 512, 0.1, 2_000_000, 31, 1023, 7)


def test_cw_min():
    assert parse_config("cw_min = 7").cw_min == 7


def test_payload_over_mtu_names_line():
    with pytest.raises(ConfigError, match=r"line 2: .*exceeds macMTU 1500 B"):
        parse_config("# comment\npayload_bytes = 2000\n")


def test_unknown_key_and_bad_value():
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("frobnicate = 3")
    with pytest.raises(ConfigError, match="line 3"):
        parse_config("n_hosts = 5\n\ncw_min = seven")
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("no equals sign")


def test_cumulative_blame():
    # n_hosts=1 is invalid on its own
    with pytest.raises(ConfigError, match="line 2"):
        parse_config("cw_min = 15\nn_hosts = 1\n")


def test_invalid_values():
    for bad in ("cw_min = 30", "bitrate_bps = 3000000", "access_method = token",
                "interval_s = 0", "n_hosts = 1"):
        with pytest.raises(ConfigError):
            parse_config(bad)


def test_round_trip(tmp_path):
    cfg = ScenarioConfig(n_hosts=7, access_method="rts_cts", use_eifs=True, interval_s=0.25)
    path = tmp_path / "c.cfg"
    path.write_text(cfg.to_text())
    assert load_config(path) == cfg


def test_coerce():
    assert coerce("use_eifs", "yes") is True
    assert coerce("n_hosts", "10") == 10
    assert coerce("bitrate_bps", "5.5e6") == 5_500_000
    with pytest.raises(ConfigError):
        coerce("n_hosts", "2.5")
