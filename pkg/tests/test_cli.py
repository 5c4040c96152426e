import csv

from dcfsim.cli import main


def write(tmp_path, text):
    p = tmp_path / "s.cfg"
    p.write_text(text)
    return str(p)


def test_run_writes_csv_and_traces(tmp_path):
    cfg = write(tmp_path, "n_hosts = 3\ninterval_s = 1\npackets_per_host = 5\n")
    out, tr, mt = tmp_path / "r.csv", tmp_path / "t.csv", tmp_path / "m.csv"
    assert main(["run", "--config", cfg, "--seed", "2", "--csv", str(out),
                 "--trace", str(tr), "--mac-trace", str(mt)]) == 0
    (row,) = csv.DictReader(out.open())
    assert row["seed"] == "2" and row["sent"] == "15"
    assert tr.read_text().startswith("start_ns,") and mt.read_text().count("\n") > 1


def test_config_error_exit_code(tmp_path, capsys):
    cfg = write(tmp_path, "payload_bytes = 2000\n")
    assert main(["run", "--config", cfg]) == 1
    assert "exceeds macMTU" in capsys.readouterr().err


def test_missing_file_exit_code(tmp_path):
    assert main(["run", "--config", str(tmp_path / "absent")]) == 1


def test_sweep_vary(tmp_path, capsys):
    cfg = write(tmp_path, "packets_per_host = 5\n")
    assert main(["sweep", "--vary", "cw_min=15,31", "--hosts", "5", "--config", cfg,
                 "--out", str(tmp_path / "o")]) == 0
    rows = list(csv.DictReader((tmp_path / "o" / "vary_cw_min.csv").open()))
    assert [r["cw_min"] for r in rows] == ["15", "31"]


def test_sweep_preset(tmp_path):
    cfg = write(tmp_path, "packets_per_host = 3\n")
    assert main(["sweep", "--preset", "fig6", "--hosts", "5", "--seeds", "2", "--config", cfg,
                 "--out", str(tmp_path)]) == 0
    assert len((tmp_path / "fig6.csv").read_text().splitlines()) == 1 + 8


def test_validate_small(capsys):
    assert main(["validate", "--hosts", "2", "--sim-time", "5", "--horizon", "100000"]) == 0
    assert "PASS" in capsys.readouterr().out
