import hashlib
import json

from hydroelastic import cli

EQ_CFG = """
[grid]
n = 32
[initial]
theta = none
gamma = none
[physics]
rho0 = 0.01
sigma = 0.01
tau = 1.0
rho1 = 1.0
rho2 = 1.0
[stepping]
dt = 1e-3
probe_cadence = 0
[run]
t_end = 0.01
"""

SMALL_CFG = """
[grid]
n = 32
[initial]
theta = sin:1:0.1
gamma = cos:1:0.1
[physics]
tau = 1.0
rho1 = 1.0
rho2 = 1.0
[stepping]
monitor_cadence = 5
probe_cadence = 0
[run]
t_end = 0.02
[sweep]
pairs = 2e-3:2e-3 1e-3:1e-3 0:0
"""


def write_cfg(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_missing_config_exit_2(tmp_path, capsys):
    status = cli.parse_and_dispatch(
        ["simulate", "--config", str(tmp_path / "nope.cfg"), "--out", str(tmp_path / "o")])
    assert status == 2
    assert "nope.cfg" in capsys.readouterr().err


def test_unknown_key_exit_2(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "[grid]\nn = 32\nnn = 4\n")
    status = cli.parse_and_dispatch(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")])
    assert status == 2
    assert "grid.nn" in capsys.readouterr().err


def test_bad_override_exit_2(tmp_path, capsys):
    cfg = write_cfg(tmp_path, EQ_CFG)
    status = cli.parse_and_dispatch(
        ["simulate", "--config", str(cfg), "--out", str(tmp_path / "o"),
         "--set", "physics.bogus=1"])
    assert status == 2
    assert "physics.bogus" in capsys.readouterr().err


def test_simulate_equilibrium(tmp_path):
    cfg = write_cfg(tmp_path, EQ_CFG)
    out = tmp_path / "out"
    status = cli.parse_and_dispatch(["simulate", "--config", str(cfg), "--out", str(out)])
    assert status == 0
    assert (out / "trajectory.jsonl").is_file()
    assert (out / "config.echo.cfg").is_file()
    energy = (out / "energy.csv").read_text().splitlines()
    assert energy[0] == "# format=hydroelastic-energy-v1"
    for line in energy[2:]:
        fields = line.split(",")
        assert float(fields[9]) == 0.0  # E_total stays zero at equilibrium
    summary = json.loads((out / "summary.json").read_text())
    assert summary["failure"] is None


def test_simulate_writes_only_inside_out(tmp_path):
    cfg = write_cfg(tmp_path, EQ_CFG)
    out = tmp_path / "only"
    before = {p for p in tmp_path.rglob("*")}
    status = cli.parse_and_dispatch(["simulate", "--config", str(cfg), "--out", str(out)])
    assert status == 0
    created = {p for p in tmp_path.rglob("*")} - before
    assert created
    assert all(out in p.parents or p == out for p in created)


def test_config_echo_reproduces_run_bitwise(tmp_path):
    cfg = write_cfg(tmp_path, SMALL_CFG)
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    assert cli.parse_and_dispatch(
        ["simulate", "--config", str(cfg), "--out", str(out1), "--set", "physics.sigma=1e-3"]) == 0
    # re-parse the echoed effective config; the override must be baked in
    assert cli.parse_and_dispatch(
        ["simulate", "--config", str(out1 / "config.echo.cfg"), "--out", str(out2)]) == 0
    h1 = hashlib.sha256((out1 / "trajectory.jsonl").read_bytes()).hexdigest()
    h2 = hashlib.sha256((out2 / "trajectory.jsonl").read_bytes()).hexdigest()
    assert h1 == h2


def test_sweep_and_report_and_probe(tmp_path):
    cfg = write_cfg(tmp_path, SMALL_CFG)
    out = tmp_path / "sweep"
    status = cli.parse_and_dispatch(["sweep", "--config", str(cfg), "--out", str(out)])
    assert status == 0
    assert (out / "pair_table.csv").is_file()
    summary = json.loads((out / "summary.json").read_text())
    assert "slope" in summary and summary["failures"] == {}

    # probe over the same pair list
    pout = tmp_path / "probe"
    status = cli.parse_and_dispatch(
        ["probe", "--config", str(cfg), "--out", str(pout), "--seed", "3"])
    assert status == 0
    probe = json.loads((pout / "probe.json").read_text())
    assert len(probe["results"]) == 3
    assert all(r["estimated_norm"] < 1.0 for r in probe["results"])

    # report re-derives fits from the persisted sweep without re-running
    rout = tmp_path / "report"
    rcfg = write_cfg(tmp_path, SMALL_CFG + f"\n[report]\nsource = {out}\n", name="report.cfg")
    status = cli.parse_and_dispatch(["report", "--config", str(rcfg), "--out", str(rout)])
    assert status == 0
    rsummary = json.loads((rout / "report_summary.json").read_text())
    assert "cauchy" in rsummary
    assert abs(rsummary["cauchy"]["slope"] - summary["slope"]) < 1e-9
    assert rsummary["runs"]


def test_report_missing_source_exit_2(tmp_path, capsys):
    rcfg = write_cfg(tmp_path, EQ_CFG + f"\n[report]\nsource = {tmp_path / 'void'}\n")
    status = cli.parse_and_dispatch(["report", "--config", str(rcfg), "--out", str(tmp_path / "r")])
    assert status == 2


def test_run_failure_exit_1(tmp_path):
    cfg = write_cfg(tmp_path, SMALL_CFG)
    out = tmp_path / "fail"
    status = cli.parse_and_dispatch(
        ["simulate", "--config", str(cfg), "--out", str(out), "--set", "stepping.dt=0.5",
         "--set", "run.t_end=5.0"])
    assert status == 1
    summary = json.loads((out / "summary.json").read_text())
    assert summary["failure"] is not None
