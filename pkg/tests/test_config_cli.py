import csv
import json
import math

import pytest

from meafmram import cli, config, physics
from meafmram.errors import ConfigError
from meafmram.presets import PRESETS, run_preset

KEY_HEX = "000102030405060708090a0b0c0d0e0f"


def _read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


# --- configuration ---------------------------------------------------------

def test_default_config_reproduces_nominal_point():
    cfg = config.load_config()
    assert cfg.E == pytest.approx(3e7)
    assert cfg.material == physics.MaterialParams()
    assert cfg.read.V_threshold == 1e-3


def test_partial_override(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("material:\n  K_u: 8000\noperating_point:\n  B: 0.25\n")
    cfg = config.load_config(path)
    assert cfg.material.K_u == 8000 and cfg.material.M_s == 2.6e5
    assert cfg.B == 0.25 and cfg.circuit.B_applied == 0.25


@pytest.mark.parametrize(
    "text,needle",
    [
        ("material:\n  K_uu: 1\n", "K_uu"),
        ("bogus:\n  x: 1\n", "bogus"),
        ("material:\n  K_u: -5\n", "K_u"),
        ("material: [1, 2\n", "line"),
        ("- 1\n", "mapping"),
    ],
)
def test_config_errors(tmp_path, text, needle):
    path = tmp_path / "c.yaml"
    path.write_text(text)
    with pytest.raises(ConfigError, match=needle):
        config.load_config(path)


def test_missing_config():
    with pytest.raises(ConfigError):
        config.load_config("/nonexistent/c.yaml")


def test_with_value():
    cfg = config.load_config()
    assert cfg.with_value("V_G", 0.5).E == pytest.approx(5e7)
    assert cfg.with_value("material.T_neel", 400.0).material.T_neel == 400.0


def test_reference_values_versioned():
    refs = config.load_reference_values()
    assert refs["me_pressure"]["value"] == 74.2


# --- presets ---------------------------------------------------------------

@pytest.mark.parametrize("name", list(PRESETS))
def test_presets_pass(name):
    report = run_preset(name)
    assert report.checks
    assert report.passed, "\n".join(c.line() for c in report.checks if not c.passed)


def test_table3_rows():
    rows = {r["scheme"]: r for r in run_preset("table3").tables["table3"]}
    assert rows["CME"]["latency_s"] == pytest.approx(299.23e-12, rel=1e-9)
    assert rows["Memcryption"]["latency_s"] == pytest.approx(273.46e-12, rel=1e-9)


# --- CLI -------------------------------------------------------------------

def test_cli_cell_outputs(tmp_path):
    assert cli.main(["cell", "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["write_latency_s"] == pytest.approx(0.63e-9, rel=0.1)
    assert summary["final_bit"] == 0
    assert (tmp_path / "trace.csv").read_text().startswith("t,V_G,V_ME,M,regime,WE,RE\n")


def test_cli_cell_seed_irrelevant(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    cli.main(["cell", "--out", str(a), "--seed", "1"])
    cli.main(["cell", "--out", str(b), "--seed", "2"])
    assert (a / "trace.csv").read_bytes() == (b / "trace.csv").read_bytes()
    assert (a / "summary.json").read_bytes() == (b / "summary.json").read_bytes()


def test_cli_waveform_file(tmp_path):
    wf = tmp_path / "w.yaml"
    wf.write_text("segments:\n  - {t_start: 0, V_G: 0.3}\nt_end: 2e-9\n")
    assert cli.main(["cell", "--waveform", str(wf), "--out", str(tmp_path)]) == 0
    rows = _read_csv(tmp_path / "trace.csv")
    assert float(rows[-1]["V_ME"]) == pytest.approx(0.3, rel=1e-3)


def test_cli_missing_config(tmp_path, capsys):
    assert cli.main(["cell", "--config", str(tmp_path / "nope.yaml"), "--out", str(tmp_path)]) == 2
    assert "not found" in capsys.readouterr().err


def test_cli_bad_config_field(tmp_path, capsys):
    path = tmp_path / "c.yaml"
    path.write_text("circuit:\n  R_eqq: 2\n")
    assert cli.main(["cell", "--config", str(path), "--out", str(tmp_path)]) == 2
    assert "R_eqq" in capsys.readouterr().err


def test_cli_unknown_preset(tmp_path, capsys):
    assert cli.main(["preset", "fig99", "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    for name in PRESETS:
        assert name in err


def test_cli_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 2


def test_cli_preset_fail_exit_code(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("operating_point:\n  B: 0.25\n")
    assert cli.main(["preset", "table1", "--config", str(path), "--out", str(tmp_path)]) == 1
    assert json.loads((tmp_path / "table1_result.json").read_text())["passed"] is False


def test_cli_runtime_error_exit_code(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("operating_point:\n  V_G: 0.15\n")
    assert cli.main(["cell", "--config", str(path), "--out", str(tmp_path)]) == 3


@pytest.mark.parametrize("name", ["table3", "fig4", "dpa"])
def test_cli_preset_byte_identical(tmp_path, name):
    outs = []
    for run in ("a", "b"):
        d = tmp_path / run
        assert cli.main(["preset", name, "--out", str(d)]) == 0
        outs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
    assert outs[0] == outs[1]
    assert f"{name}_result.json" in outs[0]


def test_cli_json_format(tmp_path):
    assert cli.main(["preset", "table3", "--format", "json", "--out", str(tmp_path)]) == 0
    rows = json.loads((tmp_path / "table3.json").read_text())
    assert {r["scheme"] for r in rows} == {"CME", "Memcryption", "None"}


def test_cli_hall(tmp_path):
    assert cli.main(["hall", "--I-hall", "0.02", "--out", str(tmp_path)]) == 0
    rows = {r["name"]: r for r in _read_csv(tmp_path / "hall_comparison.csv")}
    assert float(rows["Pt/Co/Pt"]["V_AHE"]) == pytest.approx(438e-6, rel=0.05)


def test_cli_array(tmp_path):
    assert cli.main(["array", "--out", str(tmp_path)]) == 0
    rows = _read_csv(tmp_path / "tech_comparison.csv")
    assert rows[0]["technology"] == "ME-AFMRAM" and rows[0]["flags"] == ""
    breakdown = _read_csv(tmp_path / "latency_breakdown.csv")
    assert math.fsum(float(r["seconds"]) for r in breakdown if r["access"] == "write") == \
        pytest.approx(763.9e-12, rel=1e-9)


def test_cli_crypt_round_trip(tmp_path, monkeypatch):
    monkeypatch.setenv("MEAFMRAM_KEY", KEY_HEX)
    plain = tmp_path / "plain.bin"
    plain.write_bytes(bytes(range(64)))
    common = ["--out", str(tmp_path), "--counters", str(tmp_path / "ctr.txt"),
              "--image", str(tmp_path / "mem.img"), "--scheme", "CME"]
    assert cli.main(["crypt", "encrypt", "--input", str(plain), *common]) == 0
    assert (tmp_path / "ctr.txt").read_text().count("\n") == 4
    out = tmp_path / "out.bin"
    assert cli.main(["crypt", "decrypt", "--output", str(out), *common]) == 0
    assert out.read_bytes() == plain.read_bytes()


def test_cli_crypt_needs_key(tmp_path, monkeypatch):
    monkeypatch.delenv("MEAFMRAM_KEY", raising=False)
    plain = tmp_path / "plain.bin"
    plain.write_bytes(bytes(16))
    assert cli.main(["crypt", "encrypt", "--input", str(plain), "--out", str(tmp_path)]) == 2


def test_cli_crypt_overheads(tmp_path):
    assert cli.main(["crypt", "overheads", "--out", str(tmp_path)]) == 0
    rows = {r["scheme"]: r for r in _read_csv(tmp_path / "encryption_overheads.csv")}
    assert float(rows["CME"]["relative"]) == pytest.approx(2.9923, rel=1e-6)


def test_cli_attacks(tmp_path):
    assert cli.main(["attack", "fm", "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "fm_summary.json").read_text())["switched"] is True
    assert cli.main(["attack", "afm", "--field", "0", "0", "-1", "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "afm_summary.json").read_text())["switched"] is False
    assert cli.main(["attack", "temperature", "--T", "450", "--doped", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "temperature_attack.json").read_text())
    assert doc == {"T_attack": 450.0, "T_neel": 400.0, "state": "DataCorrupted", "detectable": True}
    assert cli.main(["attack", "dpa", "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "dpa_result.json").read_text())["success_rate"] >= 0.99


def test_cli_attack_scenario_file(tmp_path):
    path = tmp_path / "s.yaml"
    path.write_text("target: FM\nH_applied: [0, 0, 0.01]\n")
    assert cli.main(["attack", "fm", "--scenario", str(path), "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "fm_summary.json").read_text())["switched"] is False
    assert cli.main(["attack", "afm", "--scenario", str(path), "--out", str(tmp_path)]) == 2


# --- sweep -----------------------------------------------------------------

def test_sweep_single_point(tmp_path):
    assert cli.main(["sweep", "--parameter", "B", "--start", "0.5", "--out", str(tmp_path)]) == 0
    assert len(_read_csv(tmp_path / "sweep_B.csv")) == 1


def test_sweep_parallel_matches_serial(tmp_path):
    args = ["sweep", "--parameter", "E", "--start", "0.5e7", "--stop", "5e7", "--num", "6"]
    assert cli.main([*args, "--out", str(tmp_path / "s")]) == 0
    assert cli.main([*args, "--jobs", "3", "--out", str(tmp_path / "p")]) == 0
    assert (tmp_path / "s" / "sweep_E.csv").read_bytes() == (tmp_path / "p" / "sweep_E.csv").read_bytes()
    rows = _read_csv(tmp_path / "s" / "sweep_E.csv")
    assert [float(r["E"]) for r in rows] == sorted(float(r["E"]) for r in rows)


def _tau_flow_column(tmp_path, start, stop, num=12):
    assert cli.main(["sweep", "--parameter", "E", "--start", str(start), "--stop", str(stop),
                     "--num", str(num), "--metric", "tau_flow", "--out", str(tmp_path)]) == 0
    return [float(r["tau_flow"]) if r["tau_flow"] != "nan" else math.nan
            for r in _read_csv(tmp_path / "sweep_E.csv")]


def test_sweep_tau_flow_creep_points_are_nan(tmp_path):
    E_c = physics.critical_field(physics.MaterialParams(), 0.5)
    col = _tau_flow_column(tmp_path, 0.5e7, 0.99 * E_c, num=3)
    assert all(math.isnan(x) for x in col)


def test_sweep_tau_flow_decreasing_below_twice_critical(tmp_path):
    E_c = physics.critical_field(physics.MaterialParams(), 0.5)
    col = _tau_flow_column(tmp_path, 1.01 * E_c, 2 * E_c)
    assert all(b < a for a, b in zip(col, col[1:]))


@pytest.mark.xfail(strict=True, reason="xi grows with E, so tau_flow ~ E^2/(E - E_c) "
                                       "turns upward beyond 2 E_c")
def test_sweep_tau_flow_monotone_over_full_range(tmp_path):
    col = [x for x in _tau_flow_column(tmp_path, 0.5e7, 5e7) if not math.isnan(x)]
    assert all(b < a for a, b in zip(col, col[1:]))


def test_sweep_homogeneous_field_never_switches(tmp_path):
    assert cli.main(["sweep", "--parameter", "H_homogeneous", "--start", "0.1", "--stop", "1.0",
                     "--num", "3", "--jobs", "3", "--out", str(tmp_path)]) == 0
    rows = _read_csv(tmp_path / "sweep_H_homogeneous.csv")
    assert [r["switched"] for r in rows] == ["False"] * 3


def test_sweep_dotted_parameter(tmp_path):
    assert cli.main(["sweep", "--parameter", "material.K_u", "--start", "5000", "--stop", "9000",
                     "--num", "3", "--metric", "E_coherent", "--out", str(tmp_path)]) == 0
    col = [float(r["E_coherent"]) for r in _read_csv(tmp_path / "sweep_material.K_u.csv")]
    assert col[2] / col[0] == pytest.approx(9000 / 5000)


@pytest.mark.parametrize("args", [["--parameter", "nope", "--start", "1"],
                                  ["--parameter", "material.nope", "--start", "1"],
                                  ["--parameter", "B", "--start", "1", "--metric", "nope"]])
def test_sweep_unknown_names(tmp_path, args):
    assert cli.main(["sweep", *args, "--out", str(tmp_path)]) == 2
