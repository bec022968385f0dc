import csv
import json
import math

import pytest

from app.cli import main, split_overrides
from app.core.errors import ConfigError
from app.core.fixtures import DEFAULT_DESIGN
from app.models.design import ComponentSet
from app.models.report import COMPRESS_COLUMNS, GAIN_COLUMNS, IMD_COLUMNS
from app.services.synthesis import realize_network


def _read_json(path):
    return json.loads(path.read_text())


def _header(path):
    with path.open(newline="") as f:
        return next(csv.reader(f))


def test_split_overrides_both_forms():
    rest, overrides = split_overrides(
        ["synth", "--fixture", "paper_design", "--design.z1", "4.5", "--sweep.p_points=11"]
    )
    assert rest == ["synth", "--fixture", "paper_design"]
    assert overrides == {"design.z1": "4.5", "sweep.p_points": "11"}


def test_split_overrides_needs_value():
    with pytest.raises(ConfigError):
        split_overrides(["synth", "--design.z1"])


def test_synth_writes_report(tmp_path, prototype, band, plan, capsys):
    assert main(["synth", "--fixture", "paper_design", "--out", str(tmp_path)]) == 0

    report = _read_json(tmp_path / "report.json")
    assert report["formatted"]["c12_pf"] == pytest.approx(0.743, abs=5e-4)
    assert report["snake"]["delta0_rad"] > 0
    components = ComponentSet.model_validate(report["components"])
    assert components == realize_network(prototype, band, plan, theta_trim_deg=-6)

    run = _read_json(tmp_path / "run.json")
    assert run["command"] == "synth"
    assert len(run["config_hash"]) == 64
    assert run["files"] == ["report.json", "run.json"]
    assert str(tmp_path / "run.json") in capsys.readouterr().out


def test_same_config_same_hash(tmp_path):
    ini = tmp_path / "lesa.ini"
    ini.write_text(DEFAULT_DESIGN)
    assert main(["synth", "--fixture", "paper_design", "--out", str(tmp_path / "a")]) == 0
    assert main(["synth", "--config", str(ini), "--out", str(tmp_path / "b")]) == 0
    a = _read_json(tmp_path / "a" / "run.json")
    b = _read_json(tmp_path / "b" / "run.json")
    assert a["config_hash"] == b["config_hash"]


def test_zero_bandwidth_is_numeric_failure(tmp_path):
    code = main([
        "synth", "--fixture", "paper_design", "--out", str(tmp_path),
        "--design.fractional_bandwidth", "0",
    ])
    assert code == 2
    assert not (tmp_path / "run.json").exists()


def test_missing_config_file(tmp_path):
    assert main(["synth", "--config", str(tmp_path / "absent.ini"), "--out", str(tmp_path)]) == 1


def test_empty_config_file(tmp_path):
    ini = tmp_path / "empty.ini"
    ini.write_text("")
    assert main(["synth", "--config", str(ini), "--out", str(tmp_path)]) == 1


def test_bad_value_in_config_file(tmp_path):
    ini = tmp_path / "bad.ini"
    ini.write_text(DEFAULT_DESIGN.replace("f0_hz = 4.9e9", "f0_hz = -1"))
    assert main(["synth", "--config", str(ini), "--out", str(tmp_path)]) == 1


def test_unknown_fixture_and_usage_errors(tmp_path):
    assert main(["synth", "--fixture", "nope", "--out", str(tmp_path)]) == 1
    assert main(["synth", "--out", str(tmp_path)]) == 1
    assert main(["gain", "--fixture", "paper_design", "--engine", "spice"]) == 1
    assert main([]) == 1


def test_gain_coupled_mode(tmp_path):
    assert main(["gain", "--fixture", "paper_design", "--out", str(tmp_path)]) == 0
    assert _header(tmp_path / "gain_cm.csv") == GAIN_COLUMNS
    report = _read_json(tmp_path / "report.json")
    assert report["engine"] == "cm"
    assert report["band"]["center_hz"] == pytest.approx(4.9e9, abs=2e6)
    assert 600e6 <= report["band"]["bandwidth_hz"] <= 1000e6
    with (tmp_path / "gain_cm.csv").open() as f:
        assert sum(1 for _ in f) == 1002


def test_gain_circuit_pump_off(tmp_path):
    ini = tmp_path / "off.ini"
    ini.write_text(DEFAULT_DESIGN.replace("target_gain_db = 20", "delta_p_rad = 0"))
    assert main([
        "gain", "--config", str(ini), "--engine", "abcd", "--out", str(tmp_path),
        "--sweep.n_points", "51",
    ]) == 0
    assert _header(tmp_path / "gain_abcd.csv") == GAIN_COLUMNS[:3]
    report = _read_json(tmp_path / "report.json")
    assert report["pump"]["j_pa_s"] == 0.0
    assert report["netlist"]["z_load"] is None
    assert report["band"] is None
    assert "note" in report
    with (tmp_path / "gain_abcd.csv").open(newline="") as f:
        rows = list(csv.DictReader(f))
    assert all(abs(float(r["gain_db"])) < 1e-6 for r in rows)


def test_gain_circuit_at_pump_operating_point(tmp_path):
    assert main([
        "gain", "--fixture", "paper_design", "--engine", "abcd", "--out", str(tmp_path),
        "--sweep.n_points", "101",
    ]) == 0
    report = _read_json(tmp_path / "report.json")
    pump = report["pump"]
    assert pump["source"] == "pump"
    assert pump["delta_p_rad"] == pytest.approx(1.091, abs=0.01)
    assert pump["modulation"] == pytest.approx(0.5115, rel=0.01)
    assert pump["j_pa_s"] == pytest.approx(
        pump["modulation"] / (2 * 2 * math.pi * 4.9e9 * pump["l_eff_h"]), rel=1e-9
    )
    with (tmp_path / "gain_abcd.csv").open(newline="") as f:
        rows = list(csv.DictReader(f))
    assert float(rows[50]["frequency_hz"]) == pytest.approx(4.9e9)
    assert float(rows[50]["gain_db"]) == pytest.approx(20.0, abs=0.05)
    assert report["band"]["center_hz"] == pytest.approx(4.9e9, abs=10e6)
    assert 24.0 <= report["band"]["peak_gain_db"] <= 25.5


def test_compress_with_override(tmp_path):
    assert main([
        "compress", "--fixture", "paper_design", "--out", str(tmp_path), "--sweep.p_points", "21",
    ]) == 0
    assert _header(tmp_path / "compress.csv") == COMPRESS_COLUMNS
    with (tmp_path / "compress.csv").open() as f:
        assert sum(1 for _ in f) == 22
    report = _read_json(tmp_path / "report.json")
    assert report["small_signal_gain_db"] == pytest.approx(20.0, abs=0.1)
    assert len(report["system_noise_model"]["noise_change_db"]) == 21
    assert report["operating_point"]["modulation"] == pytest.approx(0.5115, rel=0.01)
    assert -71.0 <= report["p1db"]["output_p1db_dbm"] <= -68.0
    assert abs(report["phase_change_at_p1db_deg"]) < 5


def test_imd_writes_one_table_per_spacing(tmp_path):
    assert main(["imd", "--fixture", "paper_design", "--out", str(tmp_path)]) == 0
    run = _read_json(tmp_path / "run.json")
    assert run["files"] == ["report.json", "imd_df1000.csv", "imd_df10000.csv", "run.json"]
    assert _header(tmp_path / "imd_df1000.csv") == IMD_COLUMNS
    report = _read_json(tmp_path / "report.json")
    assert [s["valid"] for s in report["spacings"]] == [True, True]
    assert report["drive_map"]["w"] == 0.085


def _write_csv(path, header, rows):
    with path.open("w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def test_plot_is_deterministic(tmp_path):
    gain = _write_csv(
        tmp_path / "gain.csv", GAIN_COLUMNS[:3],
        [[4.8e9, 10.0, 0.0], [4.9e9, 20.0, 5.0], [5.0e9, 11.0, 9.0]],
    )
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    assert main(["plot", str(gain), "-o", str(a)]) == 0
    assert main(["plot", str(gain), "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().lstrip().startswith("<?xml")


def test_plot_rejects_mixed_tables(tmp_path):
    gain = _write_csv(tmp_path / "gain.csv", GAIN_COLUMNS[:3], [[4.9e9, 20.0, 0.0]])
    compress = _write_csv(tmp_path / "compress.csv", COMPRESS_COLUMNS, [[-100.0, 20.0, "true"]])
    out = tmp_path / "mixed.svg"
    assert main(["plot", str(gain), str(compress), "-o", str(out)]) == 1
    assert not out.exists()


def test_plot_rejects_unknown_header(tmp_path):
    junk = _write_csv(tmp_path / "junk.csv", ["x", "y"], [[1.0, 2.0]])
    assert main(["plot", str(junk), "-o", str(tmp_path / "junk.svg")]) == 1
