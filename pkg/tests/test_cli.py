import csv
import json
import math
import re

import numpy as np
import pytest

from comb_hom import cli
from comb_hom.config import (
    PRESETS,
    ConfigParseError,
    ConfigValidationError,
    parse_config,
    preset_config,
)
from comb_hom.sampling import fwhm

FIG1_TEXT = json.dumps(
    {
        "state_kind": "comb_pair",
        "omega_spacing": 1.0,
        "line_shape": {"kind": "gaussian", "width": 0.05},
        "envelope": {"kind": "rectangle", "width": 20.0},
        "scan": "time",
        "time": {"range": [-math.pi, math.pi], "points": 201},
    }
)

SMALL_2D = {
    "name": "small",
    "state_kind": "comb_pair",
    "omega_spacing": 1.0,
    "line_shape": {"kind": "gaussian", "width": 0.1},
    "envelope": {"kind": "gaussian", "width": 10.0},
    "scan": "2d",
    "time": {"range": [-0.3, 0.3], "points": 6},
    "frequency": {"range": [-0.1, 0.1], "points": 5},
    "methods": ["exact", "approx"],
}


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_parse_minimal_config():
    cfg = parse_config(FIG1_TEXT)
    assert cfg.state_kind == "comb_pair" and cfg.scan == "time"
    assert cfg.time.points == 201
    assert cfg.methods == ("exact",)
    assert cfg.t_shifts is not None and cfg.w_shifts is None


def test_negative_width_names_field():
    obj = json.loads(FIG1_TEXT)
    obj["line_shape"]["width"] = -1
    with pytest.raises(ConfigValidationError) as exc:
        parse_config(json.dumps(obj))
    assert exc.value.field == "line_shape.width"


def test_unknown_key_rejected():
    obj = json.loads(FIG1_TEXT)
    obj["chirp"] = 0.1
    with pytest.raises(ConfigValidationError, match="chirp"):
        parse_config(json.dumps(obj))


def test_empty_range_rejected():
    obj = json.loads(FIG1_TEXT)
    obj["time"]["range"] = [1.0, 1.0]
    with pytest.raises(ConfigValidationError) as exc:
        parse_config(json.dumps(obj))
    assert exc.value.field == "time.range"


def test_malformed_json_reports_position():
    with pytest.raises(ConfigParseError) as exc:
        parse_config('{\n  "scan": "time",\n  oops\n}')
    assert exc.value.line == 3 and exc.value.column is not None


def test_presets_valid_and_listed(capsys):
    for name in PRESETS:
        assert preset_config(name).name == name
    assert cli.main(["presets"]) == 0
    out = capsys.readouterr().out
    assert all(name in out for name in ("fig1", "gauss-comb", "entangled", "2d-comb"))


def test_exit_code_invalid(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"state_kind": "comb_pair"}')
    assert cli.main(["run", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert cli.main(["run", "--config", str(tmp_path / "missing.json")]) == 2
    assert cli.main(["run", "--preset", "nope"]) == 2


def test_exit_code_self_check(tmp_path, monkeypatch):
    monkeypatch.setattr(cli, "_verify", lambda cfg, exact: (1.0, []))
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({**SMALL_2D, "verify": True}))
    assert cli.main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 3
    assert "FAIL" in (tmp_path / "o" / "report.txt").read_text()


def test_check_command(tmp_path):
    assert cli.main(["check", "--preset", "gauss-comb"]) == 0
    bad = tmp_path / "b.json"
    bad.write_text(json.dumps({**SMALL_2D, "line_shape": {"kind": "gaussian", "width": 2.0}}))
    assert cli.main(["check", "--config", str(bad)]) == 3


def test_gauss_comb_preset(tmp_path):
    assert cli.main(["run", "--preset", "gauss-comb", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "gauss-comb_time_exact_overlap.csv")
    assert list(rows[0]) == ["delta_t", "delta_omega", "coincidence", "method", "state_kind"]
    dt = np.array([float(r["delta_t"]) for r in rows])
    c = np.array([float(r["coincidence"]) for r in rows])
    assert all(r["delta_omega"] == "0" for r in rows)
    assert abs(c[np.argmin(np.abs(dt))]) < 1e-9
    assert np.all((c >= -1e-9) & (c <= 0.5 + 1e-9))
    assert fwhm(dt, c) == pytest.approx(3.330 * 0.025, rel=1e-2)
    report = (tmp_path / "report.txt").read_text()
    assert "uncertainty product" in report and "0.00125" in report
    assert "FWHM" in report and "minimum C" in report


def test_csv_uses_round_trip_precision(tmp_path):
    assert cli.main(["run", "--preset", "gauss-comb", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "gauss-comb_time_exact_overlap.csv")
    for r in rows:
        for key in ("delta_t", "delta_omega", "coincidence"):
            assert r[key] == format(float(r[key]), ".17g")


def test_entangled_preset(tmp_path):
    assert cli.main(["run", "--preset", "entangled", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "entangled_frequency_exact_overlap.csv")
    assert all(float(r["coincidence"]) < 0.01 for r in rows)
    assert all(r["state_kind"] == "entangled_pair" for r in rows)


def test_rerun_byte_identical_across_threads(tmp_path, monkeypatch):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(SMALL_2D))
    outputs = []
    for threads in ("1", "3"):
        monkeypatch.setenv("COMB_HOM_THREADS", threads)
        out = tmp_path / f"o{threads}"
        assert cli.main(["run", "--config", str(cfg), "--out", str(out)]) == 0
        outputs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    assert outputs[0] == outputs[1]
    assert set(outputs[0]) == {"small_2d_exact_overlap.csv", "small_2d_approx_formula.csv", "report.txt"}


def test_preset_override(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"time": {"range": [-0.1, 0.1], "points": 11}, "methods": ["exact"]}))
    assert cli.main(["run", "--preset", "gauss-comb", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    assert len(read_csv(tmp_path / "o" / "gauss-comb_time_exact_overlap.csv")) == 11


def test_2d_preset_verify(tmp_path):
    assert cli.main(["run", "--preset", "2d-comb", "--out", str(tmp_path), "--verify"]) == 0
    report = (tmp_path / "report.txt").read_text()
    m = re.search(r"max \|oracle - fast\| = (\S+)", report)
    assert m and float(m.group(1)) <= 1e-4
    rows = read_csv(tmp_path / "2d-comb_2d_exact_overlap.csv")
    assert len(rows) == 144
