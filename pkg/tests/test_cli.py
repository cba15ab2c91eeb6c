import csv
import json

import pytest

from secris.cli import main
from secris.config import ConfigError, ExperimentConfig
from secris.sweeps import CSV_COLUMNS, run_sweep


def tiny_config(**overrides):
    raw = {
        "geometry": {"m": 4, "ny": 8, "nz": 1},
        "schemes": ["pdca", "no_ris"],
        "n_mc": 2000,
        "n_user_realizations": 2,
        "seed": 3,
        "sweep": {"power_dbm": [0.0, 5.0]},
    }
    raw.update(overrides)
    return raw


def write_config(tmp_path, raw):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(raw), encoding="utf-8")
    return str(path)


class TestConfig:
    def test_round_trip_identity(self):
        cfg = ExperimentConfig.from_dict(tiny_config())
        again = ExperimentConfig.from_dict(cfg.to_dict())
        assert cfg.to_dict() == again.to_dict()

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"geometri": {}})
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"geometry": {"mm": 4}})
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"pdca": {"rho_zero": 1.0}})

    def test_infinite_k_round_trip(self):
        cfg = ExperimentConfig.from_dict({"fading": {"k_iu": "inf"}})
        stats = cfg.to_fading_stats()
        assert stats.k_iu == float("inf")
        again = ExperimentConfig.from_dict(cfg.to_dict())
        assert again.to_fading_stats().k_iu == float("inf")

    def test_bad_scheme_rejected(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"schemes": ["sdp"]})


class TestSweepCsv:
    def test_row_shape_and_order(self, tmp_path):
        cfg = ExperimentConfig.from_dict(tiny_config())
        out = tmp_path / "sweep.csv"
        rows = run_sweep(cfg, "power", out)
        # 2 sweep values x 2 schemes
        assert len(rows) == 4
        with open(out, encoding="utf-8") as fh:
            recs = list(csv.DictReader(fh))
        assert len(recs) == 4
        assert tuple(recs[0].keys()) == CSV_COLUMNS
        keys = [(r["kind"], float(r["sweep_value"]), r["scheme"]) for r in recs]
        assert keys == sorted(keys)
        for r in recs:
            assert r["schema_version"] == "1"
            assert float(r["esr_stderr"]) >= 0.0
            assert int(r["n_mc"]) == 2000

    def test_byte_identical_rerun(self, tmp_path):
        cfg = ExperimentConfig.from_dict(tiny_config())
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        run_sweep(cfg, "power", out1)
        run_sweep(cfg, "power", out2)
        assert out1.read_bytes() == out2.read_bytes()

    def test_seed_override_changes_output(self, tmp_path):
        cfg = ExperimentConfig.from_dict(tiny_config())
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        run_sweep(cfg, "power", out1)
        run_sweep(cfg, "power", out2, seed=99)
        assert out1.read_bytes() != out2.read_bytes()

    def test_pdca_esr_monotone_in_power(self, tmp_path):
        cfg = ExperimentConfig.from_dict(
            tiny_config(sweep={"power_dbm": [-5.0, 5.0]},
                        n_user_realizations=4))
        rows = run_sweep(cfg, "power", tmp_path / "p.csv")
        pdca = sorted((r for r in rows if r["scheme"] == "pdca"),
                      key=lambda r: r["sweep_value"])
        lo, hi = pdca
        slack = 2.0 * (lo["esr_stderr"] + hi["esr_stderr"])
        assert hi["esr_mean"] >= lo["esr_mean"] - slack

    def test_unique_row_keys(self, tmp_path):
        cfg = ExperimentConfig.from_dict(tiny_config())
        rows = run_sweep(cfg, "power", tmp_path / "u.csv")
        keys = [(r["scheme"], r["seed"], r["sweep_value"]) for r in rows]
        assert len(keys) == len(set(keys))

    def test_elements_kind_must_divide(self, tmp_path):
        cfg = ExperimentConfig.from_dict(
            tiny_config(sweep={"elements": [12]}))
        with pytest.raises(ValueError):
            run_sweep(cfg, "elements", tmp_path / "x.csv")


class TestCliEntry:
    def test_sweep_command(self, tmp_path, capsys):
        path = write_config(tmp_path, tiny_config())
        out = tmp_path / "out.csv"
        rc = main(["sweep", "--kind", "power", "--config", path,
                   "--out", str(out)])
        assert rc == 0
        assert out.exists()
        assert "wrote 4 rows" in capsys.readouterr().out

    def test_solve_command_with_trace(self, tmp_path, capsys):
        path = write_config(tmp_path, tiny_config())
        trace = tmp_path / "trace.csv"
        rc = main(["solve", "--config", path, "--scheme", "pdca",
                   "--trace", str(trace)])
        assert rc == 0
        assert "lesr=" in capsys.readouterr().out
        with open(trace, encoding="utf-8") as fh:
            recs = list(csv.DictReader(fh))
        assert recs
        assert set(recs[0]) == {"outer_iter", "lesr", "al", "violation",
                                "rho", "inner_iterations"}
        assert float(recs[-1]["violation"]) <= 1e-3

    def test_usage_errors_exit_1(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["sweep", "--kind", "bogus", "--config", "x", "--out", "y"])
        assert exc.value.code == 1
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 1

    def test_bad_config_exit_1(self, tmp_path, capsys):
        path = write_config(tmp_path, {"not_a_key": 1})
        rc = main(["sweep", "--kind", "power", "--config", path,
                   "--out", str(tmp_path / "o.csv")])
        assert rc == 1
        assert "bad config" in capsys.readouterr().err

    def test_missing_config_file_exit_1(self, tmp_path, capsys):
        rc = main(["solve", "--config", str(tmp_path / "none.json"),
                   "--scheme", "pdca"])
        assert rc == 1

    def test_validate_fast_exit_0(self, capsys):
        rc = main(["validate", "--fast"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "[PASS]" in out and "[FAIL]" not in out
