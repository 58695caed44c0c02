import json
import math

import numpy as np
import pytest

from kondochain.cli import (
    ConfigError,
    main,
    parse_config,
    parse_grid,
    read_csv,
)


class TestParseConfig:
    def test_flags_with_defaults(self):
        cfg = parse_config("ehl", overrides={"n": 12, "j2": 0.0, "jp": 0.5})
        assert cfg.n == 12 and cfg.jp == 0.5
        assert cfg.j1 == 1.0
        assert cfg.threshold == 1e-3
        assert cfg.format == "csv"

    def test_odd_n_rejected(self):
        with pytest.raises(ConfigError, match="n"):
            parse_config("ehl", overrides={"n": 13})

    def test_jp_out_of_range(self):
        with pytest.raises(ConfigError, match="jp"):
            parse_config("ehl", overrides={"n": 12, "jp": 1.5})

    def test_unknown_key_named(self):
        with pytest.raises(ConfigError, match="jq"):
            parse_config("ehl", overrides={"n": 12, "jq": 1})

    def test_missing_n(self):
        with pytest.raises(ConfigError, match="n"):
            parse_config("ehl")

    def test_thermal_size_cap(self):
        with pytest.raises(ConfigError, match="n"):
            parse_config("thermal", overrides={"n": 14})

    def test_file_values_and_flag_override(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text(
            "# comment line\n"
            "n = 10\n"
            "j2 = 0.42\n"
            "jp = 0.30\n"
            "threshold = 0.01\n"
        )
        cfg = parse_config("ehl", file=str(cfg_file), overrides={"jp": 0.6})
        assert cfg.n == 10
        assert cfg.j2 == 0.42
        assert cfg.jp == 0.6  # flag wins
        assert cfg.threshold == 0.01

    def test_file_unknown_key(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text("frobnicate = 3\n")
        with pytest.raises(ConfigError, match="frobnicate"):
            parse_config("ehl", file=str(cfg_file), overrides={"n": 8})

    def test_grid_parsing(self):
        assert parse_grid("0.1:0.3:0.1", "jp_grid") == (0.1, 0.2, 0.3)
        assert parse_grid("0.25,0.5", "jp_grid") == (0.25, 0.5)
        with pytest.raises(ConfigError):
            parse_grid("0.5:0.1:0.1", "jp_grid")


class TestMainExitCodes:
    def test_config_error_is_2(self, capsys, tmp_path):
        code = main(["ehl", "--n", "13", "--outdir", str(tmp_path)])
        assert code == 2
        assert "n" in capsys.readouterr().err

    def test_success_is_0(self, tmp_path, capsys):
        code = main(["ground", "--n", "8", "--jp", "0.5", "--outdir", str(tmp_path)])
        assert code == 0
        out = capsys.readouterr().out
        assert "ground.csv" in out and "config.json" in out


class TestEmission:
    def test_ehl_schema_and_roundtrip(self, tmp_path):
        code = main([
            "ehl", "--n", "8", "--j2", "0.0", "--jp", "0.5",
            "--outdir", str(tmp_path),
        ])
        assert code == 0
        header, columns, rows = read_csv(tmp_path / "ehl.csv")
        assert columns == ["L", "negativity"]
        for key in ("n", "j1", "j2", "jp", "threshold", "l_star"):
            assert key in header
        assert len(rows) == 7  # L = 0..6
        assert rows[0][0] == 0.0
        assert rows[0][1] == pytest.approx(1.0, abs=1e-6)
        # 17-significant-digit serialization round-trips exactly
        from kondochain.experiments import ehl_curve
        from kondochain.basis import ChainSpec

        res = ehl_curve(ChainSpec(8, j2=0.0, j_prime=0.5))
        for row, want in zip(rows, res.negativities):
            assert row[1] == want
        cfg = json.loads((tmp_path / "config.json").read_text())
        assert cfg["n"] == 8 and cfg["experiment"] == "ehl"

    def test_quench_trajectory_schema(self, tmp_path):
        code = main([
            "quench", "--n", "8", "--jp", "0.4", "--t-max", "2.0", "--dt", "0.5",
            "--outdir", str(tmp_path),
        ])
        assert code == 0
        header, columns, rows = read_csv(tmp_path / "trajectory.csv")
        assert columns == ["t", "concurrence"]
        assert len(rows) == 5
        assert float(header["norm_drift"]) <= 1e-8

    def test_scan_outputs(self, tmp_path):
        code = main([
            "scan", "--n", "8", "--j2", "0.0", "--jp-grid", "0.2,0.3",
            "--t-max", "8.0", "--dt", "0.2", "--outdir", str(tmp_path),
        ])
        assert code == 0
        header, columns, rows = read_csv(tmp_path / "scan_summary.csv")
        assert columns == ["n", "j2", "jp", "e_m", "t_opt"]
        assert len(rows) == 2
        assert "jp_opt" in header and "e_m" in header
        assert (tmp_path / "trajectories" / "jp_0.2.csv").exists()
        assert (tmp_path / "trajectories" / "jp_0.3.csv").exists()

    def test_interference_schema(self, tmp_path):
        code = main([
            "interference", "--n", "8", "--jp", "0.3", "--k", "10",
            "--outdir", str(tmp_path),
        ])
        assert code == 0
        header, columns, rows = read_csv(tmp_path / "interference.csv")
        assert columns == ["k", "energy", "overlap", "alpha", "beta"]
        assert len(rows) == 10
        for key in ("delta_e", "condition_ratio", "t_predicted"):
            assert key in header

    def test_thermal_schema(self, tmp_path):
        code = main([
            "thermal", "--n", "6", "--jp", "0.4", "--beta-grid", "10000,5",
            "--outdir", str(tmp_path),
        ])
        assert code == 0
        header, columns, rows = read_csv(tmp_path / "thermal.csv")
        assert columns == ["beta", "e_m_dynamic", "c_static"]
        assert len(rows) == 2
        assert float(header["jp_static"]) == pytest.approx(0.1 / math.sqrt(6))

    def test_ansatz_schema(self, tmp_path):
        code = main(["ansatz", "--n", "8", "--j2", "0.5", "--jp", "1.0",
                     "--outdir", str(tmp_path)])
        assert code == 0
        header, columns, rows = read_csv(tmp_path / "ansatz.csv")
        assert columns[0] == "impurity_purity"
        assert rows[0][0] == pytest.approx(0.5, abs=1e-6)

    def test_scaling_schema(self, tmp_path):
        code = main([
            "scaling", "--n", "8", "--j2", "0.0", "--jp-grid", "0.5:0.9:0.1",
            "--threshold", "0.15", "--outdir", str(tmp_path),
        ])
        assert code == 0
        header, columns, rows = read_csv(tmp_path / "scaling.csv")
        assert columns == ["n", "jp", "l_over_n", "negativity"]
        assert "alpha" in header or "fit_error" in header

    def test_rerun_is_byte_identical(self, tmp_path):
        args = ["ehl", "--n", "8", "--j2", "0.42", "--jp", "0.7", "--seed", "99"]
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(args + ["--outdir", str(a)]) == 0
        assert main(args + ["--outdir", str(b)]) == 0
        assert (a / "ehl.csv").read_bytes() == (b / "ehl.csv").read_bytes()

    def test_outdir_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv("KONDOCHAIN_OUTDIR", str(tmp_path / "envout"))
        assert main(["ground", "--n", "8", "--jp", "0.5"]) == 0
        assert (tmp_path / "envout" / "ground.csv").exists()
