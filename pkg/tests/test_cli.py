import json

import numpy as np
import pytest

from dqdsim.cli import RunConfig, main, parse_values, validate_config


def read_rows(path):
    lines = path.read_text().strip().split("\n")
    header = lines[0].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[1:]]


class TestValidateConfig:
    def test_default_ok(self):
        assert validate_config(RunConfig()) == []

    def test_negative_w(self):
        errs = validate_config(RunConfig(w=-1.0))
        assert any("w must be positive" in e for e in errs)

    def test_unknown_axis(self):
        errs = validate_config(RunConfig(axis="voltage", values="1,2"))
        assert any("unknown sweep axis" in e for e in errs)

    def test_sweep_needs_values(self):
        errs = validate_config(RunConfig(axis="U_max"))
        assert any("--values" in e for e in errs)

    def test_bad_alpha(self):
        errs = validate_config(RunConfig(alpha_abs=1.5))
        assert any("alpha_abs" in e for e in errs)

    def test_parse_values_types(self):
        assert parse_values("U_max", "20, 50") == [20.0, 50.0]
        assert parse_values("n_support", "2,3") == [2, 3]
        with pytest.raises(ValueError):
            parse_values("U_max", "a,b")


class TestRuns:
    def test_effective_teleport_row(self, tmp_path):
        out = tmp_path / "run"
        code = main(["teleport", "--mode", "effective", "--alpha-abs", "0.6",
                     "--seed", "7", "--output", str(out)])
        assert code == 0
        rows = read_rows(tmp_path / "run.csv")
        assert len(rows) == 1
        assert float(rows[0]["fidelity"]) == pytest.approx(1.0, abs=1e-10)
        assert rows[0]["alpha_abs"] == "0.6"
        manifest = json.loads((tmp_path / "run.manifest.json").read_text())
        assert manifest["seed"] == 7
        assert "numpy" in manifest["versions"]

    def test_entangle_uncoupled_overlap(self, tmp_path):
        out = tmp_path / "ent"
        code = main(["entangle", "--u-max", "0", "--t-ent", "10", "--output", str(out)])
        assert code == 0
        row = read_rows(tmp_path / "ent.csv")[0]
        # the separable state overlaps the Bell target with probability 1/2
        assert float(row["bell_overlap_sq"]) == pytest.approx(0.5, abs=1e-12)

    def test_sweep_rows_ordered_by_axis(self, tmp_path):
        out = tmp_path / "sw"
        code = main(["sweep", "--experiment", "encode", "--axis", "alpha_abs",
                     "--values", "0.9,0.2,0.5", "--output", str(out)])
        assert code == 0
        rows = read_rows(tmp_path / "sw.csv")
        assert [r["alpha_abs"] for r in rows] == ["0.2", "0.5", "0.9"]
        assert all(r["experiment"] == "encode" for r in rows)

    def test_byte_identical_reruns(self, tmp_path):
        args = ["teleport", "--mode", "effective", "--alpha-abs", "0.3", "--seed", "11"]
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(args + ["--output", str(a)]) == 0
        assert main(args + ["--output", str(b)]) == 0
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_config_file_and_flag_override(self, tmp_path):
        cfgfile = tmp_path / "cfg.json"
        cfgfile.write_text(json.dumps({"mode": "effective", "alpha_abs": 0.9, "seed": 3}))
        out = tmp_path / "cfgrun"
        code = main(["teleport", "--config", str(cfgfile),
                     "--alpha-abs", "0.2", "--output", str(out)])
        assert code == 0
        row = read_rows(tmp_path / "cfgrun.csv")[0]
        assert row["alpha_abs"] == "0.2"      # flag beats file
        assert row["mode"] == "effective"     # file beats default
        assert row["seed"] == "3"

    def test_unknown_config_field(self, tmp_path):
        cfgfile = tmp_path / "cfg.json"
        cfgfile.write_text(json.dumps({"voltage": 2.0}))
        assert main(["teleport", "--config", str(cfgfile)]) == 2

    def test_config_error_exit_code(self, tmp_path):
        code = main(["teleport", "--alpha-abs", "2.0",
                     "--output", str(tmp_path / "x")])
        assert code == 2

    def test_numerical_error_exit_code(self, tmp_path):
        code = main(["entangle", "--u-max", "50", "--t-ent", "50", "--dt", "5",
                     "--richardson", "--tolerance", "1e-12",
                     "--output", str(tmp_path / "x")])
        assert code == 3

    def test_thread_cap_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("DQD_SIM_THREADS", "2")
        out = tmp_path / "tw"
        code = main(["sweep", "--experiment", "encode", "--axis", "alpha_abs",
                     "--values", "0.1,0.4,0.8", "--output", str(out)])
        assert code == 0
        assert len(read_rows(tmp_path / "tw.csv")) == 3

    def test_bad_thread_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("DQD_SIM_THREADS", "many")
        code = main(["sweep", "--experiment", "encode", "--axis", "alpha_abs",
                     "--values", "0.1,0.4", "--output", str(tmp_path / "x")])
        assert code == 2

    def test_float_formatting_12_digits(self, tmp_path):
        out = tmp_path / "fmt"
        main(["encode", "--alpha-abs", "0.2", "--output", str(out)])
        row = read_rows(tmp_path / "fmt.csv")[0]
        assert row["achieved_beta_im"] == f"{np.sqrt(1 - 0.04):.12g}"


class TestFullModeRows:
    def test_couple_row(self, tmp_path):
        out = tmp_path / "cp"
        code = main(["couple", "--u-max", "30", "--uprime-max", "30",
                     "--output", str(out)])
        assert code == 0
        row = read_rows(tmp_path / "cp.csv")[0]
        assert float(row["target_overlap_sq"]) >= 0.99
        assert float(row["norm"]) == pytest.approx(1.0, abs=1e-9)

    def test_bell_row(self, tmp_path):
        out = tmp_path / "bl"
        code = main(["bell", "--u-max", "30", "--uprime-max", "30", "--output", str(out)])
        assert code == 0
        row = read_rows(tmp_path / "bl.csv")[0]
        # the branch balance carries O((w/U)^2) leakage corrections at U = 30 w
        assert float(row["p0"]) == pytest.approx(0.5, abs=0.05)
        assert float(row["effective_overlap_sq"]) >= 0.98

    def test_chain_row(self, tmp_path):
        out = tmp_path / "ch"
        code = main(["chain", "--mode", "effective", "--n-support", "4",
                     "--alpha-abs", "0.6", "--output", str(out)])
        assert code == 0
        row = read_rows(tmp_path / "ch.csv")[0]
        assert float(row["fidelity"]) == pytest.approx(1.0, abs=1e-10)
        assert float(row["ghz_overlap_sq"]) == pytest.approx(1.0, abs=1e-12)

    def test_infeasible_chain_exits_2(self, tmp_path):
        code = main(["chain", "--n-support", "4", "--u-max", "100",
                     "--output", str(tmp_path / "x")])
        assert code == 2

    def test_teleport_sweep_infidelity_non_increasing(self, tmp_path):
        out = tmp_path / "sweepU"
        code = main(["sweep", "--experiment", "teleport", "--axis", "U_max",
                     "--values", "20,50,100,200", "--output", str(out)])
        assert code == 0
        rows = read_rows(tmp_path / "sweepU.csv")
        assert [r["U_max"] for r in rows] == ["20", "50", "100", "200"]
        infids = [1.0 - float(r["fidelity"]) for r in rows]
        assert all(a >= b - 1e-12 for a, b in zip(infids, infids[1:]))
