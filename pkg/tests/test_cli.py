import numpy as np
import pytest

from wignerlab.cli import (RunConfig, load_config, main, parse_config,
                           run_figure_comparison, run_norms, run_solve)
from wignerlab.errors import ConfigurationError, SolverError

FIGURE_TEXT = """\
# comparison configuration
device_length = 50
segment = -1.5, 1.5, 0.2
N_x = 100
N_v = 256
R_h = 2048
Ly = 31
dy = 0.5
inflow_left = 1.0, 0.0, 0.0002
scheme = both
"""

TINY_TEXT = """\
device_length = 50
segment = -1.5, 1.5, 0.2
N_x = 6
N_v = 8
R_h = 16
Ly = 8
dy = 1.0
inflow_left = 1.0, 0.5, 0.25
"""


class TestParseConfig:
    def test_full_configuration(self):
        cfg = parse_config(FIGURE_TEXT)
        assert cfg.n_x == 100 and cfg.n_v == 256 and cfg.r_h == 2048
        assert cfg.l_y == 31 and cfg.dy == 0.5
        assert cfg.segments == ((-1.5, 1.5, 0.2),)
        assert cfg.inflow_left == (1.0, 0.0, 0.0002)
        assert cfg.inflow_right is None
        assert cfg.scheme == "both"
        assert cfg.h == pytest.approx(1 / 4096)

    def test_pi_suffix(self):
        cfg = parse_config(TINY_TEXT + "inflow_right = 1, 0.5pi, 0.25\n")
        assert cfg.inflow_right[1] == pytest.approx(0.5 * np.pi)

    def test_odd_nv_rejected(self):
        with pytest.raises(ConfigurationError) as err:
            parse_config(TINY_TEXT.replace("N_v = 8", "N_v = 127"))
        assert "even" in str(err.value)

    def test_aliasing_guard(self):
        with pytest.raises(ConfigurationError) as err:
            parse_config(TINY_TEXT.replace("Ly = 8", "Ly = 40"))
        assert "Ly" in str(err.value) and "R_h" in str(err.value)

    def test_unknown_key_reports_line(self):
        with pytest.raises(ConfigurationError) as err:
            parse_config(TINY_TEXT + "N_z = 3\n")
        assert "line 9" in str(err.value) and "N_z" in str(err.value)

    def test_malformed_number_reports_line(self):
        with pytest.raises(ConfigurationError) as err:
            parse_config(TINY_TEXT.replace("N_x = 6", "N_x = six"))
        assert "line 3" in str(err.value)

    def test_missing_required_keys(self):
        with pytest.raises(ConfigurationError) as err:
            parse_config("N_x = 6\n")
        msg = str(err.value)
        assert "N_v" in msg and "R_h" in msg

    def test_missing_equals_sign(self):
        with pytest.raises(ConfigurationError) as err:
            parse_config("N_x 6\n")
        assert "line 1" in str(err.value)

    def test_bad_scheme(self):
        with pytest.raises(ConfigurationError):
            parse_config(TINY_TEXT + "scheme = wrong\n")

    def test_levels_list(self):
        cfg = parse_config(TINY_TEXT + "levels = 4, 8, 16\n")
        assert cfg.levels == (4, 8, 16)


class TestMain:
    def test_config_error_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text(TINY_TEXT.replace("N_v = 8", "N_v = 7"))
        code = main(["solve", "--config", str(bad), "--out", str(tmp_path)])
        assert code == 2
        assert "configuration error" in capsys.readouterr().err

    def test_solver_error_exit_code(self, tmp_path, capsys, monkeypatch):
        cfg_file = tmp_path / "ok.cfg"
        cfg_file.write_text(TINY_TEXT)
        monkeypatch.setattr("wignerlab.cli.run_solve",
                            lambda *a, **k: (_ for _ in ()).throw(
                                SolverError("boom")))
        code = main(["solve", "--config", str(cfg_file), "--out",
                     str(tmp_path)])
        assert code == 3
        assert "solver error" in capsys.readouterr().err

    def test_solve_success(self, tmp_path, capsys):
        cfg_file = tmp_path / "ok.cfg"
        cfg_file.write_text(TINY_TEXT)
        out = tmp_path / "out"
        code = main(["solve", "--config", str(cfg_file), "--out", str(out),
                     "--scheme", "improved"])
        assert code == 0
        assert (out / "solution_improved.csv").exists()
        assert "residual" in capsys.readouterr().out


class TestRunners:
    def test_figure_outputs_and_determinism(self, tmp_path):
        cfg = parse_config(TINY_TEXT + "scheme = both\n")
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            run_figure_comparison(cfg, out)
            outs.append({p.name: p.read_bytes()
                         for p in sorted(out.iterdir())})
        assert set(outs[0]) == {
            "slice_left_original.csv", "slice_left_improved.csv",
            "slice_center_original.csv", "slice_center_improved.csv",
            "figure_left.svg", "figure_center.svg"}
        assert outs[0] == outs[1]  # byte-identical reruns

    def test_figure_zero_potential_reproduces_inflow(self, tmp_path):
        text = TINY_TEXT.replace("segment = -1.5, 1.5, 0.2\n", "")
        cfg = parse_config(text + "scheme = both\n")
        result = run_figure_comparison(cfg, tmp_path / "o")
        import csv
        for scheme in ("original", "improved"):
            with open(tmp_path / "o" / f"slice_center_{scheme}.csv") as fh:
                fh.readline()  # location comment
                rows = list(csv.DictReader(fh))
            v = np.array([float(r["v"]) for r in rows])
            f = np.array([float(r["f"]) for r in rows])
            expected = np.where(v > 0, np.exp(-(v - 0.5) ** 2 / 0.25), 0.0)
            np.testing.assert_allclose(f, expected, atol=1e-12)

    def test_solve_writes_solutions(self, tmp_path):
        cfg = parse_config(TINY_TEXT)
        sols = run_solve(cfg, tmp_path, ["original", "improved"])
        assert set(sols) == {"original", "improved"}
        for scheme in sols:
            path = tmp_path / f"solution_{scheme}.csv"
            assert path.read_text().startswith("x,v,f\n")

    def test_norms_csv(self, tmp_path):
        cfg = parse_config(TINY_TEXT + "levels = 16, 32\nnorm_position = 10\n")
        rows = run_norms(cfg, tmp_path)
        assert [r["r_h"] for r in rows] == [16, 32]
        header = (tmp_path / "norms.csv").read_text().splitlines()[0]
        assert header == "r_h,norm_theta,norm_A,norm_B"

    def test_conv_requires_two_levels(self, tmp_path):
        from wignerlab.cli import run_v_convergence
        cfg = parse_config(TINY_TEXT + "levels = 8\n")
        with pytest.raises(ConfigurationError):
            run_v_convergence(cfg, tmp_path)
