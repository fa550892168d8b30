import json
import subprocess
import sys

import numpy as np
import pytest

from rydctl.cli import _attach_negative_values, parse_grid, parse_pops, run
from rydctl.errors import InputError
from rydctl.fit import save_spectrum_csv, synthetic_two_level
from rydctl.spectrum import TwoLevelParams


def read_csv(path):
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return dict(zip(header, data.T))


class TestParsing:
    def test_inclusive_grid(self):
        g = parse_grid("-35:10:0.05")
        assert len(g) == 901 and g[0] == -35.0 and g[-1] == 10.0

    def test_list_and_scalar(self):
        np.testing.assert_array_equal(parse_grid("0,1,10"), [0, 1, 10])
        np.testing.assert_array_equal(parse_grid(3.0), [3.0])

    def test_log_default(self):
        g = parse_grid("1e-4:1e-2", log_default=True)
        assert len(g) == 11 and g[0] == pytest.approx(1e-4) and g[-1] == pytest.approx(1e-2)

    @pytest.mark.parametrize("bad", ["a:b:c", "0:1:0", "1:0:0.1", "0,2,1"])
    def test_bad_grid(self, bad):
        with pytest.raises(InputError):
            parse_grid(bad)

    def test_pops_order(self):
        # table order gr, rg, rr, gg -> basis order gg, gr, rg, rr
        np.testing.assert_array_equal(parse_pops("0.1,0.2,0.3,0.4"), [0.4, 0.1, 0.2, 0.3])


class TestCommands:
    def test_fidelity(self, tmp_path, capsys):
        assert run(["fidelity", "--out", str(tmp_path)]) == 0
        assert "bound=0.9480" in capsys.readouterr().out
        assert read_csv(tmp_path / "fidelity.csv")["bound"] == pytest.approx(0.948, abs=5e-5)
        doc = json.loads((tmp_path / "run.json").read_text())
        assert doc["command"] == "fidelity" and "fidelity.csv" in doc["outputs"]

    def test_spectrum_default_grid(self, tmp_path):
        assert run(["spectrum", "--no-lightshift", "--out", str(tmp_path), "--svg"]) == 0
        cols = read_csv(tmp_path / "spectrum.csv")
        assert len(cols["delta_ghz"]) == 901
        assert set(cols) == {"delta_ghz", "rate_per_s", "lightshift_re_mhz", "lightshift_im_mhz"}
        assert (tmp_path / "spectrum.svg").exists()

    def test_lightshift(self, tmp_path):
        assert run(["lightshift", "--delta", "-20,-5", "--out", str(tmp_path)]) == 0
        cols = read_csv(tmp_path / "lightshift.csv")
        # rate == -2 Im(shift), shift in MHz
        np.testing.assert_allclose(-2 * 2 * np.pi * 1e6 * cols["lightshift_im_mhz"], cols["rate_per_s"],
                                   rtol=1e-6)

    def test_error_budget_slopes(self, tmp_path):
        assert run(["error-budget", "--out", str(tmp_path)]) == 0
        r = read_csv(tmp_path / "error_budget_rydberg.csv")
        g = read_csv(tmp_path / "error_budget_ground.csv")
        np.testing.assert_allclose(r["slope_omega_c_sq"], -2.0, atol=1e-6)
        np.testing.assert_allclose(g["slope_omega_c_sq"], -3.0, atol=1e-6)
        np.testing.assert_allclose(g["eps_rot"] + g["eps_sc"], g["eps"], rtol=1e-9)

    def test_fit_two_level(self, tmp_path):
        data = tmp_path / "d.csv"
        save_spectrum_csv(synthetic_two_level(np.linspace(-5, 4, 40), TwoLevelParams(), noise=0.01), data)
        assert run(["fit-two-level", "--data", str(data), "--out", str(tmp_path / "o")]) == 0
        fit = json.loads((tmp_path / "o" / "fit.json").read_text())
        assert fit["params"]["Gamma"] == pytest.approx(TwoLevelParams().Gamma, rel=0.03)

    def test_config_and_override(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"scheme": "ground", "eps": "1e-3,2e-3,4e-3", "gamma_r": 2e-3}))
        assert run(["error-budget", "--config", str(cfg), "--gamma-r", "5e-3", "--out", str(tmp_path / "o")]) == 0
        doc = json.loads((tmp_path / "o" / "run.json").read_text())
        assert doc["config"]["gamma_r"] == 5e-3 and doc["config"]["scheme"] == "ground"
        assert not (tmp_path / "o" / "error_budget_rydberg.csv").exists()
        assert len(read_csv(tmp_path / "o" / "error_budget_ground.csv")["eps"]) == 3

    def test_unknown_config_key(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"bogus": 1}))
        assert run(["fidelity", "--config", str(cfg), "--out", str(tmp_path)]) == 2

    def test_byte_identical_reruns(self, tmp_path):
        args = ["spectrum", "--no-lightshift", "--delta", "-35:10:0.5"]
        assert run(args + ["--out", str(tmp_path / "a")]) == 0
        assert run(args + ["--out", str(tmp_path / "b")]) == 0
        assert (tmp_path / "a" / "spectrum.csv").read_bytes() == (tmp_path / "b" / "spectrum.csv").read_bytes()


class TestExitCodes:
    def test_negative_value_after_switch(self):
        assert _attach_negative_values(["--no-lightshift", "--delta", "-3:1:1", "--ic", "5"]) == [
            "--no-lightshift", "--delta=-3:1:1", "--ic", "5"]

    def test_no_command(self):
        assert run([]) == 2

    def test_unknown_command(self):
        assert run(["bogus"]) == 2

    def test_bad_input(self, tmp_path):
        assert run(["spectrum", "--delta", "x:y:z", "--out", str(tmp_path)]) == 2
        assert run(["fit-two-level", "--data", str(tmp_path / "missing.csv"), "--out", str(tmp_path)]) == 2

    def test_numerical_failure(self, tmp_path):
        assert run(["error-budget", "--eps", "1e-300,1e-299", "--out", str(tmp_path)]) == 3

    def test_module_entry_point(self, tmp_path):
        proc = subprocess.run([sys.executable, "-m", "rydctl", "fidelity", "--out", str(tmp_path)],
                              capture_output=True, text=True)
        assert proc.returncode == 0 and "bound=0.9480" in proc.stdout
