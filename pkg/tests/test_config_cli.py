import json

import numpy as np
import pytest

from h2frag.cli import main
from h2frag.config import PRESETS, parse_config


class TestConfig:
    def test_fig2a_preset(self):
        cfg = parse_config(preset="fig2a")
        assert cfg.wavelength_nm == 266.0
        assert cfg.cycles == 1
        assert cfg.intensity_w_cm2 == 1e15
        assert cfg.mode == "dynamic"

    def test_fig4a_preset(self):
        cfg = parse_config(preset="fig4a")
        assert cfg.wavelength_nm == 266.0
        assert cfg.cycles == 36
        assert cfg.intensity_w_cm2 == 2e14
        # 36 cycles at 266 nm last about 32 fs
        from h2frag.rates import make_pulse
        p = make_pulse(cfg.wavelength_nm, cfg.intensity_w_cm2, cfg.cycles)
        assert p.t_f * 0.02418884 == pytest.approx(32.0, abs=0.1)

    def test_unknown_preset(self):
        with pytest.raises(ValueError, match="unknown preset"):
            parse_config(preset="fig9z")

    def test_unknown_key_rejected(self, tmp_path):
        p = tmp_path / "c.cfg"
        p.write_text("wavelenght_nm = 800\n")
        with pytest.raises(ValueError, match="unknown config key"):
            parse_config(p)

    def test_negative_intensity_rejected(self, tmp_path):
        p = tmp_path / "c.cfg"
        p.write_text("intensity_w_cm2 = -1\n")
        with pytest.raises(ValueError, match="positive"):
            parse_config(p)

    def test_file_overrides_preset_and_flags_override_file(self, tmp_path):
        p = tmp_path / "c.cfg"
        p.write_text("cycles = 4  # comment\nintensity_w_cm2 = 3e14\n")
        cfg = parse_config(p, preset="fig2a", overrides={"cycles": 7})
        assert cfg.cycles == 7
        assert cfg.intensity_w_cm2 == 3e14
        assert cfg.wavelength_nm == 266.0

    def test_scan_list(self):
        cfg = parse_config(preset="fig3")
        vals = cfg.scan_list()
        assert len(vals) == 12
        assert vals[0] == pytest.approx(5e13)
        assert vals[-1] == pytest.approx(5e15)
        cfg.scan_intensities = "1e14, 2e14"
        assert cfg.scan_list() == [1e14, 2e14]

    def test_dressed_pairs(self):
        cfg = parse_config(preset="fig5")
        assert cfg.dressed_pair_list() == [(0, 3), (2, 3)]
        cfg.dressed_pairs = "bogus"
        with pytest.raises(ValueError):
            cfg.dressed_pair_list()

    def test_all_presets_validate(self):
        for name in PRESETS:
            parse_config(preset=name)


FAST = ["--wavelength-nm", "266", "--cycles", "1", "--steps-per-cycle", "60"]


def _fast_config(tmp_path):
    p = tmp_path / "fast.cfg"
    p.write_text("wavelength_nm = 266\nintensity_w_cm2 = 8e14\ncycles = 1\n"
                 "steps_per_cycle = 60\nn_points = 2048\nr_min = 0.1\n"
                 "r_max = 40.0\ne_max_ev = 20.0\ne_step_ev = 0.05\n")
    return p


class TestCli:
    def test_run_outputs_and_determinism(self, tmp_path):
        cfgfile = _fast_config(tmp_path)
        outs = []
        for sub in ("a", "b"):
            out = tmp_path / sub
            rc = main(["run", "--config", str(cfgfile), "--out", str(out)])
            assert rc == 0
            outs.append(out)
        for name in ("populations.csv", "spectrum.csv", "summary.json"):
            b0 = (outs[0] / name).read_bytes()
            b1 = (outs[1] / name).read_bytes()
            assert b0 == b1, f"{name} differs between identical reruns"
        summary = json.loads((outs[0] / "summary.json").read_text())
        pops = summary["final_populations"]
        assert abs(sum(pops.values()) - 1.0) < 1e-8
        assert summary["dataset_checksum"]
        header = (outs[0] / "populations.csv").read_text().splitlines()
        assert header[0].startswith("# h2frag ")
        assert any("dataset_checksum" in ln for ln in header[:3])

    def test_run_csv_columns(self, tmp_path):
        cfgfile = _fast_config(tmp_path)
        out = tmp_path / "cols"
        assert main(["run", "--config", str(cfgfile), "--out", str(out)]) == 0
        pop_lines = [ln for ln in (out / "populations.csv").read_text().splitlines()
                     if not ln.startswith("#")]
        assert pop_lines[0] == "t_fs,E_over_E0,pop_H2,pop_g,pop_u,pop_CE,mean_R_g"
        spec_lines = [ln for ln in (out / "spectrum.csv").read_text().splitlines()
                      if not ln.startswith("#")]
        assert spec_lines[0] == "E_eV,P_c,P_diss,P_total"
        data = np.array([[float(x) for x in ln.split(",")]
                         for ln in spec_lines[1:]])
        total = data[:, 1] + data[:, 2]
        assert np.allclose(total, data[:, 3], rtol=1e-12, atol=1e-300)

    def test_frozen_flag(self, tmp_path):
        cfgfile = _fast_config(tmp_path)
        out = tmp_path / "frz"
        assert main(["run", "--config", str(cfgfile), "--out", str(out),
                     "--frozen"]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["config"]["mode"] == "frozen"

    def test_scan_outputs(self, tmp_path):
        out = tmp_path / "scan"
        cfgfile = tmp_path / "scan.cfg"
        cfgfile.write_text("wavelength_nm = 800\ncycles = 1\n"
                           "steps_per_cycle = 60\nn_points = 2048\n"
                           "r_max = 40.0\ne_step_ev = 0.05\n"
                           "scan_intensities = 2e14,6e14\n"
                           "scan_modes = dynamic\n")
        assert main(["scan", "--config", str(cfgfile), "--out", str(out)]) == 0
        lines = [ln for ln in (out / "scan.csv").read_text().splitlines()
                 if not ln.startswith("#")]
        assert lines[0].startswith("intensity_w_cm2,mode,")
        assert len(lines) == 3
        assert (out / "point_00_dynamic" / "summary.json").is_file()
        assert (out / "point_01_dynamic" / "spectrum.csv").is_file()
        i0 = float(lines[1].split(",")[0])
        i1 = float(lines[2].split(",")[0])
        assert i0 < i1

    def test_dressed_outputs(self, tmp_path):
        out = tmp_path / "dr"
        assert main(["dressed", "--preset", "fig5", "--out", str(out)]) == 0
        summary = json.loads((out / "summary.json").read_text())
        assert set(summary["crossings_bohr"]) == {"g0u3", "g2u3"}
        assert summary["crossings_bohr"]["g2u3"] == pytest.approx(3.28, abs=0.05)
        header = (out / "dressed.csv").read_text().splitlines()
        cols = [ln for ln in header if not ln.startswith("#")][0]
        assert cols.split(",")[0] == "R_bohr"
        assert "adiabatic_lower_g0u3" in cols

    def test_error_is_machine_readable(self, tmp_path, capsys):
        rc = main(["run", "--preset", "nope", "--out", str(tmp_path / "x")])
        assert rc == 1
        err = capsys.readouterr().err.strip().splitlines()[-1]
        payload = json.loads(err)
        assert payload["type"] == "ValueError"
        assert "unknown preset" in payload["error"]

    def test_presets_listing(self, capsys):
        assert main(["presets"]) == 0
        text = capsys.readouterr().out
        assert "fig2a" in text and "fig4d" in text
