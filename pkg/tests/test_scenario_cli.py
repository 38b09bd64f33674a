import json

import numpy as np
import pytest

from isarrec import scenario as scen
from isarrec.cli import main
from isarrec.io import load_grid_csv


class TestSchema:
    def minimal(self):
        return {
            "schema_version": 1,
            "grid": {"chirps": 8, "samples_per_chirp": 8},
            "signal": {"kind": "scatterers",
                       "components": [{"amplitude": 1.0, "cross_bin": 2, "range_bin": 3}]},
        }

    def test_minimal_accepted(self):
        sc = scen.validate(self.minimal())
        assert sc.chirps == 8
        assert sc.indexing == "zero"
        assert sc.mask_spec is None

    def test_unknown_key_rejected_everywhere(self):
        data = self.minimal()
        data["grid"]["rows"] = 8
        with pytest.raises(scen.ScenarioError, match="unknown"):
            scen.validate(data)
        data = self.minimal()
        data["surprise"] = 1
        with pytest.raises(scen.ScenarioError, match="unknown"):
            scen.validate(data)

    def test_schema_version_checked(self):
        data = self.minimal()
        data["schema_version"] = 2
        with pytest.raises(scen.ScenarioError, match="schema_version"):
            scen.validate(data)

    def test_missing_required_section(self):
        data = self.minimal()
        del data["signal"]
        with pytest.raises(scen.ScenarioError, match="signal"):
            scen.validate(data)

    def test_bad_fraction(self):
        data = self.minimal()
        data["mask"] = {"fraction_available": 1.5}
        with pytest.raises(scen.ScenarioError):
            scen.validate(data)

    def test_bad_recovery_method(self):
        data = self.minimal()
        data["recovery"] = {"method": "magic"}
        with pytest.raises(scen.ScenarioError, match="method"):
            scen.validate(data)

    def test_gradient_shrink_on_values(self):
        data = self.minimal()
        data["mask"] = {"fraction_available": 0.75}
        data["recovery"] = {"method": "gradient", "shrink_on": "sometimes"}
        with pytest.raises(scen.ScenarioError, match="shrink_on"):
            scen.validate(data)
        data["recovery"]["shrink_on"] = "precision"
        assert scen.validate(data).recovery_spec["shrink_on"] == "precision"

    def test_recovery_without_mask_rejected(self):
        data = self.minimal()
        data["recovery"] = {"method": "gradient"}
        with pytest.raises(scen.ScenarioError, match="mask"):
            scen.validate(data)

    def test_signal_build_roundtrip(self):
        sc = scen.validate(self.minimal())
        grid = scen.build_signal(sc)
        assert grid.shape == (8, 8)
        spec = np.fft.fft2(grid)
        assert np.argmax(np.abs(spec)) == 2 * 8 + 3


class TestPresets:
    def test_all_presets_validate_and_build(self):
        for name in ("example1", "example2", "example3", "example4",
                     "example4-desk", "example4-paper"):
            sc = scen.preset(name)
            grid = scen.build_signal(sc)
            assert grid.shape == (sc.chirps, sc.samples_per_chirp)
            scen.manifest_dict(sc)

    def test_unknown_preset(self):
        with pytest.raises(scen.ScenarioError, match="unknown preset"):
            scen.preset("example9")

    def test_example1_scene_statistics(self):
        sc = scen.preset("example1")
        grid = scen.build_signal(sc)
        spec = np.abs(np.fft.fft2(grid)) / grid.size
        strong = spec[spec > 0.01]
        assert len(strong) == 10
        assert strong.min() >= 0.125 - 1e-9
        assert strong.max() <= 0.375 + 1e-9
        assert scen.integer_bins(sc)

    def test_example3_is_real_symmetric_pair_signal(self):
        sc = scen.preset("example3")
        grid = scen.build_signal(sc)
        assert grid.shape == (128, 1)
        # conjugate-pair components produce a (numerically) real signal
        assert np.max(np.abs(grid.imag)) < 1e-9
        mask = scen.build_mask(sc, grid.shape)
        assert mask.sum() == 83

    def test_example4_desk_mask_budget(self):
        sc = scen.preset("example4-desk")
        mask = scen.build_mask(sc, (64, 64))
        assert mask.sum() == 2048
        assert sc.recovery_spec["corrections"] == 6

    def test_manifest_echoes_resolved_values(self):
        man = scen.manifest_dict(scen.preset("example4-desk"))
        assert man["name"] == "example4-desk"
        assert man["recovery"]["method"] == "gradient"
        assert "range_resolution_m" in man["derived"]
        json.dumps(man)


class TestCli:
    def test_preset_list_and_dump(self, capsys, tmp_path):
        assert main(["preset", "--list"]) == 0
        names = capsys.readouterr().out.split()
        assert "example1" in names and "example4-desk" in names
        out = tmp_path / "p.json"
        assert main(["preset", "--name", "example1", "--out", str(out)]) == 0
        data = json.loads(out.read_text())
        assert data["grid"]["chirps"] == 64

    def test_synth_writes_grid_and_manifest(self, tmp_path):
        out = tmp_path / "s"
        assert main(["synth", "--preset", "example1", "--out", str(out)]) == 0
        grid = load_grid_csv(out / "grid.csv")
        assert grid.shape == (64, 64)
        man = json.loads((out / "manifest.json").read_text())
        assert man["mask"]["fraction_available"] == 0.125
        assert (out / "spectrum.pgm").exists()
        assert (out / "available.csv").exists()

    def test_synth_rerun_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            assert main(["synth", "--preset", "example1", "--out", str(out)]) == 0
        for name in ("grid.csv", "manifest.json", "spectrum.pgm", "available.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes(), name

    def test_recover_direct_end_to_end(self, tmp_path):
        out = tmp_path / "r"
        assert main(["recover", "--preset", "example1", "--out", str(out)]) == 0
        rep = json.loads((out / "report.json").read_text())
        assert rep["residual_available"] < 1e-9
        rec = load_grid_csv(out / "recovered.csv")
        sc = scen.preset("example1")
        np.testing.assert_allclose(rec, scen.build_signal(sc), atol=1e-8)

    def test_recover_seed_override_changes_mask(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["recover", "--preset", "example1", "--out", str(a)]) == 0
        assert main(["recover", "--preset", "example1", "--out", str(b),
                     "--seed-override", "77"]) == 0
        ra = json.loads((a / "report.json").read_text())
        rb = json.loads((b / "report.json").read_text())
        assert ra["residual_available"] < 1e-9 and rb["residual_available"] < 1e-9
        assert (a / "manifest.json").read_bytes() != (b / "manifest.json").read_bytes()

    def test_recover_gradient_writes_trace_and_frames(self, tmp_path):
        scenario = {
            "schema_version": 1,
            "grid": {"chirps": 16, "samples_per_chirp": 1},
            "signal": {"kind": "scatterers",
                       "components": [{"amplitude": 1.0, "cross_bin": 4}]},
            "mask": {"fraction_available": 14 / 16, "seed": 2},
            "recovery": {"method": "gradient", "max_sweeps": 400},
        }
        spath = tmp_path / "s.json"
        spath.write_text(json.dumps(scenario))
        out = tmp_path / "g"
        code = main(["recover", "--scenario", str(spath), "--out", str(out),
                     "--dump-frames"])
        assert code == 0
        trace = json.loads((out / "trace.json").read_text())
        assert trace["converged"] is True
        frames = sorted((out / "frames").glob("sweep*.pgm"))
        assert len(frames) == trace["sweeps"]
        assert (out / "before.pgm").exists() and (out / "after.pgm").exists()

    def test_recover_gradient_budget_exhaustion_exit_code(self, tmp_path):
        scenario = {
            "schema_version": 1,
            "grid": {"chirps": 16, "samples_per_chirp": 1},
            "signal": {"kind": "scatterers",
                       "components": [{"amplitude": 1.0, "cross_bin": 4}]},
            "mask": {"fraction_available": 14 / 16, "seed": 2},
            "recovery": {"method": "gradient", "max_sweeps": 2},
        }
        spath = tmp_path / "s.json"
        spath.write_text(json.dumps(scenario))
        out = tmp_path / "g"
        code = main(["recover", "--scenario", str(spath), "--out", str(out)])
        assert code == 4
        # outputs still written for inspection
        assert (out / "recovered.csv").exists()
        assert json.loads((out / "trace.json").read_text())["converged"] is False

    def test_singular_system_exit_code(self, tmp_path):
        # every-other-chirp mask at k_hat 2 with aliased bins
        scenario = {
            "schema_version": 1,
            "grid": {"chirps": 8, "samples_per_chirp": 1},
            "signal": {"kind": "scatterers",
                       "components": [{"amplitude": 1.0, "cross_bin": 0}]},
            "mask": {"fraction_available": 0.5, "mode": "blocks", "block_len": 1,
                     "seed": 0},
            "recovery": {"method": "direct", "k_hat": 4},
        }
        # blocks of length 1 with exactly half removed can still be random;
        # force the aliasing pattern through a handcrafted scenario run instead
        from isarrec.direct import recover_direct, SingularSystemError
        from isarrec.synthesis import synthesize_uniform, Scatterer
        grid = synthesize_uniform([Scatterer(1.0, 0, 0)], 8, 8)
        mask = np.zeros((8, 8), bool)
        mask[::2, :] = True
        with pytest.raises(SingularSystemError):
            recover_direct(grid, mask, k_hat=16, rcond_threshold=1e-10)
        del scenario

    def test_bad_scenario_file_exit_code(self, tmp_path, capsys):
        spath = tmp_path / "bad.json"
        spath.write_text("{not json")
        out = tmp_path / "o"
        assert main(["recover", "--scenario", str(spath), "--out", str(out)]) == 2
        err = capsys.readouterr().err
        assert json.loads(err)["error"]

    def test_missing_recovery_section_exit_code(self, tmp_path):
        scenario = {
            "schema_version": 1,
            "grid": {"chirps": 8, "samples_per_chirp": 8},
            "signal": {"kind": "scatterers",
                       "components": [{"amplitude": 1.0, "cross_bin": 2}]},
        }
        spath = tmp_path / "s.json"
        spath.write_text(json.dumps(scenario))
        assert main(["recover", "--scenario", str(spath),
                     "--out", str(tmp_path / "o")]) == 2

    def test_snr_sweep_csv(self, tmp_path):
        out = tmp_path / "sweep"
        code = main(["snr-sweep", "--preset", "example2", "--out", str(out),
                     "--trials", "5"])
        assert code == 0
        lines = (out / "snr_sweep.csv").read_text().strip().splitlines()
        assert lines[0].startswith("snr_in_db,")
        assert len(lines) == 3  # header + k_hat 14 and 10
        payload = json.loads((out / "snr_sweep.json").read_text())
        assert len(payload["results"]) == 2
