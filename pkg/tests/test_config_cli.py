import numpy as np
import pytest

from qoctsim import ConfigError
from qoctsim.cli import main
from qoctsim.config import parse_config
from qoctsim.formats import read_csv, read_volume


class TestParseConfig:
    def test_empty_config_gives_defaults(self):
        cfg = parse_config(None)
        assert cfg.source.center_wavelength_nm == 812.0
        assert cfg.source.sigma() == pytest.approx(2.3532e13, rel=1e-4)
        assert cfg.scan.z_count == 31
        xs, ys = cfg.scan.transverse_grid()
        assert (xs.size, ys.size) == (16, 21)
        assert cfg.counting.flux_pairs_per_s == 1e6
        assert cfg.counting.coincidence_window_s == 3.5e-9
        assert cfg.phantom.cell_width_um == 75.0

    def test_file_values_and_notes(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(
            "# a comment\n"
            "scan.z_count = 61\n"
            "counting.seed = 9\n"
            "source.shape = sinc_squared\n"
        )
        cfg = parse_config(path)
        assert cfg.scan.z_count == 61
        assert cfg.counting.seed == 9
        assert cfg.note_for("scan.z_count") == "configured"
        assert cfg.note_for("scan.z_step_um") == "default"

    def test_zero_step_names_key(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("scan.z_step_um = 0\n")
        with pytest.raises(ConfigError, match="scan.z_step_um"):
            parse_config(path)

    def test_duplicate_key_rejected_with_line(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("scan.z_count = 31\nscan.z_count = 41\n")
        with pytest.raises(ConfigError, match=r":2: duplicate key"):
            parse_config(path)

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("scan.zz_step = 1\n")
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config(path)

    def test_type_mismatch_rejected(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("scan.z_count = many\n")
        with pytest.raises(ConfigError, match="invalid value"):
            parse_config(path)

    def test_sigma_and_target_mutually_exclusive(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text(
            "source.sigma_rad_s = 2.0e13\nsource.target_dip_fwhm_um = 7.5\n"
        )
        with pytest.raises(ConfigError, match="mutually exclusive"):
            parse_config(path)

    def test_overrides_apply(self):
        cfg = parse_config(None, overrides=["scan.z_count=11", "output.dir=elsewhere"])
        assert cfg.scan.z_count == 11
        assert cfg.output_dir == "elsewhere"

    def test_env_seed_override(self, monkeypatch):
        monkeypatch.setenv("QOCT_SEED", "777")
        cfg = parse_config(None)
        assert cfg.counting.seed == 777
        assert cfg.phantom.seed == 777
        assert cfg.note_for("counting.seed") == "environment"

    def test_env_seed_must_be_integer(self, monkeypatch):
        monkeypatch.setenv("QOCT_SEED", "abc")
        with pytest.raises(ConfigError):
            parse_config(None)

    def test_phantom_extent_follows_scan(self):
        cfg = parse_config(None, overrides=["scan.x_extent_um=30", "scan.y_extent_um=40"])
        assert cfg.phantom.x_extent_um == 30.0
        assert cfg.phantom.y_extent_um == 40.0

    def test_manifest_sections_cover_all_groups(self):
        sections = parse_config(None).manifest_sections()
        assert set(sections) == {"source", "counting", "scan", "phantom", "output"}


SMALL = [
    "--set", "scan.x_extent_um=20", "--set", "scan.y_extent_um=20",
    "--set", "scan.transverse_step_um=10",
]


class TestCli:
    def test_unknown_command_is_usage_error(self, capsys):
        assert main(["frobnicate"]) == 1
        assert "usage" in capsys.readouterr().err.lower()

    def test_missing_command_is_usage_error(self):
        assert main([]) == 1

    def test_calibrate_prints_sigma(self, capsys):
        assert main(["calibrate", "--dip-fwhm-um", "7.5"]) == 0
        out = capsys.readouterr().out.strip()
        assert float(out) == pytest.approx(2.3532e13, rel=1e-4)

    def test_ascan_writes_files(self, tmp_path, capsys):
        outdir = tmp_path / "out"
        code = main(["ascan", "--outdir", str(outdir), "--mirror", "0:1"])
        assert code == 0
        assert (outdir / "ascan.csv").exists()
        assert (outdir / "ascan.png").exists()
        assert (outdir / "manifest.txt").exists()
        header, rows = read_csv(outdir / "ascan.csv")
        assert rows.shape == (31, 2)
        assert rows[0, 1] == 1.0

    def test_ascan_no_figures(self, tmp_path):
        outdir = tmp_path / "out"
        assert main(["ascan", "--outdir", str(outdir), "--no-figures"]) == 0
        assert not (outdir / "ascan.png").exists()

    def test_ascan_bad_mirror_is_usage_error(self, tmp_path):
        assert main(["ascan", "--outdir", str(tmp_path), "--mirror", "nope"]) == 1

    def test_compare_summary_line(self, tmp_path, capsys):
        outdir = tmp_path / "cmp"
        code = main(["compare", "--outdir", str(outdir), "--beta2-l-fs2", "360"])
        assert code == 0
        out = capsys.readouterr().out.splitlines()
        assert out[-2] == "qoct_fwhm_um,oct_fwhm_um,beta2L_fs2"
        qoct_w, oct_w, b2l = (float(v) for v in out[-1].split(","))
        assert qoct_w == pytest.approx(7.5, rel=0.01)
        assert b2l == 360.0
        assert oct_w > qoct_w
        header, rows = read_csv(outdir / "compare.csv")
        assert header == ["z_um", "qoct", "oct_envelope"]

    def test_phantom_manifest(self, tmp_path):
        outdir = tmp_path / "ph"
        assert main(["phantom", "--outdir", str(outdir)]) == 0
        text = (outdir / "manifest.txt").read_text()
        assert "[phantom]" in text
        assert "cell_width_um = 75.0" in text

    def test_volume_slice_surface_pipeline(self, tmp_path, capsys):
        outdir = tmp_path / "vol"
        code = main(["volume", "--outdir", str(outdir)] + SMALL)
        assert code == 0
        summary = capsys.readouterr().out
        assert "volume dims (3, 3, 31)" in summary
        vol_path = outdir / "volume.qvol"
        assert vol_path.exists()
        vol = read_volume(vol_path)
        assert vol.dims == (3, 3, 31)

        assert main(["slice", str(vol_path), "--cscan", "17", "--outdir", str(outdir)]) == 0
        assert (outdir / "cscan_z017.pgm").exists()
        assert (outdir / "cscan_z017.png").exists()

        assert main(["slice", str(vol_path), "--bscan-x", "1", "--outdir", str(outdir)]) == 0
        assert (outdir / "bscan_x001.pgm").exists()

        assert main(["surface", str(vol_path), "--outdir", str(outdir)]) == 0
        header, rows = read_csv(outdir / "surface.csv")
        assert header == ["x_um", "y_um", "z_um"]
        assert rows.shape == (9, 3)

    def test_slice_out_of_range_is_runtime_error(self, tmp_path, capsys):
        outdir = tmp_path / "vol2"
        assert main(["volume", "--outdir", str(outdir)] + SMALL) == 0
        code = main(
            ["slice", str(outdir / "volume.qvol"), "--cscan", "99", "--outdir", str(outdir)]
        )
        assert code == 2
        assert not (outdir / "cscan_z099.pgm").exists()
        assert "error" in capsys.readouterr().err

    def test_missing_volume_file_is_runtime_error(self, tmp_path):
        assert main(["slice", str(tmp_path / "nope.qvol"), "--cscan", "0"]) == 2

    def test_identical_runs_are_byte_identical(self, tmp_path):
        args = SMALL + ["--set", "scan.stochastic=true", "--set", "counting.seed=5",
                        "--no-figures"]
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        assert main(["volume", "--outdir", str(out_a)] + args) == 0
        assert main(["volume", "--outdir", str(out_b)] + args) == 0
        vol_a = (out_a / "volume.qvol").read_bytes()
        vol_b = (out_b / "volume.qvol").read_bytes()
        assert vol_a == vol_b

    def test_bad_config_file_is_runtime_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.cfg"
        bad.write_text("scan.z_step_um = 0\n")
        assert main(["ascan", "--config", str(bad), "--outdir", str(tmp_path)]) == 2
        assert "scan.z_step_um" in capsys.readouterr().err
