import numpy as np
import pytest

from fdbss.cli import main
from fdbss.harness import CSV_HEADER


@pytest.fixture
def tiny_toml(tmp_path):
    path = tmp_path / "tiny.toml"
    path.write_text(
        "frame_sizes = [40]\n"
        "snr_db_list = [10.0]\n"
        "trials = 2\n"
        "master_seed = 7\n")
    return path


def _full_grid_csv(tmp_path):
    lines = [CSV_HEADER]
    for snr in (10, 15, 20):
        for frame_size in range(50, 501, 50):
            lines.append(f"{frame_size},{snr},5,0.1,0.2,8.5,12,0,0")
    path = tmp_path / "sweep.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


class TestSweepCommand:
    def test_writes_csv_and_manifest(self, tiny_toml, tmp_path, capsys):
        out = tmp_path / "results"
        assert main(["sweep", "--config", str(tiny_toml), "--out", str(out)]) == 0
        lines = (out / "results.csv").read_text().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 2
        assert (out / "manifest.txt").exists()

    def test_set_override_lands_in_output(self, tiny_toml, tmp_path):
        out = tmp_path / "results"
        assert main(["sweep", "--config", str(tiny_toml), "--out", str(out),
                     "--set", "trials=3"]) == 0
        row = (out / "results.csv").read_text().splitlines()[1]
        assert row.split(",")[2] == "3"

    def test_missing_config_exits_2_with_path(self, tmp_path, capsys):
        missing = tmp_path / "nope.toml"
        assert main(["sweep", "--config", str(missing), "--out", str(tmp_path)]) == 2
        assert str(missing) in capsys.readouterr().err

    def test_unknown_override_key_named(self, tiny_toml, tmp_path, capsys):
        assert main(["sweep", "--config", str(tiny_toml), "--out", str(tmp_path),
                     "--set", "bogus_key=1"]) == 2
        assert "bogus_key" in capsys.readouterr().err

    def test_bad_override_value(self, tiny_toml, tmp_path, capsys):
        assert main(["sweep", "--config", str(tiny_toml), "--out", str(tmp_path),
                     "--set", "trials=zebra"]) == 2
        assert "trials" in capsys.readouterr().err

    def test_seed_flag_overrides_master_seed(self, tiny_toml, tmp_path):
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        main(["sweep", "--config", str(tiny_toml), "--out", str(out_a), "--seed", "11"])
        main(["sweep", "--config", str(tiny_toml), "--out", str(out_b), "--seed", "12"])
        assert (out_a / "results.csv").read_text() != (out_b / "results.csv").read_text()
        assert "master_seed = 11" in (out_a / "manifest.txt").read_text()

    def test_unwritable_output_exits_3(self, tiny_toml, tmp_path, capsys):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        assert main(["sweep", "--config", str(tiny_toml), "--out",
                     str(blocker / "sub")]) == 3


class TestTrialCommand:
    def test_prints_every_record_field(self, capsys):
        assert main(["trial", "--frame-size", "350", "--snr-db", "10",
                     "--seed", "42"]) == 0
        out = capsys.readouterr().out
        for name in ("frame_size", "snr_db", "seed", "elmmse_si_r_sample",
                     "elmmse_soi_sample", "srer_linear", "srer_db", "sinr_linear",
                     "symbol_error_rate", "iterations", "converged", "si_match_ok"):
            assert name in out

    def test_repeatable_output(self, capsys):
        args = ["trial", "--frame-size", "80", "--snr-db", "15", "--seed", "3"]
        assert main(args) == 0
        first = capsys.readouterr().out
        assert main(args) == 0
        assert capsys.readouterr().out == first

    def test_zero_frame_size_exits_2(self, capsys):
        assert main(["trial", "--frame-size", "0", "--snr-db", "10",
                     "--seed", "1"]) == 2
        assert "frame-size" in capsys.readouterr().err


class TestPlotCommand:
    def test_full_grid_csv_yields_four_panels(self, tmp_path):
        csv_path = _full_grid_csv(tmp_path)
        out = tmp_path / "plots"
        assert main(["plot", "--input", str(csv_path), "--out", str(out)]) == 0
        panels = sorted(p.name for p in out.glob("*.dat"))
        assert panels == ["elmmse_si_r.dat", "elmmse_soi.dat", "iterations.dat",
                          "srer_db.dat"]
        text = (out / "srer_db.dat").read_text()
        assert text.count("# series snr_db=") == 3
        data_lines = [l for l in text.splitlines() if l and not l.startswith("#")]
        assert len(data_lines) == 30

    def test_header_only_csv_yields_empty_panels(self, tmp_path):
        csv_path = tmp_path / "empty.csv"
        csv_path.write_text(CSV_HEADER + "\n")
        out = tmp_path / "plots"
        assert main(["plot", "--input", str(csv_path), "--out", str(out)]) == 0
        for panel in out.glob("*.dat"):
            data_lines = [l for l in panel.read_text().splitlines()
                          if l and not l.startswith("#")]
            assert data_lines == []

    def test_non_numeric_cell_exits_2_with_line_number(self, tmp_path, capsys):
        csv_path = tmp_path / "bad.csv"
        csv_path.write_text(CSV_HEADER + "\n50,10,5,0.1,0.2,8.5,12,0,0\n"
                            "100,10,5,oops,0.2,8.5,12,0,0\n")
        assert main(["plot", "--input", str(csv_path), "--out", str(tmp_path)]) == 2
        err = capsys.readouterr().err
        assert "line 3" in err and "oops" in err

    def test_missing_input_exits_2(self, tmp_path, capsys):
        assert main(["plot", "--input", str(tmp_path / "gone.csv"),
                     "--out", str(tmp_path)]) == 2

    def test_wrong_header_exits_2(self, tmp_path, capsys):
        csv_path = tmp_path / "bad.csv"
        csv_path.write_text("a,b,c\n")
        assert main(["plot", "--input", str(csv_path), "--out", str(tmp_path)]) == 2
        assert "line 1" in capsys.readouterr().err


class TestHelp:
    @pytest.mark.parametrize("sub", ["sweep", "trial", "plot"])
    def test_help_mentions_schema_version(self, sub, capsys):
        with pytest.raises(SystemExit) as exc:
            main([sub, "--help"])
        assert exc.value.code == 0
        out = capsys.readouterr().out
        assert "config schema version" in out
