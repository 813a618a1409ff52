import pandas as pd
import pytest
from django.core.management import call_command
from django.core.management.base import CommandError


class TestExportCommand:
    def test_exports_available_metrics(self, tmp_path, capsys):
        run_dir = tmp_path / "run"
        run_dir.mkdir()
        pd.DataFrame({"z": [10.0], "delta_rho_3db": [1.0], "contrast": [0.5]}).to_csv(run_dir / "metrics_before.tsv", sep="\t", index=False)

        call_command("export", str(run_dir), what=["metrics", "phase_laws"])

        assert (run_dir / "export" / "metrics.csv").is_file()
        out = capsys.readouterr().out
        assert "missing laws.umt" in out
        assert "Exported 1 files" in out

    def test_custom_output_directory(self, tmp_path, capsys):
        run_dir = tmp_path / "run"
        run_dir.mkdir()

        call_command("export", str(run_dir), out=str(tmp_path / "plots"))

        assert (tmp_path / "plots").is_dir()
        assert "Exported 0 files" in capsys.readouterr().out

    def test_missing_run_directory(self, tmp_path):
        with pytest.raises(CommandError, match="Export error: Run directory .* does not exist"):
            call_command("export", str(tmp_path / "nowhere"))
