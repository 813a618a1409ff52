from unittest.mock import MagicMock

import pytest
from django.db import DatabaseError

from umi.models import PipelineRun
from umi.services.pipeline_impl.recorder import RunRecorder
from umi.services.pipeline_impl.report import CheckResult, RunReport

pytestmark = pytest.mark.django_db


def finished_report(**checks):
    report = RunReport(name="point-desk", seed=11, timings={"simulate": 1.5})
    for name, passed in checks.items():
        report.checks[name] = CheckResult(name=name, passed=passed)
    return report


class TestRunRecorder:
    def test_start_creates_a_running_row(self, point_config, tmp_path):
        run = RunRecorder(enabled=True).start(point_config, tmp_path)

        assert run.status == PipelineRun.Status.RUNNING
        assert run.config_name == "point-desk"
        assert run.seed == 11
        assert run.output_dir == str(tmp_path)

    def test_disabled_recorder_writes_nothing(self, point_config, tmp_path):
        recorder = RunRecorder(enabled=False)

        assert recorder.start(point_config, tmp_path) is None
        recorder.finish(None, finished_report())
        assert PipelineRun.objects.count() == 0

    def test_follows_the_setting(self, settings):
        settings.UMI_RECORD_RUNS = False

        assert RunRecorder().enabled is False

    def test_successful_run(self, point_config, tmp_path):
        recorder = RunRecorder(enabled=True)
        run = recorder.start(point_config, tmp_path)

        recorder.finish(run, finished_report(bias_scaling=True, determinism=None))

        run.refresh_from_db()
        assert run.status == PipelineRun.Status.SUCCEEDED
        assert run.all_checks_passed is True
        assert run.check_results == {"bias_scaling": True, "determinism": None}
        assert run.stage_timings == {"simulate": 1.5}
        assert run.finished_at is not None

    def test_failed_check_fails_the_run(self, point_config, tmp_path):
        recorder = RunRecorder(enabled=True)
        run = recorder.start(point_config, tmp_path)

        recorder.finish(run, finished_report(bias_scaling=False))

        run.refresh_from_db()
        assert run.status == PipelineRun.Status.FAILED
        assert run.all_checks_passed is False

    def test_run_without_checks_leaves_the_flag_unset(self, point_config, tmp_path):
        recorder = RunRecorder(enabled=True)
        run = recorder.start(point_config, tmp_path)

        recorder.finish(run, finished_report())

        run.refresh_from_db()
        assert run.status == PipelineRun.Status.SUCCEEDED
        assert run.all_checks_passed is None

    def test_failed_stage_is_recorded(self, point_config, tmp_path):
        recorder = RunRecorder(enabled=True)
        run = recorder.start(point_config, tmp_path)

        recorder.finish(run, None, failed_stage="beamform")

        run.refresh_from_db()
        assert run.status == PipelineRun.Status.FAILED
        assert run.failed_stage == "beamform"

    def test_database_errors_are_logged_not_raised(self, point_config, tmp_path, monkeypatch, caplog):
        monkeypatch.setattr(PipelineRun.objects, "create", MagicMock(side_effect=DatabaseError("locked")))

        assert RunRecorder(enabled=True).start(point_config, tmp_path) is None
        assert "Could not record the start of run 'point-desk': locked" in caplog.text

    def test_save_errors_are_logged_not_raised(self, caplog):
        run = MagicMock(spec=PipelineRun, pk=4)
        run.save.side_effect = DatabaseError("gone")

        RunRecorder(enabled=True).finish(run, finished_report())

        run.mark_finished.assert_called_once_with(PipelineRun.Status.SUCCEEDED)
        assert "Could not record the end of run 4: gone" in caplog.text
