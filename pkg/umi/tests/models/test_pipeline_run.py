import pytest

from umi.models import PipelineRun
from umi.tests.factories import PipelineRunFactory


class TestPipelineRun:
    def test_str(self):
        run = PipelineRunFactory.build(config_name="pork-chop-desk", seed=7, status=PipelineRun.Status.RUNNING)

        assert str(run) == "pork-chop-desk (seed 7): RUNNING"

    def test_mark_finished_sets_status_and_time(self):
        run = PipelineRunFactory.build()

        run.mark_finished(PipelineRun.Status.SUCCEEDED)

        assert run.status == PipelineRun.Status.SUCCEEDED
        assert run.finished_at is not None

    @pytest.mark.django_db
    def test_defaults_after_save(self):
        run = PipelineRunFactory()

        run.refresh_from_db()
        assert run.all_checks_passed is None
        assert run.check_results == {}
        assert run.stage_timings == {}
        assert run.failed_stage == ""

