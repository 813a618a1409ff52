from django.contrib import admin

from umi.models import PipelineRun


@admin.register(PipelineRun)
class PipelineRunAdmin(admin.ModelAdmin):
    list_display = ("config_name", "seed", "status", "all_checks_passed", "failed_stage", "created_at", "finished_at")
    list_filter = ("status", "all_checks_passed")
    readonly_fields = ("created_at", "finished_at", "check_results", "stage_timings")
    search_fields = ("config_name", "output_dir")
