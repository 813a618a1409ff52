# Generated by Django 6.0 on 2026-02-02 10:14

from django.db import migrations, models


class Migration(migrations.Migration):
    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="PipelineRun",
            fields=[
                ("id", models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name="ID")),
                ("config_name", models.CharField(db_index=True, max_length=100, verbose_name="Configuration")),
                ("seed", models.BigIntegerField(verbose_name="Seed")),
                ("output_dir", models.CharField(max_length=500, verbose_name="Output Directory")),
                (
                    "status",
                    models.CharField(
                        choices=[("PENDING", "Pending"), ("RUNNING", "Running"), ("SUCCEEDED", "Succeeded"), ("FAILED", "Failed")],
                        db_index=True,
                        default="PENDING",
                        help_text="The current status of the run.",
                        max_length=10,
                    ),
                ),
                ("failed_stage", models.CharField(blank=True, default="", max_length=30, verbose_name="Failed Stage")),
                ("all_checks_passed", models.BooleanField(blank=True, help_text="Unset until the checks stage has run.", null=True, verbose_name="All Checks Passed")),
                ("check_results", models.JSONField(blank=True, default=dict, verbose_name="Check Results")),
                ("stage_timings", models.JSONField(blank=True, default=dict, help_text="Seconds per stage.", verbose_name="Stage Timings")),
                ("created_at", models.DateTimeField(auto_now_add=True)),
                ("finished_at", models.DateTimeField(blank=True, null=True)),
            ],
            options={
                "verbose_name": "Pipeline Run",
                "verbose_name_plural": "Pipeline Runs",
                "ordering": ["-created_at"],
            },
        ),
    ]
