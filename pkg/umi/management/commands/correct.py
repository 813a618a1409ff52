from ._pipeline import PipelineCommand


class Command(PipelineCommand):
    help = "Runs the multi-scale aberration correction on focused.umf (corrected.umf, laws.umt)."

    stages = ("correct",)
