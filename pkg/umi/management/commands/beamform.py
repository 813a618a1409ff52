from ._pipeline import PipelineCommand


class Command(PipelineCommand):
    help = "Projects raw.umr onto the focused basis (focused.umf)."

    stages = ("beamform",)
