from ._pipeline import PipelineCommand


class Command(PipelineCommand):
    help = "Computes local RPSF maps and focusing metrics before and, when available, after correction."

    stages = ("rpsf_before", "rpsf_after")
