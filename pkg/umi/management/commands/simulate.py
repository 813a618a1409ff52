from ._pipeline import PipelineCommand


class Command(PipelineCommand):
    help = "Simulates the raw reflection matrix of the configured medium (raw.umr)."

    stages = ("simulate",)
