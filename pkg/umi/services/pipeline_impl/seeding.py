"""Stage-local random streams.

Every stream is a Philox counter-based generator keyed by the run seed and
a BLAKE2b hash of the stage name, so a stage draws the same numbers whatever
ran before it.
"""

import hashlib

import numpy as np


def stream_key(seed: int, stage: str) -> int:
    digest = hashlib.blake2b(f"{seed}:{stage}".encode("utf-8"), digest_size=16).digest()
    return int.from_bytes(digest, "little")


def stage_rng(seed: int, stage: str) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=stream_key(seed, stage)))
