import pytest

from umi.services.pipeline_impl.artifacts import RunArtifacts
from umi.services.pipeline_impl.config import parse_config

POINT_CONFIG = """
[run]
name = point-desk
seed = 11

[probe]
elements = 4

[medium]
points_m = 0, 0, 0.010

[grid]
x_m = -0.002, 0.002
y_m = -0.002, 0.002
z_m = 0.0095, 0.0105
z_step_m = 0.0005

[beamform]
max_offset_m = 0.001

[correction]
enabled = false

[rpsf]
lateral_width_m = 0.004
axial_width_m = 0.003
scattering = false
"""

SCREEN_SECTION = """
[screen]
kind = random
rms_rad = 1.0
correlation_elements = 2
"""

CORRECTION_SECTION = """
[correction]
enabled = true
schedule = 1x1:4@3
epsilon_stop = 2.0
"""


@pytest.fixture
def point_config():
    """Point target at 10 mm under a 4×4 probe; correction off, checks off."""
    return parse_config(POINT_CONFIG)


@pytest.fixture
def corrected_config():
    """The point target behind a random screen, with a one-step correction."""
    text = POINT_CONFIG.replace("[correction]\nenabled = false\n", "") + SCREEN_SECTION + CORRECTION_SECTION
    return parse_config(text)


@pytest.fixture
def artifacts(tmp_path):
    return RunArtifacts(tmp_path / "run")
