"""Multi-scale window schedules.

Text form: comma-separated ``<n>x<n>:<w_ρ>`` steps with an optional shared
``@<w_z>`` suffix, all in mm, e.g. ``1x1:16,2x2:12,4x4:8@3``. Preset names
(``pork-chop``, ``head-phantom``) are accepted in place of the step list.
"""

import logging
import re
from dataclasses import dataclass

from umi.services.exceptions import ConfigurationError, ContractError
from umi.services.geometry_impl.grid import VoxelGrid
from umi.services.geometry_impl.window import SpatialWindow, layout_windows

logger = logging.getLogger(__name__)

_STEP = re.compile(r"^\s*(\d+)\s*x\s*(\d+)\s*:\s*([0-9.]+)\s*$")
DEFAULT_AXIAL_WIDTH = 3.0


@dataclass(frozen=True)
class ScheduleStep:
    patches: int
    lateral_width: float
    axial_width: float

    @property
    def label(self) -> str:
        return f"{self.patches}x{self.patches}:{self.lateral_width:g}"


@dataclass(frozen=True)
class Schedule:
    name: str
    steps: tuple[ScheduleStep, ...]

    def __post_init__(self) -> None:
        if not self.steps:
            raise ContractError("Degenerate schedule: no step.", {"schedule": self.name})
        for step in self.steps:
            if step.patches < 1 or step.lateral_width <= 0 or step.axial_width <= 0:
                raise ContractError("Degenerate schedule: steps need patches >= 1 and positive widths.", {"step": step.label})
        for previous, current in zip(self.steps, self.steps[1:]):
            if current.patches < previous.patches or current.lateral_width > previous.lateral_width:
                raise ContractError("Degenerate schedule: windows must shrink from one step to the next.", {"from": previous.label, "to": current.label})

    @property
    def last(self) -> ScheduleStep:
        return self.steps[-1]

    def scaled(self, factor: float) -> "Schedule":
        """Same schedule with lateral widths multiplied by ``factor`` (desk-size fields of view)."""
        if factor <= 0:
            raise ConfigurationError("Schedule scale must be positive.", {"scale": factor})
        steps = tuple(ScheduleStep(s.patches, s.lateral_width * factor, s.axial_width) for s in self.steps)
        return Schedule(name=self.name, steps=steps)

    def windows(self, grid: VoxelGrid, overlap: float = 0.5) -> list[list[SpatialWindow]]:
        return [layout_windows(grid, step.patches, step.lateral_width, step.axial_width, overlap) for step in self.steps]

    def __str__(self) -> str:
        return ",".join(step.label for step in self.steps) + f"@{self.steps[0].axial_width:g}"


def _preset(name: str, widths: list[tuple[int, float]], axial_width: float) -> Schedule:
    return Schedule(name=name, steps=tuple(ScheduleStep(patches, width, axial_width) for patches, width in widths))


PRESETS: dict[str, Schedule] = {
    "pork-chop": _preset("pork-chop", [(1, 16.0), (2, 12.0), (4, 8.0)], 3.0),
    "head-phantom": _preset("head-phantom", [(1, 20.0), (2, 15.0), (3, 13.3), (4, 10.0), (5, 8.0), (6, 6.6)], 5.5),
}


def parse_schedule(text: str, scale: float = 1.0) -> Schedule:
    """Parse a schedule string or preset name; lateral widths are multiplied by ``scale``."""
    text = text.strip()
    if text in PRESETS:
        return PRESETS[text].scaled(scale)

    body, _, axial = text.partition("@")
    try:
        axial_width = float(axial) if axial else DEFAULT_AXIAL_WIDTH
    except ValueError as e:
        raise ConfigurationError(f"Invalid axial width '{axial}' in schedule.") from e

    steps = []
    for chunk in filter(None, (part.strip() for part in body.split(","))):
        match = _STEP.match(chunk)
        if match is None:
            raise ConfigurationError(f"Invalid schedule step '{chunk}'; expected '<n>x<n>:<width>'.", {"schedule": text})
        rows, cols, width = int(match.group(1)), int(match.group(2)), float(match.group(3))
        if rows != cols:
            raise ConfigurationError(f"Schedule step '{chunk}' must use square patch counts.")
        steps.append(ScheduleStep(rows, width, axial_width))
    schedule = Schedule(name="custom", steps=tuple(steps)).scaled(scale)
    logger.debug(f"Parsed schedule {schedule}.")
    return schedule
