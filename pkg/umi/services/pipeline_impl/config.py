"""Pipeline configuration files.

INI syntax, one level of ``[section]`` headers. Values are SI (m, Hz, m/s,
rad); the ``*_mm``/``*_mhz`` properties give the internal units. Lists are
comma separated, point lists use ``;`` between points.

    [run]
    name = pork-chop-desk
    seed = 7

    [medium]
    speckle_box_min_m = -0.004, -0.004, 0.018
    speckle_box_max_m = 0.004, 0.004, 0.022

    [correction]
    schedule = pork-chop
    schedule_scale = 0.5
"""

import configparser
import logging
from pathlib import Path
from typing import Annotated, Literal

import pydantic
from django.conf import settings
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, field_validator, model_validator

from umi.services.correction_impl.basis import CorrectionKind
from umi.services.exceptions import PipelineConfigurationError
from umi.services.geometry_impl.units import hz_to_mhz, m_per_s_to_mm_per_us, m_to_mm

logger = logging.getLogger(__name__)

SECTIONS = ("run", "probe", "medium", "screen", "acquisition", "grid", "beamform", "correction", "rpsf", "checks")


def _numbers(value: object) -> object:
    if isinstance(value, str):
        return [float(part) for part in value.split(",") if part.strip()]
    return value


def _words(value: object) -> object:
    if isinstance(value, str):
        return [part.strip() for part in value.split(",") if part.strip()]
    return value


FloatPair = Annotated[tuple[float, float], BeforeValidator(_numbers)]
FloatTriple = Annotated[tuple[float, float, float], BeforeValidator(_numbers)]
Names = Annotated[tuple[str, ...], BeforeValidator(_words)]


class Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class RunSection(Section):
    name: str = "run"
    seed: int = Field(default_factory=lambda: int(getattr(settings, "UMI_DEFAULT_SEED", 20240101)))


class ProbeSection(Section):
    kind: Literal["desk", "reference"] = "desk"
    elements: int = Field(default=16, ge=1, le=64)
    pitch_m: float = Field(default=0.5e-3, gt=0)
    center_frequency_hz: float = Field(default=3.0e6, gt=0)
    bandwidth_hz: FloatPair = (1.8e6, 4.2e6)
    sound_speed_m_s: float = Field(default=1540.0, gt=0)
    dead_elements: tuple[int, ...] = ()

    @field_validator("dead_elements", mode="before")
    @classmethod
    def split_indices(cls, value: object) -> object:
        if isinstance(value, str):
            return [int(part) for part in value.split(",") if part.strip()]
        return value

    @property
    def pitch_mm(self) -> float:
        return m_to_mm(self.pitch_m)

    @property
    def center_frequency_mhz(self) -> float:
        return hz_to_mhz(self.center_frequency_hz)

    @property
    def bandwidth_mhz(self) -> tuple[float, float]:
        return (hz_to_mhz(self.bandwidth_hz[0]), hz_to_mhz(self.bandwidth_hz[1]))

    @property
    def sound_speed_mm_us(self) -> float:
        return m_per_s_to_mm_per_us(self.sound_speed_m_s)


class MediumSection(Section):
    sound_speed_m_s: float = Field(default=1540.0, gt=0)
    points_m: tuple[tuple[float, float, float], ...] = ()
    speckle_box_min_m: FloatTriple | None = None
    speckle_box_max_m: FloatTriple | None = None
    speckle_density: float = Field(default=4.0, gt=0)
    layered: bool = False
    noise_power: float = Field(default=0.0, ge=0)
    background_power: float = Field(default=0.0, ge=0)

    @field_validator("points_m", mode="before")
    @classmethod
    def split_points(cls, value: object) -> object:
        if isinstance(value, str):
            return [[float(part) for part in point.split(",")] for point in value.split(";") if point.strip()]
        return value

    @model_validator(mode="after")
    def check_contents(self) -> "MediumSection":
        if (self.speckle_box_min_m is None) != (self.speckle_box_max_m is None):
            raise ValueError("speckle_box_min_m and speckle_box_max_m go together")
        if not self.points_m and self.speckle_box_min_m is None:
            raise ValueError("the medium needs points_m or a speckle box")
        return self

    @property
    def sound_speed_mm_us(self) -> float:
        return m_per_s_to_mm_per_us(self.sound_speed_m_s)

    @property
    def points_mm(self) -> list[tuple[float, float, float]]:
        return [(m_to_mm(x), m_to_mm(y), m_to_mm(z)) for x, y, z in self.points_m]

    @property
    def speckle_box_mm(self) -> tuple[tuple[float, ...], tuple[float, ...]] | None:
        if self.speckle_box_min_m is None or self.speckle_box_max_m is None:
            return None
        return (tuple(m_to_mm(v) for v in self.speckle_box_min_m), tuple(m_to_mm(v) for v in self.speckle_box_max_m))


class ScreenSection(Section):
    kind: Literal["none", "random", "split"] = "none"
    rms_rad: float = Field(default=1.5, ge=0)
    rms_right_rad: float = Field(default=0.5, ge=0)
    step_rad: float = 0.0
    correlation_elements: float = Field(default=3.0, ge=0)
    depth_m: float = Field(default=0.0, ge=0)

    @property
    def depth_mm(self) -> float:
        return m_to_mm(self.depth_m)


class AcquisitionSection(Section):
    basis: Literal["transducer", "plane_wave"] = "transducer"
    downsample: int = Field(default=1, ge=1)


class GridSection(Section):
    x_m: FloatPair = (-4.0e-3, 4.0e-3)
    y_m: FloatPair = (-4.0e-3, 4.0e-3)
    z_m: FloatPair = (18.0e-3, 22.0e-3)
    z_step_m: float | None = Field(default=None, gt=0)
    pitch_m: float = Field(default_factory=lambda: float(getattr(settings, "UMI_VOXEL_PITCH_MM", 0.5)) * 1.0e-3, gt=0)

    @model_validator(mode="after")
    def check_ranges(self) -> "GridSection":
        for name in ("x_m", "y_m", "z_m"):
            low, high = getattr(self, name)
            if high < low:
                raise ValueError(f"{name} must be increasing")
        if self.z_m[0] <= 0:
            raise ValueError("z_m must lie in front of the probe")
        return self

    @property
    def pitch_mm(self) -> float:
        return m_to_mm(self.pitch_m)

    @property
    def depths_mm(self) -> list[float]:
        low, high = m_to_mm(self.z_m[0]), m_to_mm(self.z_m[1])
        step = m_to_mm(self.z_step_m) if self.z_step_m is not None else self.pitch_mm
        count = int(round((high - low) / step)) + 1
        return [low + index * step for index in range(count)]


class BeamformSection(Section):
    max_offset_m: float = Field(default_factory=lambda: float(getattr(settings, "UMI_MAX_OFFSET_MM", 10.0)) * 1.0e-3, ge=0)
    apodization: Literal["cone", "none"] = "cone"

    @property
    def max_offset_mm(self) -> float:
        return m_to_mm(self.max_offset_m)


class CorrectionSection(Section):
    enabled: bool = True
    basis: Literal["auto", "transducer", "fourier"] = "auto"
    schedule: str = "pork-chop"
    schedule_scale: float = Field(default=1.0, gt=0)
    filter: Literal["auto", "on", "off"] = "auto"
    epsilon_stop: float = Field(default_factory=lambda: float(getattr(settings, "UMI_EPSILON_STOP", 0.2)), gt=0, le=2)
    direct: bool = False


class RpsfSection(Section):
    lateral_width_m: float = Field(default=3.2e-3, gt=0)
    axial_width_m: float = Field(default=3.0e-3, gt=0)
    patches: int = Field(default=1, ge=1)
    annulus_inner: float = Field(default_factory=lambda: float(getattr(settings, "UMI_ANNULUS_INNER_FACTOR", 6.0)), gt=0)
    annulus_outer: float = Field(default_factory=lambda: float(getattr(settings, "UMI_ANNULUS_OUTER_FACTOR", 10.0)), gt=0)
    calibrated: bool = Field(default_factory=lambda: bool(getattr(settings, "UMI_CALIBRATED_RATES", True)))
    scattering: bool = True

    @property
    def lateral_width_mm(self) -> float:
        return m_to_mm(self.lateral_width_m)

    @property
    def axial_width_mm(self) -> float:
        return m_to_mm(self.axial_width_m)


class ChecksSection(Section):
    enabled: Names = ()
    diffraction_tolerance: float = Field(default=0.1, gt=0)
    width_tolerance: float = Field(default=0.15, gt=0)

    @field_validator("enabled")
    @classmethod
    def known_checks(cls, value: tuple[str, ...]) -> tuple[str, ...]:
        from .checks import CHECKS

        unknown = sorted(set(value) - set(CHECKS))
        if unknown:
            raise ValueError(f"unknown checks: {', '.join(unknown)}")
        return value


class PipelineConfig(Section):
    run: RunSection = Field(default_factory=RunSection)
    probe: ProbeSection = Field(default_factory=ProbeSection)
    medium: MediumSection
    screen: ScreenSection = Field(default_factory=ScreenSection)
    acquisition: AcquisitionSection = Field(default_factory=AcquisitionSection)
    grid: GridSection = Field(default_factory=GridSection)
    beamform: BeamformSection = Field(default_factory=BeamformSection)
    correction: CorrectionSection = Field(default_factory=CorrectionSection)
    rpsf: RpsfSection = Field(default_factory=RpsfSection)
    checks: ChecksSection = Field(default_factory=ChecksSection)

    @property
    def correction_kind(self) -> CorrectionKind:
        """Fourier for layered media when left on ``auto``, transducer otherwise."""
        if self.correction.basis == "auto":
            return CorrectionKind.FOURIER if self.medium.layered else CorrectionKind.TRANSDUCER
        return CorrectionKind(self.correction.basis)

    @property
    def use_filter(self) -> bool:
        if self.correction.filter == "auto":
            return self.medium.layered or self.medium.background_power > 0
        return self.correction.filter == "on"

    def with_seed(self, seed: int) -> "PipelineConfig":
        return self.model_copy(update={"run": self.run.model_copy(update={"seed": seed})})


def parse_config(text: str, source: str = "<string>") -> PipelineConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as e:
        raise PipelineConfigurationError(f"Cannot parse {source}: {e}", {"source": source}) from e

    unknown = [name for name in parser.sections() if name not in SECTIONS]
    if unknown:
        raise PipelineConfigurationError(f"Unknown sections in {source}: {', '.join(unknown)}.", {"sections": unknown})
    try:
        config = PipelineConfig.model_validate({name: dict(parser.items(name)) for name in parser.sections()})
    except pydantic.ValidationError as e:
        errors = [{"key": ".".join(str(part) for part in error["loc"]), "message": error["msg"]} for error in e.errors()]
        raise PipelineConfigurationError(f"Invalid configuration in {source}.", {"errors": errors}) from e
    logger.info(f"Loaded configuration '{config.run.name}' from {source}.")
    return config


def load_config(path: str | Path) -> PipelineConfig:
    target = Path(path)
    if not target.is_file():
        raise PipelineConfigurationError(f"Configuration file {target} does not exist.", {"path": str(target)})
    return parse_config(target.read_text(encoding="utf-8"), source=str(target))
