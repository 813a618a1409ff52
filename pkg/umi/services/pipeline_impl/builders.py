"""Turn validated configuration sections into domain objects."""

import numpy as np

from umi.services.acquisition_impl.medium import MediumDescription, PointScatterer, SpeckleRegion
from umi.services.acquisition_impl.screen import PhaseScreen, random_screen, split_screen
from umi.services.beamformer_impl.config import BeamformConfig
from umi.services.correction_impl.config import CorrectionConfig
from umi.services.correction_impl.schedule import Schedule, parse_schedule
from umi.services.geometry_impl.grid import VoxelGrid
from umi.services.geometry_impl.illumination import IlluminationBasis, plane_wave_grid
from umi.services.geometry_impl.probe import ProbeModel, matrix_probe, reference_matrix_probe
from umi.services.geometry_impl.units import m_to_mm
from umi.services.geometry_impl.window import SpatialWindow, layout_windows
from umi.services.rpsf_impl.config import RpsfConfig

from .config import AcquisitionSection, GridSection, MediumSection, PipelineConfig, ProbeSection, RpsfSection, ScreenSection


def build_probe(section: ProbeSection) -> ProbeModel:
    if section.kind == "reference":
        return reference_matrix_probe(section.sound_speed_m_s)
    return matrix_probe(
        n_x=section.elements,
        n_y=section.elements,
        pitch=section.pitch_mm,
        center_frequency=section.center_frequency_mhz,
        bandwidth=section.bandwidth_mhz,
        sound_speed=section.sound_speed_mm_us,
        dead_elements=section.dead_elements,
    )


def build_medium(section: MediumSection, name: str) -> MediumDescription:
    scatterers = tuple(PointScatterer(position=point) for point in section.points_mm)
    regions: tuple[SpeckleRegion, ...] = ()
    box = section.speckle_box_mm
    if box is not None:
        low, high = box
        regions = (SpeckleRegion(box_min=(low[0], low[1], low[2]), box_max=(high[0], high[1], high[2]), density=section.speckle_density),)
    return MediumDescription(scatterers=scatterers, speckle_regions=regions, sound_speed=section.sound_speed_mm_us, name=name)


def build_screen(section: ScreenSection, probe: ProbeModel, rng: np.random.Generator) -> PhaseScreen | None:
    """``None`` for an unaberrated medium."""
    if section.kind == "random":
        return random_screen(probe, section.rms_rad, section.correlation_elements, rng, depth=section.depth_mm)
    if section.kind == "split":
        return split_screen(probe, (section.rms_rad, section.rms_right_rad), section.correlation_elements, rng, step=section.step_rad, depth=section.depth_mm)
    return None


def build_illumination(section: AcquisitionSection, probe: ProbeModel) -> IlluminationBasis:
    if section.basis == "transducer":
        return IlluminationBasis.transducer()
    basis = plane_wave_grid(probe)
    return basis.downsampled(section.downsample) if section.downsample > 1 else basis


def build_grid(section: GridSection) -> VoxelGrid:
    return VoxelGrid.regular(
        (m_to_mm(section.x_m[0]), m_to_mm(section.x_m[1])),
        (m_to_mm(section.y_m[0]), m_to_mm(section.y_m[1])),
        section.depths_mm,
        section.pitch_mm,
    )


def build_windows(section: RpsfSection, grid: VoxelGrid) -> list[SpatialWindow]:
    return layout_windows(grid, section.patches, section.lateral_width_mm, section.axial_width_mm)


def build_beamform_config(config: PipelineConfig) -> BeamformConfig:
    return BeamformConfig(max_offset=config.beamform.max_offset_mm, voxel_pitch=config.grid.pitch_mm, apodization=config.beamform.apodization)


def build_rpsf_config(section: RpsfSection) -> RpsfConfig:
    return RpsfConfig(annulus_inner_factor=section.annulus_inner, annulus_outer_factor=section.annulus_outer, calibrated=section.calibrated)


def build_correction_config(config: PipelineConfig) -> CorrectionConfig:
    return CorrectionConfig(basis=config.correction_kind, use_filter=config.use_filter, epsilon_stop=config.correction.epsilon_stop)


def build_schedule(config: PipelineConfig) -> Schedule:
    return parse_schedule(config.correction.schedule, config.correction.schedule_scale)
