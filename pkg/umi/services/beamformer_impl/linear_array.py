import logging

import numpy as np

from umi.services.acquisition_impl.raw import ReflectionMatrixRaw
from umi.services.exceptions import ContractError
from umi.services.geometry_impl.grid import VoxelGrid

from .delays import cylindrical_delay_element, cylindrical_delay_plane_wave
from .focused import FocusedRMatrix
from .kernels import focus_band

logger = logging.getLogger(__name__)


def emulate_linear_array(raw: ReflectionMatrixRaw, focus_line: tuple[float, float], grid: VoxelGrid, max_offset: float) -> FocusedRMatrix:
    """Focused (y, z) matrix of a virtual 1D array with a cylindrical lens focused on the line (x_f, z_f).

    Delays: t′(θ_y, y_in, z) + t′(u_y, y_out, z) + t′(θ_x, x_f, z_f) + t′(u_x, x_f, z_f) − 2 z_f / c₀.
    """
    if not raw.is_plane_wave:
        raise ContractError("Linear-array emulation needs plane-wave data.")
    x_focus, z_focus = focus_line
    if not grid.is_planar or not np.isclose(grid.x[0], x_focus):
        raise ContractError("Linear-array grid must be the (y, z) plane at x = x_f.", {"x": grid.x.tolist(), "x_f": x_focus})
    half_aperture = raw.probe.aperture[0] / 2.0
    if abs(x_focus) > half_aperture:
        logger.warning(f"Focus line x_f={x_focus:.2f} mm lies outside the aperture (|x| <= {half_aperture:.2f} mm).")

    assert raw.basis.angles is not None
    c = raw.sound_speed
    theta_x = raw.basis.angles[:, 0]
    theta_y = raw.basis.angles[:, 1]
    u_x = raw.probe.element_positions[:, 0]
    u_y = raw.probe.element_positions[:, 1]
    lens_in = cylindrical_delay_plane_wave(theta_x, x_focus, z_focus, c)
    lens_out = cylindrical_delay_element(u_x, x_focus, z_focus, c) - 2.0 * z_focus / c

    template = FocusedRMatrix.zeros(grid, max_offset, raw.probe, input_basis=raw.basis.kind, apodization="cylindrical", sound_speed=c)
    neighbours = np.ascontiguousarray(template.neighbour_table)
    weight_in = np.ones((raw.n_inputs, grid.n_lateral))
    weight_out = np.ascontiguousarray(np.broadcast_to(raw.probe.element_active[:, np.newaxis], (raw.probe.n_elements, grid.n_lateral)).astype(np.float64))
    blocks = np.zeros((grid.nz, grid.n_lateral, template.n_offsets), dtype=np.complex64)

    logger.info(f"Emulating a linear array focused at x={x_focus:.2f} mm, z={z_focus:.2f} mm on {grid.ny}x{grid.nz} voxels.")
    for iz, z in enumerate(grid.z):
        delay_in = cylindrical_delay_plane_wave(theta_y[:, np.newaxis], grid.y[np.newaxis, :], z, c) + lens_in[:, np.newaxis]
        delay_out = cylindrical_delay_element(u_y[:, np.newaxis], grid.y[np.newaxis, :], z, c) + lens_out[:, np.newaxis]
        if raw.n_samples == 0:
            continue
        blocks[iz] = focus_band(raw.signals, delay_in, delay_out, weight_in, weight_out, neighbours, raw.time_origin, raw.sampling_frequency, raw.demodulation_frequency)
    return template.with_blocks(blocks)
