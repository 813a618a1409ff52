import logging

import numpy as np
from scipy import fft as sp_fft

from umi.services.exceptions import AcquisitionError, ContractError
from umi.services.geometry_impl.illumination import BasisKind, IlluminationBasis, transmit_delays
from umi.services.geometry_impl.probe import ProbeModel

from .kernels import synthesize_echoes
from .medium import MediumDescription
from .pulse import GaussianPulse
from .raw import ReflectionMatrixRaw
from .screen import PhaseScreen

logger = logging.getLogger(__name__)


def one_way_paths(positions: np.ndarray, probe: ProbeModel, sound_speed: float, screen: PhaseScreen | None) -> tuple[np.ndarray, np.ndarray]:
    """Straight-ray travel times (N_elem, M) and complex gains between elements and scatterers.

    The gain is the Green's amplitude 1/(4π|r − u|) times the obliquity cos θ,
    zero beyond θ_max and on dead elements, times the screen transmittance at
    the point where the ray crosses the screen plane.
    """
    elements = probe.element_positions
    dx = positions[np.newaxis, :, 0] - elements[:, 0, np.newaxis]
    dy = positions[np.newaxis, :, 1] - elements[:, 1, np.newaxis]
    dz = np.broadcast_to(positions[np.newaxis, :, 2], dx.shape)
    distance = np.sqrt(dx**2 + dy**2 + dz**2)
    cosine = dz / distance

    inside = (cosine >= np.cos(probe.directivity_limit)) & probe.element_active[:, np.newaxis]
    gain = np.where(inside, cosine / (4.0 * np.pi * distance), 0.0).astype(np.complex128)

    if screen is not None:
        crossing = positions[:, 2] > screen.depth
        if crossing.any():
            fraction = screen.depth / positions[crossing, 2]
            cross_x = elements[:, 0, np.newaxis] + dx[:, crossing] * fraction
            cross_y = elements[:, 1, np.newaxis] + dy[:, crossing] * fraction
            values = screen.transmittance(np.column_stack([cross_x.ravel(), cross_y.ravel()]))
            gain[:, crossing] *= values.reshape(cross_x.shape)

    return distance / sound_speed, gain


def _emitters(basis: IlluminationBasis, probe: ProbeModel) -> tuple[np.ndarray, np.ndarray]:
    if basis.kind == BasisKind.TRANSDUCER:
        return np.arange(probe.n_elements, dtype=np.int64)[:, np.newaxis], np.zeros((probe.n_elements, 1))
    active = np.flatnonzero(probe.element_active)
    delays = transmit_delays(basis, probe)[:, active]
    return np.tile(active.astype(np.int64), (delays.shape[0], 1)), delays


def simulate(
    medium: MediumDescription,
    screen: PhaseScreen | None,
    probe: ProbeModel,
    basis: IlluminationBasis,
    noise_power: float = 0.0,
    rng: np.random.Generator | None = None,
    oversampling: float = 4.0,
) -> ReflectionMatrixRaw:
    """Single-scattering forward model of a matrix-array acquisition.

    Waves propagate at the medium sound speed; plane-wave emission delays use
    the probe's sound speed. ``noise_power`` is relative to the mean signal
    power. Dead elements neither emit nor receive.
    """
    if medium.is_empty:
        raise AcquisitionError("Medium has no scatterer.")
    if noise_power < 0:
        raise AcquisitionError("Noise power must be >= 0.", {"noise_power": noise_power})
    basis.validate_for(probe)

    positions, reflectivity = medium.materialize(probe, rng)
    if np.any(positions[:, 2] <= 0):
        raise AcquisitionError("Scatterer behind the probe plane.", {"count": int(np.count_nonzero(positions[:, 2] <= 0))})

    pulse = GaussianPulse.for_probe(probe)
    sampling_frequency = pulse.default_sampling_frequency(oversampling)
    dt = 1.0 / sampling_frequency
    path_time, path_gain = one_way_paths(positions, probe, medium.sound_speed, screen)
    emitter_index, emitter_delay = _emitters(basis, probe)

    reached = path_gain != 0
    if not reached.any():
        logger.warning("No scatterer lies inside the directivity cone of an active element.")
        time_origin, n_samples = 0.0, 0
    else:
        reachable = path_time[reached]
        earliest = emitter_delay.min() + 2.0 * reachable.min() - pulse.support
        latest = emitter_delay.max() + 2.0 * reachable.max() + pulse.support
        time_origin = float(np.floor(earliest / dt) * dt)
        n_samples = int(np.ceil((latest - time_origin) / dt)) + 1

    logger.info(f"Simulating {basis.kind.name.lower()} acquisition: {emitter_index.shape[0]} inputs, {positions.shape[0]} scatterers, {n_samples} samples.")
    signals = synthesize_echoes(
        emitter_index,
        emitter_delay,
        path_time,
        path_gain,
        reflectivity,
        time_origin,
        dt,
        n_samples,
        pulse.sigma_t,
        pulse.support,
        probe.center_frequency,
    )

    if noise_power > 0 and signals.size:
        if rng is None:
            raise AcquisitionError("Noise needs a random generator.")
        signals = signals + complex_gaussian(signals.shape, noise_power * float(np.mean(np.abs(signals) ** 2)), rng)
        signals[:, ~probe.element_active, :] = 0.0
        if basis.kind == BasisKind.TRANSDUCER:
            signals[~probe.element_active, :, :] = 0.0

    return ReflectionMatrixRaw(
        basis=basis,
        probe=probe,
        signals=signals.astype(np.complex64),
        sampling_frequency=sampling_frequency,
        demodulation_frequency=probe.center_frequency,
        time_origin=time_origin,
    )


def complex_gaussian(shape: tuple[int, ...], power: float, rng: np.random.Generator) -> np.ndarray:
    """Circular complex Gaussian samples with E|n|² = power."""
    draws = rng.standard_normal((*shape, 2))
    return np.sqrt(power / 2.0) * (draws[..., 0] + 1j * draws[..., 1])


def inject_raw_background(raw: ReflectionMatrixRaw, power: float, rng: np.random.Generator) -> ReflectionMatrixRaw:
    """Add a symmetric band-limited random component, a surrogate for multiple scattering.

    ``power`` is relative to the mean power of ``raw``. Transducer basis only.
    """
    if raw.is_plane_wave:
        raise ContractError("Raw background injection needs a transducer-basis matrix.")
    if power < 0:
        raise ContractError("Background power must be >= 0.", {"power": power})
    if power == 0 or raw.n_samples == 0:
        return raw

    pulse = GaussianPulse.for_probe(raw.probe)
    noise = complex_gaussian(raw.signals.shape, 1.0, rng)
    frequencies = sp_fft.fftfreq(raw.n_samples, d=raw.sampling_interval)
    noise = sp_fft.ifft(sp_fft.fft(noise, axis=-1) * np.exp(-0.5 * (frequencies / pulse.sigma_f) ** 2), axis=-1)
    symmetric = (noise + noise.transpose(1, 0, 2)) / 2.0
    active = raw.probe.element_active
    symmetric[~active, :, :] = 0.0
    symmetric[:, ~active, :] = 0.0

    target = power * float(np.mean(np.abs(raw.signals.astype(np.complex128)) ** 2))
    current = float(np.mean(np.abs(symmetric) ** 2))
    if current > 0:
        symmetric *= np.sqrt(target / current)
    logger.info(f"Injected symmetric raw background at relative power {power}.")
    return raw.with_signals(raw.signals + symmetric)


def synthesize_plane_waves(raw: ReflectionMatrixRaw, basis: IlluminationBasis, time_origin: float, n_samples: int) -> ReflectionMatrixRaw:
    """Plane-wave matrix from transducer-basis data by delaying and summing emissions.

    Delays are applied as exact Fourier phase ramps; ``time_origin`` must sit on
    the sample lattice of ``raw``.
    """
    if raw.is_plane_wave or basis.kind != BasisKind.PLANE_WAVE:
        raise ContractError("Plane-wave synthesis needs transducer-basis data and a plane-wave basis.")
    dt = raw.sampling_interval
    offset = (time_origin - raw.time_origin) / dt
    if abs(offset - round(offset)) > 1e-6:
        raise ContractError("Target time origin is not on the sample lattice of the source.", {"offset_samples": offset})
    offset = round(offset)

    active = np.flatnonzero(raw.probe.element_active)
    delays = transmit_delays(basis, raw.probe)[:, active]
    shifts = delays / dt - offset
    length = sp_fft.next_fast_len(raw.n_samples + n_samples + 2 * int(np.ceil(np.abs(shifts).max())) + 2)
    spectra = sp_fft.fft(raw.signals[active].astype(np.complex128), n=length, axis=-1)
    bins = sp_fft.fftfreq(length)

    out = np.zeros((delays.shape[0], raw.probe.n_elements, n_samples), dtype=np.complex128)
    carrier = np.exp(-2j * np.pi * raw.demodulation_frequency * delays)
    for index in range(delays.shape[0]):
        weights = carrier[index, :, np.newaxis] * np.exp(-2j * np.pi * bins[np.newaxis, :] * shifts[index, :, np.newaxis])
        combined = np.einsum("eof,ef->of", spectra, weights)
        out[index] = sp_fft.ifft(combined, axis=-1)[:, :n_samples]

    return ReflectionMatrixRaw(
        basis=basis,
        probe=raw.probe,
        signals=out.astype(np.complex64),
        sampling_frequency=raw.sampling_frequency,
        demodulation_frequency=raw.demodulation_frequency,
        time_origin=time_origin,
    )
