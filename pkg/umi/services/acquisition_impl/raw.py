from dataclasses import dataclass

import numpy as np

from umi.services.exceptions import ValidationError
from umi.services.geometry_impl.illumination import BasisKind, IlluminationBasis
from umi.services.geometry_impl.probe import ProbeModel


@dataclass(frozen=True, eq=False)
class ReflectionMatrixRaw:
    """Complex baseband reflection matrix R(i_in, u_out, t).

    Attributes:
        basis: Input basis (transducer elements or plane waves).
        probe: Receiving probe; its sound speed is the c₀ of the acquisition.
        signals: (N_in, N_elements, N_t) complex64.
        sampling_frequency: f_s in MHz.
        demodulation_frequency: f_c in MHz.
        time_origin: Time of sample 0 in µs.
    """

    basis: IlluminationBasis
    probe: ProbeModel
    signals: np.ndarray
    sampling_frequency: float
    demodulation_frequency: float
    time_origin: float

    def __post_init__(self) -> None:
        signals = np.asarray(self.signals, dtype=np.complex64)
        expected = (self.basis.size(self.probe), self.probe.n_elements)
        if signals.ndim != 3 or signals.shape[:2] != expected:
            raise ValidationError("Signal dimensions do not match the basis and probe.", {"shape": signals.shape, "expected": expected})
        if self.sampling_frequency < self.probe.bandwidth_width:
            raise ValidationError("Sampling frequency is below the probe bandwidth.", {"f_s": self.sampling_frequency, "bandwidth": self.probe.bandwidth_width})
        signals.setflags(write=False)
        object.__setattr__(self, "signals", signals)

    @property
    def n_inputs(self) -> int:
        return int(self.signals.shape[0])

    @property
    def n_samples(self) -> int:
        return int(self.signals.shape[2])

    @property
    def sound_speed(self) -> float:
        return self.probe.sound_speed

    @property
    def sampling_interval(self) -> float:
        return 1.0 / self.sampling_frequency

    @property
    def is_plane_wave(self) -> bool:
        return self.basis.kind == BasisKind.PLANE_WAVE

    def times(self) -> np.ndarray:
        return self.time_origin + np.arange(self.n_samples) * self.sampling_interval

    def with_signals(self, signals: np.ndarray) -> "ReflectionMatrixRaw":
        return ReflectionMatrixRaw(
            basis=self.basis,
            probe=self.probe,
            signals=signals,
            sampling_frequency=self.sampling_frequency,
            demodulation_frequency=self.demodulation_frequency,
            time_origin=self.time_origin,
        )
