"""Gaussian-envelope tone burst in complex baseband."""

from dataclasses import dataclass

import numpy as np

from umi.services.exceptions import ValidationError
from umi.services.geometry_impl.probe import ProbeModel

# Echoes are truncated at this many envelope standard deviations.
SUPPORT_SIGMAS = 5.0


@dataclass(frozen=True)
class GaussianPulse:
    """Pulse with a Gaussian spectrum of −6 dB full width ``bandwidth`` around ``center_frequency`` (MHz)."""

    center_frequency: float
    bandwidth: float

    def __post_init__(self) -> None:
        if self.center_frequency <= 0 or self.bandwidth <= 0:
            raise ValidationError("Pulse frequency and bandwidth must be positive.", {"f_c": self.center_frequency, "bandwidth": self.bandwidth})

    @classmethod
    def for_probe(cls, probe: ProbeModel) -> "GaussianPulse":
        return cls(center_frequency=probe.center_frequency, bandwidth=probe.bandwidth_width)

    @property
    def sigma_f(self) -> float:
        return (self.bandwidth / 2.0) / np.sqrt(2.0 * np.log(2.0))

    @property
    def sigma_t(self) -> float:
        """Envelope standard deviation in µs."""
        return 1.0 / (2.0 * np.pi * self.sigma_f)

    @property
    def support(self) -> float:
        """Half-width of the truncated envelope in µs."""
        return SUPPORT_SIGMAS * self.sigma_t

    def envelope(self, t: np.ndarray) -> np.ndarray:
        return np.exp(-0.5 * (np.asarray(t) / self.sigma_t) ** 2)

    def baseband(self, t: np.ndarray, delay: float) -> np.ndarray:
        """Demodulated echo arriving at ``delay``: env(t − τ)·exp(−i2πf_cτ)."""
        return self.envelope(np.asarray(t) - delay) * np.exp(-2j * np.pi * self.center_frequency * delay)

    def default_sampling_frequency(self, oversampling: float = 4.0) -> float:
        return oversampling * self.bandwidth
