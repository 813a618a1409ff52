from dataclasses import dataclass, field

from django.conf import settings

from umi.services.exceptions import ConfigurationError

from .basis import CorrectionKind


@dataclass(frozen=True)
class CorrectionConfig:
    """Aberration-correction parameters; defaults come from settings."""

    basis: CorrectionKind = CorrectionKind.TRANSDUCER
    use_filter: bool = False
    tolerance: float = field(default_factory=lambda: float(getattr(settings, "UMI_IPR_TOLERANCE", 1e-8)))
    max_iterations: int = field(default_factory=lambda: int(getattr(settings, "UMI_IPR_MAX_ITERATIONS", 200)))
    epsilon_stop: float = field(default_factory=lambda: float(getattr(settings, "UMI_EPSILON_STOP", 0.2)))
    filter_width_factor: float = field(default_factory=lambda: float(getattr(settings, "UMI_FILTER_WIDTH_FACTOR", 3.0)))
    min_resolution_cells: float = 4.0
    max_workers: int | None = None

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "basis", CorrectionKind(self.basis))
        except ValueError as e:
            raise ConfigurationError(f"Unknown correction basis '{self.basis}'.", {"choices": [kind.value for kind in CorrectionKind]}) from e
        if not 0 < self.tolerance < 1:
            raise ConfigurationError("IPR tolerance must lie in (0, 1).", {"tolerance": self.tolerance})
        if self.max_iterations < 1:
            raise ConfigurationError("IPR needs at least one iteration.", {"max_iterations": self.max_iterations})
        if not 0 < self.epsilon_stop <= 2:
            raise ConfigurationError("Reciprocity stop threshold must lie in (0, 2].", {"epsilon_stop": self.epsilon_stop})
        if self.filter_width_factor <= 0:
            raise ConfigurationError("Filter width factor must be positive.", {"filter_width_factor": self.filter_width_factor})
        if self.max_workers is not None and self.max_workers < 1:
            raise ConfigurationError("max_workers must be >= 1.", {"max_workers": self.max_workers})

    @property
    def min_scalar_product(self) -> float:
        """Branch-stop threshold on T̂_in†T̂_out / N_u (0.9 for ε_stop = 0.2)."""
        return 1.0 - self.epsilon_stop / 2.0
