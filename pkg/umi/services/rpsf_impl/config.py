from dataclasses import dataclass, field

from django.conf import settings

from umi.services.exceptions import ConfigurationError


@dataclass(frozen=True)
class RpsfConfig:
    """RPSF analysis parameters; defaults come from settings.

    The background annulus spans inner·δρ₀(z) < |Δρ| ≤ min(Δρ_max, outer·δρ₀(z)).
    With ``calibrated`` the symmetric share of pure noise (β = 1/2) counts as
    noise; without it β is read directly as the multiple-scattering fraction.
    """

    annulus_inner_factor: float = field(default_factory=lambda: float(getattr(settings, "UMI_ANNULUS_INNER_FACTOR", 6.0)))
    annulus_outer_factor: float = field(default_factory=lambda: float(getattr(settings, "UMI_ANNULUS_OUTER_FACTOR", 10.0)))
    calibrated: bool = field(default_factory=lambda: bool(getattr(settings, "UMI_CALIBRATED_RATES", True)))
    min_resolution_cells: float = 4.0
    max_workers: int | None = None

    def __post_init__(self) -> None:
        if self.annulus_inner_factor <= 0:
            raise ConfigurationError("Annulus inner factor must be positive.", {"annulus_inner_factor": self.annulus_inner_factor})
        if self.annulus_outer_factor <= self.annulus_inner_factor:
            raise ConfigurationError(
                "Annulus outer factor must exceed the inner factor.",
                {"annulus_inner_factor": self.annulus_inner_factor, "annulus_outer_factor": self.annulus_outer_factor},
            )
        if self.min_resolution_cells <= 0:
            raise ConfigurationError("min_resolution_cells must be positive.", {"min_resolution_cells": self.min_resolution_cells})
        if self.max_workers is not None and self.max_workers < 1:
            raise ConfigurationError("max_workers must be >= 1.", {"max_workers": self.max_workers})
