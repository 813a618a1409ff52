from dataclasses import asdict, dataclass, field
from typing import Any

import pandas as pd


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one acceptance check.

    ``passed`` is None when the check was skipped (its inputs are missing).
    """

    name: str
    passed: bool | None
    value: float | None = None
    threshold: str = ""
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def skipped(self) -> bool:
        return self.passed is None

    def as_dict(self) -> dict[str, Any]:
        return {"passed": self.passed, "value": self.value, "threshold": self.threshold, "details": self.details}


@dataclass(frozen=True)
class StepRecord:
    step: int
    label: str
    windows: int
    median_scalar_product: float
    rpsf_map: str


@dataclass
class RunReport:
    """Everything a run produced apart from its binary artifacts.

    Timings live in ``timings.json``, the rest in ``report.json``, so that two
    runs with the same seed write identical reports.
    """

    name: str
    seed: int
    timings: dict[str, float] = field(default_factory=dict)
    sizes: dict[str, int] = field(default_factory=dict)
    metrics: dict[str, list[dict[str, Any]]] = field(default_factory=dict)
    steps: list[StepRecord] = field(default_factory=list)
    checks: dict[str, CheckResult] = field(default_factory=dict)

    def add_metrics(self, label: str, frame: pd.DataFrame) -> None:
        self.metrics[label] = frame.astype(object).where(frame.notna(), None).to_dict(orient="records")

    @property
    def failed_checks(self) -> list[str]:
        return [name for name, result in self.checks.items() if result.passed is False]

    @property
    def all_passed(self) -> bool:
        return not self.failed_checks

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "seed": self.seed,
            "sizes": self.sizes,
            "metrics": self.metrics,
            "steps": [asdict(step) for step in self.steps],
            "checks": {name: result.as_dict() for name, result in self.checks.items()},
            "all_passed": self.all_passed,
        }
