"""Pydantic models for check configurations, check catalog entries and reports."""

from typing import Any

from pydantic import BaseModel, ConfigDict, Field, computed_field, field_validator, model_validator

from harmonic.exceptions import LacunarityError
from harmonic.poly import is_power_of_two
from harmonic.symbols import lacunary_check
from verifier.constants import (
    DEFAULT_ABS_TOL,
    DEFAULT_BATCH_TOLERANCE,
    DEFAULT_CEILING,
    DEFAULT_ENUMERATION_BUDGET,
    DEFAULT_GRID_POINTS,
    DEFAULT_MC_SAMPLES,
    DEFAULT_SEARCH_ITERATIONS,
    DEFAULT_SEARCH_STARTS,
    DEFAULT_STABILITY_FACTOR,
    CheckKind,
    LemmaId,
)


class CheckConfig(BaseModel):
    """Everything one check run depends on; echoed verbatim into its report.

    Sequence parameters are optional here and filled from the registry defaults of the
    check.  ``N`` pairs with ``levels`` when levels are given and with ``d`` otherwise.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    lemma: LemmaId
    seed: int = Field(ge=0)

    # Harness
    instances: int = Field(default=100, ge=1)
    searches: int = Field(default=0, ge=0)
    search_starts: int = Field(default=DEFAULT_SEARCH_STARTS, ge=1)
    search_iterations: int = Field(default=DEFAULT_SEARCH_ITERATIONS, ge=0)
    scale: int = Field(default=1, ge=1)
    stability_factor: float = Field(default=DEFAULT_STABILITY_FACTOR, gt=1.0)
    ceiling: float = Field(default=DEFAULT_CEILING, gt=0)
    batch_tolerance: float = Field(default=DEFAULT_BATCH_TOLERANCE, gt=0)

    # Tolerances and grids
    abs_tol: float = Field(default=DEFAULT_ABS_TOL, gt=0)
    grid_oversample: int = Field(default=8, ge=4)
    grid_points: int = Field(default=DEFAULT_GRID_POINTS, ge=1)

    # Systems
    d: list[int] | None = None
    N: list[int] | None = None
    levels: list[int] | None = None
    s: int = Field(default=0, ge=0)
    beta: float = Field(default=2.0, gt=0)
    eps: list[float] = Field(default_factory=lambda: [0.1, 0.25, 0.4])
    signs: list[int] | None = None
    c_alpha_est: float | None = Field(default=None, gt=0)

    # Family generation
    family_size: int = Field(default=4, ge=1)
    max_degree: int = Field(default=32, ge=0)
    n_max: int = Field(default=256, ge=1)
    depth: int = Field(default=10, ge=1)
    rounds: int = Field(default=4, ge=1)

    # ind-norm evaluation
    mc_samples: int = Field(default=DEFAULT_MC_SAMPLES, ge=2)
    enumeration_budget: int = Field(default=DEFAULT_ENUMERATION_BUDGET, ge=1)

    @field_validator("eps", mode="before")
    @classmethod
    def wrap_scalar_eps(cls, v: Any) -> Any:
        return [v] if isinstance(v, int | float) else v

    @field_validator("eps")
    @classmethod
    def eps_below_half(cls, v: list[float]) -> list[float]:
        if not v:
            raise ValueError("eps needs at least one value")
        for e in v:
            if not 0.0 < e < 0.5:
                raise ValueError(f"eps must satisfy 0 < eps < 1/2, got {e}")
        return v

    @field_validator("d")
    @classmethod
    def d_is_lacunary(cls, v: list[int] | None) -> list[int] | None:
        if v is None:
            return v
        try:
            lacunary_check(v)
        except LacunarityError as exc:
            raise ValueError(str(exc)) from exc
        return v

    @field_validator("N")
    @classmethod
    def n_positive(cls, v: list[int] | None) -> list[int] | None:
        if v is not None and any(n < 1 for n in v):
            raise ValueError(f"N entries must be positive, got {v}")
        return v

    @field_validator("levels")
    @classmethod
    def levels_increasing(cls, v: list[int] | None) -> list[int] | None:
        if v is None:
            return v
        if not v or v[0] < 0 or any(b <= a for a, b in zip(v, v[1:], strict=False)):
            raise ValueError(f"levels must be non-negative and strictly increasing, got {v}")
        return v

    @field_validator("signs")
    @classmethod
    def signs_are_units(cls, v: list[int] | None) -> list[int] | None:
        if v is not None and any(s not in (-1, 1) for s in v):
            raise ValueError(f"signs must be +1 or -1, got {v}")
        return v

    @field_validator("grid_points")
    @classmethod
    def grid_power_of_two(cls, v: int) -> int:
        if not is_power_of_two(v):
            raise ValueError(f"grid_points must be a power of two, got {v}")
        return v

    @model_validator(mode="after")
    def lengths_agree(self) -> "CheckConfig":
        if self.signs is not None and self.d is not None and len(self.signs) != len(self.d):
            raise ValueError(f"signs has {len(self.signs)} entries but d has {len(self.d)}")
        if self.N is not None:
            partner, name = (self.levels, "levels") if self.levels is not None else (self.d, "d")
            if partner is not None and len(partner) != len(self.N):
                raise ValueError(f"N has {len(self.N)} entries but {name} has {len(partner)}")
        return self


class CheckDefinition(BaseModel):
    """Catalog entry for a registered check."""

    lemma: LemmaId
    description: str
    kind: CheckKind
    defaults: dict[str, Any] = Field(default_factory=dict)
    batch_statistic: str | None = None


class InstanceRow(BaseModel):
    instance: int
    lhs: float | None
    rhs: float | None
    ratio: float | None
    skipped: bool
    violation: bool = False
    searched: bool = False


class StabilityReport(BaseModel):
    """Empirical constant at the configured size and at twice the size."""

    base: float | None
    doubled: float | None
    growth: float | None
    factor: float
    stable: bool


class BatchStabilityReport(BaseModel):
    """One extra compared between the first and second half of the plain instances."""

    statistic: str
    batches: list[float | None]
    spread: float | None
    tolerance: float
    stable: bool


class CheckReport(BaseModel):
    lemma: LemmaId
    kind: CheckKind
    instances: int
    violations: int
    worst_ratio: float | None
    estimated_constant: float | None
    witness: dict[str, Any] | None
    runtime_ms: float | None
    config_echo: dict[str, Any]
    skipped: int = 0
    errors: int = 0
    extras: dict[str, float] = Field(default_factory=dict)
    stability: StabilityReport | None = None
    batch_stability: BatchStabilityReport | None = None
    rows: list[InstanceRow] = Field(default_factory=list)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def passed(self) -> bool:
        stable = self.stability is None or self.stability.stable
        batches_agree = self.batch_stability is None or self.batch_stability.stable
        return self.violations == 0 and self.errors == 0 and stable and batches_agree
