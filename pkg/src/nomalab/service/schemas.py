"""Request models for the HTTP boundary.

Pydantic validates shapes and ranges at the edge; the frozen domain types
keep the physical invariants. Conversion helpers raise the domain's own
ValueError/SpecError, which the app maps to a 400 response. Tier indices
are 1-based in every payload, matching the result tables.
"""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field

from nomalab.analytics import PowerAllocation
from nomalab.geometry import NetworkConfig, TierParams

SchemeName = Literal["non_coordinated", "coordinated_jt"]
ModeName = Literal["fast_path", "full_network"]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class TierModel(_Strict):
    power: float = Field(gt=0, description="transmit power in watts")
    intensity: float = Field(gt=0, description="BSs per square meter")
    bias: float = Field(default=1.0, gt=0)


class NetworkModel(_Strict):
    tiers: list[TierModel] = Field(min_length=1)
    user_intensity: float = Field(gt=0)
    alpha: float = Field(gt=2)
    group_size: int = Field(ge=1)
    sir_threshold: float = Field(gt=0)

    def to_domain(self) -> NetworkConfig:
        return NetworkConfig(
            tiers=tuple(
                TierParams(power=t.power, intensity=t.intensity, bias=t.bias)
                for t in self.tiers
            ),
            user_intensity=self.user_intensity,
            alpha=self.alpha,
            group_size=self.group_size,
            sir_threshold=self.sir_threshold,
        )


def to_alloc(betas: list[float]) -> PowerAllocation:
    return PowerAllocation(tuple(betas))


class NetworkRequest(_Strict):
    network: NetworkModel


class MetricsRequest(_Strict):
    network: NetworkModel
    alloc: list[float] = Field(min_length=1)
    tier: int = Field(ge=1, description="1-based tier index")
    scheme: SchemeName


class FeasibilityRequest(_Strict):
    alloc: list[float] = Field(min_length=1)
    theta: float
    scheme: SchemeName


class OptimizeRequest(_Strict):
    network: NetworkModel
    tier: int = Field(ge=1)
    scheme: SchemeName
    objective: Literal["cell_coverage", "cell_throughput"] = "cell_coverage"
    method: Literal["grid", "pattern"] = "pattern"
    resolution: float | None = Field(default=None, gt=0)


class SimulateRequest(_Strict):
    network: NetworkModel
    alloc: list[float] = Field(min_length=1)
    tier: int = Field(ge=1)
    scheme: SchemeName
    mode: ModeName = "fast_path"
    trials: int = Field(ge=1, le=2_000_000)
    seed: int = Field(ge=0)
    window_radius: float | None = Field(default=None, gt=0)
    retry_budget: int = Field(default=10_000, ge=1)


class ExperimentRequest(_Strict):
    """Exactly one of `recipe` or `spec`; trials/seed override either."""

    recipe: str | None = None
    spec: dict[str, Any] | None = None
    trials: int | None = Field(default=None, ge=0)
    seed: int | None = Field(default=None, ge=0)
    jobs: int | None = Field(default=None, ge=1)
