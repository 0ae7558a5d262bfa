"""Request/response models for the HTTP boundary.

These validate shapes and trivial ranges; domain invariants stay in the
core dataclasses, whose errors the app maps onto HTTP statuses.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..alert_limits import VehicleClass
from ..config import RunConfig, parse_weight

_MAX_SERVICE_TRIALS = 2_000_000
_MAX_SERVICE_SAMPLES = 8192


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


class HealthResponse(_Model):
    status: Literal["ok"]
    version: str


class VehicleModel(_Model):
    label: str = Field(min_length=1)
    length_m: float = Field(gt=0)
    width_m: float = Field(gt=0)

    def to_core(self) -> VehicleClass:
        return VehicleClass(self.label, self.length_m, self.width_m)

    @classmethod
    def from_core(cls, vehicle: VehicleClass) -> "VehicleModel":
        return cls(label=vehicle.label, length_m=vehicle.length_m,
                   width_m=vehicle.width_m)


class TreeEntry(_Model):
    path: str = Field(min_length=1)
    weight: float | str

    def resolved_weight(self) -> float:
        if isinstance(self.weight, str):
            return parse_weight(self.weight)
        return self.weight


class RiskAllocationRequest(_Model):
    tls_per_mile: float | None = Field(None, gt=0)
    total_budget_per_mile: float | None = Field(None, gt=0)
    p_fi: float = Field(1e-2, gt=0, le=1)
    tree: list[TreeEntry] | None = None

    @model_validator(mode="after")
    def _exactly_one_budget(self) -> "RiskAllocationRequest":
        if (self.tls_per_mile is None) == (self.total_budget_per_mile is None):
            raise ValueError("provide exactly one of tls_per_mile or "
                             "total_budget_per_mile")
        return self

    def tree_entries(self) -> tuple[tuple[str, str], ...]:
        if self.tree is None:
            return RunConfig().tree
        return tuple((entry.path, repr(entry.resolved_weight()))
                     for entry in self.tree)


class AllocationNodeModel(_Model):
    path: str
    weight: float
    budget_per_mile: float


class RiskAllocationResponse(_Model):
    root_budget_per_mile: float
    tls_per_mile: float
    p_fi: float
    nodes: list[AllocationNodeModel]


class AlertLimitsRequest(_Model):
    design_speed_kmh: float = Field(gt=0)
    superelevation: float = Field(0.08, gt=0, lt=1)
    vehicle: VehicleModel | str = "paper-example"
    lon_cap_m: float = Field(1.5, gt=0)
    clearance_m: float = Field(4.5, gt=0)


class AlertLimitsResponse(_Model):
    lateral_m: float
    longitudinal_m: float
    vertical_m: float
    box_x_m: float
    box_y_m: float
    warnings: list[str]


class AlertLimitTableRequest(_Model):
    superelevation: float = Field(0.08, gt=0, lt=1)
    vehicle: VehicleModel | str = "paper-example"
    lon_cap_m: float = Field(1.5, gt=0)
    clearance_m: float = Field(4.5, gt=0)


class AlertLimitRowModel(_Model):
    design_speed_kmh: float
    lat_al_m: float
    lon_al_m: float


class AlertLimitTableResponse(_Model):
    rows: list[AlertLimitRowModel]
    vertical_m: float
    warnings: list[str]


class AccuracyRequest(_Model):
    design_speed_kmh: float = Field(60.0, gt=0)
    superelevation: float = Field(0.08, gt=0, lt=1)
    reference_vehicle: VehicleModel | str = "paper-example"
    classes: list[VehicleModel] | None = None
    attitude_full_rad: float = Field(0.03, ge=0, lt=0.1)
    attitude_p95_rad: float = Field(0.02, ge=0, lt=0.1)
    quantile_mode: Literal["paper", "exact"] = "paper"
    lon_cap_m: float = Field(1.5, gt=0)
    clearance_m: float = Field(4.5, gt=0)
    per_class_alert_limits: bool = False


class AccuracyRowModel(_Model):
    label: str
    length_m: float
    width_m: float
    lat_acc95_m: float
    lon_acc95_m: float
    vert_acc95_m: float


class AccuracyResponse(_Model):
    rows: list[AccuracyRowModel]
    metadata: dict[str, str]
    warnings: list[str]


class PointModel(_Model):
    x: float
    y: float


class CurvesRequest(_Model):
    design_speed_kmh: float = Field(60.0, gt=0)
    superelevation: float = Field(0.08, gt=0, lt=1)
    samples: int = Field(512, ge=2, le=_MAX_SERVICE_SAMPLES)
    vehicle: VehicleModel | str = "paper-example"
    lon_cap_m: float = Field(1.5, gt=0)


class CurvesResponse(_Model):
    lane_width_m: float
    centerline_radius_m: float
    box_curve: list[PointModel]
    tradeoff: list[PointModel]
    warnings: list[str]


class McRequest(_Model):
    trials: int = Field(ge=1, le=_MAX_SERVICE_TRIALS)
    sigma_lat_m: float = Field(ge=0)
    sigma_lon_m: float = Field(0.0, ge=0)
    sigma_heading_rad: float = Field(0.0, ge=0)
    geometry: Literal["straight", "curved"] = "straight"
    lane_width_m: float = Field(3.5, gt=0)
    centerline_radius_m: float | None = Field(None, gt=0)
    vehicle: VehicleModel | str = "paper-example"
    seed: int = Field(20240817, ge=0, lt=2**64)
    workers: int = Field(1, ge=1, le=32)

    @model_validator(mode="after")
    def _radius_when_curved(self) -> "McRequest":
        if self.geometry == "curved" and self.centerline_radius_m is None:
            raise ValueError("curved geometry needs centerline_radius_m")
        return self


class McResponse(_Model):
    trials: int
    failures: int
    rate: float
    ci_low: float
    ci_high: float
    seed: int
    workers: int
    note: str


class ErrorResponse(_Model):
    detail: str
    kind: str
