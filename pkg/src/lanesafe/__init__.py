"""Localization safety toolkit for lane keeping.

From crash statistics and a target level of safety, derive the integrity
risk budget and its allocation across driving subsystems; from road
design standards and vehicle dimensions, derive the lateral,
longitudinal and vertical alert limits a lane-keeping system must
protect, and the 95% positioning accuracy each vehicle class needs; and
check the Gaussian error model by Monte Carlo containment simulation.
"""

__version__ = "0.1.0"

from .accuracy_budget import (
    AccuracyBudget,
    AttitudeErrors,
    AttitudePolicy,
    PoseBudget,
    accuracy_table,
    coupled_budget,
    lateral_budget_simple,
    verify_protection,
)
from .alert_limits import (
    AlertLimits,
    VehicleClass,
    default_vehicle_classes,
    solve_scenario,
    tradeoff_curve,
)
from .config import RunConfig, load_config
from .containment_mc import McConfig, McResult, containment_rate
from .errors import (
    ConfigError,
    DivisionDomainError,
    InfeasibleBudgetError,
    InfeasibleGeometryError,
    InvalidArgumentError,
    InvalidTreeError,
    LanesafeError,
    NotFoundError,
)
from .integrity_stats import (
    confidence_ratio,
    rescale_accuracy,
    standard_normal_quantile,
    two_sided_sigma,
)
from .road_geometry import (
    LaneGeometry,
    curve_lateral_extent,
    curve_longitudinal_extent,
    default_road_standards,
    superelevation_radius,
)
from .safety_risk import (
    AllocationNode,
    CrashStatistics,
    SafetyTarget,
    allocate_budget,
    safety_level_lookup,
    total_integrity_budget,
    vehicle_failure_rate,
)

__all__ = [
    "__version__",
    "AccuracyBudget",
    "AttitudeErrors",
    "AttitudePolicy",
    "PoseBudget",
    "accuracy_table",
    "coupled_budget",
    "lateral_budget_simple",
    "verify_protection",
    "AlertLimits",
    "VehicleClass",
    "default_vehicle_classes",
    "solve_scenario",
    "tradeoff_curve",
    "RunConfig",
    "load_config",
    "McConfig",
    "McResult",
    "containment_rate",
    "ConfigError",
    "DivisionDomainError",
    "InfeasibleBudgetError",
    "InfeasibleGeometryError",
    "InvalidArgumentError",
    "InvalidTreeError",
    "LanesafeError",
    "NotFoundError",
    "confidence_ratio",
    "rescale_accuracy",
    "standard_normal_quantile",
    "two_sided_sigma",
    "LaneGeometry",
    "curve_lateral_extent",
    "curve_longitudinal_extent",
    "default_road_standards",
    "superelevation_radius",
    "AllocationNode",
    "CrashStatistics",
    "SafetyTarget",
    "allocate_budget",
    "safety_level_lookup",
    "total_integrity_budget",
    "vehicle_failure_rate",
]
