"""Pose-error budgets: from alert limits to required accuracies.

The position error triple (dlat, dlon, dvert) and the attitude error
triple (dlambda, dphi, dtheta) jointly consume the alert limits:

    dlat  + (dlon + dvert + l_v/2) dlambda           <= Lat.AL
    dlon  + (dlat + w_v/2) dphi    + dvert dphi      <= Lon.AL
    dvert + (dlat + w_v/2) dtheta  + (dlon + l_v/2) dphi <= VAL

The tight (all-equalities) solution is the protection-level budget at full
integrity. The simplified lateral rule dlat = Lat.AL - l_v*dlambda is the
published per-class recipe; dividing by the confidence ratio converts any
full-integrity length to its 95% counterpart.

The second line above carries dphi twice, as published; pass
alternative_form=True to read the second occurrence as dtheta instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

from . import integrity_stats as istats
from .alert_limits import (AlertLimits, ScenarioSolution, VehicleClass,
                           solve_scenario)
from .errors import InfeasibleBudgetError, InvalidArgumentError
from .road_geometry import RoadStandardRow

__all__ = [
    "AttitudeErrors",
    "AttitudePolicy",
    "PoseBudget",
    "AccuracyBudget",
    "ProtectionReport",
    "AccuracyRow",
    "AccuracyTable",
    "lateral_budget_simple",
    "coupled_budget",
    "accuracy_table",
    "verify_protection",
]

_MAX_ITERATIONS = 1000
_FIXED_POINT_TOL = 1e-12


@dataclass(frozen=True, slots=True)
class AttitudeErrors:
    """Heading (dlambda), pitch-coupling (dphi) and roll-coupling (dtheta)."""

    d_lambda: float
    d_phi: float
    d_theta: float

    def __post_init__(self) -> None:
        for name in ("d_lambda", "d_phi", "d_theta"):
            value = getattr(self, name)
            if not 0.0 <= value < 0.1:
                raise InvalidArgumentError(
                    f"{name} must lie in [0, 0.1) rad, got {value!r}")

    @classmethod
    def uniform(cls, angle: float) -> "AttitudeErrors":
        return cls(angle, angle, angle)


@dataclass(frozen=True, slots=True)
class AttitudePolicy:
    """Attitude assumptions at the two confidence levels of interest."""

    full_integrity: AttitudeErrors
    p95: AttitudeErrors

    @classmethod
    def uniform(cls, full_rad: float = 0.03, p95_rad: float = 0.02) -> "AttitudePolicy":
        return cls(AttitudeErrors.uniform(full_rad), AttitudeErrors.uniform(p95_rad))


class PoseBudget(NamedTuple):
    lat_m: float
    lon_m: float
    vert_m: float


def lateral_budget_simple(lat_al: float, vehicle: VehicleClass,
                          d_lambda: float) -> float:
    """dlat = Lat.AL - l_v * dlambda, the simplified lateral rule."""
    if lat_al <= 0:
        raise InvalidArgumentError(f"lat_al must be > 0, got {lat_al!r}")
    if d_lambda < 0:
        raise InvalidArgumentError(f"d_lambda must be >= 0, got {d_lambda!r}")
    heading_term = vehicle.length_m * d_lambda
    if heading_term >= lat_al:
        raise InfeasibleBudgetError(
            f"heading term l_v*d_lambda = {heading_term!r} m consumes the "
            f"whole lateral alert limit {lat_al!r} m ({vehicle.label})")
    return lat_al - heading_term


def coupled_budget(als: AlertLimits, vehicle: VehicleClass,
                   attitude: AttitudeErrors,
                   alternative_form: bool = False) -> PoseBudget:
    """Tight solution of the three coupled inequalities.

    Jacobi iteration from (0,0,0): the map is affine with contraction
    factor bounded by the attitude errors (< 0.1 rad), so it converges
    well inside the iteration cap. Any negative component is an
    infeasibility, never clamped.
    """
    if min(als.lateral_m, als.longitudinal_m, als.vertical_m) <= 0:
        raise InvalidArgumentError("coupled budget needs positive alert limits")
    half_l = vehicle.length_m / 2.0
    half_w = vehicle.width_m / 2.0
    lam, phi, theta = attitude.d_lambda, attitude.d_phi, attitude.d_theta
    second_lon_angle = theta if alternative_form else phi

    lat = lon = vert = 0.0
    for _ in range(_MAX_ITERATIONS):
        new_lat = als.lateral_m - (lon + vert + half_l) * lam
        new_lon = als.longitudinal_m - (lat + half_w) * phi - vert * second_lon_angle
        new_vert = als.vertical_m - (lat + half_w) * theta - (lon + half_l) * phi
        if min(new_lat, new_lon, new_vert) < 0.0:
            raise InfeasibleBudgetError(
                f"pose budget infeasible for {vehicle.label}: attitude terms "
                f"exceed an alert limit (iterate {(new_lat, new_lon, new_vert)!r})")
        delta = max(abs(new_lat - lat), abs(new_lon - lon), abs(new_vert - vert))
        lat, lon, vert = new_lat, new_lon, new_vert
        if delta < _FIXED_POINT_TOL:
            return PoseBudget(lat, lon, vert)
    raise InfeasibleBudgetError(
        f"pose budget did not converge within {_MAX_ITERATIONS} iterations")


@dataclass(frozen=True, slots=True)
class AccuracyBudget:
    """A full-integrity protection level with its 95% counterpart."""

    protection_level: PoseBudget
    accuracy_95: PoseBudget
    attitude: AttitudeErrors
    alert_limits: AlertLimits
    vehicle: VehicleClass
    confidence_ratio: float

    def __post_init__(self) -> None:
        limits = (self.alert_limits.lateral_m, self.alert_limits.longitudinal_m,
                  self.alert_limits.vertical_m)
        for axis, pl, al in zip(("lateral", "longitudinal", "vertical"),
                                self.protection_level, limits):
            if pl > al:
                raise InvalidArgumentError(
                    f"{axis} protection level {pl!r} exceeds alert limit {al!r}")
        if self.confidence_ratio <= 0:
            raise InvalidArgumentError(
                f"confidence_ratio must be > 0, got {self.confidence_ratio!r}")
        for axis, pl, acc in zip(("lateral", "longitudinal", "vertical"),
                                 self.protection_level, self.accuracy_95):
            expected = pl / self.confidence_ratio
            if abs(acc - expected) > 1e-12 + 1e-9 * abs(expected):
                raise InvalidArgumentError(
                    f"{axis} accuracy_95 {acc!r} is not protection/"
                    f"ratio = {expected!r}")

    @classmethod
    def from_protection_level(cls, protection_level: PoseBudget,
                              attitude: AttitudeErrors, als: AlertLimits,
                              vehicle: VehicleClass,
                              mode: str = istats.EXACT) -> "AccuracyBudget":
        ratio = istats.confidence_ratio(istats.CONF_FULL_INTEGRITY,
                                        istats.CONF_95, mode)
        accuracy = PoseBudget(*(component / ratio for component in protection_level))
        return cls(protection_level, accuracy, attitude, als, vehicle, ratio)


@dataclass(frozen=True, slots=True)
class ProtectionReport:
    ok: bool
    slack: PoseBudget  # alert limit minus consumed budget, per axis


def verify_protection(budget: AccuracyBudget,
                      alternative_form: bool = False) -> ProtectionReport:
    """Check the three inequalities at the full-integrity values."""
    als = budget.alert_limits
    lat, lon, vert = budget.protection_level
    half_l = budget.vehicle.length_m / 2.0
    half_w = budget.vehicle.width_m / 2.0
    lam = budget.attitude.d_lambda
    phi = budget.attitude.d_phi
    theta = budget.attitude.d_theta
    second_lon_angle = theta if alternative_form else phi

    slack = PoseBudget(
        als.lateral_m - (lat + (lon + vert + half_l) * lam),
        als.longitudinal_m - (lon + (lat + half_w) * phi + vert * second_lon_angle),
        als.vertical_m - (vert + (lat + half_w) * theta + (lon + half_l) * phi),
    )
    return ProtectionReport(ok=min(slack) >= 0.0, slack=slack)


@dataclass(frozen=True, slots=True)
class AccuracyRow:
    label: str
    length_m: float
    width_m: float
    lat_acc95_m: float
    lon_acc95_m: float
    vert_acc95_m: float


@dataclass(frozen=True, slots=True)
class AccuracyTable:
    rows: tuple[AccuracyRow, ...]
    scenario: ScenarioSolution
    metadata: tuple[tuple[str, str], ...]  # ordered key/value pairs


def _format_attitude(attitude: AttitudeErrors) -> str:
    return (f"lambda={attitude.d_lambda!r} phi={attitude.d_phi!r} "
            f"theta={attitude.d_theta!r}")


def _lon_vert_95(als: AlertLimits, vehicle: VehicleClass, lat95: float,
                 p95_attitude: AttitudeErrors, ratio: float,
                 label: str) -> tuple[float, float]:
    """The 95%-domain coupled solve for the two remaining axes.

    The full-integrity inequalities scale by the confidence ratio: alert
    limits and the half-length/half-width lever arms divide by it, angles
    are already the 95% figures, and the lateral term is held at its
    simplified-rule value. The longitudinal and vertical rows are then
    iterated to their tight point exactly like the full solve.
    """
    lon_al = als.longitudinal_m / ratio
    vert_al = als.vertical_m / ratio
    half_l = vehicle.length_m / (2.0 * ratio)
    half_w = vehicle.width_m / (2.0 * ratio)
    phi, theta = p95_attitude.d_phi, p95_attitude.d_theta

    lon = vert = 0.0
    for _ in range(_MAX_ITERATIONS):
        new_lon = lon_al - (lat95 + half_w) * phi - vert * phi
        new_vert = vert_al - (lat95 + half_w) * theta - (lon + half_l) * phi
        if min(new_lon, new_vert) < 0.0:
            raise InfeasibleBudgetError(
                f"95% budget infeasible for class {label}")
        delta = max(abs(new_lon - lon), abs(new_vert - vert))
        lon, vert = new_lon, new_vert
        if delta < _FIXED_POINT_TOL:
            return lon, vert
    raise InfeasibleBudgetError(
        f"95% budget did not converge for class {label}")


def accuracy_table(v_kmh: float, superelevation: float,
                   standards: Iterable[RoadStandardRow],
                   reference_vehicle: VehicleClass,
                   classes: Iterable[VehicleClass],
                   attitude: AttitudePolicy,
                   quantile_mode: str = istats.PAPER,
                   lon_cap: float = 1.5,
                   clearance: float = 4.5,
                   per_class_alert_limits: bool = False) -> AccuracyTable:
    """Required 95% accuracies per vehicle class for one scenario.

    The scenario's alert limits come from the reference vehicle and are
    shared by every class (the published treatment); each class then
    consumes its own length in the lateral rule and its own lever arms in
    the longitudinal/vertical reconstruction. per_class_alert_limits=True
    instead re-derives the alert limits from each class's own dimensions.
    """
    istats.validate_mode(quantile_mode)
    scenario = solve_scenario(v_kmh, reference_vehicle, standards,
                              superelevation, lon_cap, clearance)
    ratio = istats.confidence_ratio(istats.CONF_FULL_INTEGRITY,
                                    istats.CONF_95, quantile_mode)
    rows = []
    max_resid_lon = 0.0
    max_resid_vert = 0.0
    for cls in classes:
        if per_class_alert_limits:
            als = solve_scenario(v_kmh, cls, standards, superelevation,
                                 lon_cap, clearance).alert_limits
        else:
            als = scenario.alert_limits
        try:
            lat_full = lateral_budget_simple(als.lateral_m, cls,
                                             attitude.full_integrity.d_lambda)
        except InfeasibleBudgetError as exc:
            raise InfeasibleBudgetError(f"class {cls.label}: {exc}") from None
        lat95 = lat_full / ratio
        lon95, vert95 = _lon_vert_95(als, cls, lat95, attitude.p95, ratio,
                                     cls.label)
        rows.append(AccuracyRow(cls.label, cls.length_m, cls.width_m,
                                lat95, lon95, vert95))
        # residual of the 95%-domain reconstruction against the straight
        # rescale of the full-integrity coupled solve
        full = coupled_budget(als, cls, attitude.full_integrity)
        max_resid_lon = max(max_resid_lon, abs(lon95 - full.lon_m / ratio))
        max_resid_vert = max(max_resid_vert, abs(vert95 - full.vert_m / ratio))

    als = scenario.alert_limits
    metadata = (
        ("design_speed_kmh", f"{v_kmh:g}"),
        ("superelevation", f"{superelevation:g}"),
        ("reference_vehicle", reference_vehicle.label),
        ("lateral_alert_limit_m", repr(als.lateral_m)),
        ("longitudinal_alert_limit_m", repr(als.longitudinal_m)),
        ("vertical_alert_limit_m", repr(als.vertical_m)),
        ("attitude_full_integrity_rad", _format_attitude(attitude.full_integrity)),
        ("attitude_p95_rad", _format_attitude(attitude.p95)),
        ("quantile_mode", quantile_mode),
        ("confidence_ratio", repr(ratio)),
        ("per_class_alert_limits", str(per_class_alert_limits).lower()),
        ("reconstruction", "lat: simplified rule / ratio; lon+vert: tight "
                           "coupled solve in the 95% domain (limits and "
                           "lever arms scaled by the ratio, 95% angles)"),
        ("reconstruction_max_residual_lon_m", repr(max_resid_lon)),
        ("reconstruction_max_residual_vert_m", repr(max_resid_vert)),
    )
    return AccuracyTable(tuple(rows), scenario, metadata)
