"""Alert limits from lane and vehicle geometry.

The warning box around a vehicle of width w_v and length l_v, inflated by
the positioning margins, must stay inside the lane. Working backwards from
the widest box the lane admits:

    lateral alert limit      = (x - w_v) / 2
    longitudinal alert limit = (y - l_v) / 2, capped at min(l_v/2, 1.5 m)
    vertical alert limit     = clearance / 3
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable

from .errors import ConfigError, InfeasibleGeometryError, InvalidArgumentError, NotFoundError
from .road_geometry import (LaneGeometry, RoadStandardRow, curve_lateral_extent,
                            curve_longitudinal_extent, standard_row)

__all__ = [
    "DEFAULT_LON_CAP_M",
    "DEFAULT_CLEARANCE_M",
    "VehicleClass",
    "AlertLimits",
    "BoundingBoxExtents",
    "ScenarioSolution",
    "lateral_alert_limit",
    "longitudinal_alert_limit",
    "longitudinal_cap",
    "vertical_alert_limit",
    "solve_scenario",
    "tradeoff_curve",
    "load_vehicle_classes",
    "default_vehicle_classes",
    "vehicle_by_label",
]

DEFAULT_LON_CAP_M = 1.5
DEFAULT_CLEARANCE_M = 4.5


@dataclass(frozen=True, slots=True)
class VehicleClass:
    label: str
    length_m: float
    width_m: float

    def __post_init__(self) -> None:
        if not self.label:
            raise InvalidArgumentError("vehicle label must be non-empty")
        if not 0.0 < self.width_m < self.length_m:
            raise InvalidArgumentError(
                f"{self.label}: need 0 < width < length, got "
                f"width={self.width_m!r}, length={self.length_m!r}")


@dataclass(frozen=True, slots=True)
class AlertLimits:
    lateral_m: float
    longitudinal_m: float
    vertical_m: float

    def __post_init__(self) -> None:
        for axis, value in (("lateral", self.lateral_m),
                            ("longitudinal", self.longitudinal_m),
                            ("vertical", self.vertical_m)):
            if value < 0.0:
                raise InvalidArgumentError(
                    f"{axis} alert limit must be >= 0, got {value!r}")


@dataclass(frozen=True, slots=True)
class BoundingBoxExtents:
    """Extents of the warning box: x across the lane, y along it."""

    x_m: float
    y_m: float

    def __post_init__(self) -> None:
        if self.x_m <= 0.0 or self.y_m <= 0.0:
            raise InvalidArgumentError(
                f"box extents must be > 0, got x={self.x_m!r}, y={self.y_m!r}")


@dataclass(frozen=True, slots=True)
class ScenarioSolution:
    alert_limits: AlertLimits
    box: BoundingBoxExtents
    warnings: tuple[str, ...] = ()


def lateral_alert_limit(x: float, vehicle: VehicleClass) -> float:
    """(x - w_v)/2: half the free width of a box of lateral extent x."""
    if x < vehicle.width_m:
        raise InfeasibleGeometryError(
            f"box lateral extent {x!r} m is narrower than vehicle "
            f"{vehicle.label} ({vehicle.width_m!r} m)")
    return (x - vehicle.width_m) / 2.0


def longitudinal_alert_limit(y: float, vehicle: VehicleClass) -> float:
    """(y - l_v)/2: half the free length of a box of longitudinal extent y."""
    if y < vehicle.length_m:
        raise InfeasibleGeometryError(
            f"box longitudinal extent {y!r} m is shorter than vehicle "
            f"{vehicle.label} ({vehicle.length_m!r} m)")
    return (y - vehicle.length_m) / 2.0


def longitudinal_cap(vehicle: VehicleClass,
                     hard_cap: float = DEFAULT_LON_CAP_M) -> float:
    """The binding longitudinal requirement: min(l_v/2, hard cap)."""
    if hard_cap <= 0.0:
        raise InvalidArgumentError(f"hard cap must be > 0, got {hard_cap!r}")
    return min(vehicle.length_m / 2.0, hard_cap)


def vertical_alert_limit(min_clearance: float) -> float:
    """One third of the minimum vertical clearance."""
    if min_clearance <= 0.0:
        raise InvalidArgumentError(
            f"clearance must be > 0, got {min_clearance!r}")
    return min_clearance / 3.0


def solve_scenario(v_kmh: float, vehicle: VehicleClass,
                   standards: Iterable[RoadStandardRow],
                   superelevation: float,
                   lon_cap: float = DEFAULT_LON_CAP_M,
                   clearance: float = DEFAULT_CLEARANCE_M) -> ScenarioSolution:
    """Alert limits for one design-speed row.

    The box length is fixed by the capped longitudinal requirement
    (y* = l_v + 2 cap); the curve then dictates the box width x*, which the
    straight-lane constraint additionally clamps to the lane width.
    """
    row = standard_row(v_kmh, standards)
    radius = row.radius_for(superelevation)
    if radius is None:
        raise NotFoundError(
            f"design speed {v_kmh:g} km/h has no tabulated radius at "
            f"superelevation {superelevation:g}")
    geom = LaneGeometry.curved(row.lane_width_m, radius)
    warnings = list(geom.approximation_warnings())

    cap = longitudinal_cap(vehicle, lon_cap)
    y_star = vehicle.length_m + 2.0 * cap
    x_star = curve_lateral_extent(y_star, geom)  # clamped to lane width
    if x_star >= row.lane_width_m:
        warnings.append(
            f"straight-lane constraint binds at v={v_kmh:g}: "
            f"box width clamped to lane width {row.lane_width_m:g} m")

    limits = AlertLimits(
        lateral_m=lateral_alert_limit(x_star, vehicle),
        longitudinal_m=cap,
        vertical_m=vertical_alert_limit(clearance),
    )
    return ScenarioSolution(limits, BoundingBoxExtents(x_star, y_star),
                            tuple(warnings))


def tradeoff_curve(geom: LaneGeometry, vehicle: VehicleClass,
                   samples: int = 512,
                   mark_longitudinal: float | None = None,
                   ) -> list[tuple[float, float]]:
    """(lateral AL, longitudinal AL) pairs along the box-size trade-off.

    Sampled uniformly in box width over [w_v, x_hi], where x_hi is the
    lesser of the lane width and the width at which the admissible box
    length shrinks to the bare vehicle (longitudinal AL 0); the curve is
    truncated there rather than emitting negative values. When
    mark_longitudinal is given, the exact point with that longitudinal AL
    is spliced in so downstream plots contain the cap intersection.
    """
    if samples < 2:
        raise InvalidArgumentError(f"samples must be >= 2, got {samples!r}")
    if not geom.is_curved:
        raise InvalidArgumentError("trade-off curve applies to curved lanes only")
    w = geom.lane_width_m
    if vehicle.width_m >= w:
        raise InfeasibleGeometryError(
            f"vehicle {vehicle.label} ({vehicle.width_m!r} m) does not fit "
            f"lane width {w!r} m")
    diameter = 2.0 * (geom.centerline_radius_m + w / 2.0)
    if vehicle.length_m > diameter:
        raise InfeasibleGeometryError(
            f"vehicle {vehicle.label} longer than the curve diameter")
    x_hi = min(w, curve_lateral_extent(vehicle.length_m, geom))
    if x_hi < vehicle.width_m:
        raise InfeasibleGeometryError(
            f"no box fits vehicle {vehicle.label} in this lane: even the "
            f"bare vehicle length admits width only {x_hi!r} m")

    xs = [vehicle.width_m + (x_hi - vehicle.width_m) * i / (samples - 1)
          for i in range(samples)]
    if mark_longitudinal is not None:
        y_mark = vehicle.length_m + 2.0 * mark_longitudinal
        if 0.0 <= y_mark <= diameter:
            x_mark = curve_lateral_extent(y_mark, geom)
            if vehicle.width_m <= x_mark <= x_hi:
                xs.append(x_mark)
                xs.sort()

    points = []
    for x in xs:
        y = curve_longitudinal_extent(x, geom)
        lon = (y - vehicle.length_m) / 2.0
        if lon < 0.0:  # float jitter at the truncation endpoint
            lon = 0.0
        points.append((lateral_alert_limit(x, vehicle), lon))
    return points


_VEHICLE_HEADER = ["label", "length_m", "width_m"]


def load_vehicle_classes(path: str | Path) -> tuple[VehicleClass, ...]:
    source = str(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigError("empty vehicle file", source=source) from None
        if [h.strip() for h in header] != _VEHICLE_HEADER:
            raise ConfigError("expected header label,length_m,width_m",
                              source=source, line=1)
        vehicles: list[VehicleClass] = []
        for lineno, cells in enumerate(reader, start=2):
            if not cells or all(not c.strip() for c in cells):
                continue
            if len(cells) != 3:
                raise ConfigError(f"expected 3 columns, got {len(cells)}",
                                  source=source, line=lineno)
            label = cells[0].strip()
            try:
                vehicles.append(VehicleClass(label, float(cells[1]), float(cells[2])))
            except (ValueError, InvalidArgumentError) as exc:
                raise ConfigError(str(exc), source=source, line=lineno) from None
    labels = [v.label for v in vehicles]
    if len(set(labels)) != len(labels):
        raise ConfigError("duplicate vehicle labels", source=source)
    return tuple(vehicles)


def default_vehicle_classes() -> tuple[VehicleClass, ...]:
    """The bundled class table plus the worked-example sedan."""
    return load_vehicle_classes(Path(resources.files("lanesafe.data") / "vehicle_classes.csv"))


def vehicle_by_label(label: str, vehicles: Iterable[VehicleClass]) -> VehicleClass:
    pool = list(vehicles)
    for vehicle in pool:
        if vehicle.label == label:
            return vehicle
    valid = ", ".join(v.label for v in pool)
    raise NotFoundError(f"vehicle {label!r} not found; known labels: {valid}")
