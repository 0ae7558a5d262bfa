"""Road design standards and curved-lane bounding-box geometry.

A chord-aligned box of lateral extent x inside an annular lane of width w
and centerline radius r can be at most y long, where

    (x + r - w/2)^2 + (y/2)^2 = (r + w/2)^2

ties the box corners to the lane edges. Both directions of that relation
live here, together with the superelevation radius rule
r = v^2 / (127 (u + i)) and the tabulated design standards
(speed -> lane width, minimum radius per superelevation rate).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .errors import (ConfigError, DivisionDomainError,
                     InfeasibleGeometryError, InvalidArgumentError,
                     NotFoundError)

__all__ = [
    "SUPERELEVATION_RATES",
    "RoadStandardRow",
    "SuperelevationPolicy",
    "LaneGeometry",
    "superelevation_radius",
    "standard_row",
    "curve_longitudinal_extent",
    "curve_lateral_extent",
    "load_road_standards",
    "default_road_standards",
    "load_superelevation_policies",
    "default_superelevation_policies",
]

# superelevation rates with tabulated minimum radii, as integer percent
SUPERELEVATION_RATES = (10, 8, 6, 4)

# r < TIGHT_RADIUS_FACTOR * w stretches the r' ~= r substitution; flagged,
# not rejected, because the tabulated 20 and 30 km/h rows themselves sit
# below it and still carry published requirements.
TIGHT_RADIUS_FACTOR = 10.0


def _superelevation_percent(superelevation: float) -> int:
    pct = superelevation * 100.0
    nearest = round(pct)
    if abs(pct - nearest) > 1e-9 or nearest not in SUPERELEVATION_RATES:
        valid = ", ".join(f"{p/100:.2f}" for p in SUPERELEVATION_RATES)
        raise NotFoundError(
            f"no radius column for superelevation {superelevation!r}; "
            f"tabulated rates: {valid}")
    return int(nearest)


@dataclass(frozen=True, slots=True)
class RoadStandardRow:
    """One design-speed row: lane width and minimum radii per superelevation."""

    design_speed_kmh: float
    lane_width_m: float
    min_radius_by_superelevation: Mapping[int, float | None] = field(hash=False)

    def __post_init__(self) -> None:
        if self.design_speed_kmh <= 0:
            raise InvalidArgumentError(
                f"design speed must be > 0, got {self.design_speed_kmh!r}")
        if self.lane_width_m <= 0:
            raise InvalidArgumentError(
                f"lane width must be > 0, got {self.lane_width_m!r}")
        radii = dict(self.min_radius_by_superelevation)
        unknown = set(radii) - set(SUPERELEVATION_RATES)
        if unknown:
            raise InvalidArgumentError(
                f"unknown superelevation keys {sorted(unknown)!r}")
        object.__setattr__(self, "min_radius_by_superelevation", radii)
        # higher superelevation permits an equal or tighter minimum radius
        present = [(pct, radii[pct]) for pct in sorted(SUPERELEVATION_RATES)
                   if radii.get(pct) is not None]
        for (lo_pct, lo_r), (hi_pct, hi_r) in zip(present, present[1:]):
            if hi_r > lo_r:
                raise InvalidArgumentError(
                    f"speed {self.design_speed_kmh:g}: radius at {hi_pct}% "
                    f"({hi_r}) exceeds radius at {lo_pct}% ({lo_r})")
        for r in (r for _, r in present):
            if r <= 0:
                raise InvalidArgumentError(f"radius must be > 0, got {r!r}")

    def radius_for(self, superelevation: float) -> float | None:
        """Minimum radius at the given rate; None where the table has no entry."""
        return self.min_radius_by_superelevation.get(
            _superelevation_percent(superelevation))


@dataclass(frozen=True, slots=True)
class SuperelevationPolicy:
    """Regional cap on superelevation rate."""

    region: str
    max_superelevation: float

    def __post_init__(self) -> None:
        _superelevation_percent(self.max_superelevation)  # membership check


@dataclass(frozen=True, slots=True)
class LaneGeometry:
    """A straight lane, or a circular-arc lane of centerline radius r."""

    kind: str  # "straight" | "curved"
    lane_width_m: float
    centerline_radius_m: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("straight", "curved"):
            raise InvalidArgumentError(f"kind must be straight|curved, got {self.kind!r}")
        if self.lane_width_m <= 0:
            raise InvalidArgumentError(
                f"lane width must be > 0, got {self.lane_width_m!r}")
        if self.kind == "curved":
            r = self.centerline_radius_m
            if r is None:
                raise InvalidArgumentError("curved lane requires a radius")
            if r <= self.lane_width_m:
                raise InvalidArgumentError(
                    f"radius {r!r} must exceed lane width {self.lane_width_m!r}")
        elif self.centerline_radius_m is not None:
            raise InvalidArgumentError("straight lane must not carry a radius")

    @classmethod
    def straight(cls, lane_width_m: float) -> "LaneGeometry":
        return cls("straight", lane_width_m)

    @classmethod
    def curved(cls, lane_width_m: float, centerline_radius_m: float) -> "LaneGeometry":
        return cls("curved", lane_width_m, centerline_radius_m)

    @property
    def is_curved(self) -> bool:
        return self.kind == "curved"

    def approximation_warnings(self) -> list[str]:
        """Warnings about stretched modelling assumptions (empty when clean)."""
        if (self.is_curved
                and self.centerline_radius_m < TIGHT_RADIUS_FACTOR * self.lane_width_m):
            return [
                f"radius {self.centerline_radius_m:g} m is below "
                f"{TIGHT_RADIUS_FACTOR:g}x lane width {self.lane_width_m:g} m; "
                "the inner-radius approximation is stretched"]
        return []


def superelevation_radius(v_kmh: float, u: float, i: float) -> float:
    """Minimum curve radius r = v^2 / (127 (u + i)) for speed v in km/h."""
    if v_kmh <= 0:
        raise InvalidArgumentError(f"speed must be > 0, got {v_kmh!r}")
    if u + i <= 0:
        raise DivisionDomainError(
            f"u + i must be > 0, got u={u!r}, i={i!r}")
    return v_kmh * v_kmh / (127.0 * (u + i))


def standard_row(v_kmh: float, standards: Iterable[RoadStandardRow]) -> RoadStandardRow:
    """Exact design-speed lookup; no interpolation between rows."""
    rows = list(standards)
    for row in rows:
        if row.design_speed_kmh == v_kmh:
            return row
    valid = ", ".join(f"{row.design_speed_kmh:g}" for row in rows)
    raise NotFoundError(
        f"design speed {v_kmh!r} not tabulated; valid speeds: {valid}")


def _require_curved(geom: LaneGeometry) -> tuple[float, float]:
    if not geom.is_curved:
        raise InvalidArgumentError("extent formulas apply to curved lanes only")
    return geom.lane_width_m, geom.centerline_radius_m


def curve_longitudinal_extent(x: float, geom: LaneGeometry) -> float:
    """Longest box of lateral extent x that fits the curved lane: y(x)."""
    w, r = _require_curved(geom)
    if not 0.0 < x <= w:
        raise InvalidArgumentError(
            f"lateral extent must lie in (0, {w!r}], got {x!r}")
    outer = r + w / 2.0
    chord = x + r - w / 2.0
    radicand = (outer - chord) * (outer + chord)  # outer^2 - chord^2, less cancellation
    if radicand < 0.0:  # only float jitter at x == w can land here
        radicand = 0.0
    return 2.0 * math.sqrt(radicand)


def curve_lateral_extent(y: float, geom: LaneGeometry) -> float:
    """Inverse of curve_longitudinal_extent: widest box of length y, capped at w."""
    w, r = _require_curved(geom)
    outer = r + w / 2.0
    if not 0.0 <= y <= 2.0 * outer:
        raise InvalidArgumentError(
            f"length must lie in [0, {2.0 * outer!r}], got {y!r}")
    half = y / 2.0
    x = math.sqrt((outer - half) * (outer + half)) - r + w / 2.0
    if x < 0.0:
        # past y = 2*sqrt(2rw) even a zero-width box no longer fits
        raise InfeasibleGeometryError(
            f"no box of length {y!r} m fits a lane of width {w!r} m on "
            f"radius {r!r} m")
    return min(x, w)


def _parse_float(text: str, *, source: str, line: int, column: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"column {column!r}: not a number: {text!r}",
                          source=source, line=line) from None


_STANDARDS_HEADER = ["design_speed_kmh", "lane_width_m",
                     "r_e10", "r_e08", "r_e06", "r_e04"]
_RADIUS_COLUMNS = {"r_e10": 10, "r_e08": 8, "r_e06": 6, "r_e04": 4}


def load_road_standards(path: str | Path) -> tuple[RoadStandardRow, ...]:
    """Read design-standard rows from CSV; empty radius cells mean absent."""
    source = str(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigError("empty standards file", source=source) from None
        if [h.strip() for h in header] != _STANDARDS_HEADER:
            raise ConfigError(
                f"expected header {','.join(_STANDARDS_HEADER)}, got {','.join(header)}",
                source=source, line=1)
        rows: list[RoadStandardRow] = []
        for lineno, cells in enumerate(reader, start=2):
            if not cells or all(not c.strip() for c in cells):
                continue
            if len(cells) != len(_STANDARDS_HEADER):
                raise ConfigError(
                    f"expected {len(_STANDARDS_HEADER)} columns, got {len(cells)}",
                    source=source, line=lineno)
            named = dict(zip(_STANDARDS_HEADER, (c.strip() for c in cells)))
            radii: dict[int, float | None] = {}
            for column, pct in _RADIUS_COLUMNS.items():
                cell = named[column]
                radii[pct] = None if cell == "" else _parse_float(
                    cell, source=source, line=lineno, column=column)
            try:
                rows.append(RoadStandardRow(
                    design_speed_kmh=_parse_float(
                        named["design_speed_kmh"], source=source,
                        line=lineno, column="design_speed_kmh"),
                    lane_width_m=_parse_float(
                        named["lane_width_m"], source=source,
                        line=lineno, column="lane_width_m"),
                    min_radius_by_superelevation=radii,
                ))
            except InvalidArgumentError as exc:
                raise ConfigError(str(exc), source=source, line=lineno) from None
    if not rows:
        raise ConfigError("no data rows", source=source)
    _validate_cross_speed(rows, source)
    return tuple(rows)


def _validate_cross_speed(rows: list[RoadStandardRow], source: str) -> None:
    if len({row.design_speed_kmh for row in rows}) != len(rows):
        raise ConfigError("duplicate design speeds", source=source)
    ordered = sorted(rows, key=lambda row: row.design_speed_kmh)
    for pct in SUPERELEVATION_RATES:
        present = [(row.design_speed_kmh, row.min_radius_by_superelevation.get(pct))
                   for row in ordered]
        present = [(v, r) for v, r in present if r is not None]
        for (lo_v, lo_r), (hi_v, hi_r) in zip(present, present[1:]):
            if hi_r <= lo_r:
                raise ConfigError(
                    f"radius at {pct}% must increase with design speed "
                    f"({lo_v:g} km/h: {lo_r}, {hi_v:g} km/h: {hi_r})",
                    source=source)


def load_superelevation_policies(path: str | Path) -> tuple[SuperelevationPolicy, ...]:
    source = str(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigError("empty policy file", source=source) from None
        if [h.strip() for h in header] != ["region", "max_superelevation"]:
            raise ConfigError("expected header region,max_superelevation",
                              source=source, line=1)
        policies = []
        for lineno, cells in enumerate(reader, start=2):
            if not cells or all(not c.strip() for c in cells):
                continue
            if len(cells) != 2:
                raise ConfigError(f"expected 2 columns, got {len(cells)}",
                                  source=source, line=lineno)
            try:
                policies.append(SuperelevationPolicy(
                    region=cells[0].strip(),
                    max_superelevation=_parse_float(
                        cells[1].strip(), source=source, line=lineno,
                        column="max_superelevation")))
            except (InvalidArgumentError, NotFoundError) as exc:
                raise ConfigError(str(exc), source=source, line=lineno) from None
    return tuple(policies)


def _data_path(name: str) -> Path:
    return Path(resources.files("lanesafe.data") / name)


def default_road_standards() -> tuple[RoadStandardRow, ...]:
    """The bundled design-standard table."""
    return load_road_standards(_data_path("road_standards.csv"))


def default_superelevation_policies() -> tuple[SuperelevationPolicy, ...]:
    """The bundled regional superelevation caps."""
    return load_superelevation_policies(_data_path("superelevation_policies.csv"))
