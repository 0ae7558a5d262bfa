"""Crash statistics, the TLS budget relation, and risk-tree allocation.

The target level of safety TLS (fatal accidents per mile) relates to the
integrity budget through TLS = P_FI * (P_veh + P_vds); the budget is then
spread over the subsystem tree by weight. Crash statistics turn national
counts into measured per-mile failure rates for comparison against the
allocated budgets.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from importlib import resources
from typing import Iterable

from .errors import (ConfigError, DivisionDomainError, InvalidArgumentError,
                     InvalidTreeError, NotFoundError)

__all__ = [
    "KM_TO_MILE_PAPER",
    "KM_TO_MILE_EXACT",
    "CrashStatistics",
    "SafetyTarget",
    "AllocationNode",
    "SafetyLevelBand",
    "SafetyLevelResult",
    "DEFAULT_SAFETY_BANDS",
    "fleet_miles",
    "vehicle_failure_rate",
    "fatality_ratio",
    "total_integrity_budget",
    "implied_tls",
    "allocate_budget",
    "iter_nodes",
    "leaf_nodes",
    "safety_level_lookup",
    "load_crash_statistics",
    "default_crash_statistics",
    "crash_statistics_by_label",
]

# the published computation uses the truncated factor; the exact one is
# available for callers that prefer it
KM_TO_MILE_PAPER = 0.621
KM_TO_MILE_EXACT = 1.0 / 1.609344


@dataclass(frozen=True, slots=True)
class CrashStatistics:
    label: str
    crashes: float
    attribution_fraction: float
    fatal_crashes: float | None = None
    fatalities: float | None = None
    total_miles: float | None = None
    fleet_size: float | None = None
    km_per_vehicle: float | None = None

    def __post_init__(self) -> None:
        if not self.label:
            raise InvalidArgumentError("crash statistics need a label")
        for name in ("crashes", "fatal_crashes", "fatalities", "total_miles",
                     "fleet_size", "km_per_vehicle"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise InvalidArgumentError(
                    f"{self.label}: {name} must be >= 0, got {value!r}")
        if not 0.0 <= self.attribution_fraction <= 1.0:
            raise InvalidArgumentError(
                f"{self.label}: attribution_fraction must lie in [0, 1], "
                f"got {self.attribution_fraction!r}")
        if self.total_miles is None and (self.fleet_size is None
                                         or self.km_per_vehicle is None):
            raise InvalidArgumentError(
                f"{self.label}: need total_miles or both fleet_size and "
                "km_per_vehicle")


@dataclass(frozen=True, slots=True)
class SafetyTarget:
    tls: float   # fatal accidents per mile
    p_fi: float  # fatal crashes per crash

    def __post_init__(self) -> None:
        if self.tls <= 0:
            raise InvalidArgumentError(f"tls must be > 0, got {self.tls!r}")
        if not 0.0 < self.p_fi <= 1.0:
            raise InvalidArgumentError(
                f"p_fi must lie in (0, 1], got {self.p_fi!r}")


@dataclass(frozen=True)
class AllocationNode:
    """A weighted share of the parent budget; immutable.

    allocate_budget returns a new tree with resolved_budget filled in.
    """

    name: str
    weight: float = 1.0
    children: tuple["AllocationNode", ...] = ()
    resolved_budget: float | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not self.name:
            raise InvalidTreeError("allocation node needs a name")
        if self.weight < 0:
            raise InvalidTreeError(
                f"{self.name}: weight must be >= 0, got {self.weight!r}")
        object.__setattr__(self, "children", tuple(self.children))
        if self.children:
            total = math.fsum(child.weight for child in self.children)
            if abs(total - 1.0) > 1e-12:
                raise InvalidTreeError(
                    f"{self.name}: child weights sum to {total!r}, not 1")
            names = [child.name for child in self.children]
            if len(set(names)) != len(names):
                raise InvalidTreeError(f"{self.name}: duplicate child names")

    @property
    def is_leaf(self) -> bool:
        return not self.children


def iter_nodes(tree: AllocationNode, prefix: str = ""):
    """Yield (dotted path, node) pairs in depth-first declaration order."""
    path = f"{prefix}.{tree.name}" if prefix else tree.name
    yield path, tree
    for child in tree.children:
        yield from iter_nodes(child, path)


def leaf_nodes(tree: AllocationNode):
    return ((path, node) for path, node in iter_nodes(tree) if node.is_leaf)


def fleet_miles(fleet_size: float, km_per_vehicle: float,
                km_to_mile: float = KM_TO_MILE_PAPER) -> float:
    """Total miles driven by a fleet in a year."""
    for name, value in (("fleet_size", fleet_size),
                        ("km_per_vehicle", km_per_vehicle),
                        ("km_to_mile", km_to_mile)):
        if value <= 0:
            raise InvalidArgumentError(f"{name} must be > 0, got {value!r}")
    return fleet_size * km_per_vehicle * km_to_mile


def vehicle_failure_rate(stats: CrashStatistics,
                         km_to_mile: float = KM_TO_MILE_PAPER) -> float:
    """Attributed crashes per mile: crashes / miles * attribution_fraction."""
    if stats.total_miles is not None:
        miles = stats.total_miles
    else:
        miles = fleet_miles(stats.fleet_size, stats.km_per_vehicle, km_to_mile)
    if miles <= 0:
        raise DivisionDomainError(
            f"{stats.label}: total miles must be > 0, got {miles!r}")
    return stats.crashes / miles * stats.attribution_fraction


def fatality_ratio(fatalities: float, fatal_crashes: float) -> float:
    """Deaths per fatal crash."""
    if fatal_crashes <= 0:
        raise DivisionDomainError(
            f"fatal_crashes must be > 0, got {fatal_crashes!r}")
    if fatalities < 0:
        raise InvalidArgumentError(
            f"fatalities must be >= 0, got {fatalities!r}")
    return fatalities / fatal_crashes


def total_integrity_budget(target: SafetyTarget) -> float:
    """The allowed P_veh + P_vds: TLS / P_FI."""
    return target.tls / target.p_fi


def implied_tls(measured_rate: float, p_fi: float) -> float:
    """The TLS a measured failure rate corresponds to: P_FI * rate.

    Inverse reading of the budget relation, used where the measured
    national rate is treated as the whole budget.
    """
    if measured_rate < 0:
        raise InvalidArgumentError(
            f"measured_rate must be >= 0, got {measured_rate!r}")
    if not 0.0 < p_fi <= 1.0:
        raise InvalidArgumentError(f"p_fi must lie in (0, 1], got {p_fi!r}")
    return p_fi * measured_rate


def allocate_budget(tree: AllocationNode, root_budget: float) -> AllocationNode:
    """Resolve every node's budget as parent budget x weight.

    Returns a new tree; the input is untouched. Leaf budgets sum to the
    root budget by construction (weights at each level sum to 1).
    """
    if root_budget <= 0:
        raise InvalidArgumentError(
            f"root budget must be > 0, got {root_budget!r}")

    def resolve(node: AllocationNode, budget: float) -> AllocationNode:
        return replace(node, resolved_budget=budget, children=tuple(
            resolve(child, budget * child.weight) for child in node.children))

    return resolve(tree, root_budget)


@dataclass(frozen=True, slots=True)
class SafetyLevelBand:
    """One row of the rate-per-hour classification table.

    The interval is (lower, upper]: lower exclusive, upper inclusive.
    """

    lower: float
    upper: float
    iso_label: str
    iec_label: str
    dal_label: str
    cenelec_label: str

    def __post_init__(self) -> None:
        if not self.lower < self.upper:
            raise InvalidArgumentError(
                f"band needs lower < upper, got [{self.lower!r}, {self.upper!r}]")

    def contains(self, rate: float) -> bool:
        return self.lower < rate <= self.upper


@dataclass(frozen=True, slots=True)
class SafetyLevelResult:
    rate_per_hour: float
    band: SafetyLevelBand | None
    below_scale: bool

    @property
    def iso_label(self) -> str:
        return self.band.iso_label if self.band else "below scale"


# Published example bands, most stringent first. The topmost (unbounded)
# row is the quality-managed bucket for rates too frequent to certify.
DEFAULT_SAFETY_BANDS: tuple[SafetyLevelBand, ...] = (
    SafetyLevelBand(1e-9, 1e-8, "-", "SIL-4", "DAL-A", "SIL-4"),
    SafetyLevelBand(1e-8, 1e-7, "ASIL-D", "SIL-3", "DAL-B", "SIL-3"),
    SafetyLevelBand(1e-7, 1e-6, "ASIL-B/C", "SIL-2", "DAL-C", "SIL-2"),
    SafetyLevelBand(1e-6, 1e-5, "ASIL-A", "SIL-1", "DAL-D", "SIL-1"),
    SafetyLevelBand(1e-5, math.inf, "QM", "(SIL-0)", "DAL-E", "(SIL-0)"),
)


def safety_level_lookup(rate_per_hour: float,
                        bands: Iterable[SafetyLevelBand] = DEFAULT_SAFETY_BANDS,
                        ) -> SafetyLevelResult:
    """Classify an hourly event rate into its safety-level band.

    Rates at or below the lowest band's lower edge are reported as below
    scale (stricter than every tabulated level), not as an error.
    """
    if rate_per_hour < 0:
        raise InvalidArgumentError(
            f"rate must be >= 0, got {rate_per_hour!r}")
    ordered = sorted(bands, key=lambda band: band.lower)
    for band, upper_band in zip(ordered, ordered[1:]):
        if band.upper > upper_band.lower:
            raise InvalidArgumentError("bands overlap")
    for band in ordered:
        if band.contains(rate_per_hour):
            return SafetyLevelResult(rate_per_hour, band, below_scale=False)
    return SafetyLevelResult(rate_per_hour, None, below_scale=True)


_CRASH_HEADER = ["label", "crashes", "fatal_crashes", "fatalities",
                 "total_miles", "fleet_size", "km_per_vehicle",
                 "attribution_fraction"]


def load_crash_statistics(path: str | Path) -> tuple[CrashStatistics, ...]:
    source = str(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigError("empty crash statistics file", source=source) from None
        if [h.strip() for h in header] != _CRASH_HEADER:
            raise ConfigError(
                f"expected header {','.join(_CRASH_HEADER)}", source=source, line=1)
        entries: list[CrashStatistics] = []
        for lineno, cells in enumerate(reader, start=2):
            if not cells or all(not c.strip() for c in cells):
                continue
            if len(cells) != len(_CRASH_HEADER):
                raise ConfigError(
                    f"expected {len(_CRASH_HEADER)} columns, got {len(cells)}",
                    source=source, line=lineno)
            named = dict(zip(_CRASH_HEADER, (c.strip() for c in cells)))

            def opt(column: str) -> float | None:
                cell = named[column]
                if cell == "":
                    return None
                try:
                    return float(cell)
                except ValueError:
                    raise ConfigError(
                        f"column {column!r}: not a number: {cell!r}",
                        source=source, line=lineno) from None

            try:
                entries.append(CrashStatistics(
                    label=named["label"],
                    crashes=opt("crashes") if named["crashes"] else 0.0,
                    attribution_fraction=opt("attribution_fraction")
                    if named["attribution_fraction"] else 0.0,
                    fatal_crashes=opt("fatal_crashes"),
                    fatalities=opt("fatalities"),
                    total_miles=opt("total_miles"),
                    fleet_size=opt("fleet_size"),
                    km_per_vehicle=opt("km_per_vehicle"),
                ))
            except InvalidArgumentError as exc:
                raise ConfigError(str(exc), source=source, line=lineno) from None
    labels = [entry.label for entry in entries]
    if len(set(labels)) != len(labels):
        raise ConfigError("duplicate crash statistic labels", source=source)
    return tuple(entries)


def default_crash_statistics() -> tuple[CrashStatistics, ...]:
    """The bundled national statistics."""
    return load_crash_statistics(
        Path(resources.files("lanesafe.data") / "crash_stats.csv"))


def crash_statistics_by_label(label: str,
                              entries: Iterable[CrashStatistics]) -> CrashStatistics:
    pool = list(entries)
    for entry in pool:
        if entry.label == label:
            return entry
    valid = ", ".join(entry.label for entry in pool)
    raise NotFoundError(f"crash statistics {label!r} not found; known: {valid}")
