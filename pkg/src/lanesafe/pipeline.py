"""Command pipeline: turn one RunConfig into CSV/SVG artifacts.

Every command writes into the configured output directory and reports the
files it produced plus any warnings. `execute` runs a batch of commands
and always adds two bookkeeping files: effective_config.ini (the full
resolved configuration; reloading it reproduces the run) and warnings.txt
(one warning per line, empty when the run was clean).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .accuracy_budget import AttitudePolicy, accuracy_table
from .alert_limits import (
    VehicleClass,
    default_vehicle_classes,
    load_vehicle_classes,
    longitudinal_cap,
    solve_scenario,
    tradeoff_curve,
    vehicle_by_label,
    vertical_alert_limit,
)
from .config import BUNDLED, RunConfig, build_allocation_tree, dump_config
from .containment_mc import (
    SCALE_LIMITATION_NOTE,
    McConfig,
    containment_rate,
)
from .errors import InvalidArgumentError, NotFoundError
from .report import (
    atomic_write_text,
    fmt_accuracy_display,
    fmt_alert_display,
    fmt_full,
    fmt_sig2,
    write_csv,
)
from .road_geometry import (
    LaneGeometry,
    RoadStandardRow,
    curve_longitudinal_extent,
    default_road_standards,
    load_road_standards,
    standard_row,
)
from .safety_risk import (
    CrashStatistics,
    SafetyTarget,
    allocate_budget,
    crash_statistics_by_label,
    default_crash_statistics,
    fatality_ratio,
    implied_tls,
    iter_nodes,
    load_crash_statistics,
    total_integrity_budget,
    vehicle_failure_rate,
)
from .svg import line_chart

__all__ = [
    "CURVE_SAMPLES",
    "FIGURE_SPEEDS",
    "COMMANDS",
    "DataTables",
    "CommandResult",
    "RunSummary",
    "load_tables",
    "run_risk_alloc",
    "run_alert_limits",
    "run_accuracy",
    "run_curves",
    "run_mc",
    "execute",
]

CURVE_SAMPLES = 512
# the two published design-speed cases rendered as figures
FIGURE_SPEEDS = (60.0, 80.0)


@dataclass(frozen=True)
class DataTables:
    standards: tuple[RoadStandardRow, ...]
    vehicles: tuple[VehicleClass, ...]
    crash_stats: tuple[CrashStatistics, ...]


def load_tables(config: RunConfig) -> DataTables:
    standards = (default_road_standards() if config.standards_path == BUNDLED
                 else load_road_standards(config.standards_path))
    vehicles = (default_vehicle_classes() if config.vehicles_path == BUNDLED
                else load_vehicle_classes(config.vehicles_path))
    crash = (default_crash_statistics() if config.crash_stats_path == BUNDLED
             else load_crash_statistics(config.crash_stats_path))
    return DataTables(standards, vehicles, crash)


@dataclass(frozen=True)
class CommandResult:
    files: tuple[Path, ...]
    warnings: tuple[str, ...] = ()


def _scenario_vehicle(config: RunConfig, tables: DataTables) -> VehicleClass:
    return vehicle_by_label(config.scenario_vehicle, tables.vehicles)


def run_risk_alloc(config: RunConfig, out_dir: Path) -> CommandResult:
    tables = load_tables(config)
    stats = crash_statistics_by_label(config.crash_label, tables.crash_stats)
    measured = vehicle_failure_rate(stats, config.km_to_mile)
    measured_tls = implied_tls(measured, config.p_fi)

    comments = [
        f"crash_label = {stats.label}",
        f"attribution_fraction = {fmt_full(stats.attribution_fraction)}",
        f"km_to_mile = {fmt_full(config.km_to_mile)}",
        f"p_fi = {fmt_full(config.p_fi)}",
        f"measured_vehicle_failure_rate_per_mile = {fmt_full(measured)}",
        f"measured_rate_implied_tls_per_mile = {fmt_full(measured_tls)}",
    ]
    if stats.fatalities is not None and stats.fatal_crashes is not None:
        ratio = fatality_ratio(stats.fatalities, stats.fatal_crashes)
        comments.append(f"fatalities_per_fatal_crash = {fmt_full(ratio)}")

    if config.tls_per_mile is not None:
        root_budget = total_integrity_budget(
            SafetyTarget(config.tls_per_mile, config.p_fi))
        comments.append(f"tls_per_mile = {fmt_full(config.tls_per_mile)}")
        comments.append(
            f"total_budget_per_mile = {fmt_full(root_budget)} (tls / p_fi)")
    else:
        root_budget = config.total_budget_per_mile
        assert root_budget is not None  # RunConfig enforces exactly-one
        comments.append(
            f"total_budget_per_mile = {fmt_full(root_budget)} (pinned)")
        comments.append("pinned_budget_implied_tls_per_mile = "
                        f"{fmt_full(implied_tls(root_budget, config.p_fi))}")
    comments.append("budget_over_measured_rate = "
                    f"{root_budget / measured:.3g}")

    tree = allocate_budget(build_allocation_tree(config.tree), root_budget)
    value_fmt = fmt_sig2 if config.paper_rounding else fmt_full
    rows = []
    for path, node in iter_nodes(tree):
        assert node.resolved_budget is not None
        rows.append((path, fmt_full(node.weight),
                     value_fmt(node.resolved_budget)))

    path = write_csv(out_dir / "risk_allocation.csv",
                     ("node", "weight", "budget_per_mile"), rows, comments)
    return CommandResult((path,))


def run_alert_limits(config: RunConfig, out_dir: Path) -> CommandResult:
    tables = load_tables(config)
    vehicle = _scenario_vehicle(config, tables)
    value_fmt = fmt_alert_display if config.paper_rounding else fmt_full

    warnings: list[str] = []
    rows = []
    ordered = sorted(tables.standards, key=lambda r: -r.design_speed_kmh)
    for row in ordered:
        speed = row.design_speed_kmh
        try:
            solution = solve_scenario(speed, vehicle, tables.standards,
                                      config.superelevation,
                                      config.lon_cap_m, config.clearance_m)
        except NotFoundError as exc:
            warnings.append(f"{exc}; row skipped")
            continue
        warnings.extend(f"design speed {speed:g} km/h: {w}"
                        for w in solution.warnings)
        limits = solution.alert_limits
        rows.append((f"{speed:g}", value_fmt(limits.lateral_m),
                     value_fmt(limits.longitudinal_m)))

    comments = [
        f"superelevation = {config.superelevation:g}",
        f"vehicle = {vehicle.label} (length {vehicle.length_m:g} m / "
        f"width {vehicle.width_m:g} m)",
        f"longitudinal_cap_input_m = {fmt_full(config.lon_cap_m)}",
        f"vertical_alert_limit_m = "
        f"{value_fmt(vertical_alert_limit(config.clearance_m))}",
        "lat_al_m is half the free lane width of the admissible box;",
        "lon_al_m is min(half vehicle length, the cap)",
    ]
    path = write_csv(out_dir / "table7.csv",
                     ("design_speed_kmh", "lat_al_m", "lon_al_m"),
                     rows, comments)
    return CommandResult((path,), tuple(warnings))


def run_accuracy(config: RunConfig, out_dir: Path) -> CommandResult:
    tables = load_tables(config)
    reference = _scenario_vehicle(config, tables)
    classes = tuple(v for v in tables.vehicles if v.label != reference.label)
    if not classes:
        raise InvalidArgumentError(
            "no vehicle classes to evaluate beyond the reference vehicle")
    attitude = AttitudePolicy.uniform(config.attitude_full_rad,
                                      config.attitude_p95_rad)
    table = accuracy_table(config.design_speed_kmh, config.superelevation,
                           tables.standards, reference, classes, attitude,
                           quantile_mode=config.quantile_mode,
                           lon_cap=config.lon_cap_m,
                           clearance=config.clearance_m)

    value_fmt = fmt_accuracy_display if config.paper_rounding else fmt_full
    rows = [(row.label, fmt_full(row.length_m), fmt_full(row.width_m),
             value_fmt(row.lat_acc95_m), value_fmt(row.lon_acc95_m),
             value_fmt(row.vert_acc95_m)) for row in table.rows]
    comments = [f"{key} = {value}" for key, value in table.metadata]
    path = write_csv(out_dir / "table8.csv",
                     ("class", "length_m", "width_m", "lat_acc95_m",
                      "lon_acc95_m", "vert_acc95_m"), rows, comments)
    warnings = tuple(f"design speed {config.design_speed_kmh:g} km/h: {w}"
                     for w in table.scenario.warnings)
    return CommandResult((path,), warnings)


def _figure_geometry(config: RunConfig, tables: DataTables,
                     speed: float) -> LaneGeometry:
    row = standard_row(speed, tables.standards)
    radius = row.radius_for(config.superelevation)
    if radius is None:
        raise NotFoundError(
            f"design speed {speed:g} km/h has no tabulated radius at "
            f"superelevation {config.superelevation:g}")
    return LaneGeometry.curved(row.lane_width_m, radius)


def run_curves(config: RunConfig, out_dir: Path) -> CommandResult:
    tables = load_tables(config)
    vehicle = _scenario_vehicle(config, tables)
    files: list[Path] = []
    warnings: list[str] = []

    for speed in FIGURE_SPEEDS:
        geom = _figure_geometry(config, tables, speed)
        warnings.extend(f"design speed {speed:g} km/h: {w}"
                        for w in geom.approximation_warnings())
        w = geom.lane_width_m
        points = []
        for i in range(CURVE_SAMPLES):
            x = w * (i + 1) / CURVE_SAMPLES
            points.append((x, curve_longitudinal_extent(x, geom)))
        name = f"fig4_{speed:g}"
        comments = [
            f"design_speed_kmh = {speed:g}",
            f"lane_width_m = {fmt_full(w)}",
            f"centerline_radius_m = {fmt_full(geom.centerline_radius_m)}",
            "admissible box length y over box width x, centered in the lane",
        ]
        files.append(write_csv(out_dir / f"{name}.csv", ("x_m", "y_m"),
                               [(fmt_full(x), fmt_full(y))
                                for x, y in points], comments))
        if config.svg:
            chart = line_chart(
                points,
                title=f"Admissible box size in a {speed:g} km/h curve",
                x_label="box width x (m)", y_label="box length y (m)")
            files.append(atomic_write_text(out_dir / f"{name}.svg", chart))

    geom = _figure_geometry(config, tables, FIGURE_SPEEDS[0])
    cap = longitudinal_cap(vehicle, config.lon_cap_m)
    trade = tradeoff_curve(geom, vehicle, samples=CURVE_SAMPLES,
                           mark_longitudinal=cap)
    comments = [
        f"design_speed_kmh = {FIGURE_SPEEDS[0]:g}",
        f"lane_width_m = {fmt_full(geom.lane_width_m)}",
        f"centerline_radius_m = {fmt_full(geom.centerline_radius_m)}",
        f"vehicle = {vehicle.label}",
        f"longitudinal_cap_m = {fmt_full(cap)}",
        "alert-limit trade-off along the box-size family; the cap point "
        "is included exactly",
    ]
    files.append(write_csv(out_dir / "fig5.csv",
                           ("lateral_al_m", "longitudinal_al_m"),
                           [(fmt_full(lat), fmt_full(lon))
                            for lat, lon in trade], comments))
    if config.svg:
        # the spliced cap point round-trips through the curve equations,
        # so match it by distance rather than equality
        marker = min(trade, key=lambda p: abs(p[1] - cap))
        if abs(marker[1] - cap) > 1e-6:
            marker = None
        chart = line_chart(
            trade, title="Lateral vs longitudinal alert-limit trade-off",
            x_label="lateral alert limit (m)",
            y_label="longitudinal alert limit (m)", marker=marker)
        files.append(atomic_write_text(out_dir / "fig5.svg", chart))

    return CommandResult(tuple(files), tuple(warnings))


def run_mc(config: RunConfig, out_dir: Path) -> CommandResult:
    tables = load_tables(config)
    vehicle = _scenario_vehicle(config, tables)
    if config.mc_geometry == "curved":
        assert config.mc_radius_m is not None  # RunConfig enforces
        geom = LaneGeometry.curved(config.mc_lane_width_m, config.mc_radius_m)
    else:
        geom = LaneGeometry.straight(config.mc_lane_width_m)

    mc = McConfig(trials=config.mc_trials,
                  sigma_lat_m=config.mc_sigma_lat_m,
                  sigma_lon_m=config.mc_sigma_lon_m,
                  sigma_heading_rad=config.mc_sigma_heading_rad,
                  geometry=geom, vehicle=vehicle,
                  seed=config.seed, workers=config.mc_workers)
    result = containment_rate(mc)

    comments = [
        f"geometry = {config.mc_geometry}",
        f"lane_width_m = {fmt_full(config.mc_lane_width_m)}",
    ]
    if config.mc_radius_m is not None:
        comments.append(f"centerline_radius_m = {fmt_full(config.mc_radius_m)}")
    comments += [
        f"vehicle = {vehicle.label} (length {vehicle.length_m:g} m / "
        f"width {vehicle.width_m:g} m)",
        f"sigma_lat_m = {fmt_full(config.mc_sigma_lat_m)}",
        f"sigma_lon_m = {fmt_full(config.mc_sigma_lon_m)}",
        f"sigma_heading_rad = {fmt_full(config.mc_sigma_heading_rad)}",
        SCALE_LIMITATION_NOTE,
    ]
    row = (str(result.trials), str(result.failures), fmt_full(result.rate),
           fmt_full(result.ci_low), fmt_full(result.ci_high),
           str(result.seed), str(result.workers))
    path = write_csv(out_dir / "mc_report.csv",
                     ("trials", "failures", "rate", "ci_low", "ci_high",
                      "seed", "workers"), [row], comments)
    return CommandResult((path,))


COMMANDS = {
    "risk-alloc": run_risk_alloc,
    "alert-limits": run_alert_limits,
    "accuracy": run_accuracy,
    "curves": run_curves,
    "mc": run_mc,
}


@dataclass(frozen=True)
class RunSummary:
    output_dir: Path
    files: tuple[Path, ...]
    warnings: tuple[str, ...]


def execute(config: RunConfig, commands: Sequence[str]) -> RunSummary:
    """Run the given commands; always writes the effective config and the
    warning log alongside their artifacts."""
    unknown = [c for c in commands if c not in COMMANDS]
    if unknown:
        raise InvalidArgumentError(f"unknown commands: {', '.join(unknown)}")
    if not commands:
        raise InvalidArgumentError("no commands requested")

    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    files: list[Path] = []
    warnings: list[str] = []
    seen: set[str] = set()
    for command in commands:
        if command in seen:
            continue
        seen.add(command)
        result = COMMANDS[command](config, out_dir)
        files.extend(result.files)
        warnings.extend(result.warnings)

    files.append(atomic_write_text(out_dir / "effective_config.ini",
                                   dump_config(config)))
    log = "".join(f"{line}\n" for line in warnings)
    files.append(atomic_write_text(out_dir / "warnings.txt", log))
    return RunSummary(out_dir, tuple(files), tuple(warnings))
