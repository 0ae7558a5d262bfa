"""Run configuration: a sectioned key-value file.

All lengths are meters, speeds km/h, angles radians; risk rates are per
mile. The [tree] section lists subsystem shares as dotted paths under an
implicit root; values are decimals or a/b fractions. A dumped effective
config reloads to an identical run.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from . import integrity_stats as istats
from .errors import ConfigError, InvalidArgumentError, InvalidTreeError
from .safety_risk import AllocationNode

__all__ = [
    "BUNDLED_CONFIGS",
    "RunConfig",
    "load_config",
    "dump_config",
    "resolve_config_path",
    "bundled_data_path",
    "parse_weight",
    "build_allocation_tree",
]

BUNDLED_CONFIGS = ("us", "china")

BUNDLED = "bundled"

_DEFAULT_TREE = (
    ("vehicle", "0.5"),
    ("vds", "0.5"),
    ("vds.control", "0.35"),
    ("vds.vertical_data", "0.10"),
    ("vds.planning", "0.45"),
    ("vds.planning.perception", "2/9"),
    ("vds.planning.core", "7/9"),
    ("vds.localization", "0.10"),
)


@dataclass(frozen=True)
class RunConfig:
    # [run]
    output_dir: str = "out"
    quantile_mode: str = istats.PAPER
    paper_rounding: bool = False
    seed: int = 20240817
    svg: bool = True
    # [data] ("bundled" or a filesystem path)
    standards_path: str = BUNDLED
    vehicles_path: str = BUNDLED
    crash_stats_path: str = BUNDLED
    # [scenario]
    design_speed_kmh: float = 60.0
    superelevation: float = 0.08
    scenario_vehicle: str = "paper-example"
    lon_cap_m: float = 1.5
    clearance_m: float = 4.5
    # [attitude]
    attitude_full_rad: float = 0.03
    attitude_p95_rad: float = 0.02
    # [risk]
    crash_label: str = "us-2016"
    tls_per_mile: float | None = 2e-10
    total_budget_per_mile: float | None = None
    p_fi: float = 1e-2
    km_to_mile: float = 0.621
    # [tree] (dotted path -> weight expression, file order)
    tree: tuple[tuple[str, str], ...] = _DEFAULT_TREE
    # [mc]
    mc_trials: int = 100000
    mc_workers: int = 4
    mc_geometry: str = "straight"
    mc_lane_width_m: float = 3.5
    mc_radius_m: float | None = None
    mc_sigma_lat_m: float = 0.43368
    mc_sigma_lon_m: float = 0.0
    mc_sigma_heading_rad: float = 0.0

    def __post_init__(self) -> None:
        istats.validate_mode(self.quantile_mode)
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, "
                              f"got {self.seed!r}")
        if (self.tls_per_mile is None) == (self.total_budget_per_mile is None):
            raise ConfigError(
                "risk section needs exactly one of tls_per_mile or "
                "total_budget_per_mile")
        if self.mc_geometry not in ("straight", "curved"):
            raise ConfigError(
                f"mc geometry must be straight|curved, got {self.mc_geometry!r}")
        if self.mc_geometry == "curved" and self.mc_radius_m is None:
            raise ConfigError("curved mc geometry needs radius_m")


def parse_weight(expression: str) -> float:
    """A decimal or an a/b fraction."""
    text = expression.strip()
    try:
        if "/" in text:
            num_text, den_text = text.split("/", 1)
            num, den = float(num_text), float(den_text)
            if den == 0:
                raise ConfigError(f"zero denominator in weight {text!r}")
            return num / den
        return float(text)
    except ValueError:
        raise ConfigError(f"cannot parse weight {text!r}") from None


def build_allocation_tree(entries: tuple[tuple[str, str], ...],
                          source: str = "<config>",
                          root_name: str = "total") -> AllocationNode:
    """Assemble the allocation tree from dotted-path weight entries."""
    if not entries:
        raise ConfigError("empty allocation tree", source=source)
    weights: dict[str, float] = {}
    children: dict[str, list[str]] = {"": []}
    for path, expression in entries:
        if path in weights:
            raise ConfigError(f"duplicate tree path {path!r}", source=source)
        parent, _, name = path.rpartition(".")
        if not name:
            raise ConfigError(f"bad tree path {path!r}", source=source)
        if parent and parent not in weights:
            raise ConfigError(
                f"tree path {path!r} appears before its parent {parent!r}",
                source=source)
        weights[path] = parse_weight(expression)
        children.setdefault(path, [])
        children[parent].append(path)

    def build(path: str, name: str, weight: float) -> AllocationNode:
        return AllocationNode(name=name, weight=weight, children=tuple(
            build(child, child.rpartition(".")[2], weights[child])
            for child in children[path]))

    return build("", root_name, 1.0)


_SCHEMA: dict[str, tuple[str, ...]] = {
    "run": ("output_dir", "quantile_mode", "paper_rounding", "seed", "svg"),
    "data": ("standards", "vehicles", "crash_stats"),
    "scenario": ("design_speed_kmh", "superelevation", "vehicle",
                 "lon_cap_m", "clearance_m"),
    "attitude": ("full_rad", "p95_rad"),
    "risk": ("crash_label", "tls_per_mile", "total_budget_per_mile",
             "p_fi", "km_to_mile"),
    "tree": (),  # free-form dotted paths
    "mc": ("trials", "workers", "geometry", "lane_width_m", "radius_m",
           "sigma_lat_m", "sigma_lon_m", "sigma_heading_rad"),
}


def _boolean(text: str, *, source: str, key: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {text!r}", source=source)


def load_config(path: str | Path) -> RunConfig:
    source = str(path)
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keep key case (tree paths)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", source=source) from None
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}", source=source) from None

    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]", source=source)
        if section != "tree":
            for key in parser[section]:
                if key not in _SCHEMA[section]:
                    raise ConfigError(
                        f"unknown key {key!r} in [{section}]", source=source)

    def get(section: str, key: str) -> str | None:
        if parser.has_option(section, key):
            return parser.get(section, key)
        return None

    def get_float(section: str, key: str) -> float | None:
        text = get(section, key)
        if text is None:
            return None
        try:
            return float(text)
        except ValueError:
            raise ConfigError(f"[{section}] {key}: not a number: {text!r}",
                              source=source) from None

    def get_int(section: str, key: str) -> int | None:
        text = get(section, key)
        if text is None:
            return None
        try:
            return int(text)
        except ValueError:
            raise ConfigError(f"[{section}] {key}: not an integer: {text!r}",
                              source=source) from None

    defaults = RunConfig()
    kwargs: dict[str, object] = {}

    if (value := get("run", "output_dir")) is not None:
        kwargs["output_dir"] = value
    if (value := get("run", "quantile_mode")) is not None:
        kwargs["quantile_mode"] = value
    if (value := get("run", "paper_rounding")) is not None:
        kwargs["paper_rounding"] = _boolean(value, source=source,
                                            key="paper_rounding")
    if (value := get_int("run", "seed")) is not None:
        kwargs["seed"] = value
    if (value := get("run", "svg")) is not None:
        kwargs["svg"] = _boolean(value, source=source, key="svg")

    for key, attr in (("standards", "standards_path"),
                      ("vehicles", "vehicles_path"),
                      ("crash_stats", "crash_stats_path")):
        if (value := get("data", key)) is not None:
            kwargs[attr] = value

    if (value := get_float("scenario", "design_speed_kmh")) is not None:
        kwargs["design_speed_kmh"] = value
    if (value := get_float("scenario", "superelevation")) is not None:
        kwargs["superelevation"] = value
    if (value := get("scenario", "vehicle")) is not None:
        kwargs["scenario_vehicle"] = value
    if (value := get_float("scenario", "lon_cap_m")) is not None:
        kwargs["lon_cap_m"] = value
    if (value := get_float("scenario", "clearance_m")) is not None:
        kwargs["clearance_m"] = value

    if (value := get_float("attitude", "full_rad")) is not None:
        kwargs["attitude_full_rad"] = value
    if (value := get_float("attitude", "p95_rad")) is not None:
        kwargs["attitude_p95_rad"] = value

    if (value := get("risk", "crash_label")) is not None:
        kwargs["crash_label"] = value
    tls = get_float("risk", "tls_per_mile")
    budget = get_float("risk", "total_budget_per_mile")
    if tls is not None and budget is not None:
        raise ConfigError("risk section sets both tls_per_mile and "
                          "total_budget_per_mile", source=source)
    if tls is not None or budget is not None:
        kwargs["tls_per_mile"] = tls
        kwargs["total_budget_per_mile"] = budget
    if (value := get_float("risk", "p_fi")) is not None:
        kwargs["p_fi"] = value
    if (value := get_float("risk", "km_to_mile")) is not None:
        kwargs["km_to_mile"] = value

    if parser.has_section("tree"):
        entries = tuple((key, parser.get("tree", key))
                        for key in parser["tree"])
        if not entries:
            raise ConfigError("empty [tree] section", source=source)
        kwargs["tree"] = entries

    if (value := get_int("mc", "trials")) is not None:
        kwargs["mc_trials"] = value
    if (value := get_int("mc", "workers")) is not None:
        kwargs["mc_workers"] = value
    if (value := get("mc", "geometry")) is not None:
        kwargs["mc_geometry"] = value
    if (value := get_float("mc", "lane_width_m")) is not None:
        kwargs["mc_lane_width_m"] = value
    if (value := get_float("mc", "radius_m")) is not None:
        kwargs["mc_radius_m"] = value
    if (value := get_float("mc", "sigma_lat_m")) is not None:
        kwargs["mc_sigma_lat_m"] = value
    if (value := get_float("mc", "sigma_lon_m")) is not None:
        kwargs["mc_sigma_lon_m"] = value
    if (value := get_float("mc", "sigma_heading_rad")) is not None:
        kwargs["mc_sigma_heading_rad"] = value

    try:
        config = replace(defaults, **kwargs)
    except (ConfigError, InvalidArgumentError) as exc:
        raise ConfigError(str(exc), source=source) from None
    # many invariants only materialize when the tree is assembled
    try:
        build_allocation_tree(config.tree, source=source)
    except InvalidTreeError as exc:
        raise ConfigError(str(exc), source=source) from None
    return config


def _fmt(value: float) -> str:
    return repr(value)


def dump_config(config: RunConfig) -> str:
    """Canonical text form; writing it out and loading it back gives an
    equal RunConfig."""
    out = io.StringIO()

    def section(name: str, pairs: list[tuple[str, object]]) -> None:
        out.write(f"[{name}]\n")
        for key, value in pairs:
            out.write(f"{key} = {value}\n")
        out.write("\n")

    section("run", [
        ("output_dir", config.output_dir),
        ("quantile_mode", config.quantile_mode),
        ("paper_rounding", "true" if config.paper_rounding else "false"),
        ("seed", config.seed),
        ("svg", "true" if config.svg else "false"),
    ])
    section("data", [
        ("standards", config.standards_path),
        ("vehicles", config.vehicles_path),
        ("crash_stats", config.crash_stats_path),
    ])
    section("scenario", [
        ("design_speed_kmh", _fmt(config.design_speed_kmh)),
        ("superelevation", _fmt(config.superelevation)),
        ("vehicle", config.scenario_vehicle),
        ("lon_cap_m", _fmt(config.lon_cap_m)),
        ("clearance_m", _fmt(config.clearance_m)),
    ])
    section("attitude", [
        ("full_rad", _fmt(config.attitude_full_rad)),
        ("p95_rad", _fmt(config.attitude_p95_rad)),
    ])
    risk_pairs: list[tuple[str, object]] = [("crash_label", config.crash_label)]
    if config.tls_per_mile is not None:
        risk_pairs.append(("tls_per_mile", _fmt(config.tls_per_mile)))
    if config.total_budget_per_mile is not None:
        risk_pairs.append(("total_budget_per_mile",
                           _fmt(config.total_budget_per_mile)))
    risk_pairs += [("p_fi", _fmt(config.p_fi)),
                   ("km_to_mile", _fmt(config.km_to_mile))]
    section("risk", risk_pairs)
    section("tree", [(path, expression) for path, expression in config.tree])
    mc_pairs: list[tuple[str, object]] = [
        ("trials", config.mc_trials),
        ("workers", config.mc_workers),
        ("geometry", config.mc_geometry),
        ("lane_width_m", _fmt(config.mc_lane_width_m)),
    ]
    if config.mc_radius_m is not None:
        mc_pairs.append(("radius_m", _fmt(config.mc_radius_m)))
    mc_pairs += [
        ("sigma_lat_m", _fmt(config.mc_sigma_lat_m)),
        ("sigma_lon_m", _fmt(config.mc_sigma_lon_m)),
        ("sigma_heading_rad", _fmt(config.mc_sigma_heading_rad)),
    ]
    section("mc", mc_pairs)
    return out.getvalue()


def bundled_data_path(name: str) -> Path:
    return Path(resources.files("lanesafe.data") / name)


def resolve_config_path(spec: str) -> Path:
    """A filesystem path, or the name of a bundled configuration."""
    path = Path(spec)
    if path.is_file():
        return path
    if spec in BUNDLED_CONFIGS:
        return bundled_data_path(f"{spec}.ini")
    raise ConfigError(
        f"config {spec!r} is neither a file nor a bundled name "
        f"({', '.join(BUNDLED_CONFIGS)})")
