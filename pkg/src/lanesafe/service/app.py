"""FastAPI application exposing the core calculations.

Stateless: every endpoint recomputes from its request payload plus the
bundled data tables. Domain errors map onto HTTP statuses (unknown label
404, bad argument 422, infeasible inputs 400).
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..accuracy_budget import AttitudePolicy, accuracy_table
from ..alert_limits import (
    VehicleClass,
    default_vehicle_classes,
    longitudinal_cap,
    solve_scenario,
    tradeoff_curve,
    vehicle_by_label,
    vertical_alert_limit,
)
from ..config import build_allocation_tree
from ..containment_mc import SCALE_LIMITATION_NOTE, McConfig, containment_rate
from ..errors import InvalidArgumentError, LanesafeError, NotFoundError
from ..road_geometry import (
    LaneGeometry,
    curve_longitudinal_extent,
    default_road_standards,
    standard_row,
)
from ..safety_risk import allocate_budget, implied_tls, iter_nodes
from . import schemas

__all__ = ["app", "create_app"]


def _vehicle(spec: schemas.VehicleModel | str) -> VehicleClass:
    if isinstance(spec, str):
        return vehicle_by_label(spec, default_vehicle_classes())
    return spec.to_core()


def create_app() -> FastAPI:
    app = FastAPI(
        title="lanesafe",
        version=__version__,
        description="Localization alert limits, accuracy requirements and "
                    "integrity risk allocation for lane keeping.",
    )

    def _error(status: int, exc: LanesafeError) -> JSONResponse:
        return JSONResponse(status_code=status, content={
            "detail": str(exc), "kind": type(exc).__name__})

    @app.exception_handler(NotFoundError)
    async def _not_found(request: Request, exc: NotFoundError):
        return _error(404, exc)

    @app.exception_handler(InvalidArgumentError)
    async def _invalid(request: Request, exc: InvalidArgumentError):
        return _error(422, exc)

    @app.exception_handler(LanesafeError)
    async def _domain(request: Request, exc: LanesafeError):
        return _error(400, exc)

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/risk-allocation",
              response_model=schemas.RiskAllocationResponse,
              responses={400: {"model": schemas.ErrorResponse}})
    def risk_allocation(
            req: schemas.RiskAllocationRequest,
    ) -> schemas.RiskAllocationResponse:
        if req.tls_per_mile is not None:
            root_budget = req.tls_per_mile / req.p_fi
            tls = req.tls_per_mile
        else:
            assert req.total_budget_per_mile is not None
            root_budget = req.total_budget_per_mile
            tls = implied_tls(root_budget, req.p_fi)
        tree = allocate_budget(build_allocation_tree(req.tree_entries(),
                                                     source="<request>"),
                               root_budget)
        nodes = [schemas.AllocationNodeModel(
                     path=path, weight=node.weight,
                     budget_per_mile=node.resolved_budget)
                 for path, node in iter_nodes(tree)]
        return schemas.RiskAllocationResponse(
            root_budget_per_mile=root_budget, tls_per_mile=tls,
            p_fi=req.p_fi, nodes=nodes)

    @app.post("/alert-limits", response_model=schemas.AlertLimitsResponse,
              responses={400: {"model": schemas.ErrorResponse},
                         404: {"model": schemas.ErrorResponse}})
    def alert_limits(
            req: schemas.AlertLimitsRequest) -> schemas.AlertLimitsResponse:
        solution = solve_scenario(req.design_speed_kmh, _vehicle(req.vehicle),
                                  default_road_standards(),
                                  req.superelevation, req.lon_cap_m,
                                  req.clearance_m)
        limits = solution.alert_limits
        return schemas.AlertLimitsResponse(
            lateral_m=limits.lateral_m, longitudinal_m=limits.longitudinal_m,
            vertical_m=limits.vertical_m, box_x_m=solution.box.x_m,
            box_y_m=solution.box.y_m, warnings=list(solution.warnings))

    @app.post("/alert-limits/table",
              response_model=schemas.AlertLimitTableResponse,
              responses={400: {"model": schemas.ErrorResponse},
                         404: {"model": schemas.ErrorResponse}})
    def alert_limit_table(
            req: schemas.AlertLimitTableRequest,
    ) -> schemas.AlertLimitTableResponse:
        vehicle = _vehicle(req.vehicle)
        standards = default_road_standards()
        rows = []
        warnings: list[str] = []
        for std in sorted(standards, key=lambda r: -r.design_speed_kmh):
            try:
                solution = solve_scenario(std.design_speed_kmh, vehicle,
                                          standards, req.superelevation,
                                          req.lon_cap_m, req.clearance_m)
            except NotFoundError as exc:
                warnings.append(f"{exc}; row skipped")
                continue
            warnings.extend(f"design speed {std.design_speed_kmh:g} km/h: "
                            f"{w}" for w in solution.warnings)
            rows.append(schemas.AlertLimitRowModel(
                design_speed_kmh=std.design_speed_kmh,
                lat_al_m=solution.alert_limits.lateral_m,
                lon_al_m=solution.alert_limits.longitudinal_m))
        return schemas.AlertLimitTableResponse(
            rows=rows, vertical_m=vertical_alert_limit(req.clearance_m),
            warnings=warnings)

    @app.post("/accuracy", response_model=schemas.AccuracyResponse,
              responses={400: {"model": schemas.ErrorResponse},
                         404: {"model": schemas.ErrorResponse}})
    def accuracy(req: schemas.AccuracyRequest) -> schemas.AccuracyResponse:
        reference = _vehicle(req.reference_vehicle)
        if req.classes is None:
            classes = tuple(v for v in default_vehicle_classes()
                            if v.label != reference.label)
        else:
            classes = tuple(model.to_core() for model in req.classes)
        if not classes:
            raise InvalidArgumentError("no vehicle classes to evaluate")
        attitude = AttitudePolicy.uniform(req.attitude_full_rad,
                                          req.attitude_p95_rad)
        table = accuracy_table(req.design_speed_kmh, req.superelevation,
                               default_road_standards(), reference, classes,
                               attitude, quantile_mode=req.quantile_mode,
                               lon_cap=req.lon_cap_m,
                               clearance=req.clearance_m,
                               per_class_alert_limits=req.per_class_alert_limits)
        rows = [schemas.AccuracyRowModel(
                    label=row.label, length_m=row.length_m,
                    width_m=row.width_m, lat_acc95_m=row.lat_acc95_m,
                    lon_acc95_m=row.lon_acc95_m, vert_acc95_m=row.vert_acc95_m)
                for row in table.rows]
        return schemas.AccuracyResponse(
            rows=rows, metadata=dict(table.metadata),
            warnings=list(table.scenario.warnings))

    @app.post("/curves", response_model=schemas.CurvesResponse,
              responses={400: {"model": schemas.ErrorResponse},
                         404: {"model": schemas.ErrorResponse}})
    def curves(req: schemas.CurvesRequest) -> schemas.CurvesResponse:
        standards = default_road_standards()
        std = standard_row(req.design_speed_kmh, standards)
        radius = std.radius_for(req.superelevation)
        if radius is None:
            raise NotFoundError(
                f"design speed {req.design_speed_kmh:g} km/h has no "
                f"tabulated radius at superelevation {req.superelevation:g}")
        geom = LaneGeometry.curved(std.lane_width_m, radius)
        w = geom.lane_width_m
        box_curve = [schemas.PointModel(
                         x=(x := w * (i + 1) / req.samples),
                         y=curve_longitudinal_extent(x, geom))
                     for i in range(req.samples)]
        vehicle = _vehicle(req.vehicle)
        cap = longitudinal_cap(vehicle, req.lon_cap_m)
        trade = tradeoff_curve(geom, vehicle, samples=req.samples,
                               mark_longitudinal=cap)
        return schemas.CurvesResponse(
            lane_width_m=w, centerline_radius_m=geom.centerline_radius_m,
            box_curve=box_curve,
            tradeoff=[schemas.PointModel(x=lat, y=lon) for lat, lon in trade],
            warnings=list(geom.approximation_warnings()))

    @app.post("/mc", response_model=schemas.McResponse,
              responses={400: {"model": schemas.ErrorResponse},
                         404: {"model": schemas.ErrorResponse}})
    def mc(req: schemas.McRequest) -> schemas.McResponse:
        if req.geometry == "curved":
            assert req.centerline_radius_m is not None  # schema enforces
            geom = LaneGeometry.curved(req.lane_width_m,
                                       req.centerline_radius_m)
        else:
            geom = LaneGeometry.straight(req.lane_width_m)
        cfg = McConfig(trials=req.trials, sigma_lat_m=req.sigma_lat_m,
                       sigma_lon_m=req.sigma_lon_m,
                       sigma_heading_rad=req.sigma_heading_rad,
                       geometry=geom, vehicle=_vehicle(req.vehicle),
                       seed=req.seed, workers=req.workers)
        result = containment_rate(cfg)
        return schemas.McResponse(
            trials=result.trials, failures=result.failures, rate=result.rate,
            ci_low=result.ci_low, ci_high=result.ci_high, seed=result.seed,
            workers=result.workers, note=SCALE_LIMITATION_NOTE)

    return app


app = create_app()
