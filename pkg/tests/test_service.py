"""HTTP service: every endpoint against its core-library equivalent,
plus the error-status contract (404 unknown label, 422 bad request
shape, 400 infeasible domain)."""

import pytest
from fastapi.testclient import TestClient

from lanesafe import integrity_stats as istats
from lanesafe.accuracy_budget import AttitudeErrors, coupled_budget
from lanesafe.alert_limits import VehicleClass, solve_scenario
from lanesafe.containment_mc import McConfig, containment_rate
from lanesafe.road_geometry import LaneGeometry, default_road_standards
from lanesafe.service.app import create_app

SEDAN = VehicleClass("paper-example", 4.7, 1.8)


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app()) as c:
        yield c


class TestHealth:
    def test_ok(self, client):
        r = client.get("/health")
        assert r.status_code == 200
        body = r.json()
        assert body["status"] == "ok"
        assert body["version"]


class TestRiskAllocation:
    def test_default_tree_from_tls(self, client):
        r = client.post("/risk-allocation", json={"tls_per_mile": 2e-10})
        assert r.status_code == 200
        body = r.json()
        assert body["root_budget_per_mile"] == pytest.approx(2e-8, rel=1e-12)
        assert body["tls_per_mile"] == 2e-10
        budgets = {n["path"]: n["budget_per_mile"] for n in body["nodes"]}
        assert len(budgets) == 9
        assert budgets["total.vds.localization"] == pytest.approx(1e-9,
                                                                  rel=1e-12)

    def test_pinned_budget_reports_implied_tls(self, client):
        r = client.post("/risk-allocation",
                        json={"total_budget_per_mile": 2.2e-9})
        assert r.status_code == 200
        body = r.json()
        assert body["tls_per_mile"] == pytest.approx(2.2e-11, rel=1e-12)

    def test_custom_tree_with_fraction_weights(self, client):
        r = client.post("/risk-allocation", json={
            "tls_per_mile": 1e-9,
            "tree": [{"path": "nav", "weight": "1/4"},
                     {"path": "rest", "weight": 0.75}]})
        assert r.status_code == 200
        budgets = {n["path"]: n["budget_per_mile"]
                   for n in r.json()["nodes"]}
        assert budgets["total.nav"] == pytest.approx(2.5e-8, rel=1e-12)

    def test_anchor_is_exactly_one(self, client):
        both = client.post("/risk-allocation", json={
            "tls_per_mile": 1e-10, "total_budget_per_mile": 1e-8})
        neither = client.post("/risk-allocation", json={})
        assert both.status_code == 422
        assert neither.status_code == 422

    def test_bad_tree_is_a_domain_error(self, client):
        r = client.post("/risk-allocation", json={
            "tls_per_mile": 1e-10,
            "tree": [{"path": "a", "weight": 0.5},
                     {"path": "b", "weight": 0.4}]})
        assert r.status_code == 400
        assert r.json()["kind"] == "InvalidTreeError"


class TestAlertLimits:
    def test_reference_scenario(self, client):
        r = client.post("/alert-limits", json={"design_speed_kmh": 60})
        assert r.status_code == 200
        body = r.json()
        expected = solve_scenario(60, SEDAN, default_road_standards(), 0.08,
                                  1.5, 4.5)
        assert body["lateral_m"] == pytest.approx(
            expected.alert_limits.lateral_m, rel=1e-12)
        assert body["longitudinal_m"] == 1.5
        assert body["vertical_m"] == 1.5
        assert body["box_x_m"] == pytest.approx(expected.box.x_m, rel=1e-12)
        assert body["box_y_m"] == 7.7
        assert body["warnings"] == []

    def test_custom_vehicle(self, client):
        bus = {"label": "bus", "length_m": 12.0, "width_m": 2.5}
        r = client.post("/alert-limits",
                        json={"design_speed_kmh": 60, "vehicle": bus})
        assert r.status_code == 200
        body = r.json()
        assert body["box_y_m"] == 15.0  # 12 + 2 * 1.5
        expected = solve_scenario(60, VehicleClass("bus", 12.0, 2.5),
                                  default_road_standards(), 0.08, 1.5, 4.5)
        assert body["lateral_m"] == pytest.approx(
            expected.alert_limits.lateral_m, rel=1e-12)

    def test_unknown_speed_is_404(self, client):
        r = client.post("/alert-limits", json={"design_speed_kmh": 65})
        assert r.status_code == 404
        assert r.json()["kind"] == "NotFoundError"

    def test_unknown_vehicle_label_is_404(self, client):
        r = client.post("/alert-limits", json={"design_speed_kmh": 60,
                                               "vehicle": "hovercraft"})
        assert r.status_code == 404

    def test_too_wide_vehicle_is_400(self, client):
        wide = {"label": "wide", "length_m": 4.7, "width_m": 3.6}
        r = client.post("/alert-limits",
                        json={"design_speed_kmh": 60, "vehicle": wide})
        assert r.status_code == 400
        assert r.json()["kind"] == "InfeasibleGeometryError"

    def test_extra_fields_are_rejected(self, client):
        r = client.post("/alert-limits", json={"design_speed_kmh": 60,
                                               "bogus": 1})
        assert r.status_code == 422


class TestAlertLimitTable:
    def test_full_sweep(self, client):
        r = client.post("/alert-limits/table", json={})
        assert r.status_code == 200
        body = r.json()
        speeds = [row["design_speed_kmh"] for row in body["rows"]]
        assert speeds == [120, 100, 80, 60, 40, 30, 20]
        assert body["vertical_m"] == 1.5
        assert len(body["warnings"]) == 2  # tight radii at 30 and 20

    def test_sparse_superelevation_skips_rows(self, client):
        r = client.post("/alert-limits/table", json={"superelevation": 0.10})
        body = r.json()
        assert [row["design_speed_kmh"] for row in body["rows"]] == \
            [120, 100, 80, 60]
        assert sum("; row skipped" in w for w in body["warnings"]) == 3


class TestAccuracy:
    def test_default_classes(self, client):
        r = client.post("/accuracy", json={})
        assert r.status_code == 200
        body = r.json()
        assert [row["label"] for row in body["rows"]] == [
            "A00", "A0", "A", "B", "C", "D"]
        assert body["rows"][0]["lat_acc95_m"] == pytest.approx(
            0.22748639528475748, rel=1e-12)
        assert body["metadata"]["quantile_mode"] == "paper"
        assert body["warnings"] == []

    def test_exact_mode_and_explicit_classes(self, client):
        r = client.post("/accuracy", json={
            "quantile_mode": "exact",
            "classes": [{"label": "van", "length_m": 5.5, "width_m": 2.0}]})
        assert r.status_code == 200
        rows = r.json()["rows"]
        assert [row["label"] for row in rows] == ["van"]
        ratio = istats.confidence_ratio(istats.CONF_FULL_INTEGRITY,
                                        istats.CONF_95, istats.EXACT)
        scenario = solve_scenario(60, SEDAN, default_road_standards(), 0.08,
                                  1.5, 4.5)
        expected = (scenario.alert_limits.lateral_m - 5.5 * 0.03) / ratio
        assert rows[0]["lat_acc95_m"] == pytest.approx(expected, rel=1e-12)

    def test_attitude_domain_is_enforced(self, client):
        r = client.post("/accuracy", json={"attitude_full_rad": 0.2})
        assert r.status_code == 422

    def test_oversize_class_is_400(self, client):
        r = client.post("/accuracy", json={
            "classes": [{"label": "roadtrain", "length_m": 30.0,
                         "width_m": 2.5}]})
        assert r.status_code == 400
        assert "roadtrain" in r.json()["detail"]


class TestCurves:
    def test_sampled_curves(self, client):
        r = client.post("/curves", json={"samples": 16})
        assert r.status_code == 200
        body = r.json()
        assert body["lane_width_m"] == 3.5
        assert body["centerline_radius_m"] == 125.0
        assert len(body["box_curve"]) == 16
        assert body["box_curve"][-1]["y"] == 0.0  # box as wide as the lane
        assert len(body["tradeoff"]) == 17  # 16 samples plus the cap point
        assert body["warnings"] == []

    def test_tight_radius_warns(self, client):
        r = client.post("/curves", json={"design_speed_kmh": 30,
                                         "samples": 4})
        assert r.status_code == 200
        assert len(r.json()["warnings"]) == 1

    def test_missing_radius_is_404(self, client):
        r = client.post("/curves", json={"design_speed_kmh": 40,
                                         "superelevation": 0.10})
        assert r.status_code == 404

    def test_sample_bounds(self, client):
        r = client.post("/curves", json={"samples": 1})
        assert r.status_code == 422
        r = client.post("/curves", json={"samples": 10000})
        assert r.status_code == 422


class TestMc:
    def test_matches_core_and_is_deterministic(self, client):
        payload = {"trials": 20000, "sigma_lat_m": 0.0,
                   "sigma_heading_rad": 0.8, "workers": 2, "seed": 7}
        first = client.post("/mc", json=payload)
        assert first.status_code == 200
        body = first.json()
        core = containment_rate(McConfig(
            20000, 0.0, 0.0, 0.8, LaneGeometry.straight(3.5), SEDAN, 7, 2))
        assert body["failures"] == core.failures == 12276
        assert body["rate"] == core.rate
        assert "1e-9" in body["note"]
        assert client.post("/mc", json=payload).json() == body

    def test_curved_geometry(self, client):
        r = client.post("/mc", json={"trials": 1000, "sigma_lat_m": 0.4,
                                     "geometry": "curved",
                                     "centerline_radius_m": 125.0})
        assert r.status_code == 200
        assert r.json()["trials"] == 1000

    @pytest.mark.parametrize("payload", [
        {"trials": 0, "sigma_lat_m": 0.1},
        {"trials": 3_000_000, "sigma_lat_m": 0.1},
        {"trials": 10, "sigma_lat_m": -0.1},
        {"trials": 10, "sigma_lat_m": 0.1, "geometry": "curved"},
        {"trials": 10, "sigma_lat_m": 0.1, "workers": 33},
        {"trials": 10, "sigma_lat_m": 0.1, "seed": 2**64},
    ])
    def test_request_bounds(self, client, payload):
        assert client.post("/mc", json=payload).status_code == 422


class TestBudgetCrossCheck:
    def test_accuracy_endpoint_agrees_with_coupled_solve(self, client):
        # the published-table path uses the simplified lateral rule, which
        # drops the (dlon + dvert) * dlambda coupling and therefore grants
        # slightly more lateral budget than the fully coupled fixed point:
        # about 12 mm at the reference scenario, never the other way round
        r = client.post("/accuracy", json={
            "classes": [{"label": "paper-example", "length_m": 4.7,
                         "width_m": 1.8}]})
        row = r.json()["rows"][0]
        scenario = solve_scenario(60, SEDAN, default_road_standards(), 0.08,
                                  1.5, 4.5)
        coupled = coupled_budget(scenario.alert_limits, SEDAN,
                                 AttitudeErrors.uniform(0.03))
        lat_full = row["lat_acc95_m"] * 3.12
        assert coupled.lat_m < lat_full
        assert lat_full == pytest.approx(coupled.lat_m, abs=0.02)
