"""Crash statistics, risk budgets, allocation trees and safety bands.

Arithmetic oracles are hand evaluations of the defining ratios; the two
bundled statistics rows are checked against those frozen numbers.
"""

import math

import pytest

from lanesafe.errors import (ConfigError, DivisionDomainError,
                             InvalidArgumentError, InvalidTreeError,
                             NotFoundError)
from lanesafe.safety_risk import (
    AllocationNode,
    CrashStatistics,
    DEFAULT_SAFETY_BANDS,
    SafetyLevelBand,
    SafetyTarget,
    allocate_budget,
    crash_statistics_by_label,
    default_crash_statistics,
    fatality_ratio,
    fleet_miles,
    implied_tls,
    iter_nodes,
    leaf_nodes,
    load_crash_statistics,
    safety_level_lookup,
    total_integrity_budget,
    vehicle_failure_rate,
)

# frozen ratio oracles
US_RATE = 3.859168302654609e-08      # 5.8e6 / 3005829e6 * 0.02
CHINA_RATE = 2.1912417248166042e-09  # 244937 / (2.4e8 * 1.5e4 * 0.621) * 0.02
FATALITY_RATIO = 1.0877493539301373  # 37461 / 34439


def us_stats() -> CrashStatistics:
    return crash_statistics_by_label("us-2016", default_crash_statistics())


def china_stats() -> CrashStatistics:
    return crash_statistics_by_label("china-2018", default_crash_statistics())


def simple_tree() -> AllocationNode:
    return AllocationNode("total", 1.0, (
        AllocationNode("vehicle", 0.5),
        AllocationNode("vds", 0.5, (
            AllocationNode("control", 0.35),
            AllocationNode("vertical_data", 0.10),
            AllocationNode("planning", 0.45, (
                AllocationNode("perception", 2 / 9),
                AllocationNode("core", 7 / 9),
            )),
            AllocationNode("localization", 0.10),
        )),
    ))


class TestCrashStatistics:
    def test_fleet_miles(self):
        assert fleet_miles(240_000_000, 15_000) == pytest.approx(
            2.2356e12, rel=1e-15)

    def test_us_failure_rate(self):
        assert vehicle_failure_rate(us_stats()) == pytest.approx(
            US_RATE, rel=1e-15)

    def test_china_failure_rate(self):
        assert vehicle_failure_rate(china_stats()) == pytest.approx(
            CHINA_RATE, rel=1e-15)

    def test_exact_mile_factor_shifts_rate(self):
        paper = vehicle_failure_rate(china_stats(), km_to_mile=0.621)
        exact = vehicle_failure_rate(china_stats(),
                                     km_to_mile=1 / 1.609344)
        # the rounded 0.621 understates the mileage, overstating the rate
        assert exact < paper
        assert exact == pytest.approx(paper, rel=2e-3)

    def test_fatality_ratio(self):
        stats = us_stats()
        assert fatality_ratio(stats.fatalities, stats.fatal_crashes) == \
            pytest.approx(FATALITY_RATIO, rel=1e-15)

    def test_needs_mileage_basis(self):
        with pytest.raises(InvalidArgumentError):
            CrashStatistics("bare", crashes=100, attribution_fraction=0.02)

    def test_attribution_fraction_bounds(self):
        with pytest.raises(InvalidArgumentError):
            CrashStatistics("bad", crashes=100, attribution_fraction=1.5,
                            total_miles=1e9)

    def test_zero_fatal_crashes_rejected(self):
        with pytest.raises(DivisionDomainError):
            fatality_ratio(100.0, 0.0)


class TestBudgets:
    def test_total_budget_from_target(self):
        assert total_integrity_budget(SafetyTarget(2e-10, 1e-2)) == 2e-8

    def test_implied_tls_inverts_budget(self):
        assert implied_tls(2e-8, 1e-2) == pytest.approx(2e-10, rel=1e-15)
        assert implied_tls(CHINA_RATE, 1e-2) == pytest.approx(
            2.1912417248166043e-11, rel=1e-14)

    def test_target_validation(self):
        with pytest.raises(InvalidArgumentError):
            SafetyTarget(0.0, 1e-2)
        with pytest.raises(InvalidArgumentError):
            SafetyTarget(2e-10, 1.5)


class TestAllocationTree:
    def test_child_weights_must_sum_to_one(self):
        with pytest.raises(InvalidTreeError):
            AllocationNode("total", 1.0, (
                AllocationNode("a", 0.5), AllocationNode("b", 0.6)))

    def test_duplicate_child_names_rejected(self):
        with pytest.raises(InvalidTreeError):
            AllocationNode("total", 1.0, (
                AllocationNode("a", 0.5), AllocationNode("a", 0.5)))

    def test_iter_nodes_order(self):
        paths = [path for path, _ in iter_nodes(simple_tree())]
        assert paths == [
            "total", "total.vehicle", "total.vds", "total.vds.control",
            "total.vds.vertical_data", "total.vds.planning",
            "total.vds.planning.perception", "total.vds.planning.core",
            "total.vds.localization"]

    def test_allocation_leaf_values(self):
        tree = allocate_budget(simple_tree(), 2e-8)
        budgets = {path: node.resolved_budget
                   for path, node in iter_nodes(tree)}
        assert budgets["total.vehicle"] == pytest.approx(1e-8, rel=1e-12)
        assert budgets["total.vds.control"] == pytest.approx(3.5e-9, rel=1e-12)
        assert budgets["total.vds.vertical_data"] == pytest.approx(1e-9, rel=1e-12)
        assert budgets["total.vds.planning.perception"] == pytest.approx(1e-9, rel=1e-12)
        assert budgets["total.vds.planning.core"] == pytest.approx(3.5e-9, rel=1e-12)
        assert budgets["total.vds.localization"] == pytest.approx(1e-9, rel=1e-12)

    def test_leaves_conserve_root_budget(self):
        tree = allocate_budget(simple_tree(), 2e-8)
        total = math.fsum(node.resolved_budget
                          for _, node in leaf_nodes(tree))
        assert total == pytest.approx(2e-8, rel=1e-12)

    def test_allocation_is_linear(self):
        one = allocate_budget(simple_tree(), 1e-9)
        ten = allocate_budget(simple_tree(), 1e-8)
        for (_, a), (_, b) in zip(iter_nodes(one), iter_nodes(ten)):
            assert b.resolved_budget == pytest.approx(
                10 * a.resolved_budget, rel=1e-12)

    def test_input_tree_untouched(self):
        tree = simple_tree()
        allocate_budget(tree, 2e-8)
        assert all(node.resolved_budget is None
                   for _, node in iter_nodes(tree))

    def test_root_budget_positive(self):
        with pytest.raises(InvalidArgumentError):
            allocate_budget(simple_tree(), 0.0)


class TestSafetyBands:
    @pytest.mark.parametrize("rate,iso,iec,dal", [
        (5e-9, "-", "SIL-4", "DAL-A"),
        (5e-8, "ASIL-D", "SIL-3", "DAL-B"),
        (5e-7, "ASIL-B/C", "SIL-2", "DAL-C"),
        (5e-6, "ASIL-A", "SIL-1", "DAL-D"),
        (5e-4, "QM", "(SIL-0)", "DAL-E"),
    ])
    def test_band_labels(self, rate, iso, iec, dal):
        result = safety_level_lookup(rate)
        assert not result.below_scale
        assert result.iso_label == iso
        assert result.band.iec_label == iec
        assert result.band.dal_label == dal

    def test_boundary_rate_belongs_to_stricter_band(self):
        # intervals are (lower, upper]: a rate exactly on a boundary gets
        # the band whose upper edge it sits on
        assert safety_level_lookup(1e-7).iso_label == "ASIL-D"
        assert safety_level_lookup(1e-8).band.iec_label == "SIL-4"

    @pytest.mark.parametrize("rate", [0.0, 1e-12, 1e-9])
    def test_below_scale(self, rate):
        result = safety_level_lookup(rate)
        assert result.below_scale
        assert result.band is None
        assert result.iso_label == "below scale"

    def test_negative_rate_rejected(self):
        with pytest.raises(InvalidArgumentError):
            safety_level_lookup(-1e-9)

    def test_overlapping_bands_rejected(self):
        bands = (SafetyLevelBand(1e-9, 1e-7, "x", "x", "x", "x"),
                 SafetyLevelBand(1e-8, 1e-6, "y", "y", "y", "y"))
        with pytest.raises(InvalidArgumentError):
            safety_level_lookup(5e-8, bands)

    def test_default_bands_tile_without_gaps(self):
        ordered = sorted(DEFAULT_SAFETY_BANDS, key=lambda b: b.lower)
        for lower_band, upper_band in zip(ordered, ordered[1:]):
            assert lower_band.upper == upper_band.lower


class TestStatisticsLoader:
    HEADER = ("label,crashes,fatal_crashes,fatalities,total_miles,"
              "fleet_size,km_per_vehicle,attribution_fraction\n")

    def test_bundled_rows(self):
        stats = default_crash_statistics()
        assert [s.label for s in stats] == ["us-2016", "china-2018"]
        us = stats[0]
        assert us.total_miles == 3005829000000.0
        assert us.fatalities == 37461.0
        china = stats[1]
        assert china.fatal_crashes is None
        assert china.fleet_size == 240000000.0

    def test_unknown_label(self):
        with pytest.raises(NotFoundError):
            crash_statistics_by_label("eu-2020", default_crash_statistics())

    def test_loader_round_trip(self, tmp_path):
        path = tmp_path / "c.csv"
        path.write_text(
            self.HEADER + "x-1,100,,,1000000,,,0.02\n", encoding="utf-8")
        row = load_crash_statistics(path)[0]
        assert row.crashes == 100.0
        assert row.fatal_crashes is None
        assert vehicle_failure_rate(row) == pytest.approx(2e-6, rel=1e-15)

    def test_loader_rejects_bad_header(self, tmp_path):
        path = tmp_path / "c.csv"
        path.write_text("label,crashes\nx,1\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_crash_statistics(path)

    def test_loader_reports_line_of_bad_cell(self, tmp_path):
        path = tmp_path / "c.csv"
        path.write_text(self.HEADER + "x-1,abc,,,1e6,,,0.02\n",
                        encoding="utf-8")
        with pytest.raises(ConfigError) as err:
            load_crash_statistics(path)
        assert err.value.line == 2
