"""Linearity sweep, counterexample checks, and the baseline comparison."""

import json
import math

import numpy as np
import pytest

from stylemix.core import DistanceMatrix, Metric, distance_matrix
from stylemix.errors import PopulationTooSmallError
from stylemix.experiments import (
    EXACT_SIZE_LIMIT,
    LinearityConfig,
    baseline_allocate,
    compare_against_baseline,
    demo_catalog,
    demo_instance,
    run_linearity,
    synthetic_population,
    verify_counterexamples,
)
from stylemix.core import validate_instance
from stylemix.solver import plan_violations, solve_exact
from stylemix.variety import VarietyMeasure

from conftest import random_feasible_instance


class TestSyntheticPopulation:
    def test_shape_and_determinism(self):
        a = synthetic_population(12, dim=3, seed=5)
        b = synthetic_population(12, dim=3, seed=5)
        assert a == b
        assert a.n == 12 and a.dim == 3
        assert np.all((a.vectors >= 0.0) & (a.vectors <= 1.0))

    def test_different_seeds_differ(self):
        assert synthetic_population(6, seed=1) != synthetic_population(6, seed=2)

    def test_invalid_size_rejected(self):
        with pytest.raises(ValueError):
            synthetic_population(0)


class TestRunLinearity:
    def small_report(self, seed=0):
        pop = synthetic_population(10, dim=4, seed=2)
        config = LinearityConfig(
            population=pop,
            subset_sizes=tuple(range(2, 7)),
            repetitions=60,
            seed=seed,
        )
        return run_linearity(config)

    def test_reproducible_for_same_seed(self):
        a, b = self.small_report(), self.small_report()
        for ca, cb in zip(a.curves, b.curves):
            assert ca == cb

    def test_all_measures_and_sizes_present(self):
        report = self.small_report()
        assert {c.measure for c in report.curves} == set(VarietyMeasure)
        for curve in report.curves:
            assert curve.sizes == tuple(range(2, 7))
            assert len(curve.means) == len(curve.stds) == 5

    def test_pair_size_mean_matches_population_mean_distance(self):
        # Random 2-subsets score d/2 under MAX_MEAN, so the sweep mean
        # must approximate half the average pairwise distance.
        pop = synthetic_population(12, dim=3, seed=7)
        d = distance_matrix(pop, Metric.SQUARED_EUCLIDEAN).entries
        n = d.shape[0]
        expected = d.sum() / (n * (n - 1)) / 2.0
        config = LinearityConfig(
            population=pop, subset_sizes=(2,), repetitions=4000, seed=1
        )
        curve = run_linearity(config).curve(VarietyMeasure.MAX_MEAN)
        se = curve.stds[0] / math.sqrt(4000)
        assert abs(curve.means[0] - expected) <= 4 * se

    def test_population_too_small(self):
        pop = synthetic_population(4, dim=2, seed=0)
        with pytest.raises(PopulationTooSmallError):
            run_linearity(LinearityConfig(population=pop, subset_sizes=(5,)))

    def test_accepts_distance_matrix_input(self):
        pop = synthetic_population(8, dim=2, seed=3)
        d = distance_matrix(pop, Metric.EUCLIDEAN)
        report = run_linearity(
            LinearityConfig(population=d, subset_sizes=(2, 3), repetitions=20)
        )
        assert report.population_size == 8

    def test_csv_and_json_shapes(self):
        report = self.small_report()
        lines = report.to_csv().strip().splitlines()
        assert lines[0] == "measure,k,mean,std"
        assert len(lines) == 1 + 5 * 5
        payload = json.loads(report.to_json())
        assert len(payload["curves"]) == 5
        for curve in payload["curves"]:
            assert set(curve) >= {
                "measure",
                "sizes",
                "means",
                "stds",
                "linear_fit",
                "quadratic_fit",
                "rank_correlation",
            }


class TestCounterexamples:
    def test_report_is_fully_as_expected(self):
        report = verify_counterexamples()
        assert report.all_as_expected

    def test_min_sum_drops_to_root_three(self):
        report = verify_counterexamples()
        check = report.check(VarietyMeasure.MAX_MIN_SUM, "triangle_incenter")
        assert check.before == pytest.approx(2.0, abs=1e-9)
        assert check.after == pytest.approx(math.sqrt(3.0), abs=1e-9)
        assert not check.held

    def test_sum_min_drops_from_four_to_three(self):
        report = verify_counterexamples()
        check = report.check(VarietyMeasure.MAX_SUM_MIN, "segment_midpoint")
        assert check.before == pytest.approx(4.0, abs=1e-9)
        assert check.after == pytest.approx(3.0, abs=1e-9)
        assert not check.held

    def test_max_mean_holds_on_both_geometries(self):
        report = verify_counterexamples()
        tri = report.check(VarietyMeasure.MAX_MEAN, "triangle_incenter")
        seg = report.check(VarietyMeasure.MAX_MEAN, "segment_midpoint")
        assert tri.held and seg.held
        assert tri.after == pytest.approx((3 + math.sqrt(3)) / 4, abs=1e-9)
        assert seg.after == pytest.approx(4.0 / 3.0, abs=1e-9)

    def test_max_sum_sum_holds_on_both_geometries(self):
        report = verify_counterexamples()
        assert report.check(VarietyMeasure.MAX_SUM_SUM, "triangle_incenter").held
        assert report.check(VarietyMeasure.MAX_SUM_SUM, "segment_midpoint").held

    def test_json_round_trip(self):
        payload = json.loads(verify_counterexamples().to_json())
        assert payload["all_as_expected"] is True
        assert len(payload["checks"]) == 6


class TestDemoInstance:
    def test_demo_is_valid(self):
        inst = demo_instance()
        assert validate_instance(inst) == []
        assert inst.n_articles == 8
        assert inst.n_stores == 6
        assert [a.planned_total for a in inst.articles] == [16] * 8
        assert [a.min_qty for a in inst.articles] == [4] * 8
        assert sorted(s.desired_qty for s in inst.stores) == [10, 14, 18, 22, 26, 30]

    def test_demo_catalog_pairs(self):
        cat = demo_catalog()
        assert cat.n == 8
        d = distance_matrix(cat, Metric.SQUARED_EUCLIDEAN).entries
        # Styles come in close pairs: each style's nearest neighbour is
        # its partner, far from the other corners.
        for i in range(0, 8, 2):
            assert d[i, i + 1] < 5.0


class TestBaseline:
    def test_baseline_plan_is_feasible(self):
        inst = demo_instance()
        plan = baseline_allocate(inst)
        assert plan_violations(inst, plan) == []
        for t in range(inst.n_stores):
            assert len(plan.store_set(t)) >= 2

    def test_baseline_ignores_distances(self):
        # Scrambling distances must not change the assignment pattern.
        inst = demo_instance()
        rng = np.random.default_rng(4)
        half = np.triu(rng.random((8, 8)) * 50.0, k=1)
        scrambled = DistributionInstance_replace(inst, DistanceMatrix(half + half.T))
        a = baseline_allocate(inst)
        b = baseline_allocate(scrambled)
        assert np.array_equal(a.y, b.y)

    def test_comparison_on_demo_shows_strict_gain(self):
        cmp = compare_against_baseline(demo_instance(), seed=0)
        assert cmp.optimizer == "heuristic"
        assert cmp.optimized_objective > cmp.baseline_objective
        assert cmp.improvement_pct > 0
        assert plan_violations(demo_instance(), cmp.optimized_plan) == []

    def test_comparison_uses_exact_on_small_instances(self):
        instance, _ = random_feasible_instance(60, n_range=(4, 4), s_range=(2, 2))
        assert instance.n_articles * instance.n_stores <= EXACT_SIZE_LIMIT
        cmp = compare_against_baseline(instance, seed=0)
        assert cmp.optimizer == "exact"
        exact = solve_exact(instance)
        assert cmp.optimized_objective == pytest.approx(exact.objective, abs=1e-9)

    def test_optimizer_never_loses_to_baseline(self):
        for seed in range(62, 70):
            instance, _ = random_feasible_instance(seed)
            cmp = compare_against_baseline(instance, seed=0)
            assert cmp.optimized_objective >= cmp.baseline_objective - 1e-9

    def test_comparison_json(self):
        cmp = compare_against_baseline(demo_instance(), seed=0)
        payload = json.loads(cmp.to_json())
        assert payload["optimizer"] in ("exact", "heuristic")
        assert payload["optimized_objective"] >= payload["baseline_objective"]


def DistributionInstance_replace(inst, distances):
    from stylemix.core import DistributionInstance

    return DistributionInstance(
        articles=inst.articles,
        stores=inst.stores,
        alpha=inst.alpha,
        distances=distances,
        big_m_policy=inst.big_m_policy,
    )
