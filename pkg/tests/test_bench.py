# -*- coding: utf-8 -*-
"""
测试基准模块

对比实验按模块只运行一次（scope="module" 的 fixture），各个测试共享结果。
"""

import math
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from nano_papf.bench import (
    ComparisonError,
    InsufficientDataError,
    Scenario,
    UnknownScenarioError,
    builtin_scenario,
    compute_metrics,
    crescent_pieces,
    fan_goals,
    is_concave,
    pocket_region,
    run_comparison,
    samples_in_region,
    signed_area,
)
from nano_papf.dynamics import VehicleState
from nano_papf.geom import Circle, Vec2, angle_diff, nearest_distance
from nano_papf.planner import PlanResult, PlannerConfig, Termination, TrajectorySample, plan
from nano_papf.variants import MethodVariant


ALL_VARIANTS = [MethodVariant.TAPF, MethodVariant.AL, MethodVariant.AL_VA, MethodVariant.PAPF]
LIMITED = [MethodVariant.AL, MethodVariant.AL_VA, MethodVariant.PAPF]


def _result_from_points(points, yaws_deg, termination=Termination.SUCCESS) -> PlanResult:
    trajectory = [
        TrajectorySample(step=i, state=VehicleState(Vec2(x, y), math.radians(yaw), 1.0))
        for i, ((x, y), yaw) in enumerate(zip(points, yaws_deg))
    ]
    return PlanResult(
        trajectory=trajectory,
        termination=termination,
        variant=MethodVariant.TAPF,
        goal=Vec2(*points[-1]),
    )


@pytest.fixture(scope="module")
def single_circle_table():
    return run_comparison(builtin_scenario("single_circle"), ALL_VARIANTS, PlannerConfig())


@pytest.fixture(scope="module")
def crescent_table():
    return run_comparison(builtin_scenario("crescent"), [MethodVariant.TAPF, MethodVariant.PAPF], PlannerConfig())


@pytest.fixture(scope="module")
def fan_table():
    return run_comparison(
        builtin_scenario("reachability_fan"), [MethodVariant.TAPF, MethodVariant.PAPF], PlannerConfig(),
    )


class TestScenarios:
    """测试内置场景"""

    def test_single_circle(self):
        """一个障碍物、一个目标，起始航向固定为背离目标 150°"""
        scenario = builtin_scenario("single_circle")
        assert len(scenario.obstacles) == 1
        assert len(scenario.goals) == 1
        assert scenario.aim_at_goal is False
        assert math.degrees(scenario.start.theta_v) == 150.0
        assert scenario.start_for(scenario.goals[0]) == scenario.start

    def test_fan_has_eleven_goals(self):
        """扇面有 11 个目标，没有目标落在中线上"""
        scenario = builtin_scenario("reachability_fan")
        assert len(scenario.goals) == 11
        assert all(g.y != 0.0 for g in scenario.goals)
        assert [g.y for g in fan_goals(300.0, 12.0)][:3] == [-66.0, -54.0, -42.0]

    def test_crescent_is_concave(self):
        """月牙的并集严格小于其凸包，单个圆不是"""
        assert is_concave(builtin_scenario("crescent").obstacles)
        assert not is_concave(builtin_scenario("single_circle").obstacles)
        assert pocket_region(builtin_scenario("crescent").obstacles).area > 0

    def test_crescent_pieces_share_group(self):
        """月牙的凸块属于同一组，相邻块互相重叠"""
        pieces = crescent_pieces(Vec2(200.0, 0.0), 40.0, 50.0, -90.0, 90.0, pieces=6)
        assert len(pieces) == 6
        assert {p.group for p in pieces} == {"crescent"}
        for a, b in zip(pieces, pieces[1:]):
            assert a.to_shapely().intersection(b.to_shapely()).area > 0

    @pytest.mark.parametrize("name", ["single_circle", "crescent", "reachability_fan"])
    def test_margin(self, name):
        """起点和目标离所有障碍物至少 d_o"""
        scenario = builtin_scenario(name)
        d_o = PlannerConfig().field_params.d_o
        assert nearest_distance(scenario.obstacles, scenario.start.position) >= d_o
        for goal in scenario.goals:
            assert nearest_distance(scenario.obstacles, goal) >= d_o

    def test_unknown(self):
        """未知场景名"""
        with pytest.raises(UnknownScenarioError, match="unknown scenario"):
            builtin_scenario("nosuch")

    def test_translated(self):
        """平移后的场景"""
        scenario = builtin_scenario("single_circle").translated(10.0, -5.0)
        assert scenario.start.position == Vec2(10.0, -5.0)
        assert scenario.goals[0] == Vec2(410.0, -5.0)
        assert scenario.obstacles[0].center == Vec2(210.0, -1.0)
        assert scenario.start.theta_v == builtin_scenario("single_circle").start.theta_v


class TestMetrics:
    """测试轨迹指标"""

    def test_collinear(self):
        """共线轨迹最大转角为 0"""
        m = compute_metrics(_result_from_points([(0, 0), (1, 0), (2, 0)], [0, 0, 0]), [])
        assert m.max_turn_per_step == 0.0
        assert m.path_length == pytest.approx(2.0)
        assert m.mean_speed == pytest.approx(1.0)
        assert m.min_clearance == math.inf

    def test_square_corner(self):
        """直角拐弯最大转角为 π/2"""
        m = compute_metrics(_result_from_points([(0, 0), (1, 0), (1, 1)], [0, 0, 90]), [])
        assert m.max_turn_per_step == pytest.approx(math.pi / 2)
        assert m.max_turn_deg == pytest.approx(90.0)

    def test_turn_across_cut(self):
        """跨过 ±π 的转角按最短角差计"""
        m = compute_metrics(_result_from_points([(0, 0), (-1, 0), (-2, 0)], [170, -170, -170]), [])
        assert m.max_turn_deg == pytest.approx(20.0)

    def test_clearance(self):
        """最小间隙取所有采样点到所有障碍物的最小值"""
        circle = Circle(center=Vec2(1.0, 3.0), radius=1.0)
        m = compute_metrics(_result_from_points([(0, 0), (1, 0), (2, 0)], [0, 0, 0]), [circle])
        assert m.min_clearance == pytest.approx(2.0)

    def test_single_sample(self):
        """只有一个采样点时无法计算"""
        with pytest.raises(InsufficientDataError):
            compute_metrics(_result_from_points([(0, 0)], [0]), [])

    def test_record(self):
        """报表记录使用角度制"""
        m = compute_metrics(_result_from_points([(0, 0), (1, 0), (1, 1)], [0, 0, 90]), [])
        record = m.to_record()
        assert record["termination"] == "Success"
        assert record["max_turn_per_step_deg"] == pytest.approx(90.0)
        assert record["steps_taken"] == 2

    def test_signed_area(self):
        """轨迹在弦线左侧为正，右侧为负"""
        start, goal = Vec2(0.0, 0.0), Vec2(10.0, 0.0)
        above = np.array([(0, 0), (5, 3), (10, 0)], dtype=float)
        below = np.array([(0, 0), (5, -3), (10, 0)], dtype=float)
        assert signed_area(above, start, goal) > 0
        assert signed_area(below, start, goal) < 0

    def test_translation_invariance_of_metrics(self, single_circle_table):
        """整体平移后指标不变"""
        scenario = builtin_scenario("single_circle")
        result = single_circle_table.row(MethodVariant.PAPF).result
        dx, dy = -37.5, 12.25
        shifted = PlanResult(
            trajectory=[
                TrajectorySample(s.step, VehicleState(s.state.position + Vec2(dx, dy), s.state.theta_v, s.state.speed))
                for s in result.trajectory
            ],
            termination=result.termination,
            variant=result.variant,
            goal=result.goal + Vec2(dx, dy),
        )
        moved = scenario.translated(dx, dy)
        base = compute_metrics(result, scenario.obstacles)
        other = compute_metrics(shifted, moved.obstacles)
        assert other.steps_taken == base.steps_taken
        assert other.max_turn_per_step == pytest.approx(base.max_turn_per_step, rel=1e-9)
        assert other.path_length == pytest.approx(base.path_length, rel=1e-9)
        assert other.min_clearance == pytest.approx(base.min_clearance, rel=1e-9)
        assert other.mean_speed == pytest.approx(base.mean_speed, rel=1e-9)

    @pytest.mark.parametrize("variant", [MethodVariant.TAPF, MethodVariant.AL])
    def test_translation_invariance_of_planning(self, variant):
        """平移整个场景后重新规划，指标不变"""
        scenario = Scenario(
            name="offset_island",
            start=VehicleState(Vec2(0.0, 0.0), 0.0, 0.1),
            goals=(Vec2(100.03, 0.0),),
            obstacles=(Circle(center=Vec2(50.0, 20.0), radius=5.0),),
        )
        moved = scenario.translated(-37.5, 12.25)
        cfg = PlannerConfig(variant=variant)
        base = compute_metrics(
            plan(scenario.start_for(scenario.goals[0]), scenario.goals[0], scenario.obstacles, cfg),
            scenario.obstacles,
        )
        other = compute_metrics(
            plan(moved.start_for(moved.goals[0]), moved.goals[0], moved.obstacles, cfg),
            moved.obstacles,
        )
        assert other.termination == base.termination
        assert other.steps_taken == base.steps_taken
        assert other.max_turn_per_step == pytest.approx(base.max_turn_per_step, abs=1e-9)
        assert other.path_length == pytest.approx(base.path_length, rel=1e-9)
        assert other.min_clearance == pytest.approx(base.min_clearance, rel=1e-9)
        assert other.mean_speed == pytest.approx(base.mean_speed, rel=1e-9)


class TestSingleCircleComparison:
    """单圆场景上四种方法的对比"""

    def test_rows(self, single_circle_table):
        """4 行，全部成功"""
        assert [row.variant for row in single_circle_table.rows] == ALL_VARIANTS
        assert all(row.metrics.success for row in single_circle_table.rows)

    def test_step_ordering(self, single_circle_table):
        """PAPF < AL+VA < TAPF <= AL"""
        steps = {row.variant: row.metrics.steps_taken for row in single_circle_table.rows}
        assert steps[MethodVariant.PAPF] < steps[MethodVariant.AL_VA] < steps[MethodVariant.TAPF]
        assert steps[MethodVariant.AL_VA] < steps[MethodVariant.AL]
        assert steps[MethodVariant.TAPF] <= steps[MethodVariant.AL]

    def test_max_turn_ratio(self, single_circle_table):
        """TAPF 的最大单步转角至少是受限方法的 5 倍"""
        tapf = single_circle_table.row(MethodVariant.TAPF).metrics.max_turn_per_step
        for variant in LIMITED:
            assert tapf >= 5 * single_circle_table.row(variant).metrics.max_turn_per_step

    def test_turn_bound(self, single_circle_table):
        """受限方法每步转角不超过 20°"""
        for variant in LIMITED:
            assert single_circle_table.row(variant).metrics.max_turn_per_step <= math.radians(20.0) + 1e-12

    def test_speed_envelope(self, single_circle_table):
        """VA 方法的速度留在 [v_min, v_max]"""
        mp = PlannerConfig().motion_params
        for variant in (MethodVariant.AL_VA, MethodVariant.PAPF):
            speeds = single_circle_table.row(variant).result.speeds()
            assert speeds.min() >= mp.v_min
            assert speeds.max() <= mp.v_max

    def test_path_length_lower_bound(self, single_circle_table):
        """成功轨迹的路程不短于起终点距离减去容差"""
        scenario = builtin_scenario("single_circle")
        straight = scenario.start.position.distance_to(scenario.goals[0]) - PlannerConfig().goal_tolerance
        for row in single_circle_table.rows:
            assert row.metrics.path_length >= straight
            assert row.metrics.min_clearance > 0

    def test_summary_helpers(self, single_circle_table):
        """按变体汇总"""
        assert single_circle_table.reachable_counts() == {v: 1 for v in ALL_VARIANTS}
        assert single_circle_table.success_matrix()[MethodVariant.PAPF] == [True]
        with pytest.raises(KeyError):
            single_circle_table.row(MethodVariant.PAPF, goal_index=3)


class TestCrescent:
    """凹形障碍物"""

    def test_tapf_trapped(self, crescent_table):
        """TAPF 停在月牙内的局部极小"""
        row = crescent_table.row(MethodVariant.TAPF)
        assert row.metrics.termination is Termination.LOCAL_MINIMUM

    def test_papf_detours_on_the_right(self, crescent_table):
        """PAPF 从右侧（下方）绕过"""
        row = crescent_table.row(MethodVariant.PAPF)
        scenario = builtin_scenario("crescent")
        assert row.metrics.success
        assert row.metrics.min_clearance > 0
        assert row.result.positions()[:, 1].min() < 0
        assert signed_area(row.result.positions(), scenario.start.position, scenario.goals[0]) < 0

    def test_papf_never_enters_pocket(self, crescent_table):
        """PAPF 的轨迹不进入月牙的凹陷区"""
        pocket = pocket_region(builtin_scenario("crescent").obstacles)
        assert samples_in_region(crescent_table.row(MethodVariant.PAPF).result, pocket) == 0
        assert samples_in_region(crescent_table.row(MethodVariant.TAPF).result, pocket) > 0

    def test_parallel_matches_sequential(self, crescent_table):
        """并行运行与顺序运行得到相同的结果与行顺序"""
        parallel = run_comparison(
            builtin_scenario("crescent"), [MethodVariant.TAPF, MethodVariant.PAPF], PlannerConfig(), workers=2,
        )
        assert [(r.variant, r.goal_index) for r in parallel.rows] == [
            (r.variant, r.goal_index) for r in crescent_table.rows
        ]
        for a, b in zip(parallel.rows, crescent_table.rows):
            assert a.result.trajectory == b.result.trajectory
            assert a.metrics == b.metrics


class TestReachabilityFan:
    """扇面目标的可达性"""

    def test_papf_reaches_all(self, fan_table):
        """PAPF 到达全部 11 个目标"""
        assert fan_table.reachable_counts()[MethodVariant.PAPF] == 11

    def test_tapf_fails_central_goals(self, fan_table):
        """TAPF 在中间的目标上停在局部极小，两端的目标可达"""
        flags = fan_table.success_matrix()[MethodVariant.TAPF]
        assert not all(flags)
        assert flags[0] and flags[-1]
        assert not any(flags[4:7])
        for row in fan_table.by_variant()[MethodVariant.TAPF]:
            if not row.metrics.success:
                assert row.metrics.termination is Termination.LOCAL_MINIMUM

    def test_papf_side_follows_goal(self, fan_table):
        """目标在中线上方时从上方绕行，下方时从下方绕行"""
        scenario = builtin_scenario("reachability_fan")
        for row in fan_table.by_variant()[MethodVariant.PAPF]:
            area = signed_area(row.result.positions(), scenario.start.position, row.goal)
            assert np.sign(area) == np.sign(row.goal.y)


class TestRunComparison:
    """测试对比运行本身"""

    def test_empty_variants(self):
        """没有变体时得到空表"""
        table = run_comparison(builtin_scenario("single_circle"), [], PlannerConfig())
        assert table.rows == []
        assert table.reachable_counts() == {}

    def test_error_names_variant_and_goal(self):
        """出错时附带 (变体, 目标) 出处"""
        scenario = Scenario(
            name="already_there",
            start=VehicleState(Vec2(0.0, 0.0), 0.0, 0.1),
            goals=(Vec2(50.0, 0.0), Vec2(0.2, 0.0)),
            obstacles=(),
        )
        with pytest.raises(ComparisonError) as info:
            run_comparison(scenario, ["al"], PlannerConfig())
        assert info.value.variant is MethodVariant.AL
        assert info.value.goal_index == 1
        assert isinstance(info.value.cause, InsufficientDataError)

    def test_scenario_overrides_applied(self):
        """场景自带的覆盖项叠加到配置上"""
        scenario = Scenario(
            name="short_budget",
            start=VehicleState(Vec2(0.0, 0.0), 0.0, 0.1),
            goals=(Vec2(100.0, 0.0),),
            obstacles=(),
            overrides={"planner": {"max_steps": 30}, "motion": {"dtheta_max_deg": 15.0}},
        )
        table = run_comparison(scenario, ["tapf", "papf"], PlannerConfig())
        assert all(row.metrics.termination is Termination.STEP_BUDGET_EXHAUSTED for row in table.rows)
        assert all(row.metrics.steps_taken == 30 for row in table.rows)

    def test_reproducible(self):
        """同样的输入得到相同的表"""
        scenario = Scenario(
            name="island",
            start=VehicleState(Vec2(0.0, 0.0), 0.0, 0.1),
            goals=(Vec2(100.0, 0.0),),
            obstacles=(Circle(center=Vec2(50.0, 0.5), radius=10.0),),
        )
        first = run_comparison(scenario, ["al_va", "papf"], PlannerConfig())
        second = run_comparison(scenario, ["al_va", "papf"], PlannerConfig())
        assert [r.metrics for r in first.rows] == [r.metrics for r in second.rows]
        for a, b in zip(first.rows, second.rows):
            assert a.result.trajectory == b.result.trajectory
            yaws = a.result.yaws()
            assert max(abs(angle_diff(y1, y0)) for y0, y1 in zip(yaws, yaws[1:])) <= math.radians(20) + 1e-12


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
