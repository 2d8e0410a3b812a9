# -*- coding: utf-8 -*-
"""
测试产物模块：轨迹 CSV、SVG 图与指标报表
"""

import json
import math
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from nano_papf.artifacts import (
    CSV_FIELDS,
    ArtifactError,
    format_metrics_table,
    format_success_matrix,
    plot_profile_svg,
    plot_trajectories_svg,
    read_trajectory_csv,
    write_metrics_json,
    write_metrics_table,
    write_trajectory_csv,
)
from nano_papf.bench import Scenario, run_comparison
from nano_papf.dynamics import VehicleState
from nano_papf.geom import Circle, ConvexPolygon, Vec2
from nano_papf.planner import PlannerConfig
from nano_papf.variants import MethodVariant


def _lane(goals=(Vec2(30.0, 0.0),)) -> Scenario:
    return Scenario(
        name="lane",
        start=VehicleState(Vec2(0.0, 0.0), 0.0, 0.1),
        goals=goals,
        obstacles=(
            Circle(center=Vec2(15.0, 20.0), radius=3.0),
            ConvexPolygon.from_points([(10.0, -25.0), (20.0, -25.0), (20.0, -15.0), (10.0, -15.0)]),
        ),
    )


@pytest.fixture(scope="module")
def lane_table():
    """单目标、两种方法"""
    return run_comparison(_lane(), [MethodVariant.TAPF, MethodVariant.PAPF], PlannerConfig())


@pytest.fixture(scope="module")
def fan_table():
    """两个目标、两种方法"""
    scenario = _lane(goals=(Vec2(30.0, 0.0), Vec2(30.0, 3.0)))
    return run_comparison(scenario, [MethodVariant.AL, MethodVariant.PAPF], PlannerConfig())


class TestTrajectoryCsv:
    """测试轨迹 CSV"""

    def test_header_and_rows(self, lane_table, tmp_path):
        """表头固定，每个采样点一行"""
        result = lane_table.row("papf").result
        path = write_trajectory_csv(result, tmp_path / "papf.csv")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == ",".join(CSV_FIELDS)
        assert len(lines) == len(result.trajectory) + 1

    def test_values_survive_exactly(self, lane_table, tmp_path):
        """位置与速度读回后逐位相同"""
        result = lane_table.row("tapf").result
        columns = read_trajectory_csv(write_trajectory_csv(result, tmp_path / "tapf.csv"))
        pts = result.positions()
        assert np.array_equal(columns["x"], pts[:, 0])
        assert np.array_equal(columns["y"], pts[:, 1])
        assert np.array_equal(columns["speed"], result.speeds())
        assert np.allclose(columns["yaw_deg"], np.degrees(result.yaws()), rtol=1e-12, atol=1e-12)
        assert list(columns["step"]) == list(range(len(result.trajectory)))

    def test_replanning_writes_identical_bytes(self, lane_table, tmp_path):
        """重新规划一遍再写出，文件逐字节相同"""
        again = run_comparison(_lane(), [MethodVariant.PAPF], PlannerConfig())
        first = write_trajectory_csv(lane_table.row("papf").result, tmp_path / "first.csv")
        second = write_trajectory_csv(again.row("papf").result, tmp_path / "second.csv")
        assert first.read_bytes() == second.read_bytes()

    def test_creates_directory(self, lane_table, tmp_path):
        """输出目录不存在时自动创建"""
        path = write_trajectory_csv(lane_table.row("papf").result, tmp_path / "a" / "b" / "run.csv")
        assert path.exists()

    def test_unwritable_directory(self, lane_table, tmp_path):
        """父路径是普通文件时报 ArtifactError"""
        blocker = tmp_path / "blocker"
        blocker.write_text("x", encoding="utf-8")
        with pytest.raises(ArtifactError):
            write_trajectory_csv(lane_table.row("papf").result, blocker / "run.csv")


class TestSvg:
    """测试 SVG 图"""

    def test_trajectory_plot(self, lane_table, tmp_path):
        """障碍物与多条轨迹画在同一张图上"""
        results = [row.result for row in lane_table.rows]
        path = plot_trajectories_svg(_lane(), results, tmp_path / "lane.svg", title="lane")
        text = path.read_text(encoding="utf-8")
        assert "<svg" in text

    def test_single_papf_plot(self, lane_table, tmp_path):
        """只有 PAPF 一条轨迹（带颜色条）"""
        path = plot_trajectories_svg(_lane(), [lane_table.row("papf").result], tmp_path / "papf.svg")
        assert path.stat().st_size > 0

    def test_profile_plot(self, lane_table, tmp_path):
        """航向与速度曲线"""
        results = [row.result for row in lane_table.rows]
        path = plot_profile_svg(results, tmp_path / "profile.svg", title="lane")
        assert "<svg" in path.read_text(encoding="utf-8")


class TestMetricsReport:
    """测试指标报表"""

    def test_json(self, lane_table, tmp_path):
        """每个 (变体, 目标) 一条记录"""
        path = write_metrics_json(lane_table, tmp_path / "metrics.json")
        document = json.loads(path.read_text(encoding="utf-8"))
        assert document["scenario"] == "lane"
        assert document["variants"] == ["tapf", "papf"]
        assert document["reachable"] == {"tapf": 1, "papf": 1}
        assert len(document["records"]) == 2
        record = document["records"][1]
        assert record["variant"] == "papf"
        assert record["termination"] == "Success"
        assert record["steps_taken"] == lane_table.row("papf").metrics.steps_taken
        assert math.isfinite(record["min_clearance"])

    def test_table(self, lane_table):
        """表头加一行分隔线，之后每条记录一行"""
        text = format_metrics_table(lane_table)
        lines = text.splitlines()
        assert "termination" in lines[0]
        assert set(lines[1]) == {"-"}
        assert len(lines) == 2 + len(lane_table.rows)
        assert "Success" in lines[2]

    def test_table_with_success_matrix(self, fan_table, tmp_path):
        """多目标时附上到达矩阵"""
        text = format_metrics_table(fan_table)
        assert format_success_matrix(fan_table) in text
        assert "(2/2)" in format_success_matrix(fan_table)
        path = write_metrics_table(fan_table, tmp_path / "metrics.txt")
        assert path.read_text(encoding="utf-8") == text + "\n"


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
