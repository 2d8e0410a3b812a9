# -*- coding: utf-8 -*-
"""
基准模块 - 内置场景、轨迹指标与四种方法的对比运行

本模块提供复现对比实验所需的全部组件：
1. Scenario - 场景：起点、一个或多个目标、障碍物、可选的配置覆盖
2. builtin_scenario - 三个内置场景
   - single_circle: 起点与目标之间有一个圆形障碍物，起始航向背离目标
   - crescent: 由 6 个相互重叠的凸块拼成、开口朝向起点的月牙形，目标在其后方
   - reachability_fan: 一个矩形障碍物，后方 11 个目标排成竖直扇面
3. compute_metrics - 最大单步转角、步数、路径长度、最小间隙、平均速度
4. run_comparison - 对每个 (变体, 目标) 组合规划一次，汇总成对比表

学习要点：
- 月牙形不是一个凹多边形，而是多个凸块的并集；每块单独计算排斥力，
  它们的合力在开口处形成同样的凹陷陷阱
- 月牙的凸块共享同一个 group，预测势把它当作一个正对障碍物
- TAPF 在扇面中间的目标上停在局部极小，用 LocalMinimum 终止来识别
- 对比表的行顺序固定为 (变体顺序, 目标顺序)，与并行执行的完成顺序无关

Example:
    >>> scenario = builtin_scenario("single_circle")
    >>> table = run_comparison(scenario, [MethodVariant.TAPF, MethodVariant.PAPF], PlannerConfig())
    >>> [row.metrics.success for row in table.rows]
    [True, True]
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .dynamics import VehicleState
from .geom import (
    Circle,
    ConvexPolygon,
    InvalidInputError,
    Obstacle,
    PapfError,
    Vec2,
    inside_any,
)
from .planner import InvalidScenarioError, PlanResult, PlannerConfig, Termination, plan
from .variants import MethodVariant

logger = logging.getLogger(__name__)


# ============== 错误类型 ==============

class UnknownScenarioError(PapfError):
    """内置场景名不存在"""


class InsufficientDataError(PapfError):
    """轨迹采样点不足，无法计算指标"""


class ComparisonError(PapfError):
    """对比运行中某个 (变体, 目标) 的规划失败，附带出处"""

    def __init__(self, variant: MethodVariant, goal_index: int, goal: Vec2, cause: Exception) -> None:
        self.variant = variant
        self.goal_index = goal_index
        self.goal = goal
        self.cause = cause
        super().__init__(f"variant={variant.value} goal#{goal_index} ({goal.x:g}, {goal.y:g}): {cause}")


# ============== 场景 ==============

@dataclass(frozen=True)
class Scenario:
    """规划场景

    核心属性：
        - name: 场景名
        - start: 起始状态
        - goals: 一个或多个目标
        - obstacles: 障碍物
        - overrides: 配置覆盖，格式同配置文件的 field / motion / planner 三段
        - aim_at_goal: 为 True 时每个目标的起始航向改为指向该目标
    """
    name: str
    start: VehicleState
    goals: tuple[Vec2, ...]
    obstacles: tuple[Obstacle, ...]
    overrides: dict = field(default_factory=dict)
    aim_at_goal: bool = True
    description: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "goals", tuple(self.goals))
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        if not self.goals:
            raise InvalidScenarioError(f"场景 {self.name} 至少需要一个目标")
        if inside_any(self.obstacles, self.start.position):
            raise InvalidScenarioError(f"场景 {self.name} 的起点位于障碍物内部")
        for i, goal in enumerate(self.goals):
            if inside_any(self.obstacles, goal):
                raise InvalidScenarioError(f"场景 {self.name} 的 goals[{i}] 位于障碍物内部")

    def start_for(self, goal: Vec2) -> VehicleState:
        """某个目标对应的起始状态"""
        return self.start.aimed_at(goal) if self.aim_at_goal else self.start

    def configure(self, cfg: PlannerConfig) -> PlannerConfig:
        """把场景自带的覆盖项叠加到配置上"""
        return apply_overrides(cfg, self.overrides)

    def translated(self, dx: float, dy: float) -> Scenario:
        """整体刚性平移后的场景"""
        shift = Vec2(dx, dy)
        return Scenario(
            name=self.name,
            start=VehicleState(self.start.position + shift, self.start.theta_v, self.start.speed),
            goals=tuple(g + shift for g in self.goals),
            obstacles=tuple(o.translated(dx, dy) for o in self.obstacles),
            overrides=self.overrides,
            aim_at_goal=self.aim_at_goal,
            description=self.description,
        )


def apply_overrides(cfg: PlannerConfig, overrides: dict | None) -> PlannerConfig:
    """逐项覆盖配置，没有出现的参数保持原值（不经过角度/弧度往返换算）"""
    if not overrides:
        return cfg
    unknown = set(overrides) - {"field", "motion", "planner"}
    if unknown:
        raise InvalidInputError(f"overrides 中存在未知分段: {sorted(unknown)}")

    fp = cfg.field_params
    if overrides.get("field"):
        unknown = set(overrides["field"]) - set(fp.__dataclass_fields__)
        if unknown:
            raise InvalidInputError(f"field 中存在未知参数: {sorted(unknown)}")
        fp = fp.replace(**{k: float(v) for k, v in overrides["field"].items()})

    mp = cfg.motion_params
    if overrides.get("motion"):
        changes = {}
        for key, value in overrides["motion"].items():
            if key.endswith("_deg"):
                changes[key[:-4]] = math.radians(float(value))
            else:
                changes[key] = float(value)
        unknown = set(changes) - set(mp.__dataclass_fields__)
        if unknown:
            raise InvalidInputError(f"motion 中存在未知参数: {sorted(unknown)}")
        mp = mp.replace(**changes)

    planner = dict(overrides.get("planner") or {})
    unknown = set(planner) - {"goal_tolerance", "max_steps", "stuck_window", "stuck_displacement", "heading_source"}
    if unknown:
        raise InvalidInputError(f"planner 中存在未知参数: {sorted(unknown)}")
    return cfg.replace(field_params=fp, motion_params=mp, **planner)


# ============== 内置场景 ==============

def crescent_pieces(
    center: Vec2,
    r_in: float,
    r_out: float,
    arc_start_deg: float,
    arc_end_deg: float,
    pieces: int,
    overlap_deg: float = 2.0,
    group: str | None = "crescent",
) -> list[ConvexPolygon]:
    """把圆环的一段弧切成若干凸四边形

    每块两侧各向外扩 overlap_deg，相邻块互相重叠，拼起来没有缝隙。
    顶点顺序：内弧起点、外弧起点、外弧终点、内弧终点（逆时针）。
    """
    if pieces < 1:
        raise InvalidInputError("pieces 至少为 1")
    if not 0 < r_in < r_out:
        raise InvalidInputError("需要 0 < r_in < r_out")
    step = (arc_end_deg - arc_start_deg) / pieces
    result = []
    for i in range(pieces):
        s = math.radians(arc_start_deg + i * step - overlap_deg)
        e = math.radians(arc_start_deg + (i + 1) * step + overlap_deg)
        result.append(ConvexPolygon.from_points(
            [
                (center.x + r_in * math.cos(s), center.y + r_in * math.sin(s)),
                (center.x + r_out * math.cos(s), center.y + r_out * math.sin(s)),
                (center.x + r_out * math.cos(e), center.y + r_out * math.sin(e)),
                (center.x + r_in * math.cos(e), center.y + r_in * math.sin(e)),
            ],
            group=group,
        ))
    return result


def rectangle(cx: float, cy: float, width: float, height: float, group: str | None = None) -> ConvexPolygon:
    """轴对齐矩形，顶点逆时针"""
    hw, hh = width / 2.0, height / 2.0
    return ConvexPolygon.from_points(
        [(cx - hw, cy - hh), (cx + hw, cy - hh), (cx + hw, cy + hh), (cx - hw, cy + hh)],
        group=group,
    )


def fan_goals(x: float, spacing: float, count: int = 11) -> list[Vec2]:
    """竖直排列的目标，关于中线错开半个间距（没有目标正好落在中线上）"""
    middle = count // 2
    return [Vec2(x, spacing * (k - middle) - spacing / 2.0) for k in range(count)]


def _single_circle() -> Scenario:
    # 圆心略偏离中线，正面迎向圆心是一个鞍点；起始航向背离目标 150°，
    # TAPF 第一步就整个掉头，受限方法要用多步慢慢转回来
    return Scenario(
        name="single_circle",
        start=VehicleState(Vec2(0.0, 0.0), math.radians(150.0), 0.1),
        goals=(Vec2(400.0, 0.0),),
        obstacles=(Circle(center=Vec2(200.0, 4.0), radius=50.0),),
        aim_at_goal=False,
        description="one circular island between start and goal, start heading 150 deg off the goal",
    )


def _crescent() -> Scenario:
    return Scenario(
        name="crescent",
        start=VehicleState(Vec2(0.0, 0.0), 0.0, 0.1),
        goals=(Vec2(330.0, 0.0),),
        obstacles=tuple(crescent_pieces(Vec2(200.0, 0.0), 40.0, 50.0, -90.0, 90.0, pieces=6)),
        description="concave crescent opening toward the start, goal behind it",
    )


def _reachability_fan() -> Scenario:
    return Scenario(
        name="reachability_fan",
        start=VehicleState(Vec2(0.0, 0.0), 0.0, 0.1),
        goals=tuple(fan_goals(300.0, 12.0, 11)),
        obstacles=(rectangle(200.0, 0.0, 20.0, 80.0),),
        description="one block, 11 goals fanned out behind it",
    )


BUILTIN_SCENARIOS: dict[str, Callable[[], Scenario]] = {
    "single_circle": _single_circle,
    "crescent": _crescent,
    "reachability_fan": _reachability_fan,
}


def builtin_scenario(name: str) -> Scenario:
    """按名字构造内置场景

    Raises:
        UnknownScenarioError: 名字不在 single_circle / crescent / reachability_fan 中
    """
    try:
        builder = BUILTIN_SCENARIOS[name]
    except KeyError:
        choices = ", ".join(BUILTIN_SCENARIOS)
        raise UnknownScenarioError(f"unknown scenario: {name!r}（可选: {choices}）") from None
    return builder()


# ============== 几何检查（shapely） ==============

def union_geometry(obstacles: Sequence[Obstacle]):
    """障碍物并集"""
    from shapely.ops import unary_union

    return unary_union([obs.to_shapely() for obs in obstacles])


def pocket_region(obstacles: Sequence[Obstacle]):
    """凹陷区域：并集的凸包减去并集本身"""
    union = union_geometry(obstacles)
    return union.convex_hull.difference(union)


def is_concave(obstacles: Sequence[Obstacle], tol: float = 1e-6) -> bool:
    """并集的凸包是否严格大于并集"""
    union = union_geometry(obstacles)
    hull = union.convex_hull
    return hull.contains(union) and hull.area - union.area > tol * max(hull.area, 1.0)


def samples_in_region(result: PlanResult, region) -> int:
    """轨迹落在 region 内部的采样点个数"""
    import shapely

    pts = result.positions()
    return int(np.count_nonzero(shapely.contains_xy(region, pts[:, 0], pts[:, 1])))


# ============== 指标 ==============

@dataclass(frozen=True)
class Metrics:
    """一条轨迹的评价指标

    Args:
        max_turn_per_step: 相邻采样航向差的最大绝对值（弧度）
        steps_taken: 步数
        path_length: 路径长度
        min_clearance: 所有采样点到最近障碍物边界距离的最小值
        mean_speed: path_length / steps_taken
        success: 是否到达目标
        termination: 终止原因
    """
    max_turn_per_step: float
    steps_taken: int
    path_length: float
    min_clearance: float
    mean_speed: float
    success: bool
    termination: Termination

    @property
    def max_turn_deg(self) -> float:
        return math.degrees(self.max_turn_per_step)

    def to_record(self) -> dict:
        """报表记录（转角用角度制）"""
        return {
            "termination": self.termination.value,
            "success": self.success,
            "steps_taken": self.steps_taken,
            "max_turn_per_step_deg": self.max_turn_deg,
            "path_length": self.path_length,
            "min_clearance": self.min_clearance,
            "mean_speed": self.mean_speed,
        }


def _wrapped(diffs: np.ndarray) -> np.ndarray:
    out = np.remainder(diffs + np.pi, 2.0 * np.pi) - np.pi
    return np.where(out <= -np.pi, np.pi, out)


def compute_metrics(result: PlanResult, obstacles: Sequence[Obstacle]) -> Metrics:
    """从规划结果计算指标

    Raises:
        InsufficientDataError: 轨迹少于 2 个采样点
    """
    if len(result.trajectory) < 2:
        raise InsufficientDataError("轨迹只有一个采样点，无法计算指标")
    pts = result.positions()
    seg = np.hypot(np.diff(pts[:, 0]), np.diff(pts[:, 1]))
    path_length = float(seg.sum())
    max_turn = float(np.abs(_wrapped(np.diff(result.yaws()))).max())

    if obstacles:
        clearance = np.min([obs.boundary_distances(pts) for obs in obstacles], axis=0)
        min_clearance = float(clearance.min())
    else:
        min_clearance = math.inf

    steps = result.steps_taken
    return Metrics(
        max_turn_per_step=max_turn,
        steps_taken=steps,
        path_length=path_length,
        min_clearance=min_clearance,
        mean_speed=path_length / steps,
        success=result.success,
        termination=result.termination,
    )


def signed_area(positions: np.ndarray, start: Vec2, goal: Vec2) -> float:
    """轨迹相对起点→目标弦线的有符号面积（按段长加权）

    正值表示轨迹主要在弦线左侧（上方）经过，负值表示右侧（下方）。
    """
    pts = np.asarray(positions, dtype=float)
    cx, cy = goal.x - start.x, goal.y - start.y
    seg = np.hypot(np.diff(pts[:, 0]), np.diff(pts[:, 1]))
    px, py = pts[1:, 0] - start.x, pts[1:, 1] - start.y
    return float(np.sum((cx * py - cy * px) * seg))


# ============== 对比运行 ==============

@dataclass(frozen=True)
class ComparisonRow:
    """对比表中的一行：一个 (变体, 目标) 组合"""
    variant: MethodVariant
    goal_index: int
    goal: Vec2
    result: PlanResult
    metrics: Metrics

    def to_record(self) -> dict:
        record = {
            "variant": self.variant.value,
            "goal_index": self.goal_index,
            "goal_x": self.goal.x,
            "goal_y": self.goal.y,
        }
        record.update(self.metrics.to_record())
        return record


@dataclass
class ComparisonTable:
    """对比结果

    rows 按 (变体顺序, 目标顺序) 排列。
    """
    scenario: str
    variants: list[MethodVariant]
    rows: list[ComparisonRow] = field(default_factory=list)

    def by_variant(self) -> dict[MethodVariant, list[ComparisonRow]]:
        grouped: dict[MethodVariant, list[ComparisonRow]] = {v: [] for v in self.variants}
        for row in self.rows:
            grouped[row.variant].append(row)
        return grouped

    def reachable_counts(self) -> dict[MethodVariant, int]:
        """每个变体到达的目标数"""
        return {v: sum(r.metrics.success for r in rows) for v, rows in self.by_variant().items()}

    def success_matrix(self) -> dict[MethodVariant, list[bool]]:
        return {v: [r.metrics.success for r in rows] for v, rows in self.by_variant().items()}

    def row(self, variant: MethodVariant | str, goal_index: int = 0) -> ComparisonRow:
        variant = MethodVariant.parse(variant)
        for r in self.rows:
            if r.variant is variant and r.goal_index == goal_index:
                return r
        raise KeyError(f"{variant.value}#{goal_index}")


def _plan_task(start: VehicleState, goal: Vec2, obstacles: tuple[Obstacle, ...], cfg: PlannerConfig) -> PlanResult:
    return plan(start, goal, obstacles, cfg)


def run_comparison(
    scenario: Scenario,
    variants: Sequence[MethodVariant | str],
    cfg: PlannerConfig,
    workers: int = 1,
) -> ComparisonTable:
    """对每个 (变体, 目标) 组合规划一次

    Args:
        scenario: 场景
        variants: 变体列表，可以为空（得到空表）
        cfg: 基础配置，variant 字段会被逐个替换；场景覆盖项先叠加上去
        workers: 并行进程数，1 表示在当前进程顺序执行

    Raises:
        ComparisonError: 某个组合规划出错，附带 (变体, 目标) 出处
    """
    variants = [MethodVariant.parse(v) for v in variants]
    base = scenario.configure(cfg)
    jobs = [
        (variant, i, goal, base.with_variant(variant))
        for variant in variants
        for i, goal in enumerate(scenario.goals)
    ]
    table = ComparisonTable(scenario=scenario.name, variants=variants)
    if not jobs:
        return table

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_plan_task, scenario.start_for(goal), goal, scenario.obstacles, job_cfg)
                for _, _, goal, job_cfg in jobs
            ]
            outcomes = []
            for future in futures:
                try:
                    outcomes.append(future.result())
                except PapfError as exc:
                    outcomes.append(exc)
    else:
        outcomes = []
        for _, _, goal, job_cfg in jobs:
            try:
                outcomes.append(_plan_task(scenario.start_for(goal), goal, scenario.obstacles, job_cfg))
            except PapfError as exc:
                outcomes.append(exc)

    for (variant, i, goal, _), outcome in zip(jobs, outcomes):
        if isinstance(outcome, Exception):
            raise ComparisonError(variant, i, goal, outcome) from outcome
        try:
            metrics = compute_metrics(outcome, scenario.obstacles)
        except InsufficientDataError as exc:
            raise ComparisonError(variant, i, goal, exc) from exc
        logger.debug(
            "%s goal#%d -> %s steps=%d", variant.label, i, metrics.termination.value, metrics.steps_taken,
        )
        table.rows.append(ComparisonRow(variant=variant, goal_index=i, goal=goal, result=outcome, metrics=metrics))
    return table
