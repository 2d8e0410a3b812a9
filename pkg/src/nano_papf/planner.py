# -*- coding: utf-8 -*-
"""
规划器模块 - 势场规划主循环

每一步的执行流程：
1. 计算当前变体的引导合力 (evaluate_fields)
2. 由合力得到理想转角 Δθ_ideal (ideal_turn)
3. 带 VA 的变体调节速度，其它变体保持巡航速度 V_c
4. 带 AL 的变体对转角限幅，其它变体直接转到期望航向
5. 积分得到新状态并记录到轨迹
6. 检查终止条件，优先级：Collision > Success > LocalMinimum > StepBudgetExhausted

学习要点：
- 规划是确定性的：同样的输入得到逐位相同的轨迹
- 局部极小用"窗口位移"判断：最近 stuck_window 步的总位移小于阈值，
  或者合力恰好为零
- 规划器没有任何全局可变状态，多个规划可以并行执行

环境变量：
- NANO_PAPF_LOG_EVERY=N  每 N 步输出一条 DEBUG 日志（默认关闭）

Example:
    >>> cfg = PlannerConfig(variant=MethodVariant.PAPF)
    >>> start = VehicleState(Vec2(0.0, 0.0), 0.0, 0.1)
    >>> result = plan(start, Vec2(10.0, 0.0), [], cfg)
    >>> result.termination
    <Termination.SUCCESS: 'Success'>
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Sequence

import numpy as np

from .dynamics import (
    MotionParams,
    VehicleState,
    ZeroGradientError,
    adjust_velocity,
    ideal_turn,
    integrate,
    limit_turn,
)
from .fields import FieldParams, evaluate_fields
from .geom import InvalidInputError, Obstacle, PapfError, Vec2, group_obstacles, inside_any
from .variants import MethodVariant

logger = logging.getLogger(__name__)


class InvalidScenarioError(PapfError):
    """场景不合法：起点或目标在障碍物内部等"""


# ============== 配置 ==============

@dataclass(frozen=True)
class PlannerConfig:
    """一次规划的完整配置

    Args:
        field_params: 势场参数
        motion_params: 运动学参数
        variant: 方法变体
        goal_tolerance: 到达判定半径
        max_steps: 最大步数
        stuck_window: 局部极小判定窗口（步）
        stuck_displacement: 窗口内总位移阈值，None 表示 0.01·v_c·stuck_window
        heading_source: 预测项使用的航向，yaw 或 ideal
    """
    field_params: FieldParams = field(default_factory=FieldParams)
    motion_params: MotionParams = field(default_factory=MotionParams)
    variant: MethodVariant = MethodVariant.PAPF
    goal_tolerance: float = 0.5
    max_steps: int = 20000
    stuck_window: int = 200
    stuck_displacement: float | None = None
    heading_source: str = "yaw"

    def __post_init__(self) -> None:
        object.__setattr__(self, "variant", MethodVariant.parse(self.variant))
        if not (math.isfinite(self.goal_tolerance) and self.goal_tolerance > 0):
            raise InvalidInputError(f"planner.goal_tolerance 必须大于 0，实际为 {self.goal_tolerance}")
        if int(self.max_steps) != self.max_steps or self.max_steps <= 0:
            raise InvalidInputError(f"planner.max_steps 必须是正整数，实际为 {self.max_steps}")
        if int(self.stuck_window) != self.stuck_window or self.stuck_window < 2:
            raise InvalidInputError(f"planner.stuck_window 必须是 >= 2 的整数，实际为 {self.stuck_window}")
        object.__setattr__(self, "max_steps", int(self.max_steps))
        object.__setattr__(self, "stuck_window", int(self.stuck_window))
        if self.stuck_displacement is not None and not self.stuck_displacement > 0:
            raise InvalidInputError("planner.stuck_displacement 必须大于 0")
        if self.heading_source not in ("yaw", "ideal"):
            raise InvalidInputError(f"planner.heading_source 只能是 yaw 或 ideal，实际为 {self.heading_source!r}")

    @property
    def stuck_threshold(self) -> float:
        if self.stuck_displacement is not None:
            return self.stuck_displacement
        return 0.01 * self.motion_params.v_c * self.stuck_window

    def with_variant(self, variant: MethodVariant | str) -> PlannerConfig:
        return replace(self, variant=MethodVariant.parse(variant))

    def replace(self, **changes) -> PlannerConfig:
        return replace(self, **changes)

    def to_dict(self) -> dict:
        """配置文件格式：field / motion / planner 三段"""
        return {
            "field": self.field_params.to_dict(),
            "motion": self.motion_params.to_dict(),
            "planner": {
                "goal_tolerance": self.goal_tolerance,
                "max_steps": self.max_steps,
                "stuck_window": self.stuck_window,
                "stuck_displacement": self.stuck_displacement,
                "heading_source": self.heading_source,
            },
        }

    @classmethod
    def from_dict(cls, data: dict, variant: MethodVariant | str = MethodVariant.PAPF) -> PlannerConfig:
        planner = dict(data.get("planner") or {})
        return cls(
            field_params=FieldParams.from_dict(data.get("field") or {}),
            motion_params=MotionParams.from_dict(data.get("motion") or {}),
            variant=variant,
            **planner,
        )


# ============== 结果 ==============

class Termination(str, Enum):
    """终止原因"""
    SUCCESS = "Success"
    LOCAL_MINIMUM = "LocalMinimum"
    COLLISION = "Collision"
    STEP_BUDGET_EXHAUSTED = "StepBudgetExhausted"


@dataclass(frozen=True)
class TrajectorySample:
    """轨迹上的一个采样点 (步序号, 状态)"""
    step: int
    state: VehicleState


@dataclass
class PlanResult:
    """一次规划的结果

    核心属性：
        - trajectory: 从起点开始、每步一个的采样点
        - termination: 终止原因
        - steps_taken: 实际走过的步数，等于 len(trajectory) - 1
        - predictive_norms: 每个采样点上预测力的大小（首点与非 PAPF 变体为 0）
    """
    trajectory: list[TrajectorySample]
    termination: Termination
    variant: MethodVariant
    goal: Vec2
    predictive_norms: list[float] = field(default_factory=list)

    @property
    def steps_taken(self) -> int:
        return len(self.trajectory) - 1

    @property
    def success(self) -> bool:
        return self.termination is Termination.SUCCESS

    @property
    def final_state(self) -> VehicleState:
        return self.trajectory[-1].state

    def positions(self) -> np.ndarray:
        """(N, 2) 位置数组"""
        return np.array([(s.state.position.x, s.state.position.y) for s in self.trajectory], dtype=float)

    def yaws(self) -> np.ndarray:
        return np.array([s.state.theta_v for s in self.trajectory], dtype=float)

    def speeds(self) -> np.ndarray:
        return np.array([s.state.speed for s in self.trajectory], dtype=float)


# ============== 终止判定 ==============

def check_termination(
    history: Sequence[TrajectorySample],
    cfg: PlannerConfig,
    q_g: Vec2,
    obstacles: Sequence[Obstacle],
) -> Termination | None:
    """根据轨迹末端判断是否终止，返回 None 表示继续

    优先级固定为 Collision > Success > LocalMinimum > StepBudgetExhausted。

    Args:
        history: 轨迹（至少包含最后 stuck_window + 1 个采样时才做局部极小判断）
        cfg: 规划配置
        q_g: 目标
        obstacles: 障碍物
    """
    if not history:
        raise InvalidInputError("history 不能为空")
    last = history[-1]
    position = last.state.position
    if inside_any(obstacles, position):
        return Termination.COLLISION
    if position.distance_to(q_g) <= cfg.goal_tolerance:
        return Termination.SUCCESS
    window = cfg.stuck_window
    if len(history) > window:
        if position.distance_to(history[-1 - window].state.position) < cfg.stuck_threshold:
            return Termination.LOCAL_MINIMUM
    if last.step >= cfg.max_steps:
        return Termination.STEP_BUDGET_EXHAUSTED
    return None


# ============== 主循环 ==============

def _log_every() -> int:
    try:
        return max(0, int(os.environ.get("NANO_PAPF_LOG_EVERY", "0")))
    except ValueError:
        return 0


def plan(
    start: VehicleState,
    goal: Vec2,
    obstacles: Sequence[Obstacle],
    cfg: PlannerConfig,
) -> PlanResult:
    """从起点出发迭代规划，直到到达目标或触发失败条件

    Args:
        start: 起始状态（航向与速度按给定值使用）
        goal: 目标位置
        obstacles: 障碍物列表
        cfg: 规划配置

    Returns:
        PlanResult，轨迹第一个点就是起始状态

    Raises:
        InvalidScenarioError: 起点或目标不在所有障碍物外部
    """
    obstacles = list(obstacles)
    if inside_any(obstacles, start.position):
        raise InvalidScenarioError(f"起点 {start.position.as_tuple()} 位于障碍物内部")
    if inside_any(obstacles, goal):
        raise InvalidScenarioError(f"目标 {goal.as_tuple()} 位于障碍物内部")

    variant = cfg.variant
    fp, mp = cfg.field_params, cfg.motion_params
    facing = group_obstacles(obstacles) if variant.predictive else []
    log_every = _log_every()

    trajectory = [TrajectorySample(step=0, state=start)]
    predictive_norms = [0.0]
    state = start
    # 起点已在目标容差内时不走任何一步
    termination = check_termination(trajectory, cfg, goal, obstacles)
    k = 0

    while termination is None:
        k += 1
        fields = evaluate_fields(
            state.position, state.theta_v, goal, obstacles, fp, variant,
            facing=facing, heading_source=cfg.heading_source,
        )
        try:
            dtheta_ideal = ideal_turn(state.theta_v, fields.total)
        except ZeroGradientError:
            termination = Termination.LOCAL_MINIMUM
            break

        speed = adjust_velocity(state.speed, dtheta_ideal, mp) if variant.velocity_adjust else mp.v_c
        dtheta = limit_turn(dtheta_ideal, mp, speed) if variant.angle_limit else dtheta_ideal
        state = integrate(state, dtheta, speed, mp)

        trajectory.append(TrajectorySample(step=k, state=state))
        predictive_norms.append(fields.predictive.magnitude)

        if log_every and k % log_every == 0:
            logger.debug(
                "step=%d pos=(%.4f, %.4f) yaw=%.3f° speed=%.4f",
                k, state.position.x, state.position.y, math.degrees(state.theta_v), state.speed,
            )

        termination = check_termination(trajectory, cfg, goal, obstacles)

    result = PlanResult(
        trajectory=trajectory,
        termination=termination,
        variant=variant,
        goal=goal,
        predictive_norms=predictive_norms,
    )
    logger.info("%s -> %s in %d steps", variant.label, termination.value, result.steps_taken)
    return result
