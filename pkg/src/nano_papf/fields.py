# -*- coding: utf-8 -*-
"""
势场模块 - 吸引势、排斥势、预测势及合力

本模块计算三种势场及对应的力：
1. attractive - 吸引势：目标附近为抛物型，d_g 之外为线性（力大小恒定）
2. repulsive_single / repulsive_total - 排斥势：只在 d_o 范围内起作用，
   且乘以到目标距离的 n 次方，避免目标紧挨障碍物时无法到达
3. predictive_single / predictive_facing - 预测势：根据航向与障碍物切线锥
   角平分线的偏差，提前把艇往侧面推开
4. evaluate_fields / total_force - 按方法变体合成总的引导力

学习要点：
- 排斥力分解为两个分量：
  F1 从障碍物最近点指向艇（典型的排斥力）
  F2 从艇指向目标（抵消一部分吸引力随距离下降带来的影响）
  这一约定与排斥势的有限差分梯度一致
- 预测势 U = K_prd·exp(-d/d_prd - |Δθ_v|)，Δθ_v 是最短带符号角差
- 预测力的侧向分量 F2 始终垂直于角平分线，方向由 Δθ_v 的符号决定
- 预测力不是预测势的精确负梯度，分量公式直接作为定义使用

Example:
    >>> p = FieldParams(k_att=1.0, d_g=10.0)
    >>> attractive(Vec2(5.0, 0.0), Vec2(0.0, 0.0), p).force
    Vec2(x=-5.0, y=0.0)
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from typing import Sequence

from .geom import (
    Angle,
    FacingObstacle,
    InvalidInputError,
    Obstacle,
    Vec2,
    angle_diff,
    group_obstacles,
    wrap_angle,
)
from .variants import MethodVariant


# ============== 参数与结果类型 ==============

@dataclass(frozen=True)
class FieldParams:
    """势场超参数

    默认值即随包发布的 calibrated 配置（标定值，不是原始实验数据）。

    Args:
        k_att: 吸引势系数
        d_g: 吸引势的抛物区半径，超出后吸引力大小恒为 d_g·k_att
        k_rep: 排斥势系数
        d_o: 排斥势的作用距离
        n: 排斥势中到目标距离的指数，取 0 时退化为经典排斥势
        k_prd: 预测势系数
        d_prd: 预测势的作用距离尺度
    """
    k_att: float = 0.05
    d_g: float = 20.0
    k_rep: float = 20.0
    d_o: float = 10.0
    n: float = 1.0
    k_prd: float = 5.0
    d_prd: float = 60.0

    def __post_init__(self) -> None:
        for name, value in asdict(self).items():
            if not math.isfinite(value):
                raise InvalidInputError(f"field.{name} 必须是有限数值，实际为 {value!r}")
        for name in ("k_att", "d_g", "k_rep", "d_o", "k_prd", "d_prd"):
            if getattr(self, name) <= 0:
                raise InvalidInputError(f"field.{name} 必须大于 0，实际为 {getattr(self, name)}")
        if self.n < 0:
            raise InvalidInputError(f"field.n 必须 >= 0，实际为 {self.n}")

    def replace(self, **changes: float) -> FieldParams:
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> FieldParams:
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise InvalidInputError(f"field 中存在未知参数: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in data.items()})


@dataclass(frozen=True)
class ForceSample:
    """一次势场求值的结果

    核心属性：
        - force: 力向量
        - potential: 势能（非负）
        - components: 可选的 (F1, F2) 分量，只有单个排斥/预测项会填写
    """
    force: Vec2
    potential: float = 0.0
    components: tuple[Vec2, Vec2] | None = None

    @property
    def direction(self) -> Angle:
        """合力方向，归一化到 (-π, π]"""
        return wrap_angle(self.force.angle())

    @property
    def magnitude(self) -> float:
        return self.force.norm()

    def __add__(self, other: ForceSample) -> ForceSample:
        return ForceSample(force=self.force + other.force, potential=self.potential + other.potential)


ZERO_SAMPLE = ForceSample(force=Vec2(0.0, 0.0), potential=0.0)


# ============== 吸引势 ==============

def attractive_potential(distance: float, p: FieldParams) -> float:
    """吸引势，分段：d <= d_g 抛物型，d > d_g 线性"""
    if distance <= p.d_g:
        return 0.5 * p.k_att * distance * distance
    return p.d_g * p.k_att * distance - 0.5 * p.k_att * p.d_g * p.d_g


def attractive(q: Vec2, q_g: Vec2, p: FieldParams) -> ForceSample:
    """吸引势与吸引力

    力的方向从 q 指向 q_g；大小在 d_g 内为 k_att·d，之外恒为 d_g·k_att。
    q 与 q_g 重合时力为零。

    Args:
        q: 当前位置
        q_g: 目标位置
        p: 势场参数
    """
    offset = q_g - q
    distance = offset.norm()
    if distance == 0.0:
        return ZERO_SAMPLE
    magnitude = p.k_att * distance if distance <= p.d_g else p.d_g * p.k_att
    force = Vec2(magnitude * offset.x / distance, magnitude * offset.y / distance)
    return ForceSample(force=force, potential=attractive_potential(distance, p))


# ============== 排斥势 ==============

def repulsive_potential(d: float, goal_distance: float, p: FieldParams) -> float:
    """排斥势 ½·K_rep·(1/d - 1/d_o)²·d(q, q_g)^n，d > d_o 时为 0"""
    if d > p.d_o:
        return 0.0
    a = 1.0 / d - 1.0 / p.d_o
    return 0.5 * p.k_rep * a * a * goal_distance ** p.n


def repulsive_single(q: Vec2, q_g: Vec2, obs: Obstacle, p: FieldParams) -> ForceSample:
    """单个障碍物的排斥势与排斥力

    超出作用距离 d_o 时力和势均为零；否则合力为
    F1（最近点 → 艇，大小 K_rep·a·g^n / d²）与
    F2（艇 → 目标，大小 ½·n·K_rep·a²·g^(n-1)）之和，
    其中 a = 1/d - 1/d_o，g = d(q, q_g)。

    Raises:
        InsideObstacleError: q 在障碍物内部或边界上
    """
    q_oi, d = obs.closest_point(q)
    if d > p.d_o:
        return ZERO_SAMPLE
    goal_offset = q_g - q
    g = goal_offset.norm()
    a = 1.0 / d - 1.0 / p.d_o

    f1 = p.k_rep * a * g ** p.n / (d * d)
    away = q - q_oi
    comp1 = Vec2(f1 * away.x / d, f1 * away.y / d)

    comp2 = Vec2(0.0, 0.0)
    if p.n != 0 and g > 0:
        f2 = 0.5 * p.n * p.k_rep * a * a * g ** (p.n - 1.0)
        comp2 = Vec2(f2 * goal_offset.x / g, f2 * goal_offset.y / g)

    return ForceSample(
        force=comp1 + comp2,
        potential=0.5 * p.k_rep * a * a * g ** p.n,
        components=(comp1, comp2),
    )


def repulsive_total(q: Vec2, q_g: Vec2, obstacles: Sequence[Obstacle], p: FieldParams) -> ForceSample:
    """所有障碍物排斥力的分量和，势能同样求和"""
    total = ZERO_SAMPLE
    for obs in obstacles:
        total = total + repulsive_single(q, q_g, obs, p)
    return total


# ============== 预测势 ==============

def predictive_facing(q: Vec2, theta_v: Angle, facing: FacingObstacle, p: FieldParams) -> ForceSample:
    """一个正对障碍物的预测势与预测力

    Δθ_v = angle_diff(θ_ib, θ_v)
    U    = K_prd·exp(-d/d_prd - |Δθ_v|)
    F1   = U/d_prd，方向从最近点指向艇
    F2   = U，方向 θ_ib - π/2（Δθ_v >= 0）或 θ_ib + π/2（Δθ_v < 0）

    Raises:
        InsideObstacleError: q 在某个成员内部或边界上
    """
    q_oi, d = facing.closest_point(q)
    cone = facing.tangent_cone(q)
    delta = angle_diff(cone.theta_ib, theta_v)
    u = p.k_prd * math.exp(-d / p.d_prd - abs(delta))

    f1 = u / p.d_prd
    away = q - q_oi
    comp1 = Vec2(f1 * away.x / d, f1 * away.y / d)

    # 与角平分线单位向量精确正交
    c, s = math.cos(cone.theta_ib), math.sin(cone.theta_ib)
    comp2 = Vec2(u * s, -u * c) if delta >= 0 else Vec2(-u * s, u * c)

    return ForceSample(force=comp1 + comp2, potential=u, components=(comp1, comp2))


def predictive_single(q: Vec2, theta_v: Angle, obs: Obstacle, p: FieldParams) -> ForceSample:
    """单个障碍物的预测势与预测力（单成员的正对障碍物）"""
    return predictive_facing(q, theta_v, FacingObstacle(members=(obs,), label=obs.group), p)


def predictive_total(
    q: Vec2,
    theta_v: Angle,
    facing: Sequence[FacingObstacle],
    p: FieldParams,
) -> ForceSample:
    total = ZERO_SAMPLE
    for item in facing:
        total = total + predictive_facing(q, theta_v, item, p)
    return total


# ============== 合力 ==============

@dataclass(frozen=True)
class FieldBreakdown:
    """一步中各势场的贡献

    核心属性：
        - attractive / repulsive / predictive: 各项 ForceSample
        - total: 按方法变体合成后的引导力
        - heading: 预测项实际使用的航向 θ_v
    """
    attractive: ForceSample
    repulsive: ForceSample
    predictive: ForceSample
    total: Vec2
    heading: Angle


def evaluate_fields(
    q: Vec2,
    theta_v: Angle,
    q_g: Vec2,
    obstacles: Sequence[Obstacle],
    p: FieldParams,
    mode: MethodVariant,
    facing: Sequence[FacingObstacle] | None = None,
    heading_source: str = "yaw",
) -> FieldBreakdown:
    """按变体计算各项势场及合力

    Args:
        q: 当前位置
        theta_v: 当前航向
        q_g: 目标
        obstacles: 障碍物列表（排斥力逐个计算）
        p: 势场参数
        mode: 方法变体，只有 PAPF 加入预测项
        facing: 预先分好组的正对障碍物，None 时按 group 标签现场分组
        heading_source: "yaw" 用当前航向；"ideal" 用吸引+排斥合力方向，
            合力为零时退回当前航向
    """
    att = attractive(q, q_g, p)
    rep = repulsive_total(q, q_g, obstacles, p)
    base = att.force + rep.force

    if not MethodVariant.parse(mode).predictive:
        return FieldBreakdown(attractive=att, repulsive=rep, predictive=ZERO_SAMPLE, total=base, heading=theta_v)

    if heading_source == "ideal" and not base.is_zero():
        theta_v = wrap_angle(base.angle())
    elif heading_source not in ("yaw", "ideal"):
        raise InvalidInputError(f"heading_source 只能是 yaw 或 ideal，实际为 {heading_source!r}")

    if facing is None:
        facing = group_obstacles(obstacles)
    prd = predictive_total(q, theta_v, facing, p)
    return FieldBreakdown(attractive=att, repulsive=rep, predictive=prd, total=base + prd.force, heading=theta_v)


def total_force(
    q: Vec2,
    theta_v: Angle,
    q_g: Vec2,
    obstacles: Sequence[Obstacle],
    p: FieldParams,
    mode: MethodVariant,
) -> Vec2:
    """引导合力

    TAPF / AL / AL_VA：吸引力 + 排斥力之和
    PAPF：再加上所有正对障碍物的预测力

    Raises:
        InsideObstacleError: q 不在所有障碍物外部
    """
    return evaluate_fields(q, theta_v, q_g, obstacles, p, mode).total
