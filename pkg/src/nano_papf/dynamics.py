# -*- coding: utf-8 -*-
"""
运动学模块 - 转角限幅 (AL)、速度调节 (VA) 与单步积分

本模块把"质点沿负梯度走"变成"有转向和加速能力限制的艇"：
1. ideal_turn - 由引导力得到理想转角 Δθ_ideal（最短带符号角差）
2. limit_turn - 转角限幅，把 Δθ_ideal 截断到 [-Δθ_m, Δθ_m]
3. adjust_velocity - 三段式速度调节：
   |Δθ_ideal| <= θ1        加速，上限 V_max（直道）
   θ1 < |Δθ_ideal| <= θ2   以不超过 accel_step 的速率回到 V_c（转弯）
   |Δθ_ideal| > θ2         减速，下限 V_min（急转）
4. integrate - 先更新航向，再沿新航向前进 new_speed·dt

学习要点：
- 艇的偏航力矩动力学被压缩成一个常数 Δθ_m（每步最大转角）
- 速度调节使用未限幅的理想转角
- 每步顺序固定：求力 → Δθ_ideal → VA → AL → 积分
- turn_speed_gain 是"转角上限随速度变化"的扩展点，默认关闭

Example:
    >>> p = MotionParams()
    >>> round(math.degrees(limit_turn(math.radians(50), p)), 9)
    20.0
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .geom import Angle, InvalidInputError, PapfError, Vec2, angle_diff, wrap_angle


class ZeroGradientError(PapfError):
    """引导力为零，无法确定期望航向（规划器按局部极小处理）"""


# ============== 状态与参数 ==============

@dataclass(frozen=True)
class VehicleState:
    """某一时刻的艇状态

    Args:
        position: 位置
        theta_v: 航向（偏航角），构造时归一化到 (-π, π]
        speed: 标量速度（长度/步），非负
    """
    position: Vec2
    theta_v: Angle
    speed: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta_v", wrap_angle(self.theta_v))
        if not math.isfinite(self.speed) or self.speed < 0:
            raise InvalidInputError(f"speed 必须是非负有限数值，实际为 {self.speed!r}")

    def aimed_at(self, target: Vec2) -> VehicleState:
        """航向改为指向 target 的新状态"""
        return replace(self, theta_v=(target - self.position).angle())


@dataclass(frozen=True)
class MotionParams:
    """运动学约束参数（内部一律用弧度）

    Args:
        dtheta_max: 每步最大转角 Δθ_m（弧度）
        theta1: 加速区阈值 θ1（弧度）
        theta2: 减速区阈值 θ2（弧度）
        v_c: 巡航速度（长度/步）
        v_min: 最低速度
        v_max: 最高速度
        accel_step: 每步速度变化量
        dt: 时间步长（步）
        turn_speed_gain: 转角上限随速度变化的增益，0 表示关闭
    """
    dtheta_max: float = math.radians(20.0)
    theta1: float = math.radians(2.0)
    theta2: float = math.radians(10.0)
    v_c: float = 0.1
    v_min: float = 0.06
    v_max: float = 0.17
    accel_step: float = 0.002
    dt: float = 1.0
    turn_speed_gain: float = 0.0

    def __post_init__(self) -> None:
        for name, value in self.__dict__.items():
            if not math.isfinite(value):
                raise InvalidInputError(f"motion.{name} 必须是有限数值，实际为 {value!r}")
        if self.dtheta_max <= 0:
            raise InvalidInputError("motion.dtheta_max 必须大于 0")
        if not 0 < self.theta1 < self.theta2 <= math.pi:
            raise InvalidInputError("motion 需要满足 0 < theta1 < theta2 <= 180°")
        if not 0 < self.v_min <= self.v_c <= self.v_max:
            raise InvalidInputError("motion 需要满足 0 < v_min <= v_c <= v_max")
        if self.accel_step <= 0:
            raise InvalidInputError("motion.accel_step 必须大于 0")
        if self.dt <= 0:
            raise InvalidInputError("motion.dt 必须大于 0")
        if self.turn_speed_gain < 0:
            raise InvalidInputError("motion.turn_speed_gain 必须 >= 0")

    @classmethod
    def from_degrees(
        cls,
        dtheta_max_deg: float = 20.0,
        theta1_deg: float = 2.0,
        theta2_deg: float = 10.0,
        **kwargs: float,
    ) -> MotionParams:
        """角度参数用角度制给出的构造方式"""
        return cls(
            dtheta_max=math.radians(dtheta_max_deg),
            theta1=math.radians(theta1_deg),
            theta2=math.radians(theta2_deg),
            **kwargs,
        )

    def replace(self, **changes: float) -> MotionParams:
        return replace(self, **changes)

    def recommended_range_warnings(self) -> list[str]:
        """检查速度比例是否落在推荐区间 V_max = 1.5~2 V_c，V_min = 0.5~0.7 V_c"""
        warnings = []
        if not 1.5 * self.v_c <= self.v_max <= 2.0 * self.v_c:
            warnings.append(f"v_max={self.v_max} 不在推荐区间 [1.5, 2]·v_c")
        if not 0.5 * self.v_c <= self.v_min <= 0.7 * self.v_c:
            warnings.append(f"v_min={self.v_min} 不在推荐区间 [0.5, 0.7]·v_c")
        return warnings

    def to_dict(self) -> dict:
        """文件格式：角度用角度制"""
        return {
            "dtheta_max_deg": math.degrees(self.dtheta_max),
            "theta1_deg": math.degrees(self.theta1),
            "theta2_deg": math.degrees(self.theta2),
            "v_c": self.v_c,
            "v_min": self.v_min,
            "v_max": self.v_max,
            "accel_step": self.accel_step,
            "dt": self.dt,
            "turn_speed_gain": self.turn_speed_gain,
        }

    @classmethod
    def from_dict(cls, data: dict) -> MotionParams:
        data = dict(data)
        kwargs = {}
        for name in ("dtheta_max", "theta1", "theta2"):
            key = f"{name}_deg"
            if key in data:
                kwargs[name] = math.radians(float(data.pop(key)))
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise InvalidInputError(f"motion 中存在未知参数: {sorted(unknown)}")
        kwargs.update({k: float(v) for k, v in data.items()})
        return cls(**kwargs)


# ============== 单步运算 ==============

def ideal_turn(theta_prev: Angle, force: Vec2) -> float:
    """理想转角 Δθ_ideal = angle_diff(力的方向, 上一步航向)

    Raises:
        ZeroGradientError: 力为零向量
    """
    if force.is_zero():
        raise ZeroGradientError("引导力为零，期望航向无定义")
    return angle_diff(force.angle(), theta_prev)


def effective_turn_limit(p: MotionParams, speed: float | None = None) -> float:
    """当前速度下的转角上限

    turn_speed_gain 为 0 或未给出速度时就是 Δθ_m。
    """
    if speed is None or p.turn_speed_gain == 0.0:
        return p.dtheta_max
    scale = 1.0 + p.turn_speed_gain * (speed - p.v_c) / p.v_c
    return p.dtheta_max * max(0.1, scale)


def limit_turn(dtheta_ideal: float, p: MotionParams, speed: float | None = None) -> float:
    """转角限幅 clamp(Δθ_ideal, -Δθ_m, Δθ_m)，是奇函数"""
    limit = effective_turn_limit(p, speed)
    return max(-limit, min(limit, dtheta_ideal))


def adjust_velocity(speed: float, dtheta_ideal: float, p: MotionParams) -> float:
    """三段式速度调节，返回新的速度

    Args:
        speed: 当前速度
        dtheta_ideal: 未限幅的理想转角
        p: 运动学参数
    """
    turn = abs(dtheta_ideal)
    if turn <= p.theta1:
        return min(p.v_max, speed + p.accel_step)
    if turn <= p.theta2:
        if speed < p.v_c:
            return min(p.v_c, speed + p.accel_step)
        if speed > p.v_c:
            return max(p.v_c, speed - p.accel_step)
        return speed
    return max(p.v_min, speed - p.accel_step)


def integrate(state: VehicleState, dtheta_actual: float, new_speed: float, p: MotionParams) -> VehicleState:
    """单步积分：yaw' = wrap(yaw + Δθ)，position' = position + v·dt·(cos yaw', sin yaw')"""
    yaw = wrap_angle(state.theta_v + dtheta_actual)
    step = new_speed * p.dt
    position = Vec2(state.position.x + step * math.cos(yaw), state.position.y + step * math.sin(yaw))
    return VehicleState(position=position, theta_v=yaw, speed=new_speed)
