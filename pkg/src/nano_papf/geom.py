# -*- coding: utf-8 -*-
"""
几何模块 - 平面向量、角度运算与障碍物形状查询

本模块定义了规划器用到的全部几何原语：
1. Vec2 - 平面向量（位置、力都用它表示）
2. wrap_angle / angle_diff - 圆周上的角度运算，结果统一落在 (-π, π]
3. Obstacle - 障碍物基类，派生出 Circle 和 ConvexPolygon
4. TangentCone - 从某点看障碍物的切线锥（两条切线及其角平分线）
5. FacingObstacle - "正对障碍物"，把同一 group 的多个凸块当成一个整体

学习要点：
- 所有角度在内部都用弧度，只有 CLI 和文件边界才用角度制
- 切线锥用 (theta_ib, half_width) 表示，而不是 (theta_t1, theta_t2)，
  这样锥跨过 ±π 分界线时不需要任何分支判断
- 凸多边形的切线锥取"所有顶点在视角上的张角范围"，对凸形状这就是真实的切线
- 所有几何对象构造后不可变，查询都是纯函数，可以放心并行

Example:
    >>> circle = Circle(center=Vec2(0.0, 0.0), radius=1.0)
    >>> q_oi, d = closest_point(circle, Vec2(3.0, 0.0))
    >>> d
    2.0
    >>> cone = tangent_cone(circle, Vec2(2.0, 0.0))
    >>> round(math.degrees(cone.half_width), 6)
    30.0
"""

from __future__ import annotations

import math
from abc import abstractmethod
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


# ============== 错误类型 ==============

class PapfError(ValueError):
    """nano-papf 所有领域错误的基类"""


class InvalidInputError(PapfError):
    """输入非法：非有限数值、形状不合法、参数越界等"""


class InsideObstacleError(PapfError):
    """查询点位于障碍物内部或边界上

    规划器会把它当作碰撞处理。
    """


# ============== 角度运算 ==============

# 角度统一用 float 表示（弧度），取值范围 (-π, π]
Angle = float

_TWO_PI = 2.0 * math.pi


def _require_finite(name: str, *values: float) -> None:
    for value in values:
        if not math.isfinite(value):
            raise InvalidInputError(f"{name} 必须是有限数值，实际为 {value!r}")


def wrap_angle(raw: float) -> Angle:
    """把任意弧度归一化到 (-π, π]

    已在区间内的值原样返回，因此 wrap_angle 严格幂等。
    区间端点取 +π（-π 会被映射为 +π）。

    Args:
        raw: 任意有限弧度值

    Returns:
        与 raw 模 2π 同余、且位于 (-π, π] 的角度

    Raises:
        InvalidInputError: raw 不是有限数值
    """
    raw = float(raw)
    _require_finite("角度", raw)
    if -math.pi < raw <= math.pi:
        return raw
    wrapped = float(np.remainder(raw + math.pi, _TWO_PI)) - math.pi
    if wrapped <= -math.pi:
        wrapped = math.pi
    return wrapped


def angle_diff(a: Angle, b: Angle) -> float:
    """最短带符号旋转 a - b，结果位于 (-π, π]

    恰好相差 π 时取 +π。

    Example:
        >>> round(math.degrees(angle_diff(math.radians(170), math.radians(-170))), 9)
        -20.0
    """
    return wrap_angle(a - b)


# ============== Vec2 向量 ==============

@dataclass(frozen=True)
class Vec2:
    """平面向量

    位置、力、位移都用 Vec2 表示，单位是抽象的"像素"。
    构造时检查分量必须有限（不允许 NaN / Inf）。

    Example:
        >>> v = Vec2(3.0, 4.0)
        >>> v.norm()
        5.0
        >>> (v - Vec2(3.0, 0.0)).angle() == math.pi / 2
        True
    """
    x: float
    y: float

    def __post_init__(self) -> None:
        _require_finite("Vec2 分量", self.x, self.y)

    @classmethod
    def zero(cls) -> Vec2:
        return cls(0.0, 0.0)

    @classmethod
    def from_angle(cls, theta: float, length: float = 1.0) -> Vec2:
        """按方向角和长度构造向量"""
        return cls(length * math.cos(theta), length * math.sin(theta))

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, k: float) -> Vec2:
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __neg__(self) -> Vec2:
        return Vec2(-self.x, -self.y)

    def dot(self, other: Vec2) -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: Vec2) -> float:
        """二维叉积 (z 分量)，正值表示 other 在 self 的左侧"""
        return self.x * other.y - self.y * other.x

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def distance_to(self, other: Vec2) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def angle(self) -> Angle:
        """方向角，使用两参数反正切以保留象限信息"""
        return math.atan2(self.y, self.x)

    def unit(self) -> Vec2:
        """单位向量；零向量没有方向，会抛出 InvalidInputError"""
        length = self.norm()
        if length == 0.0:
            raise InvalidInputError("零向量没有方向")
        return Vec2(self.x / length, self.y / length)

    def rotated(self, phi: float) -> Vec2:
        """绕原点逆时针旋转 phi 弧度"""
        c, s = math.cos(phi), math.sin(phi)
        return Vec2(c * self.x - s * self.y, s * self.x + c * self.y)

    def is_zero(self) -> bool:
        return self.x == 0.0 and self.y == 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


# ============== 切线锥 ==============

@dataclass(frozen=True)
class TangentCone:
    """从点 q 看障碍物所张的角度区间

    核心属性：
        - theta_ib: 两条切线的角平分线方向
        - half_width: 半张角，点在形状外部时小于 π/2（单个凸障碍物）

    两条切线方向 theta_t1 / theta_t2 由上面两个量推出，同样归一化。
    """
    theta_ib: Angle
    half_width: float

    @property
    def theta_t1(self) -> Angle:
        """较小（顺时针侧）的切线方向"""
        return wrap_angle(self.theta_ib - self.half_width)

    @property
    def theta_t2(self) -> Angle:
        """较大（逆时针侧）的切线方向"""
        return wrap_angle(self.theta_ib + self.half_width)

    def contains_direction(self, theta: Angle) -> bool:
        """方向 theta 是否落在锥内（含边界）"""
        return abs(angle_diff(theta, self.theta_ib)) <= self.half_width


def _cone_from_offsets(reference: Angle, offsets: Iterable[tuple[float, float]]) -> TangentCone:
    """由相对参考方向的 (下界, 上界) 偏角集合合成一个锥"""
    lo = math.inf
    hi = -math.inf
    for low, high in offsets:
        lo = min(lo, low)
        hi = max(hi, high)
    return TangentCone(theta_ib=wrap_angle(reference + (lo + hi) / 2.0), half_width=(hi - lo) / 2.0)


def _cone_from_largest_gap(intervals: Sequence[tuple[Angle, float]], fallback: Angle) -> TangentCone:
    """由绝对方向区间 (起点, 宽度) 合成并集锥：整圈去掉最大的空隙

    比最大空隙小的缝隙被填上，和按偏角取包络的结果一致。
    区间覆盖整圈时半张角取 π，角平分线取 fallback。
    """
    items = sorted((start % _TWO_PI, width) for start, width in intervals)
    n = len(items)
    # 绕两圈：第二圈的每个起点之前的覆盖已包含跨过 2π 的区间
    laps = items + [(start + _TWO_PI, width) for start, width in items]
    cover_end = -math.inf
    gap_start, gap = 0.0, 0.0
    for i, (start, width) in enumerate(laps):
        if i >= n and start - cover_end > gap:
            gap_start, gap = cover_end, start - cover_end
        cover_end = max(cover_end, start + width)
    if gap <= 0.0:
        return TangentCone(theta_ib=wrap_angle(fallback), half_width=math.pi)
    return TangentCone(theta_ib=wrap_angle(gap_start + gap / 2.0 + math.pi), half_width=math.pi - gap / 2.0)


# ============== 障碍物 ==============

class Obstacle:
    """障碍物基类 - 定义形状查询的统一接口

    所有障碍物都支持：
    1. contains: 点是否在内部或边界上
    2. closest_point: 边界上离查询点最近的点及距离
    3. tangent_cone: 从查询点看过去的切线锥

    group 是可选的分组标签：同一 group 的障碍物在预测势场中被当作
    一个"正对障碍物"（例如由多个凸块拼成的月牙形）。
    """

    group: str | None

    @abstractmethod
    def contains(self, q: Vec2) -> bool:
        """q 在内部或边界上时返回 True"""

    @abstractmethod
    def closest_point(self, q: Vec2) -> tuple[Vec2, float]:
        """返回 (q_oi, 距离)；q 不在外部时抛出 InsideObstacleError"""

    @abstractmethod
    def tangent_cone(self, q: Vec2) -> TangentCone:
        """返回从 q 看过去的切线锥；q 不在外部时抛出 InsideObstacleError"""

    @property
    @abstractmethod
    def centroid(self) -> Vec2:
        """形心（圆心或顶点均值）"""

    @abstractmethod
    def boundary_distances(self, points: np.ndarray) -> np.ndarray:
        """一组点 (N, 2) 到边界的距离，内部或边界上的点记为 0"""

    @abstractmethod
    def translated(self, dx: float, dy: float) -> Obstacle:
        """整体平移后的新障碍物"""

    @abstractmethod
    def to_dict(self) -> dict:
        """转换为场景文件中的字典格式"""

    def to_shapely(self):
        """转换为 shapely 几何对象（用于凹性、包络等集合运算）"""
        raise NotImplementedError

    @staticmethod
    def from_dict(data: dict) -> Obstacle:
        """从场景文件字典创建障碍物"""
        kind = data.get("type")
        group = data.get("group")
        if kind == "circle":
            return Circle(center=Vec2(float(data["cx"]), float(data["cy"])), radius=float(data["r"]), group=group)
        if kind == "polygon":
            return ConvexPolygon(
                vertices=tuple(Vec2(float(x), float(y)) for x, y in data["vertices"]),
                group=group,
            )
        raise InvalidInputError(f"obstacles.type 只能是 circle 或 polygon，实际为 {kind!r}")


@dataclass(frozen=True)
class Circle(Obstacle):
    """圆形障碍物

    Example:
        >>> c = Circle(center=Vec2(0.0, 0.0), radius=1.0)
        >>> c.contains(Vec2(0.5, 0.0))
        True
    """
    center: Vec2
    radius: float
    group: str | None = None

    def __post_init__(self) -> None:
        _require_finite("圆半径", self.radius)
        if self.radius <= 0:
            raise InvalidInputError(f"圆半径必须大于 0，实际为 {self.radius}")

    @property
    def centroid(self) -> Vec2:
        return self.center

    def contains(self, q: Vec2) -> bool:
        return q.distance_to(self.center) <= self.radius

    def closest_point(self, q: Vec2) -> tuple[Vec2, float]:
        offset = q - self.center
        length = offset.norm()
        if length <= self.radius:
            raise InsideObstacleError(f"点 {q.as_tuple()} 位于圆形障碍物内部")
        q_oi = Vec2(
            self.center.x + self.radius * offset.x / length,
            self.center.y + self.radius * offset.y / length,
        )
        return q_oi, length - self.radius

    def tangent_cone(self, q: Vec2) -> TangentCone:
        to_center = self.center - q
        length = to_center.norm()
        if length <= self.radius:
            raise InsideObstacleError(f"点 {q.as_tuple()} 位于圆形障碍物内部")
        return TangentCone(theta_ib=to_center.angle(), half_width=math.asin(self.radius / length))

    def boundary_distances(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        d = np.hypot(pts[:, 0] - self.center.x, pts[:, 1] - self.center.y) - self.radius
        return np.maximum(d, 0.0)

    def translated(self, dx: float, dy: float) -> Circle:
        return Circle(center=self.center + Vec2(dx, dy), radius=self.radius, group=self.group)

    def to_dict(self) -> dict:
        data = {"type": "circle", "cx": self.center.x, "cy": self.center.y, "r": self.radius}
        if self.group is not None:
            data["group"] = self.group
        return data

    def to_shapely(self):
        from shapely.geometry import Point

        return Point(self.center.x, self.center.y).buffer(self.radius, quad_segs=64)


@dataclass(frozen=True)
class ConvexPolygon(Obstacle):
    """凸多边形障碍物，顶点按逆时针顺序给出

    构造时校验：至少 3 个顶点、严格凸、逆时针、不自交。

    Example:
        >>> square = ConvexPolygon.from_points([(-1, -1), (1, -1), (1, 1), (-1, 1)])
        >>> square.closest_point(Vec2(3.0, 0.0))
        (Vec2(x=1.0, y=0.0), 2.0)
    """
    vertices: tuple[Vec2, ...]
    group: str | None = None
    _array: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        vertices = tuple(self.vertices)
        object.__setattr__(self, "vertices", vertices)
        if len(vertices) < 3:
            raise InvalidInputError(f"多边形至少需要 3 个顶点，实际为 {len(vertices)}")
        pts = np.array([v.as_tuple() for v in vertices], dtype=float)
        edges = np.roll(pts, -1, axis=0) - pts
        turns = edges[:, 0] * np.roll(edges, -1, axis=0)[:, 1] - edges[:, 1] * np.roll(edges, -1, axis=0)[:, 0]
        if np.any(turns <= 0):
            raise InvalidInputError("多边形必须是严格凸的，且顶点按逆时针排列")
        # 每个转角为正且总转角为 2π 才是简单（不自交）的凸多边形
        headings = np.arctan2(edges[:, 1], edges[:, 0])
        total_turn = float(np.sum(np.remainder(np.roll(headings, -1) - headings, 2.0 * np.pi)))
        if not math.isclose(total_turn, 2.0 * math.pi, rel_tol=1e-9):
            raise InvalidInputError("多边形自交：顶点绕行超过一周")
        object.__setattr__(self, "_array", pts)

    @classmethod
    def from_points(cls, points: Sequence[Sequence[float]], group: str | None = None) -> ConvexPolygon:
        return cls(vertices=tuple(Vec2(float(x), float(y)) for x, y in points), group=group)

    @property
    def centroid(self) -> Vec2:
        mean = self._array.mean(axis=0)
        return Vec2(float(mean[0]), float(mean[1]))

    def _edge_cross(self, q: Vec2) -> np.ndarray:
        pts = self._array
        edges = np.roll(pts, -1, axis=0) - pts
        return edges[:, 0] * (q.y - pts[:, 1]) - edges[:, 1] * (q.x - pts[:, 0])

    def contains(self, q: Vec2) -> bool:
        return bool(np.all(self._edge_cross(q) >= 0.0))

    def closest_point(self, q: Vec2) -> tuple[Vec2, float]:
        if self.contains(q):
            raise InsideObstacleError(f"点 {q.as_tuple()} 位于多边形障碍物内部")
        pts = self._array
        edges = np.roll(pts, -1, axis=0) - pts
        rel = np.array([q.x, q.y]) - pts
        t = np.clip(np.sum(rel * edges, axis=1) / np.sum(edges * edges, axis=1), 0.0, 1.0)
        feet = pts + t[:, None] * edges
        dists = np.hypot(q.x - feet[:, 0], q.y - feet[:, 1])
        best = int(np.argmin(dists))
        return Vec2(float(feet[best, 0]), float(feet[best, 1])), float(dists[best])

    def tangent_cone(self, q: Vec2) -> TangentCone:
        if self.contains(q):
            raise InsideObstacleError(f"点 {q.as_tuple()} 位于多边形障碍物内部")
        reference = (self.centroid - q).angle()
        offsets = [
            angle_diff(math.atan2(v.y - q.y, v.x - q.x), reference)
            for v in self.vertices
        ]
        return _cone_from_offsets(reference, [(min(offsets), max(offsets))])

    def boundary_distances(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        verts = self._array
        edges = np.roll(verts, -1, axis=0) - verts
        # (N, E) 的点-边相对坐标
        rel_x = pts[:, 0, None] - verts[None, :, 0]
        rel_y = pts[:, 1, None] - verts[None, :, 1]
        inside = np.all(edges[None, :, 0] * rel_y - edges[None, :, 1] * rel_x >= 0.0, axis=1)
        t = (rel_x * edges[None, :, 0] + rel_y * edges[None, :, 1]) / np.sum(edges * edges, axis=1)[None, :]
        t = np.clip(t, 0.0, 1.0)
        d = np.hypot(rel_x - t * edges[None, :, 0], rel_y - t * edges[None, :, 1]).min(axis=1)
        return np.where(inside, 0.0, d)

    def translated(self, dx: float, dy: float) -> ConvexPolygon:
        shift = Vec2(dx, dy)
        return ConvexPolygon(vertices=tuple(v + shift for v in self.vertices), group=self.group)

    def to_dict(self) -> dict:
        data = {"type": "polygon", "vertices": [[v.x, v.y] for v in self.vertices]}
        if self.group is not None:
            data["group"] = self.group
        return data

    def to_shapely(self):
        from shapely.geometry import Polygon

        return Polygon([v.as_tuple() for v in self.vertices])


# ============== 模块级查询函数 ==============

def closest_point(obs: Obstacle, q: Vec2) -> tuple[Vec2, float]:
    """障碍物边界上离 q 最近的点 q_oi 及距离 d(q, q_oi)

    Raises:
        InsideObstacleError: q 在障碍物内部或边界上
    """
    return obs.closest_point(q)


def tangent_cone(obs: Obstacle, q: Vec2) -> TangentCone:
    """从 q 看障碍物的切线锥

    圆：角平分线指向圆心，半张角 arcsin(R / |q - c|)。
    凸多边形：所有顶点视角范围的中线与半宽。

    Raises:
        InsideObstacleError: q 在障碍物内部或边界上
    """
    return obs.tangent_cone(q)


def inside_any(obstacles: Sequence[Obstacle], q: Vec2) -> bool:
    """q 是否在任一障碍物内部或边界上"""
    return any(obs.contains(q) for obs in obstacles)


def nearest_distance(obstacles: Sequence[Obstacle], q: Vec2) -> float:
    """q 到最近障碍物边界的距离；在某个障碍物内部时返回 0"""
    best = math.inf
    for obs in obstacles:
        try:
            _, d = obs.closest_point(q)
        except InsideObstacleError:
            return 0.0
        best = min(best, d)
    return best


# ============== 正对障碍物（分组） ==============

@dataclass(frozen=True)
class FacingObstacle:
    """预测势场中的"正对障碍物"

    未分组的障碍物单独成为一个正对障碍物；同一 group 的多个障碍物
    合成一个整体：
    - 最近点取所有成员最近点中距离最小者
    - 切线锥取成员切线锥的并集，参考方向指向成员形心的均值；
      查询点被成员半包围时取整圈去掉最大空隙，半张角不超过 π
    """
    members: tuple[Obstacle, ...]
    label: str | None = None

    def closest_point(self, q: Vec2) -> tuple[Vec2, float]:
        best: tuple[Vec2, float] | None = None
        for obs in self.members:
            candidate = obs.closest_point(q)
            if best is None or candidate[1] < best[1]:
                best = candidate
        return best

    def tangent_cone(self, q: Vec2) -> TangentCone:
        if len(self.members) == 1:
            return self.members[0].tangent_cone(q)
        cx = sum(obs.centroid.x for obs in self.members) / len(self.members)
        cy = sum(obs.centroid.y for obs in self.members) / len(self.members)
        reference = math.atan2(cy - q.y, cx - q.x)
        cones = [obs.tangent_cone(q) for obs in self.members]
        offsets = []
        for cone in cones:
            center = angle_diff(cone.theta_ib, reference)
            offsets.append((center - cone.half_width, center + cone.half_width))
        if max(hi for _, hi in offsets) - min(lo for lo, _ in offsets) < math.pi:
            return _cone_from_offsets(reference, offsets)
        # q 被成员半包围（例如在月牙的凹口里），按整圈上的空隙求并集
        q_oi, _ = self.closest_point(q)
        return _cone_from_largest_gap(
            [(cone.theta_ib - cone.half_width, 2.0 * cone.half_width) for cone in cones],
            fallback=math.atan2(q_oi.y - q.y, q_oi.x - q.x),
        )


def group_obstacles(obstacles: Sequence[Obstacle]) -> list[FacingObstacle]:
    """按 group 标签把障碍物归并为正对障碍物

    顺序确定：按每个正对障碍物第一个成员在列表中出现的位置排序。
    """
    index_of: dict[str, int] = {}
    members: list[list[Obstacle]] = []
    for obs in obstacles:
        if obs.group is None:
            members.append([obs])
            continue
        if obs.group not in index_of:
            index_of[obs.group] = len(members)
            members.append([])
        members[index_of[obs.group]].append(obs)
    labels = {i: label for label, i in index_of.items()}
    return [FacingObstacle(members=tuple(group), label=labels.get(i)) for i, group in enumerate(members)]
