# -*- coding: utf-8 -*-
"""
场景文件模块 - JSON 场景文件、参数配置文件与 JSON Schema

本模块负责规划器与文件之间的转换：
1. load_scenario / dump_scenario - 读写 JSON 场景文件
2. resolve_scenario - 内置场景名或文件路径，统一得到 Scenario
3. load_profile - 读取随包发布（或用户提供）的参数配置
4. validate_overrides - 校验命令行 --set 之类的零散覆盖项
5. scenario_json_schema - 导出场景文件的 JSON Schema

学习要点：
- 文件校验交给 Pydantic 模型完成，校验失败时把出错字段的路径
  （如 goals.0.x）写进一行诊断信息
- 参数段 (field / motion / planner) 的 Pydantic 模型由参数 dataclass
  动态生成，字段描述从 dataclass 的 docstring 中解析（docstring_parser）
- 文件里的角度用角度制（dtheta_max_deg 等），内部一律用弧度
- 文件中未出现的参数保持原值，不做任何往返换算，
  因此编码了内置场景的文件与内置场景得到逐位相同的规划结果

场景文件格式：
    {
      "name": "my_scene",
      "start": {"x": 0, "y": 0, "yaw_deg": null, "speed": 0.1},
      "goals": [{"x": 400, "y": 0}],
      "obstacles": [
        {"type": "circle", "cx": 200, "cy": 0.5, "r": 50},
        {"type": "polygon", "vertices": [[190, -40], [210, -40], [210, 40], [190, 40]], "group": "wall"}
      ],
      "params": {"field": {...}, "motion": {...}, "planner": {...}}
    }

yaw_deg 缺省（或为 null）表示起始航向指向各自的目标。
"""

from __future__ import annotations

import json
import logging
import math
from importlib import resources
from pathlib import Path
from typing import Annotated, Any, Literal, Union

from docstring_parser import parse
from pydantic import BaseModel, ConfigDict, Field, ValidationError, create_model

from .bench import BUILTIN_SCENARIOS, Scenario, apply_overrides, builtin_scenario
from .dynamics import MotionParams, VehicleState
from .fields import FieldParams
from .geom import Obstacle, PapfError, Vec2
from .planner import PlannerConfig

logger = logging.getLogger(__name__)

PROFILE_PACKAGE = "nano_papf.profiles"
DEFAULT_PROFILE = "calibrated"


class ScenarioFileError(PapfError):
    """场景文件或配置文件无法读取、格式错误或内容不合法"""


# ============== 参数段模型（由 dataclass 动态生成） ==============

_DEGREE_FIELDS = {"dtheta_max", "theta1", "theta2"}


def _params_model(name: str, cls: type, include: list[str] | None = None) -> type[BaseModel]:
    """从参数 dataclass 生成 Pydantic 模型

    所有字段可选（None 表示沿用原值）；描述来自 docstring 的 Args 段。
    运动学参数中的角度字段改名为 *_deg。
    """
    docstring = parse(cls.__doc__ or "")
    params_doc = {p.arg_name: p.description for p in docstring.params}
    fields: dict[str, Any] = {}
    for field_name, dc_field in cls.__dataclass_fields__.items():
        if include is not None and field_name not in include:
            continue
        description = params_doc.get(field_name)
        key = field_name
        annotation: Any = float | None
        if cls is MotionParams and field_name in _DEGREE_FIELDS:
            key = f"{field_name}_deg"
            description = f"{description.replace('（弧度）', '')}（角度制）" if description else "角度制"
        if field_name in ("max_steps", "stuck_window"):
            annotation = int | None
        elif field_name == "heading_source":
            annotation = Literal["yaw", "ideal"] | None
        fields[key] = (annotation, Field(default=None, description=description))
    model = create_model(name, __config__=ConfigDict(extra="forbid"), **fields)
    model.__doc__ = docstring.short_description
    return model


FieldSection = _params_model("FieldSection", FieldParams)
MotionSection = _params_model("MotionSection", MotionParams)
PlannerSection = _params_model(
    "PlannerSection",
    PlannerConfig,
    include=["goal_tolerance", "max_steps", "stuck_window", "stuck_displacement", "heading_source"],
)


class ParamsModel(BaseModel):
    """参数覆盖：field / motion / planner 三段，均可省略"""
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    field_: FieldSection | None = Field(default=None, alias="field", description="势场参数")
    motion: MotionSection | None = Field(default=None, description="运动学参数")
    planner: PlannerSection | None = Field(default=None, description="规划器参数")

    def to_overrides(self) -> dict:
        # 子类可能带 name 等描述字段，这里只导出三个参数段
        data = self.model_dump(by_alias=True, exclude_none=True, include={"field_", "motion", "planner"})
        return {k: v for k, v in data.items() if v}


class ProfileModel(ParamsModel):
    """参数配置文件"""
    name: str | None = None
    provenance: str | None = Field(default=None, description="参数来源说明")


# ============== 场景模型 ==============

class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class StartModel(_Strict):
    """起始状态"""
    x: float
    y: float
    yaw_deg: float | None = Field(default=None, description="起始航向（角度制），缺省时指向各自的目标")
    speed: float | None = Field(default=None, ge=0, description="起始速度，缺省时取 motion.v_c")


class GoalModel(_Strict):
    """目标点"""
    x: float
    y: float


class CircleModel(_Strict):
    """圆形障碍物"""
    type: Literal["circle"]
    cx: float
    cy: float
    r: float = Field(gt=0)
    group: str | None = Field(default=None, description="同组障碍物在预测势中被视为一个整体")


class PolygonModel(_Strict):
    """凸多边形障碍物，顶点逆时针"""
    type: Literal["polygon"]
    vertices: list[tuple[float, float]] = Field(min_length=3)
    group: str | None = Field(default=None, description="同组障碍物在预测势中被视为一个整体")


ObstacleModel = Annotated[Union[CircleModel, PolygonModel], Field(discriminator="type")]


class ScenarioFileModel(_Strict):
    """场景文件"""
    name: str | None = None
    start: StartModel
    goals: list[GoalModel] = Field(min_length=1)
    obstacles: list[ObstacleModel] = Field(default_factory=list)
    params: ParamsModel | None = None


# ============== 读写 ==============

def _format_validation_error(source: str, exc: ValidationError) -> str:
    first = exc.errors()[0]
    loc = ".".join(str(part) for part in first.get("loc", ())) or "<root>"
    return f"{source}: {loc}: {first.get('msg', 'invalid value')}"


def _read_json(path: Path) -> Any:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioFileError(f"{path}: 无法读取文件 ({exc.strerror or exc})") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFileError(f"{path}: JSON 语法错误，第 {exc.lineno} 行第 {exc.colno} 列: {exc.msg}") from exc


def validate_overrides(data: Any, source: str = "<overrides>") -> dict:
    """按参数段模型校验覆盖项，返回规整后的字典（None 项被丢弃）"""
    try:
        return ParamsModel.model_validate(data).to_overrides()
    except ValidationError as exc:
        raise ScenarioFileError(_format_validation_error(source, exc)) from exc


def scenario_from_dict(data: Any, source: str = "<scenario>", default_name: str = "scenario") -> Scenario:
    """校验并转换场景字典"""
    try:
        model = ScenarioFileModel.model_validate(data)
    except ValidationError as exc:
        raise ScenarioFileError(_format_validation_error(source, exc)) from exc

    overrides = model.params.to_overrides() if model.params else {}
    motion = overrides.get("motion", {})
    v_c = float(motion.get("v_c", MotionParams().v_c))
    v_max = float(motion.get("v_max", MotionParams().v_max))
    if model.start.speed is not None and model.start.speed > v_max:
        raise ScenarioFileError(
            f"{source}: start.speed: {model.start.speed} exceeds motion.v_max {v_max}"
        )

    obstacles = []
    for i, obs in enumerate(model.obstacles):
        try:
            obstacles.append(Obstacle.from_dict(obs.model_dump(exclude_none=True)))
        except PapfError as exc:
            raise ScenarioFileError(f"{source}: obstacles.{i}: {exc}") from exc

    start = model.start
    try:
        return Scenario(
            name=model.name or default_name,
            start=VehicleState(
                position=Vec2(start.x, start.y),
                theta_v=math.radians(start.yaw_deg) if start.yaw_deg is not None else 0.0,
                speed=start.speed if start.speed is not None else v_c,
            ),
            goals=tuple(Vec2(g.x, g.y) for g in model.goals),
            obstacles=tuple(obstacles),
            overrides=overrides,
            aim_at_goal=start.yaw_deg is None,
        )
    except PapfError as exc:
        raise ScenarioFileError(f"{source}: {exc}") from exc


def load_scenario(path: str | Path) -> Scenario:
    """读取 JSON 场景文件

    Raises:
        ScenarioFileError: 文件不可读、JSON 语法错误或字段不合法
    """
    path = Path(path)
    return scenario_from_dict(_read_json(path), source=str(path), default_name=path.stem)


def scenario_to_dict(scenario: Scenario) -> dict:
    """把场景转换为文件格式的字典（浮点数保持全精度）"""
    start: dict[str, Any] = {
        "x": scenario.start.position.x,
        "y": scenario.start.position.y,
        "speed": scenario.start.speed,
    }
    if not scenario.aim_at_goal:
        start["yaw_deg"] = math.degrees(scenario.start.theta_v)
    data: dict[str, Any] = {
        "name": scenario.name,
        "start": start,
        "goals": [{"x": g.x, "y": g.y} for g in scenario.goals],
        "obstacles": [obs.to_dict() for obs in scenario.obstacles],
    }
    if scenario.overrides:
        data["params"] = scenario.overrides
    return data


def dump_scenario(scenario: Scenario, path: str | Path) -> Path:
    """把场景写成 JSON 文件"""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(scenario_to_dict(scenario), indent=2, ensure_ascii=False), encoding="utf-8")
    except OSError as exc:
        raise ScenarioFileError(f"{path}: 无法写入文件 ({exc.strerror or exc})") from exc
    return path


def resolve_scenario(source: str) -> Scenario:
    """内置场景名或场景文件路径

    Raises:
        UnknownScenarioError: 既不是内置场景名，也不是已存在的文件
        ScenarioFileError: 文件内容不合法
    """
    if source in BUILTIN_SCENARIOS:
        return builtin_scenario(source)
    path = Path(source)
    if path.suffix.lower() == ".json" or path.exists():
        if not path.exists():
            raise ScenarioFileError(f"{path}: 文件不存在")
        return load_scenario(path)
    return builtin_scenario(source)


# ============== 参数配置 ==============

def available_profiles() -> list[str]:
    """随包发布的配置名"""
    root = resources.files(PROFILE_PACKAGE)
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_profile_model(name_or_path: str = DEFAULT_PROFILE) -> ProfileModel:
    path = Path(name_or_path)
    if path.suffix.lower() == ".json" or path.exists():
        data, source = _read_json(path), str(path)
    else:
        resource = resources.files(PROFILE_PACKAGE) / f"{name_or_path}.json"
        if not resource.is_file():
            choices = ", ".join(available_profiles())
            raise ScenarioFileError(f"profile 未知: {name_or_path!r}（可选: {choices}）")
        data, source = json.loads(resource.read_text(encoding="utf-8")), f"profile:{name_or_path}"
    try:
        return ProfileModel.model_validate(data)
    except ValidationError as exc:
        raise ScenarioFileError(_format_validation_error(source, exc)) from exc


def load_profile(name_or_path: str = DEFAULT_PROFILE, base: PlannerConfig | None = None) -> PlannerConfig:
    """读取参数配置并叠加到 base（默认 PlannerConfig()）上"""
    model = load_profile_model(name_or_path)
    if model.provenance:
        logger.debug("profile %s: %s", model.name or name_or_path, model.provenance)
    try:
        return apply_overrides(base or PlannerConfig(), model.to_overrides())
    except PapfError as exc:
        raise ScenarioFileError(f"profile {name_or_path}: {exc}") from exc


# ============== JSON Schema ==============

def _strip_titles(node: Any) -> Any:
    if isinstance(node, dict):
        return {k: _strip_titles(v) for k, v in node.items() if k != "title" or not isinstance(v, str)}
    if isinstance(node, list):
        return [_strip_titles(v) for v in node]
    return node


def scenario_json_schema() -> dict:
    """场景文件的 JSON Schema（去掉 Pydantic 自动生成的 title）"""
    schema = ScenarioFileModel.model_json_schema(by_alias=True)
    return _strip_titles(schema)
