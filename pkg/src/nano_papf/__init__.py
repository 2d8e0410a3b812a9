# -*- coding: utf-8 -*-
"""
Nano-PAPF - 二维人工势场路径规划（TAPF 与预测人工势场 PAPF）

读源码可以看到一个无人艇势场规划器的完整组成：

1. 几何 (geom.py)
   - Vec2 / Circle / ConvexPolygon: 向量与障碍物
   - closest_point / tangent_cone: 最近点与切线锥
   - wrap_angle / angle_diff: 角度归一化

2. 势场 (fields.py)
   - attractive / repulsive_single / predictive_single: 三种势场力
   - evaluate_fields: 按方法变体求合力

3. 运动学 (dynamics.py)
   - limit_turn: 转角限幅 (AL)
   - adjust_velocity: 三段式速度调节 (VA)
   - integrate: 单步积分

4. 规划器 (planner.py)
   - plan: 主循环，直到 Success / LocalMinimum / Collision / StepBudgetExhausted

5. 基准 (bench.py)
   - builtin_scenario: single_circle / crescent / reachability_fan
   - compute_metrics / run_comparison: 指标与对比表

6. 文件与产物 (scenario_file.py, artifacts.py)
   - JSON 场景文件、参数配置、轨迹 CSV、SVG 图、指标报表

7. 命令行 (cli.py)
   - nano-papf run / compare / schema

快速开始:
    >>> from nano_papf import builtin_scenario, run_comparison, load_profile, MethodVariant
    >>>
    >>> scenario = builtin_scenario("single_circle")
    >>> table = run_comparison(
    ...     scenario,
    ...     [MethodVariant.TAPF, MethodVariant.PAPF],
    ...     load_profile("calibrated"),
    ... )
    >>> for row in table.rows:
    ...     print(row.variant.label, row.metrics.steps_taken, round(row.metrics.max_turn_deg, 1))
"""

__version__ = "0.1.0"

# 几何模块
from .geom import (
    PapfError,
    InvalidInputError,
    InsideObstacleError,
    Vec2,
    TangentCone,
    Obstacle,
    Circle,
    ConvexPolygon,
    FacingObstacle,
    wrap_angle,
    angle_diff,
    closest_point,
    tangent_cone,
    group_obstacles,
)

# 方法变体
from .variants import MethodVariant

# 势场模块
from .fields import (
    FieldParams,
    ForceSample,
    FieldBreakdown,
    attractive,
    repulsive_single,
    repulsive_total,
    predictive_single,
    predictive_facing,
    predictive_total,
    evaluate_fields,
    total_force,
)

# 运动学模块
from .dynamics import (
    VehicleState,
    MotionParams,
    ZeroGradientError,
    ideal_turn,
    limit_turn,
    adjust_velocity,
    integrate,
)

# 规划器模块
from .planner import (
    PlannerConfig,
    PlanResult,
    Termination,
    TrajectorySample,
    InvalidScenarioError,
    plan,
    check_termination,
)

# 基准模块
from .bench import (
    Scenario,
    Metrics,
    ComparisonRow,
    ComparisonTable,
    UnknownScenarioError,
    InsufficientDataError,
    ComparisonError,
    builtin_scenario,
    compute_metrics,
    run_comparison,
    signed_area,
)

# 场景文件与参数配置
from .scenario_file import (
    ScenarioFileError,
    load_scenario,
    dump_scenario,
    resolve_scenario,
    load_profile,
    scenario_json_schema,
)

# 产物
from .artifacts import (
    ArtifactError,
    write_trajectory_csv,
    read_trajectory_csv,
    plot_trajectories_svg,
    plot_profile_svg,
    write_metrics_json,
    format_metrics_table,
)


__all__ = [
    # 版本
    "__version__",
    # 几何
    "PapfError",
    "InvalidInputError",
    "InsideObstacleError",
    "Vec2",
    "TangentCone",
    "Obstacle",
    "Circle",
    "ConvexPolygon",
    "FacingObstacle",
    "wrap_angle",
    "angle_diff",
    "closest_point",
    "tangent_cone",
    "group_obstacles",
    # 方法变体
    "MethodVariant",
    # 势场
    "FieldParams",
    "ForceSample",
    "FieldBreakdown",
    "attractive",
    "repulsive_single",
    "repulsive_total",
    "predictive_single",
    "predictive_facing",
    "predictive_total",
    "evaluate_fields",
    "total_force",
    # 运动学
    "VehicleState",
    "MotionParams",
    "ZeroGradientError",
    "ideal_turn",
    "limit_turn",
    "adjust_velocity",
    "integrate",
    # 规划器
    "PlannerConfig",
    "PlanResult",
    "Termination",
    "TrajectorySample",
    "InvalidScenarioError",
    "plan",
    "check_termination",
    # 基准
    "Scenario",
    "Metrics",
    "ComparisonRow",
    "ComparisonTable",
    "UnknownScenarioError",
    "InsufficientDataError",
    "ComparisonError",
    "builtin_scenario",
    "compute_metrics",
    "run_comparison",
    "signed_area",
    # 场景文件
    "ScenarioFileError",
    "load_scenario",
    "dump_scenario",
    "resolve_scenario",
    "load_profile",
    "scenario_json_schema",
    # 产物
    "ArtifactError",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "plot_trajectories_svg",
    "plot_profile_svg",
    "write_metrics_json",
    "format_metrics_table",
]
