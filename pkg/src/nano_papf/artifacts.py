# -*- coding: utf-8 -*-
"""
产物模块 - 轨迹 CSV、SVG 图与指标报表

1. write_trajectory_csv / read_trajectory_csv - 表头 step,x,y,yaw_deg,speed，全精度浮点
2. plot_trajectories_svg - 障碍物（填充）、轨迹折线、起点与目标标记；
   PAPF 轨迹按预测力大小着色
3. plot_profile_svg - 航向角与速度随步数变化的曲线
4. write_metrics_json / format_metrics_table - 每个 (变体, 目标) 一条记录

图像只用于展示，没有数值约定。
"""

from __future__ import annotations

import csv
import json
import logging
import math
from pathlib import Path
from typing import Sequence

import numpy as np

from .bench import ComparisonTable, Scenario
from .geom import Circle, ConvexPolygon, PapfError
from .planner import PlanResult
from .variants import MethodVariant

logger = logging.getLogger(__name__)

CSV_FIELDS = ["step", "x", "y", "yaw_deg", "speed"]


class ArtifactError(PapfError):
    """产物无法写出（目录不可写等）"""


def _ensure_parent(path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ArtifactError(f"{path.parent}: 无法创建输出目录 ({exc.strerror or exc})") from exc
    return path


# ============== 轨迹 CSV ==============

def write_trajectory_csv(result: PlanResult, path: str | Path) -> Path:
    """每个采样点一行，浮点数用 repr 保证往返精确"""
    path = _ensure_parent(Path(path))
    try:
        with path.open("w", newline="", encoding="utf-8") as f:
            writer = csv.DictWriter(f, fieldnames=CSV_FIELDS)
            writer.writeheader()
            for sample in result.trajectory:
                state = sample.state
                writer.writerow({
                    "step": sample.step,
                    "x": repr(state.position.x),
                    "y": repr(state.position.y),
                    "yaw_deg": repr(math.degrees(state.theta_v)),
                    "speed": repr(state.speed),
                })
    except OSError as exc:
        raise ArtifactError(f"{path}: 无法写入 ({exc.strerror or exc})") from exc
    return path


def read_trajectory_csv(path: str | Path) -> dict[str, np.ndarray]:
    """读回轨迹 CSV，返回按列组织的数组"""
    with Path(path).open(newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    columns = {name: np.array([float(row[name]) for row in rows]) for name in CSV_FIELDS}
    columns["step"] = columns["step"].astype(int)
    return columns


# ============== SVG 图 ==============

def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _draw_obstacles(ax, scenario: Scenario) -> None:
    from matplotlib.patches import Circle as CirclePatch
    from matplotlib.patches import Polygon as PolygonPatch

    for obs in scenario.obstacles:
        if isinstance(obs, Circle):
            patch = CirclePatch(obs.center.as_tuple(), obs.radius)
        elif isinstance(obs, ConvexPolygon):
            patch = PolygonPatch([v.as_tuple() for v in obs.vertices], closed=True)
        else:
            continue
        patch.set_facecolor("tab:gray")
        patch.set_edgecolor("black")
        patch.set_alpha(0.6)
        ax.add_patch(patch)


def plot_trajectories_svg(
    scenario: Scenario,
    results: Sequence[PlanResult],
    path: str | Path,
    title: str | None = None,
) -> Path:
    """把一个或多个规划结果画到同一张 SVG 上"""
    from matplotlib.collections import LineCollection

    plt = _pyplot()
    path = _ensure_parent(Path(path))
    fig, ax = plt.subplots(figsize=(8, 5))
    try:
        _draw_obstacles(ax, scenario)
        for result in results:
            pts = result.positions()
            label = f"{result.variant.label} ({result.termination.value})"
            if result.variant is MethodVariant.PAPF and len(pts) > 1:
                segments = np.stack([pts[:-1], pts[1:]], axis=1)
                lines = LineCollection(segments, cmap="plasma", linewidths=2.0, label=label)
                lines.set_array(np.asarray(result.predictive_norms[1:], dtype=float))
                ax.add_collection(lines)
                fig.colorbar(lines, ax=ax, label="|F_prd|")
            else:
                ax.plot(pts[:, 0], pts[:, 1], linewidth=1.5, label=label)
        start = scenario.start.position
        ax.plot(start.x, start.y, "go", markersize=8, label="start", zorder=10)
        gx = [g.x for g in scenario.goals]
        gy = [g.y for g in scenario.goals]
        ax.plot(gx, gy, "b*", markersize=12, label="goal", zorder=10)
        ax.set_aspect("equal")
        ax.autoscale_view()
        ax.grid(True, alpha=0.2)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_title(title or scenario.name)
        ax.legend(loc="best", fontsize="small")
        fig.savefig(path, format="svg", bbox_inches="tight")
    except OSError as exc:
        raise ArtifactError(f"{path}: 无法写入 ({exc.strerror or exc})") from exc
    finally:
        plt.close(fig)
    return path


def plot_profile_svg(results: Sequence[PlanResult], path: str | Path, title: str | None = None) -> Path:
    """航向角（度）与速度随步数的变化"""
    plt = _pyplot()
    path = _ensure_parent(Path(path))
    fig, (ax_yaw, ax_speed) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    try:
        for result in results:
            steps = np.arange(len(result.trajectory))
            ax_yaw.plot(steps, np.degrees(result.yaws()), linewidth=1.0, label=result.variant.label)
            ax_speed.plot(steps, result.speeds(), linewidth=1.0, label=result.variant.label)
        ax_yaw.set_ylabel("yaw (deg)")
        ax_speed.set_ylabel("speed")
        ax_speed.set_xlabel("step")
        ax_yaw.grid(True, alpha=0.2)
        ax_speed.grid(True, alpha=0.2)
        ax_yaw.legend(loc="best", fontsize="small")
        if title:
            ax_yaw.set_title(title)
        fig.savefig(path, format="svg", bbox_inches="tight")
    except OSError as exc:
        raise ArtifactError(f"{path}: 无法写入 ({exc.strerror or exc})") from exc
    finally:
        plt.close(fig)
    return path


# ============== 指标报表 ==============

def metrics_records(table: ComparisonTable) -> list[dict]:
    return [row.to_record() for row in table.rows]


def write_metrics_json(table: ComparisonTable, path: str | Path) -> Path:
    path = _ensure_parent(Path(path))
    document = {
        "scenario": table.scenario,
        "variants": [v.value for v in table.variants],
        "reachable": {v.value: n for v, n in table.reachable_counts().items()},
        "records": metrics_records(table),
    }
    try:
        path.write_text(json.dumps(document, indent=2, ensure_ascii=False), encoding="utf-8")
    except OSError as exc:
        raise ArtifactError(f"{path}: 无法写入 ({exc.strerror or exc})") from exc
    return path


_TABLE_COLUMNS = [
    ("variant", 8, "s"),
    ("goal", 5, "d"),
    ("termination", 20, "s"),
    ("steps", 7, "d"),
    ("max_turn_deg", 13, ".3f"),
    ("path_length", 12, ".2f"),
    ("min_clearance", 14, ".3f"),
    ("mean_speed", 11, ".4f"),
]


def format_metrics_table(table: ComparisonTable) -> str:
    """固定宽度文本表，每个 (变体, 目标) 一行"""
    header = " ".join(f"{name:>{width}}" for name, width, _ in _TABLE_COLUMNS)
    lines = [header, "-" * len(header)]
    for row in table.rows:
        m = row.metrics
        values = [
            row.variant.label,
            row.goal_index,
            m.termination.value,
            m.steps_taken,
            m.max_turn_deg,
            m.path_length,
            m.min_clearance,
            m.mean_speed,
        ]
        lines.append(" ".join(f"{v:>{width}{fmt}}" for v, (_, width, fmt) in zip(values, _TABLE_COLUMNS)))
    if len({row.goal_index for row in table.rows}) > 1:
        lines.append("")
        lines.append(format_success_matrix(table))
    return "\n".join(lines)


def format_success_matrix(table: ComparisonTable) -> str:
    """每个变体一行：各目标是否到达（o 到达 / x 失败）"""
    lines = []
    for variant, flags in table.success_matrix().items():
        marks = " ".join("o" if ok else "x" for ok in flags)
        lines.append(f"{variant.label:>8} {marks}  ({sum(flags)}/{len(flags)})")
    return "\n".join(lines)


def write_metrics_table(table: ComparisonTable, path: str | Path) -> Path:
    path = _ensure_parent(Path(path))
    try:
        path.write_text(format_metrics_table(table) + "\n", encoding="utf-8")
    except OSError as exc:
        raise ArtifactError(f"{path}: 无法写入 ({exc.strerror or exc})") from exc
    return path
