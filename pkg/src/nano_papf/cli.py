# -*- coding: utf-8 -*-
"""
命令行模块 - nano-papf run / compare / schema

    nano-papf run --scenario single_circle --variant papf --emit csv,svg
    nano-papf compare --scenario reachability_fan --variants tapf,papf --workers 4
    nano-papf schema --out scenario.schema.json

退出码：
- 0  所有规划都以 Success 终止
- 2  至少一次规划以 LocalMinimum / Collision / StepBudgetExhausted 终止
- 1  用法、配置、场景文件或产物写出错误（一行诊断信息写到 stderr）

产物命名：<scenario>_<variant>[_g<k>].csv|.svg、<stem>_profile.svg、
metrics.json、metrics.txt；多目标场景才带 _g<k> 后缀。

环境变量：
- NANO_PAPF_VERBOSE=1  输出 DEBUG 日志（等同于 -v）
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from .artifacts import (
    format_metrics_table,
    plot_profile_svg,
    plot_trajectories_svg,
    write_metrics_json,
    write_metrics_table,
    write_trajectory_csv,
)
from .bench import ComparisonTable, Scenario, run_comparison
from .geom import InvalidInputError, PapfError
from .scenario_file import (
    DEFAULT_PROFILE,
    dump_scenario,
    load_profile,
    resolve_scenario,
    scenario_json_schema,
    validate_overrides,
)
from .variants import MethodVariant

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PLANNER_FAILURE = 2

EMIT_CHOICES = ("csv", "svg", "profile", "metrics")


class _Parser(argparse.ArgumentParser):
    """用法错误以退出码 1 结束"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ============== 日志 ==============

def setup_logging(verbose: bool = False) -> None:
    debug = verbose or os.environ.get("NANO_PAPF_VERBOSE", "0") == "1"
    logging.basicConfig(
        level=logging.DEBUG if debug else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    logger.setLevel(logging.DEBUG if debug else logging.INFO)


# ============== 参数解析 ==============

def parse_emit(value: str) -> set[str]:
    items = {item.strip().lower() for item in value.split(",") if item.strip()}
    unknown = items - set(EMIT_CHOICES)
    if unknown:
        raise InvalidInputError(f"--emit: 未知产物 {sorted(unknown)}（可选: {', '.join(EMIT_CHOICES)}）")
    return items


def parse_variants(value: str) -> list[MethodVariant]:
    variants: list[MethodVariant] = []
    for item in value.split(","):
        if not item.strip():
            continue
        variant = MethodVariant.parse(item.strip())
        if variant not in variants:
            variants.append(variant)
    return variants


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_set_options(items: Sequence[str], max_steps: int | None = None) -> dict:
    """--set section.key=value 与 --max-steps 合并成覆盖项"""
    overrides: dict[str, dict] = {}
    for item in items:
        key, sep, value = item.partition("=")
        section, dot, name = key.strip().partition(".")
        if not sep or not dot or not name:
            raise InvalidInputError(f"--set {item!r}: 格式应为 section.key=value")
        overrides.setdefault(section, {})[name] = _parse_value(value.strip())
    if max_steps is not None:
        overrides.setdefault("planner", {})["max_steps"] = max_steps
    return validate_overrides(overrides, source="--set") if overrides else {}


def merge_overrides(base: dict, extra: dict) -> dict:
    merged = {section: dict(values) for section, values in base.items()}
    for section, values in extra.items():
        merged.setdefault(section, {}).update(values)
    return merged


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nano-papf", description="2D 势场路径规划：TAPF / AL / AL+VA / PAPF")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, default_emit: str) -> None:
        p.add_argument("--scenario", required=True, help="内置场景名或 JSON 场景文件路径")
        p.add_argument("--profile", default=DEFAULT_PROFILE, help="参数配置名或 JSON 文件路径")
        p.add_argument("--out", default=".", help="产物输出目录")
        p.add_argument("--emit", default=default_emit, help="逗号分隔：csv,svg,profile,metrics")
        p.add_argument("--max-steps", type=int, default=None, help="覆盖 planner.max_steps")
        p.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                       help="覆盖单个参数，例如 motion.dtheta_max_deg=15（可重复）")
        p.add_argument("--seedless", action="store_true", help="确定性运行（唯一模式，保留以兼容）")
        p.add_argument("-v", "--verbose", action="store_true", help="输出 DEBUG 日志")

    run = sub.add_parser("run", help="用一种方法规划场景中的每个目标")
    run.add_argument("--variant", required=True, help="tapf / al / al_va / papf")
    run.add_argument("--export-scenario", default=None, metavar="PATH", help="把解析后的场景写成 JSON 文件")
    common(run, default_emit="")

    compare = sub.add_parser("compare", help="对比至少两种方法")
    compare.add_argument("--variants", required=True, help="逗号分隔，至少两种")
    compare.add_argument("--workers", type=int, default=1, help="并行进程数")
    common(compare, default_emit="metrics")

    schema = sub.add_parser("schema", help="输出场景文件的 JSON Schema")
    schema.add_argument("--out", default=None, help="写入文件而不是标准输出")
    schema.add_argument("-v", "--verbose", action="store_true", help=argparse.SUPPRESS)
    return parser


# ============== 执行 ==============

def _prepare(args: argparse.Namespace) -> tuple[Scenario, set[str]]:
    emit = parse_emit(args.emit)
    scenario = resolve_scenario(args.scenario)
    cli_overrides = parse_set_options(args.set, args.max_steps)
    if cli_overrides:
        scenario = replace(scenario, overrides=merge_overrides(scenario.overrides, cli_overrides))
    return scenario, emit


def _execute(args: argparse.Namespace, scenario: Scenario, variants: list[MethodVariant], workers: int) -> ComparisonTable:
    cfg = load_profile(args.profile)
    for warning in scenario.configure(cfg).motion_params.recommended_range_warnings():
        logger.warning(warning)
    return run_comparison(scenario, variants, cfg, workers=workers)


def emit_artifacts(table: ComparisonTable, scenario: Scenario, emit: set[str], out_dir: Path) -> list[Path]:
    """按 --emit 写出产物，返回写出的文件"""
    written: list[Path] = []
    multi_goal = len(scenario.goals) > 1
    for row in table.rows:
        stem = f"{scenario.name}_{row.variant.value}"
        if multi_goal:
            stem += f"_g{row.goal_index}"
        if "csv" in emit:
            written.append(write_trajectory_csv(row.result, out_dir / f"{stem}.csv"))
        if "svg" in emit:
            title = f"{scenario.name}: {row.variant.label}"
            if multi_goal:
                title += f" goal#{row.goal_index}"
            written.append(plot_trajectories_svg(scenario, [row.result], out_dir / f"{stem}.svg", title=title))
        if "profile" in emit:
            written.append(plot_profile_svg([row.result], out_dir / f"{stem}_profile.svg", title=stem))
    if "metrics" in emit:
        written.append(write_metrics_json(table, out_dir / "metrics.json"))
        written.append(write_metrics_table(table, out_dir / "metrics.txt"))
    return written


def _finish(table: ComparisonTable, scenario: Scenario, emit: set[str], out_dir: Path) -> int:
    print(format_metrics_table(table))
    emit_artifacts(table, scenario, emit, out_dir)
    reached = sum(row.metrics.success for row in table.rows)
    logger.info("%s: %d/%d runs reached the goal", scenario.name, reached, len(table.rows))
    return EXIT_OK if reached == len(table.rows) else EXIT_PLANNER_FAILURE


def cmd_run(args: argparse.Namespace) -> int:
    scenario, emit = _prepare(args)
    variant = MethodVariant.parse(args.variant)
    out_dir = Path(args.out)
    if args.export_scenario:
        dump_scenario(scenario, args.export_scenario)
    table = _execute(args, scenario, [variant], workers=1)
    return _finish(table, scenario, emit, out_dir)


def cmd_compare(args: argparse.Namespace) -> int:
    variants = parse_variants(args.variants)
    if len(variants) < 2:
        raise InvalidInputError(f"--variants 至少需要两种不同的方法，实际为 {args.variants!r}")
    if args.workers < 1:
        raise InvalidInputError("--workers 必须 >= 1")
    scenario, emit = _prepare(args)
    table = _execute(args, scenario, variants, workers=args.workers)
    return _finish(table, scenario, emit, Path(args.out))


def cmd_schema(args: argparse.Namespace) -> int:
    text = json.dumps(scenario_json_schema(), indent=2, ensure_ascii=False)
    if args.out:
        path = Path(args.out)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text + "\n", encoding="utf-8")
        except OSError as exc:
            raise InvalidInputError(f"{path}: 无法写入 ({exc.strerror or exc})") from exc
    else:
        print(text)
    return EXIT_OK


COMMANDS = {"run": cmd_run, "compare": cmd_compare, "schema": cmd_schema}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help 以 0 结束，其它用法错误已经在 _Parser.error 中映射为 1
        return int(exc.code or 0)
    setup_logging(args.verbose)
    try:
        return COMMANDS[args.command](args)
    except PapfError as exc:
        print(f"nano-papf: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
