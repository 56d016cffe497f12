#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
命令行入口

用法:
    python -m src.cli <command> [--config FILE] [--out DIR] [--format csv|json]
                                [--grid NK,NPHI] [--truncation N] [--threads T]

退出码: 0 成功，1 写出失败，2 配置错误，3 数值收敛失败
"""

import argparse
import sys
import time
from pathlib import Path
from typing import List, Optional, Sequence

from pydantic import ValidationError

from config.settings import load_circuit_file
from src.cli.commands import COMMANDS
from src.cli.schemas import RunConfig, default_circuit, default_grid
from src.exporters import ExporterFactory
from src.utils.exceptions import EXIT_OK, InvalidConfigException, handle_exception
from src.utils.logger import Logger

logger = Logger.get_logger("dualmon.cli")


class _ArgumentParser(argparse.ArgumentParser):
    """参数错误时抛出配置异常，而不是直接退出"""

    def error(self, message: str):
        raise InvalidConfigException("argv", message)


def _parse_grid(text: str) -> tuple:
    try:
        nk, nphi = (int(part) for part in text.split(","))
    except ValueError:
        raise InvalidConfigException("--grid", f"格式应为 NK,NPHI，实际为 {text!r}")
    return nk, nphi


def build_parser() -> argparse.ArgumentParser:
    """构建参数解析器"""
    parser = _ArgumentParser(prog="dualmon", description="dualmon 电路仿真与图表数据生成")
    parser.add_argument("command", choices=sorted(COMMANDS), help="要运行的命令")
    parser.add_argument("--config", type=Path, help="KEY=VALUE 格式的电路参数文件")
    parser.add_argument("--out", type=Path, help="输出目录")
    parser.add_argument("--format", default="csv", help="输出格式 csv|json")
    parser.add_argument("--grid", help="网格分辨率 NK,NPHI")
    parser.add_argument("--truncation", type=int, help="数态截断 N")
    parser.add_argument("--threads", type=int, help="并行线程数")

    noise = parser.add_argument_group("噪声与热库")
    noise.add_argument("--eps-n", type=float, help="电荷噪声幅度 ε_n")
    noise.add_argument("--eps-phi", type=float, help="磁通噪声幅度 ε_φ")
    noise.add_argument("--nu", type=float, help="热库谱密度斜率 ν")
    noise.add_argument("--kT", type=float, help="温度 k_BT")

    drive = parser.add_argument_group("波导驱动")
    drive.add_argument("--gamma-ratio", type=float, help="γ/ω_D")
    drive.add_argument("--drive-power-ratio", type=float, help="ħα²/E_J")
    return parser


def _drop_none(values: dict) -> dict:
    return {key: value for key, value in values.items() if value is not None}


def build_config(args: argparse.Namespace) -> RunConfig:
    """
    合并命令默认值、参数文件与命令行选项

    Args:
        args: 解析后的参数

    Returns:
        验证后的 RunConfig
    """
    circuit = default_circuit(args.command)
    if args.config is not None:
        circuit.update(load_circuit_file(args.config))

    grid = _parse_grid(args.grid) if args.grid else default_grid(args.command)
    raw = _drop_none({
        "command": args.command,
        "circuit": circuit,
        "grid": grid,
        "truncation": args.truncation,
        "threads": args.threads,
        "output_dir": args.out,
        "format": args.format,
        "noise": _drop_none({"eps_n": args.eps_n, "eps_phi": args.eps_phi}),
        "thermal": _drop_none({"nu": args.nu, "kT": args.kT}),
        "waveguide": _drop_none({"gamma_ratio": args.gamma_ratio, "drive_power_ratio": args.drive_power_ratio}),
    })
    try:
        return RunConfig(**raw)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"]) or "config"
        raise InvalidConfigException(location, first["msg"])


def run(config: RunConfig) -> List[Path]:
    """
    运行一个命令并导出全部结果表

    Args:
        config: 运行配置

    Returns:
        写出的文件列表
    """
    exporter = ExporterFactory.get_exporter(config.format, config.output_dir)
    start = time.perf_counter()
    tables = COMMANDS[config.command](config)
    paths: List[Path] = []
    for table in tables:
        paths.extend(exporter.export(table))
    logger.info(f"✅ {config.command} 完成: {len(paths)} 个文件, 耗时 {time.perf_counter() - start:.2f}s")
    return paths


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    命令行主函数

    Args:
        argv: 参数列表，默认取 sys.argv[1:]

    Returns:
        进程退出码
    """
    try:
        args = build_parser().parse_args(argv)
        config = build_config(args)
        paths = run(config)
    except Exception as e:
        message, code = handle_exception(e)
        logger.debug(f"❌ 运行失败: {message}", exc_info=True)
        print(message, file=sys.stderr)
        return code

    print(f"{config.command}: {len(paths)} files -> {config.output_dir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
