#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
结果导出器基类
使用策略模式，便于扩展不同格式的结果导出器
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from config.settings import settings
from src.utils.exceptions import InvalidConfigException, OutputException
from src.utils.logger import logger


@dataclass
class PlotSpec:
    """绘图脚本描述：surface 为 (x, y, z) 曲面，line 为 (x, y) 曲线"""
    kind: str
    x: str
    y: str
    z: Optional[str] = None
    title: str = ""

    def __post_init__(self):
        """验证数据"""
        if self.kind not in ("surface", "line"):
            raise ValueError(f"不支持的绘图类型: {self.kind}")
        if self.kind == "surface" and not self.z:
            raise ValueError("surface 绘图需要 z 列")


@dataclass
class ResultTable:
    """一张待导出的结果表"""
    name: str
    frame: pd.DataFrame
    metadata: Dict[str, Any] = field(default_factory=dict)
    plot: Optional[PlotSpec] = None

    def __post_init__(self):
        """验证数据"""
        if not self.name or not self.name.strip():
            raise ValueError("结果名不能为空")
        if self.plot is not None:
            missing = [c for c in (self.plot.x, self.plot.y, self.plot.z) if c and c not in self.frame.columns]
            if missing:
                raise ValueError(f"绘图列不存在: {missing}")


class BaseResultExporter(ABC):
    """
    结果导出器基类

    所有导出器都应继承此类并实现抽象方法
    """

    def __init__(self, output_dir: Optional[Path] = None, significant_digits: Optional[int] = None):
        """
        初始化导出器

        Args:
            output_dir: 输出目录，默认 settings.OUTPUT_DIR
            significant_digits: 浮点有效数字，默认 settings.FLOAT_SIGNIFICANT_DIGITS
        """
        self.output_dir = Path(output_dir) if output_dir is not None else settings.get_output_dir()
        self.significant_digits = significant_digits or settings.FLOAT_SIGNIFICANT_DIGITS
        self._validate_params()

    def _validate_params(self):
        """验证参数"""
        if not (1 <= self.significant_digits <= 17):
            raise InvalidConfigException("FLOAT_SIGNIFICANT_DIGITS", "必须在 1 到 17 之间")

    @property
    def float_format(self) -> str:
        return f"%.{self.significant_digits}g"

    def format_float(self, value: float) -> float:
        """按有效数字截断，保证重复运行输出一致"""
        return float(self.float_format % value)

    @abstractmethod
    def format_name(self) -> str:
        """
        导出格式名

        Returns:
            如 'csv'、'json'
        """
        pass

    @abstractmethod
    def write_table(self, table: ResultTable) -> Path:
        """
        写出结果表

        Args:
            table: 结果表

        Returns:
            写出的数据文件路径
        """
        pass

    def export(self, table: ResultTable) -> List[Path]:
        """
        写出结果表及其绘图脚本

        Args:
            table: 结果表

        Returns:
            写出的全部文件
        """
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
            data_path = self.write_table(table)
            paths = [data_path]
            if table.plot is not None:
                paths.append(self.write_plot_script(table, data_path))
        except OSError as e:
            raise OutputException(str(self.output_dir), str(e))
        logger.info(f"✅ 已导出 {table.name}: {', '.join(p.name for p in paths)}")
        return paths

    def write_plot_script(self, table: ResultTable, data_path: Path) -> Path:
        """生成引用数据文件的 gnuplot 脚本"""
        from src.exporters.plot_script import render_gnuplot

        script_path = self.output_dir / f"{table.name}.gp"
        script_path.write_text(render_gnuplot(table, data_path.name, self.format_name()), encoding="utf-8")
        return script_path

    def get_exporter_info(self) -> Dict[str, Any]:
        return {
            "exporter_name": self.__class__.__name__,
            "format": self.format_name(),
            "output_dir": str(self.output_dir),
            "significant_digits": self.significant_digits,
        }


class ExporterFactory:
    """结果导出器工厂类"""

    _exporters: Dict[str, type] = {}

    @classmethod
    def register_exporter(cls, exporter_cls: type, name: str):
        """
        注册导出器

        Args:
            exporter_cls: 导出器类
            name: 格式名
        """
        cls._exporters[name.lower()] = exporter_cls

    @classmethod
    def get_exporter(cls, name: str, output_dir: Optional[Path] = None) -> BaseResultExporter:
        """
        根据格式名创建导出器

        Args:
            name: 格式名
            output_dir: 输出目录

        Returns:
            导出器实例
        """
        exporter_cls = cls._exporters.get(name.lower())
        if exporter_cls is None:
            raise InvalidConfigException("format", f"不支持的输出格式 {name}，可选 {cls.get_supported_formats()}")
        return exporter_cls(output_dir=output_dir)

    @classmethod
    def get_supported_formats(cls) -> List[str]:
        return sorted(cls._exporters.keys())
