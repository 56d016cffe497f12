#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
gnuplot 脚本生成
脚本只引用导出的 CSV，不在本库中渲染图像
"""

from src.exporters.base import ResultTable


def render_gnuplot(table: ResultTable, data_file: str, data_format: str) -> str:
    """
    生成绘图脚本文本

    Args:
        table: 带 PlotSpec 的结果表
        data_file: 数据文件名（与脚本同目录）
        data_format: 数据格式；非 csv 时脚本提示改用同名 CSV

    Returns:
        gnuplot 脚本
    """
    plot = table.plot
    columns = list(table.frame.columns)
    source = data_file if data_format == "csv" else f"{table.name}.csv"
    x = columns.index(plot.x) + 1
    y = columns.index(plot.y) + 1
    lines = [
        f"# {table.name}",
        "set datafile separator ','",
        f"set title '{plot.title or table.name}'",
        f"set xlabel '{plot.x}'",
        f"set ylabel '{plot.y}'",
    ]
    if data_format != "csv":
        lines.append(f"# 数据以 {data_format} 导出；以 --format csv 重新运行以生成 {source}")
    if plot.kind == "surface":
        z = columns.index(plot.z) + 1
        lines += [
            f"set zlabel '{plot.z}'",
            "set pm3d map",
            f"splot '{source}' every ::1 using {x}:{y}:{z} with pm3d notitle",
        ]
    else:
        lines.append(f"plot '{source}' every ::1 using {x}:{y} with lines notitle")
    return "\n".join(lines) + "\n"
