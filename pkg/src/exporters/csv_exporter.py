#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
CSV 导出器
数据写入 <name>.csv，元数据写入同名 .meta.json
"""

import json
from pathlib import Path

from src.exporters.base import BaseResultExporter, ExporterFactory, ResultTable


class CSVResultExporter(BaseResultExporter):
    """CSV 导出器"""

    def format_name(self) -> str:
        return "csv"

    def write_table(self, table: ResultTable) -> Path:
        path = self.output_dir / f"{table.name}.csv"
        table.frame.to_csv(path, index=False, float_format=self.float_format, lineterminator="\n")
        if table.metadata:
            meta_path = self.output_dir / f"{table.name}.meta.json"
            meta_path.write_text(
                json.dumps(table.metadata, ensure_ascii=False, sort_keys=True, indent=2, default=str) + "\n",
                encoding="utf-8",
            )
        return path


ExporterFactory.register_exporter(CSVResultExporter, "csv")
