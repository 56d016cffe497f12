#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
JSON 导出器
{"metadata": {...}, "records": [...]}，键排序，浮点按有效数字截断
"""

import json
import math
from pathlib import Path
from typing import Any

from src.exporters.base import BaseResultExporter, ExporterFactory, ResultTable


class JSONResultExporter(BaseResultExporter):
    """JSON 导出器"""

    def format_name(self) -> str:
        return "json"

    def _clean(self, value: Any) -> Any:
        if isinstance(value, float):
            return self.format_float(value) if math.isfinite(value) else None
        if hasattr(value, "item"):
            return self._clean(value.item())
        return value

    def write_table(self, table: ResultTable) -> Path:
        records = [
            {key: self._clean(value) for key, value in row.items()}
            for row in table.frame.to_dict(orient="records")
        ]
        payload = {"metadata": table.metadata, "records": records}
        path = self.output_dir / f"{table.name}.json"
        path.write_text(
            json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2, default=str) + "\n",
            encoding="utf-8",
        )
        return path


ExporterFactory.register_exporter(JSONResultExporter, "json")
