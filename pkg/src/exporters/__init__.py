# -*- coding: utf-8 -*-
"""结果导出器：导入即向 ExporterFactory 注册 csv / json"""

from src.exporters import csv_exporter, json_exporter  # noqa: F401
from src.exporters.base import ExporterFactory, PlotSpec, ResultTable  # noqa: F401
