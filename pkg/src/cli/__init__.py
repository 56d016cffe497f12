# -*- coding: utf-8 -*-
"""命令行前端"""

from src.cli.main import main, run  # noqa: F401
