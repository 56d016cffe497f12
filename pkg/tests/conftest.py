"""
pytest 配置文件
"""
import math
import sys
from pathlib import Path

# 添加项目根目录到路径
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

import pytest
from config.settings import settings
from src.core.circuit import CircuitParams, ZakPoint
from src.core.elementary import NoiseSpec


@pytest.fixture
def test_settings():
    """测试配置"""
    return settings


@pytest.fixture
def elementary_params():
    """理想电路 E_Q = E_J = 1"""
    return CircuitParams(E_Q=1.0, E_J=1.0)


@pytest.fixture
def realistic_params():
    """E_Q = E_J = 1, E_C = 200, E_L = 10（z = √20, ħΩ = 40√5）"""
    return CircuitParams(E_Q=1.0, E_J=1.0, E_C=200.0, E_L=10.0)


@pytest.fixture
def white_noise():
    """白噪声幅度"""
    return NoiseSpec(eps_n=0.01, eps_phi=0.02)


@pytest.fixture
def critical_zak_points():
    """四个临界 Zak 点"""
    return [
        ZakPoint(0.0, 0.0),
        ZakPoint(0.0, math.pi),
        ZakPoint(0.5, 0.0),
        ZakPoint(0.5, math.pi),
    ]


@pytest.fixture
def circuit_file(tmp_path):
    """KEY=VALUE 格式的电路参数文件"""
    path = tmp_path / "circuit.env"
    path.write_text("E_Q=1.0\nE_J=1.0\nE_C=200\nE_L=10\n", encoding="utf-8")
    return path
