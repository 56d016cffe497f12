#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
配置管理模块
从环境变量加载配置，并提供配置访问接口
"""

from pathlib import Path
from typing import Dict

from dotenv import dotenv_values
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """应用配置类"""

    # ==================== 项目基础配置 ====================
    PROJECT_NAME: str = Field(default="dualmon 电路仿真系统")
    PROJECT_VERSION: str = Field(default="1.0.0")
    DEBUG: bool = Field(default=False)

    # ==================== 数值计算配置 ====================
    DEFAULT_TRUNCATION: int = Field(default=40)
    CONVERGENCE_STEP: int = Field(default=8)
    CONVERGENCE_TOL: float = Field(default=1e-8)  # 相对 ħΩ
    HERMITIAN_TOL: float = Field(default=1e-12)
    REGIME_FACTOR: float = Field(default=10.0)
    PDE_NL: int = Field(default=16)
    PDE_NTHETA: int = Field(default=32)
    STEADY_STATE_TOL: float = Field(default=1e-10)
    ODE_RTOL: float = Field(default=1e-10)
    ODE_ATOL: float = Field(default=1e-12)
    ODE_METHOD: str = Field(default="dop853")  # qutip 积分器
    ODE_NSTEPS: int = Field(default=1_000_000)

    # ==================== 网格配置 ====================
    DEFAULT_NK: int = Field(default=41)
    DEFAULT_NPHI: int = Field(default=41)
    MAP_NK: int = Field(default=101)
    MAP_NPHI: int = Field(default=101)
    THREADS: int = Field(default=1)
    SHOW_PROGRESS: bool = Field(default=False)

    # ==================== 波导与驱动配置 ====================
    GAMMA_RATIO: float = Field(default=0.01)  # γ = GAMMA_RATIO·ω_D
    DRIVE_POWER_RATIO: float = Field(default=0.1)  # ħα² = DRIVE_POWER_RATIO·E_J

    # ==================== 输出配置 ====================
    OUTPUT_DIR: str = Field(default="./output")
    FLOAT_SIGNIFICANT_DIGITS: int = Field(default=12)

    # ==================== 日志配置 ====================
    LOG_LEVEL: str = Field(default="INFO")
    LOG_FILE: str = Field(default="./logs/dualmon.log")
    LOG_MAX_SIZE: int = Field(default=10)  # MB
    LOG_BACKUP_COUNT: int = Field(default=5)

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v):
        """验证日志级别"""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if v.upper() not in valid_levels:
            raise ValueError(f"LOG_LEVEL 必须是以下之一: {', '.join(valid_levels)}")
        return v.upper()

    @field_validator("DEFAULT_TRUNCATION", "DEFAULT_NK", "DEFAULT_NPHI", "MAP_NK", "MAP_NPHI", "PDE_NL", "PDE_NTHETA")
    @classmethod
    def validate_resolution(cls, v):
        """验证截断与网格分辨率"""
        if v < 8:
            raise ValueError("截断维数与网格分辨率必须 >= 8")
        return v

    @field_validator("CONVERGENCE_TOL", "HERMITIAN_TOL", "STEADY_STATE_TOL", "ODE_RTOL", "ODE_ATOL", "REGIME_FACTOR")
    @classmethod
    def validate_positive(cls, v):
        """验证容差为正数"""
        if v <= 0:
            raise ValueError("容差和阈值必须大于 0")
        return v

    @field_validator("ODE_METHOD")
    @classmethod
    def validate_ode_method(cls, v):
        """验证 qutip 积分器名称"""
        valid_methods = ["adams", "bdf", "lsoda", "dop853", "vern7", "vern9"]
        if v.lower() not in valid_methods:
            raise ValueError(f"ODE_METHOD 必须是以下之一: {', '.join(valid_methods)}")
        return v.lower()

    @field_validator("ODE_NSTEPS")
    @classmethod
    def validate_nsteps(cls, v):
        """验证积分步数上限"""
        if v < 1:
            raise ValueError("ODE_NSTEPS 必须 >= 1")
        return v

    @field_validator("THREADS")
    @classmethod
    def validate_threads(cls, v):
        """验证线程数"""
        if v < 1:
            raise ValueError("THREADS 必须 >= 1")
        return v

    def get_output_dir(self) -> Path:
        """获取输出目录路径"""
        return Path(self.OUTPUT_DIR)

    def get_log_file(self) -> Path:
        """获取日志文件路径"""
        return Path(self.LOG_FILE)

    def get_float_format(self) -> str:
        """获取 CSV 浮点格式（固定有效数字）"""
        return f"%.{self.FLOAT_SIGNIFICANT_DIGITS}g"

    def ensure_directories(self):
        """确保日志目录存在"""
        self.get_log_file().parent.mkdir(parents=True, exist_ok=True)


# 电路参数文件允许的键
CIRCUIT_KEYS = ("E_Q", "E_J", "E_C", "E_L")


def load_circuit_file(path: Path) -> Dict[str, float]:
    """
    读取 KEY=VALUE 格式的电路参数文件

    Args:
        path: 参数文件路径

    Returns:
        {键: 浮点值}，只包含文件中出现的键
    """
    from src.utils.exceptions import InvalidConfigException, MissingConfigException

    path = Path(path)
    if not path.is_file():
        raise MissingConfigException(str(path))

    raw = dotenv_values(path)
    unknown = sorted(set(raw) - set(CIRCUIT_KEYS))
    if unknown:
        raise InvalidConfigException(", ".join(unknown), "未知的配置键")

    values: Dict[str, float] = {}
    for key, text in raw.items():
        if text is None or not text.strip():
            raise InvalidConfigException(key, "缺少取值")
        try:
            values[key] = float(text)
        except ValueError:
            raise InvalidConfigException(key, f"无法解析为浮点数: {text!r}")

    for key in ("E_Q", "E_J"):
        if key not in values:
            raise MissingConfigException(key)
    return values


# 创建全局配置实例
settings = Settings()


# 初始化时确保目录存在
settings.ensure_directories()


if __name__ == "__main__":
    """测试配置加载"""
    print("=" * 60)
    print("配置加载测试")
    print("=" * 60)
    print()

    print("📋 项目配置:")
    print(f"  项目名称: {settings.PROJECT_NAME}")
    print(f"  版本: {settings.PROJECT_VERSION}")
    print()

    print("🧮 数值配置:")
    print(f"  默认截断: {settings.DEFAULT_TRUNCATION}")
    print(f"  收敛步长: {settings.CONVERGENCE_STEP}")
    print(f"  收敛容差: {settings.CONVERGENCE_TOL}")
    print(f"  PDE 分辨率: ({settings.PDE_NL}, {settings.PDE_NTHETA})")
    print(f"  积分器: {settings.ODE_METHOD} (rtol={settings.ODE_RTOL}, atol={settings.ODE_ATOL})")
    print()

    print("📝 日志配置:")
    print(f"  日志级别: {settings.LOG_LEVEL}")
    print(f"  日志文件: {settings.get_log_file()}")
    print()

    print("✅ 配置加载成功！")
