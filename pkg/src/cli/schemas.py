#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
命令行运行配置数据模型
"""

import math
import os
from pathlib import Path
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

from config.settings import settings
from src.core.circuit import CircuitParams
from src.core.elementary import NoiseSpec

CommandName = Literal[
    "elementary",
    "bands",
    "transmission",
    "transition-map",
    "zak-wavefunction",
    "bias-scan",
    "thermal-rates",
]

# 理想电路默认 E_Q = E_J = E_•；真实电路默认 E_C/E_J = 200, E_L/E_J = 10
ELEMENTARY_DEFAULTS = {"E_Q": 1.0, "E_J": 1.0, "E_C": 0.0, "E_L": 0.0}
REALISTIC_DEFAULTS = {"E_Q": 1.0, "E_J": 1.0, "E_C": 200.0, "E_L": 10.0}

# 各命令的默认网格
DEFAULT_GRIDS = {
    "elementary": (settings.MAP_NK, settings.MAP_NPHI),
    "bands": (settings.DEFAULT_NK, settings.DEFAULT_NPHI),
    "transition-map": (settings.MAP_NK, settings.MAP_NPHI),
    "zak-wavefunction": (settings.DEFAULT_NK, settings.DEFAULT_NPHI),
    "bias-scan": (settings.DEFAULT_NK, settings.DEFAULT_NPHI),
}


class CircuitConfig(BaseModel):
    """电路能量参数"""
    E_Q: float = Field(..., description="相位滑移能", ge=0)
    E_J: float = Field(..., description="约瑟夫森能", ge=0)
    E_C: float = Field(default=0.0, description="寄生充电能", ge=0)
    E_L: float = Field(default=0.0, description="寄生电感能", ge=0)

    @field_validator("E_Q", "E_J", "E_C", "E_L")
    @classmethod
    def validate_finite(cls, v):
        """验证有限值"""
        if not math.isfinite(v):
            raise ValueError("必须是有限实数")
        return v

    def to_params(self) -> CircuitParams:
        return CircuitParams(E_Q=self.E_Q, E_J=self.E_J, E_C=self.E_C, E_L=self.E_L)


class NoiseConfig(BaseModel):
    """白噪声幅度"""
    eps_n: float = Field(default=0.01, description="电荷噪声幅度", ge=0)
    eps_phi: float = Field(default=0.01, description="磁通噪声幅度", ge=0)

    def to_spec(self) -> NoiseSpec:
        return NoiseSpec(eps_n=self.eps_n, eps_phi=self.eps_phi)


class WaveguideConfig(BaseModel):
    """透射谱参数"""
    gamma_ratio: float = Field(default=settings.GAMMA_RATIO, description="γ/ω_D", gt=0)
    drive_power_ratio: float = Field(default=settings.DRIVE_POWER_RATIO, description="ħα²/E_J", gt=0)
    span: float = Field(default=10.0, description="透射谷两侧的扫描宽度（以 γ 为单位）", gt=0)
    step: float = Field(default=0.05, description="失谐步长（以 γ 为单位）", gt=0, le=0.1)


class ThermalConfig(BaseModel):
    """热库参数"""
    nu: float = Field(default=0.01, description="谱密度斜率 ν", ge=0)
    kT: float = Field(default=1.0, description="温度 k_BT", ge=0)
    bands: int = Field(default=2, description="参与跃迁的能级数，超过 2 时额外跃迁标记为未验证", ge=2)


class RunConfig(BaseModel):
    """一次命令行运行的完整配置"""
    command: CommandName
    circuit: CircuitConfig
    grid: Tuple[int, int] = Field(default=(settings.DEFAULT_NK, settings.DEFAULT_NPHI), description="(nk, nφ)")
    truncation: int = Field(default=settings.DEFAULT_TRUNCATION, description="数态截断", ge=8, le=512)
    threads: int = Field(default=settings.THREADS, description="并行线程数", ge=1)
    noise: NoiseConfig = Field(default_factory=NoiseConfig)
    waveguide: WaveguideConfig = Field(default_factory=WaveguideConfig)
    thermal: ThermalConfig = Field(default_factory=ThermalConfig)
    z_values: List[float] = Field(default_factory=lambda: [math.pi, 2.0 * math.pi, 4.0 * math.pi])
    output_dir: Path = Field(default_factory=settings.get_output_dir)
    format: Literal["csv", "json"] = "csv"

    @field_validator("grid")
    @classmethod
    def validate_grid(cls, v):
        """验证网格分辨率"""
        if min(v) < 8:
            raise ValueError(f"网格分辨率必须 >= 8，实际为 {v}")
        return v

    @field_validator("z_values")
    @classmethod
    def validate_z(cls, v):
        if not v or any(not (z > 0 and math.isfinite(z)) for z in v):
            raise ValueError("z 必须为正有限数")
        return v

    @field_validator("output_dir")
    @classmethod
    def validate_output_dir(cls, v):
        """验证输出目录可写（不存在时检查最近的已存在上级目录）"""
        probe = Path(v).resolve()
        while not probe.exists():
            probe = probe.parent
        if not probe.is_dir() or not os.access(probe, os.W_OK):
            raise ValueError(f"输出目录不可写: {v}")
        return Path(v)

    @model_validator(mode="after")
    def validate_realistic(self):
        """除 elementary 外的命令都需要 E_C, E_L > 0"""
        if self.command not in ("elementary", "zak-wavefunction"):
            if self.circuit.E_C <= 0 or self.circuit.E_L <= 0:
                raise ValueError(f"命令 {self.command} 需要 E_C > 0 且 E_L > 0")
        return self

    @property
    def nk(self) -> int:
        return self.grid[0]

    @property
    def nphi(self) -> int:
        return self.grid[1]

    def params(self) -> CircuitParams:
        return self.circuit.to_params()


def default_circuit(command: str) -> dict:
    """命令的默认电路参数"""
    return dict(ELEMENTARY_DEFAULTS if command == "elementary" else REALISTIC_DEFAULTS)


def default_grid(command: str) -> Optional[Tuple[int, int]]:
    return DEFAULT_GRIDS.get(command)
