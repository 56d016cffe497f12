#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
电路模型模块
电路能量参数、导出尺度（阻抗 z、振子能隙 ħΩ）、零点涨落重整化以及双布里渊区几何

约定：所有能量以调用者选定的参考能量 E_ref 为单位，ħ = 1。
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from config.settings import settings
from src.utils.exceptions import (
    InvalidInputException,
    InvalidParameterException,
    UnsupportedBandException,
)

K_PERIOD = 1.0
PHI_PERIOD = 2.0 * math.pi
_SNAP = 1e-12
# 有一阶重整化公式可对照的能带
VALIDATED_BANDS = (0, 1)


def _check_finite(name: str, value: float):
    if not math.isfinite(value):
        raise InvalidInputException(f"{name} = {value} 不是有限实数")


@dataclass(frozen=True)
class CircuitParams:
    """电路能量参数（E_ref 单位）"""
    E_Q: float
    E_J: float
    E_C: float = 0.0
    E_L: float = 0.0

    def __post_init__(self):
        """验证数据"""
        for name in ("E_Q", "E_J", "E_C", "E_L"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidParameterException(name, f"必须是有限实数，实际为 {value}")
            if value < 0:
                raise InvalidParameterException(name, f"必须 >= 0，实际为 {value}")

    @property
    def is_realistic(self) -> bool:
        """是否包含寄生电容/电感（E_C, E_L > 0）"""
        return self.E_C > 0 and self.E_L > 0

    @property
    def regime_ok(self) -> bool:
        """微扰区判据: min(E_C, E_L) >= 10·max(E_Q, E_J)"""
        return min(self.E_C, self.E_L) >= settings.REGIME_FACTOR * max(self.E_Q, self.E_J)

    @property
    def z(self) -> float:
        return impedance(self)

    @property
    def hbar_omega(self) -> float:
        return oscillator_gap(self)

    def scaled(self, factor: float) -> "CircuitParams":
        """所有能量同乘 factor"""
        return CircuitParams(self.E_Q * factor, self.E_J * factor, self.E_C * factor, self.E_L * factor)

    def to_dict(self) -> dict:
        return {"E_Q": self.E_Q, "E_J": self.E_J, "E_C": self.E_C, "E_L": self.E_L}

    @classmethod
    def from_oscillator(cls, E_Q: float, E_J: float, z: float, hbar_omega: float) -> "CircuitParams":
        """
        由 (z, ħΩ) 反推 E_C, E_L

        Args:
            E_Q: 相位滑移能
            E_J: 约瑟夫森能
            z: 振子阻抗
            hbar_omega: 振子能隙

        Returns:
            电路参数，满足 ħΩ·z = 2E_C, ħΩ/z = 2E_L
        """
        if z <= 0 or hbar_omega <= 0:
            raise InvalidParameterException("z/ħΩ", "必须为正")
        return cls(E_Q=E_Q, E_J=E_J, E_C=hbar_omega * z / 2.0, E_L=hbar_omega / (2.0 * z))


@dataclass(frozen=True)
class ZakPoint:
    """双布里渊区中的点 (k, φ)，k ∈ (−1/2, 1/2]，φ ∈ (−π, π]"""
    k: float
    phi: float

    def __post_init__(self):
        """验证数据"""
        _check_finite("k", self.k)
        _check_finite("phi", self.phi)
        if not -K_PERIOD / 2.0 < self.k <= K_PERIOD / 2.0:
            raise InvalidParameterException("k", f"必须位于 (−1/2, 1/2] 内，实际为 {self.k}；请使用 wrap()")
        if not -PHI_PERIOD / 2.0 < self.phi <= PHI_PERIOD / 2.0:
            raise InvalidParameterException("phi", f"必须位于 (−π, π] 内，实际为 {self.phi}；请使用 wrap()")

    def as_tuple(self) -> Tuple[float, float]:
        return (self.k, self.phi)

    def shifted(self, bias: "BiasPoint") -> "ZakPoint":
        """(k + n_x, φ + φ_x) 的规范代表元"""
        return wrap(self.k + bias.n_x, self.phi + bias.phi_x)


@dataclass(frozen=True)
class BiasPoint:
    """外加偏置 (n_x, φ_x)"""
    n_x: float = 0.0
    phi_x: float = 0.0

    def __post_init__(self):
        _check_finite("n_x", self.n_x)
        _check_finite("phi_x", self.phi_x)

    @property
    def is_zero(self) -> bool:
        return self.n_x == 0.0 and self.phi_x == 0.0


ZERO_BIAS = BiasPoint()


# ==================== 导出尺度 ====================

def _require_oscillator(params: CircuitParams):
    if params.E_C <= 0:
        raise InvalidParameterException("E_C", "真实电路要求 E_C > 0")
    if params.E_L <= 0:
        raise InvalidParameterException("E_L", "真实电路要求 E_L > 0")


def impedance(params: CircuitParams) -> float:
    """
    振子阻抗 z = sqrt(E_C / E_L)

    Args:
        params: 电路参数（E_C, E_L > 0）

    Returns:
        无量纲阻抗
    """
    _require_oscillator(params)
    return math.sqrt(params.E_C / params.E_L)


def oscillator_gap(params: CircuitParams) -> float:
    """
    振子能隙 ħΩ = 2·sqrt(E_C·E_L)

    Args:
        params: 电路参数（E_C, E_L > 0）

    Returns:
        能隙（E_ref 单位）
    """
    _require_oscillator(params)
    return 2.0 * math.sqrt(params.E_C * params.E_L)


def renormalization_factors(z: float, band: int = 0) -> Tuple[float, float]:
    """
    零点涨落重整化因子 (E′_Q/E_Q, E′_J/E_J) 或 (E″_Q/E_Q, E″_J/E_J)

    Args:
        z: 振子阻抗
        band: 振子能带，0 或 1

    Returns:
        (电荷因子, 磁通因子)
    """
    if band not in VALIDATED_BANDS:
        raise UnsupportedBandException(band)
    if not (z > 0 and math.isfinite(z)):
        raise InvalidParameterException("z", f"必须为正有限数，实际为 {z}")
    q_factor = math.exp(-math.pi ** 2 / z)
    j_factor = math.exp(-z / 4.0)
    if band == 1:
        q_factor *= 1.0 - 2.0 * math.pi ** 2 / z
        j_factor *= 1.0 - z / 2.0
    return q_factor, j_factor


def renormalized_energies(params: CircuitParams, band: int = 0) -> Tuple[float, float]:
    """
    重整化后的非线性能量

    Args:
        params: 电路参数
        band: 0 给出 (E′_Q, E′_J)，1 给出 (E″_Q, E″_J)

    Returns:
        (E_Q_ren, E_J_ren)
    """
    if band not in VALIDATED_BANDS:
        raise UnsupportedBandException(band)
    q_factor, j_factor = renormalization_factors(impedance(params), band)
    return q_factor * params.E_Q, j_factor * params.E_J


# ==================== 布里渊区几何 ====================

def _wrap_scalar(x: float, period: float) -> float:
    half = period / 2.0
    if -half < x <= half:
        return float(x)
    r = (half - x) % period
    if period - r <= _SNAP * period:
        r = 0.0
    return half - r


def wrap(raw_k: float, raw_phi: float) -> ZakPoint:
    """
    取 (k, φ) 在半开区间 (−1/2, 1/2] × (−π, π] 中的规范代表元

    下边界映射到上边界，例如 (−1/2, −π) → (1/2, π)。

    Args:
        raw_k: 任意实数准电荷
        raw_phi: 任意实数准磁通

    Returns:
        规范 ZakPoint
    """
    _check_finite("k", raw_k)
    _check_finite("phi", raw_phi)
    return ZakPoint(_wrap_scalar(raw_k, K_PERIOD), _wrap_scalar(raw_phi, PHI_PERIOD))


def wrap_array(values: np.ndarray, period: float) -> np.ndarray:
    """wrap 的向量化版本（单一坐标）"""
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise InvalidInputException("数组中含 NaN/Inf")
    half = period / 2.0
    inside = (values > -half) & (values <= half)
    r = np.mod(half - values, period)
    r = np.where(period - r <= _SNAP * period, 0.0, r)
    return np.where(inside, values, half - r)


def zone_samples(n: int, period: float) -> np.ndarray:
    """
    n 点闭格点 [−P/2, P/2]（间距 P/(n − 1)）上的规范样本

    −P/2 与 P/2 是同一个 Zak 点，只保留 P/2，返回 n − 1 个 (−P/2, P/2] 内的升序样本。
    奇数 n 同时包含 0 与 P/2。
    """
    if n < 3:
        raise InvalidParameterException("n", f"格点数必须 >= 3，实际为 {n}")
    return np.linspace(-period / 2.0, period / 2.0, n)[1:]
