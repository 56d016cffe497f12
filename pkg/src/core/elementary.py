#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
理想 dualmon 电路（约瑟夫森结 + 量子相位滑移线并联）的解析结果

Zak 态 |k, φ⟩ 同时对角化哈密顿量与两个噪声算符，
因此能谱、梯度、临界点与纯退相干速率都有闭式表达。
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from src.core.circuit import (
    CircuitParams,
    ZakPoint,
    BiasPoint,
    ZERO_BIAS,
    wrap,
    zone_samples,
    K_PERIOD,
    PHI_PERIOD,
)
from src.utils.exceptions import InvalidParameterException

TWO_PI = 2.0 * math.pi


class NoiseChannel(str, Enum):
    """噪声通道"""
    CHARGE = "charge"
    FLUX = "flux"


class CriticalKind(str, Enum):
    """临界点类型"""
    MINIMUM = "minimum"
    SADDLE = "saddle"
    MAXIMUM = "maximum"


@dataclass(frozen=True)
class NoiseSpec:
    """白噪声幅度 ε_n（电荷）与 ε_φ（磁通）"""
    eps_n: float = 0.0
    eps_phi: float = 0.0

    def __post_init__(self):
        """验证数据"""
        for name in ("eps_n", "eps_phi"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise InvalidParameterException(name, f"噪声幅度必须为非负有限数，实际为 {value}")


@dataclass(frozen=True)
class CriticalPoint:
    """梯度为零的能谱临界点"""
    point: ZakPoint
    kind: CriticalKind
    codeword: Optional[str] = None  # GKP 码字标签


# ==================== 能谱 ====================

def energy(params: CircuitParams, p: ZakPoint) -> float:
    """
    本征能量 E = −E_Q·cos(2πk) − E_J·cos(φ)

    Args:
        params: 电路参数
        p: Zak 点

    Returns:
        能量
    """
    return -params.E_Q * math.cos(TWO_PI * p.k) - params.E_J * math.cos(p.phi)


def gradient(params: CircuitParams, p: ZakPoint) -> Tuple[float, float]:
    """
    能量梯度 (∂E/∂k, ∂E/∂φ) = (2π·E_Q·sin 2πk, E_J·sin φ)

    Args:
        params: 电路参数
        p: Zak 点

    Returns:
        (dE/dk, dE/dφ)
    """
    return (TWO_PI * params.E_Q * math.sin(TWO_PI * p.k), params.E_J * math.sin(p.phi))


def critical_points() -> List[CriticalPoint]:
    """四个临界本征态：基态、两个鞍点、最大值"""
    return [
        CriticalPoint(ZakPoint(0.0, 0.0), CriticalKind.MINIMUM, codeword="0"),
        CriticalPoint(ZakPoint(0.0, math.pi), CriticalKind.SADDLE, codeword="1"),
        CriticalPoint(ZakPoint(0.5, 0.0), CriticalKind.SADDLE),
        CriticalPoint(ZakPoint(0.5, math.pi), CriticalKind.MAXIMUM),
    ]


def classify_hessian(d2k: float, d2phi: float) -> Optional[CriticalKind]:
    """
    按 Hessian 对角元符号分类（两方向解耦，无交叉项）

    Args:
        d2k: ∂²E/∂k²
        d2phi: ∂²E/∂φ²

    Returns:
        临界点类型；任一方向曲率为零时返回 None
    """
    if d2k == 0 or d2phi == 0:
        return None
    if d2k > 0 and d2phi > 0:
        return CriticalKind.MINIMUM
    if d2k < 0 and d2phi < 0:
        return CriticalKind.MAXIMUM
    return CriticalKind.SADDLE


def biased_energy(params: CircuitParams, p: ZakPoint, b: BiasPoint) -> float:
    """
    偏置下的本征能量 −E_Q·cos(2π(k+n_x)) − E_J·cos(φ+φ_x)

    Args:
        params: 电路参数
        p: Zak 点
        b: 偏置

    Returns:
        能量
    """
    return (-params.E_Q * math.cos(TWO_PI * (p.k + b.n_x))
            - params.E_J * math.cos(p.phi + b.phi_x))


def cx_energy_shift(e_cx: float, p: ZakPoint, b: BiasPoint = ZERO_BIAS) -> float:
    """
    次级电荷项 E_Cx·cos(4π(n̂+n_x)) 在 Zak 基中的本征值

    该项与 cos(2πn̂) 对易，在 Zak 基中对角，故只平移能量。
    """
    return -e_cx * math.cos(2.0 * TWO_PI * (p.k + b.n_x))


def cx_preserves_critical_points(params: CircuitParams, e_cx: float, tol: float = 1e-12) -> bool:
    """加入 E_Cx 项后四个临界点的梯度仍为零"""
    for cp in critical_points():
        dk, dphi = gradient(params, cp.point)
        dk += 2.0 * TWO_PI * e_cx * math.sin(2.0 * TWO_PI * cp.point.k)
        if abs(dk) > tol or abs(dphi) > tol:
            return False
    return True


# ==================== 噪声与退相干 ====================

def gamma_kernel(y: float, y_prime: float) -> float:
    """γ(y, y′) = (sin y − sin y′)²"""
    return (math.sin(y) - math.sin(y_prime)) ** 2


def noise_operator_action(params: CircuitParams, which: NoiseChannel, p: ZakPoint) -> float:
    """
    噪声算符在 Zak 态上的本征值

    Args:
        params: 电路参数
        which: charge → 2π·E_Q·sin 2πk；flux → E_J·sin φ
        p: Zak 点

    Returns:
        本征值
    """
    which = NoiseChannel(which)
    if which is NoiseChannel.CHARGE:
        return TWO_PI * params.E_Q * math.sin(TWO_PI * p.k)
    return params.E_J * math.sin(p.phi)


def dephasing_rate(params: CircuitParams, noise: NoiseSpec, p: ZakPoint, p_prime: ZakPoint) -> float:
    """
    白噪声下两 Zak 态叠加的纯退相干速率

    Γ = (2π·ε_n·E_Q)²·γ(2πk, 2πk′) + (2π·ε_φ·E_J)²·γ(φ, φ′)

    Args:
        params: 电路参数
        noise: 噪声幅度
        p: 第一个 Zak 点
        p_prime: 第二个 Zak 点

    Returns:
        退相干速率（ħ = 1）
    """
    charge = (TWO_PI * noise.eps_n * params.E_Q) ** 2 * gamma_kernel(TWO_PI * p.k, TWO_PI * p_prime.k)
    flux = (TWO_PI * noise.eps_phi * params.E_J) ** 2 * gamma_kernel(p.phi, p_prime.phi)
    return charge + flux


def dephasing_from_actions(params: CircuitParams, noise: NoiseSpec, p: ZakPoint, p_prime: ZakPoint) -> float:
    """由噪声算符本征值重建 Γ：Σ rate·(a − a′)²/2，rate 为主方程中的耗散系数"""
    charge_rate = 2.0 * noise.eps_n ** 2
    flux_rate = 2.0 * (TWO_PI * noise.eps_phi) ** 2
    dn = (noise_operator_action(params, NoiseChannel.CHARGE, p)
          - noise_operator_action(params, NoiseChannel.CHARGE, p_prime))
    dphi = (noise_operator_action(params, NoiseChannel.FLUX, p)
            - noise_operator_action(params, NoiseChannel.FLUX, p_prime))
    return 0.5 * charge_rate * dn ** 2 + 0.5 * flux_rate * dphi ** 2


def master_equation_rates(noise: NoiseSpec) -> Tuple[float, float]:
    """白噪声主方程的耗散系数 (2ε_n², 2(2πε_φ)²)，分别对应 D[A_n] 与 D[A_φ]"""
    return 2.0 * noise.eps_n ** 2, 2.0 * (TWO_PI * noise.eps_phi) ** 2


# ==================== 网格扫描 ====================

def elementary_grid(
    params: CircuitParams,
    noise: NoiseSpec,
    nk: int,
    nphi: int,
    reference: ZakPoint = ZakPoint(0.0, 0.0),
) -> pd.DataFrame:
    """
    在 (k, φ) 网格上计算能量、梯度与相对参考态（默认基态）的 Γ

    Args:
        params: 电路参数
        noise: 噪声幅度
        nk: k 方向闭格点数（输出 nk − 1 个规范样本）
        nphi: φ 方向闭格点数
        reference: Γ 的参考态

    Returns:
        列为 k, phi, E, dE_dk, dE_dphi, Gamma_vs_ground 的表
    """
    k = zone_samples(nk, K_PERIOD)
    phi = zone_samples(nphi, PHI_PERIOD)
    kk, pp = np.meshgrid(k, phi, indexing="ij")

    e = -params.E_Q * np.cos(TWO_PI * kk) - params.E_J * np.cos(pp)
    de_dk = TWO_PI * params.E_Q * np.sin(TWO_PI * kk)
    de_dphi = params.E_J * np.sin(pp)
    gamma = ((TWO_PI * noise.eps_n * params.E_Q) ** 2
             * (np.sin(TWO_PI * kk) - math.sin(TWO_PI * reference.k)) ** 2
             + (TWO_PI * noise.eps_phi * params.E_J) ** 2
             * (np.sin(pp) - math.sin(reference.phi)) ** 2)

    return pd.DataFrame({
        "k": kk.ravel(),
        "phi": pp.ravel(),
        "E": e.ravel(),
        "dE_dk": de_dk.ravel(),
        "dE_dphi": de_dphi.ravel(),
        "Gamma_vs_ground": gamma.ravel(),
    })


def is_critical(p: ZakPoint) -> bool:
    """p 是否为四个临界点之一（规范化后比较）"""
    q = wrap(p.k, p.phi)
    return any(
        math.isclose(q.k, cp.point.k, abs_tol=1e-12) and math.isclose(q.phi, cp.point.phi, abs_tol=1e-12)
        for cp in critical_points()
    )
