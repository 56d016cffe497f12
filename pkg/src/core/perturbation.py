#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
一阶微扰理论
弱非线性振子的能带、态混合系数，以及投影到基态流形的噪声算符
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from config.settings import settings
from src.core.circuit import CircuitParams, ZakPoint, impedance, oscillator_gap, renormalized_energies
from src.core.elementary import NoiseChannel, NoiseSpec, dephasing_rate
from src.core.fock_engine import ModeOneSpec, perturbation_matrix
from src.core.operators import build_operators
from src.utils.exceptions import InvalidParameterException, UnsupportedBandException

TWO_PI = 2.0 * math.pi


# ==================== 能量 ====================

def first_order_energy(params: CircuitParams, p: ZakPoint, band: int = 0) -> float:
    """
    一阶能量修正（相对 (m + 1/2)ħΩ 的偏移）

    Args:
        params: 电路参数
        p: Zak 点
        band: 0 使用 (E′_Q, E′_J)，1 使用 (E″_Q, E″_J)

    Returns:
        −E′_Q·cos(2πk) − E′_J·cos(φ)
    """
    e_q, e_j = renormalized_energies(params, band)
    return -e_q * math.cos(TWO_PI * p.k) - e_j * math.cos(p.phi)


def first_order_band_energy(params: CircuitParams, p: ZakPoint, band: int = 0) -> float:
    """含振子零点能的一阶能量 (m + 1/2)ħΩ + first_order_energy"""
    return (band + 0.5) * oscillator_gap(params) + first_order_energy(params, p, band)


# ==================== 矩阵元 ====================

def v_matrix_element_10(params: CircuitParams, p: ZakPoint) -> complex:
    """
    ⟦V⟧₁₀ = e^{−z/4}·sqrt(z/2)·E_J·sin φ − i·π·e^{−π²/z}·sqrt(2/z)·E_Q·sin 2πk

    Args:
        params: 电路参数（E_C, E_L > 0）
        p: Zak 点

    Returns:
        复能量
    """
    z = impedance(params)
    flux = math.exp(-z / 4.0) * math.sqrt(z / 2.0) * params.E_J * math.sin(p.phi)
    charge = math.pi * math.exp(-math.pi ** 2 / z) * math.sqrt(2.0 / z) * params.E_Q * math.sin(TWO_PI * p.k)
    return complex(flux, -charge)


def v_matrix(params: CircuitParams, p: ZakPoint, truncation: Optional[int] = None) -> np.ndarray:
    """非线性部分 V 在数态基中的矩阵，用于核对闭式矩阵元"""
    truncation = settings.DEFAULT_TRUNCATION if truncation is None else truncation
    return perturbation_matrix(ModeOneSpec(params, p, truncation=truncation))


def n1_row(z: float, m: int = 0, truncation: Optional[int] = None) -> np.ndarray:
    """⟦n̂₁⟧_{m,j}（j = 0..N−1），只有 j = m ± 1 非零"""
    truncation = settings.DEFAULT_TRUNCATION if truncation is None else truncation
    return np.array(build_operators(z, truncation).n1[m, :])


# ==================== 一阶态 ====================

@dataclass(frozen=True, eq=False)
class PerturbedState:
    """
    一阶微扰态 |Ψ_m⟩ ≈ |m⟩ + Σ_{j≠m} c_j|j⟩

    c_j = ⟦V⟧_{jm} / ((m − j)·ħΩ)，c_m = 0
    """
    band: int
    coefficients: np.ndarray

    def __post_init__(self):
        """验证数据"""
        if self.band < 0 or self.band >= self.coefficients.size:
            raise UnsupportedBandException(self.band)
        if self.coefficients[self.band] != 0:
            raise InvalidParameterException("coefficients", "c_m 必须为 0")

    @property
    def leading(self) -> complex:
        """单量子混合系数 c_{m+1}"""
        return complex(self.coefficients[self.band + 1])

    @property
    def max_mixing(self) -> float:
        return float(np.max(np.abs(self.coefficients)))

    def vector(self) -> np.ndarray:
        """归一化的一阶态矢量"""
        v = self.coefficients.astype(complex)
        v[self.band] = 1.0
        return v / np.linalg.norm(v)


def perturbed_state(
    params: CircuitParams,
    p: ZakPoint,
    band: int = 0,
    truncation: Optional[int] = None,
) -> PerturbedState:
    """
    由数态基矩阵 ⟦V⟧ 构造一阶混合系数

    Args:
        params: 电路参数（E_C, E_L > 0）
        p: Zak 点
        band: 未微扰能级 m
        truncation: 截断维数

    Returns:
        PerturbedState
    """
    V = v_matrix(params, p, truncation)
    N = V.shape[0]
    if not (0 <= band < N - 1):
        raise UnsupportedBandException(band)
    gap = oscillator_gap(params)
    j = np.arange(N)
    denominators = (band - j) * gap
    coefficients = np.zeros(N, dtype=complex)
    mask = j != band
    coefficients[mask] = V[mask, band] / denominators[mask]
    return PerturbedState(band=band, coefficients=coefficients)


# ==================== 投影噪声 ====================

def projected_noise(params: CircuitParams, which: NoiseChannel, p: ZakPoint) -> float:
    """
    投影到基态流形的噪声算符本征值

    Args:
        params: 电路参数
        which: charge → 2π·E′_Q·sin(2πk)；flux → E′_J·sin(φ)
        p: Zak 点

    Returns:
        能量
    """
    which = NoiseChannel(which)
    e_q, e_j = renormalized_energies(params, 0)
    if which is NoiseChannel.CHARGE:
        return TWO_PI * e_q * math.sin(TWO_PI * p.k)
    return e_j * math.sin(p.phi)


def single_quantum_noise(params: CircuitParams, which: NoiseChannel, p: ZakPoint) -> float:
    """
    只保留 c₁ 的一阶期望 ⟨Ψ₀|Â|Ψ₀⟩ ≈ 2·Re(c₁·⟦Â⟧₀₁)

    Â_n = 2E_C·n̂₁ 与 Â_φ = −2E_L·φ̂₁，结果与 projected_noise 解析相等。
    """
    which = NoiseChannel(which)
    z = impedance(params)
    c1 = -v_matrix_element_10(params, p) / oscillator_gap(params)
    if which is NoiseChannel.CHARGE:
        element = 2.0 * params.E_C * (-1j / math.sqrt(2.0 * z))
    else:
        element = -2.0 * params.E_L * math.sqrt(z / 2.0)
    return 2.0 * (c1 * element).real


def realistic_dephasing_rate(params: CircuitParams, noise: NoiseSpec, p: ZakPoint, p_prime: ZakPoint) -> float:
    """用重整化能量 (E′_Q, E′_J) 代入白噪声退相干公式"""
    e_q, e_j = renormalized_energies(params, 0)
    return dephasing_rate(CircuitParams(E_Q=e_q, E_J=e_j), noise, p, p_prime)
