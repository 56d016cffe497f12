#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Zak 表象下的独立校验

- pde_oracle: 在实空间磁通线上离散 Ĥ₁(k, φ)，谱方法求最低本征值，
  与数态基结果互为校验
- ho_zak_wavefunction: 振子基态在 Zak 基中的 θ 函数闭式
"""

import math
from typing import Optional, Tuple, Union

import numpy as np
from scipy import linalg

from config.settings import settings
from src.core.circuit import ZakPoint
from src.core.fock_engine import ModeOneSpec
from src.utils.exceptions import ConvergenceException, InvalidParameterException
from src.utils.logger import Logger

logger = Logger.get_logger("dualmon.zak")

TWO_PI = 2.0 * math.pi
MIN_RESOLUTION = 16
THETA_TOL = 1e-16

# 边缘区（最外两个 2π 周期）上允许的最大概率权重
_EDGE_WEIGHT_TOL = 1e-12
# 最高 1/8 波数上允许的最大谱权重
_SPECTRAL_TAIL_TOL = 1e-12

ArrayLike = Union[float, np.ndarray]


# ==================== 谱方法离散 ====================

def _flux_line(nl: int, ntheta: int) -> Tuple[np.ndarray, float]:
    """磁通线 Φ_j = −π·nl + j·h，h = 2π/nθ，共 nl·nθ 个点"""
    h = TWO_PI / ntheta
    points = -math.pi * nl + h * np.arange(nl * ntheta)
    return points, h


def _kinetic_matrix(size: int, h: float, offset: float) -> np.ndarray:
    """(n̂ + offset)² 的 Fourier 谱矩阵，n̂ = −i d/dΦ"""
    wavenumbers = TWO_PI * np.fft.fftfreq(size, d=h)
    symbol = (wavenumbers + offset) ** 2
    identity = np.eye(size)
    return np.fft.ifft(symbol[:, np.newaxis] * np.fft.fft(identity, axis=0), axis=0)


def discretized_hamiltonian(spec: ModeOneSpec, nl: int, ntheta: int) -> np.ndarray:
    """
    Ĥ₁ 在磁通线上的稠密矩阵

    扭曲环面 (l, θ) 上的边界条件 ψ(l, −π) = e^{2πil}ψ(l, π) 等价于把 θ 展开到
    整条磁通线 Φ = θ + 2πj；exp(i2πn̂₁) 即平移 Φ → Φ + 2π，恰为 nθ 个格点。

    Args:
        spec: 模式 1 输入（只用其参数、Zak 点与偏置）
        nl: 展开的 2π 周期数
        ntheta: 每个周期内的格点数

    Returns:
        (nl·nθ)×(nl·nθ) 厄米矩阵
    """
    params, point, bias = spec.params, spec.point, spec.bias
    flux, h = _flux_line(nl, ntheta)
    size = flux.size

    kinetic = params.E_C * _kinetic_matrix(size, h, bias.n_x)
    potential = params.E_L * (flux - bias.phi_x) ** 2 - params.E_J * np.cos(flux + point.phi)
    forward = np.roll(np.eye(size), ntheta, axis=1)  # F(Φ) → F(Φ + 2π)
    slip = np.exp(-1j * TWO_PI * point.k) * forward
    H = kinetic + np.diag(potential) - 0.5 * params.E_Q * (slip + slip.conj().T)
    return 0.5 * (H + H.conj().T)


def _check_resolution(vectors: np.ndarray, ntheta: int):
    weights = np.abs(vectors) ** 2
    edge = max(float(np.max(np.sum(weights[: 2 * ntheta], axis=0))),
               float(np.max(np.sum(weights[-2 * ntheta:], axis=0))))
    if edge > _EDGE_WEIGHT_TOL:
        raise ConvergenceException("磁通线长度 (nl)", edge, _EDGE_WEIGHT_TOL)

    spectrum = np.abs(np.fft.fft(vectors, axis=0)) ** 2
    spectrum /= np.sum(spectrum, axis=0, keepdims=True)
    order = np.argsort(np.abs(np.fft.fftfreq(vectors.shape[0])))
    tail = order[-max(1, vectors.shape[0] // 8):]
    high = float(np.max(np.sum(spectrum[tail], axis=0)))
    if high > _SPECTRAL_TAIL_TOL:
        raise ConvergenceException("磁通格点密度 (nθ)", high, _SPECTRAL_TAIL_TOL)


def pde_oracle(spec: ModeOneSpec, grid: Optional[Tuple[int, int]] = None, count: int = 3) -> np.ndarray:
    """
    用实空间谱离散求 Ĥ₁ 的最低 count 个本征值

    Args:
        spec: 模式 1 输入
        grid: (nl, nθ)，默认取 settings.PDE_NL / PDE_NTHETA
        count: 返回的本征值个数

    Returns:
        升序本征值

    Raises:
        InvalidParameterException: nl 或 nθ < 16
        ConvergenceException: 本征函数触及边缘或波数截断处仍有权重
    """
    nl, ntheta = grid if grid is not None else (settings.PDE_NL, settings.PDE_NTHETA)
    if nl < MIN_RESOLUTION or ntheta < MIN_RESOLUTION:
        raise InvalidParameterException("grid", f"nl, nθ 必须 >= {MIN_RESOLUTION}，实际为 ({nl}, {ntheta})")

    H = discretized_hamiltonian(spec, nl, ntheta)
    values, vectors = linalg.eigh(H, subset_by_index=[0, count - 1])
    _check_resolution(vectors, ntheta)
    logger.debug(f"🔧 PDE 校验: (k, φ)=({spec.point.k:.4f}, {spec.point.phi:.4f}), 网格 {nl}×{ntheta}")
    return values


# ==================== 振子基态的 Zak 波函数 ====================

def jacobi_theta3(u: ArrayLike, q: float, tol: float = THETA_TOL) -> ArrayLike:
    """
    ϑ₃(u, q) = Σ_n q^{n²}·e^{2inu}，项的模小于 tol 时截断

    Args:
        u: 复变量（标量或数组）
        q: 椭圆模 nome，0 < q < 1
        tol: 截断阈值

    Returns:
        与 u 同形的复数
    """
    if not (0.0 < q < 1.0):
        raise InvalidParameterException("q", f"必须在 (0, 1) 内，实际为 {q}")
    u = np.asarray(u, dtype=complex)
    total = np.ones_like(u)
    n = 1
    while True:
        weight = q ** (n * n)
        up = np.exp(2j * n * u)
        down = np.exp(-2j * n * u)
        total = total + weight * (up + down)
        largest = weight * float(np.max(np.maximum(np.abs(up), np.abs(down))))
        if largest < tol:
            break
        n += 1
    return total if total.ndim else complex(total)


def _ho_ground(z: float, x: np.ndarray) -> np.ndarray:
    return (math.pi * z) ** -0.25 * np.exp(-x ** 2 / (2.0 * z))


def ho_zak_wavefunction(z: float, p: Union[ZakPoint, Tuple[ArrayLike, ArrayLike]]) -> ArrayLike:
    """
    ψ₀(k, φ) = (πz)^{−1/4}·e^{−φ²/2z}·ϑ₃(πk + iπφ/z, e^{−2π²/z})

    Args:
        z: 振子阻抗
        p: ZakPoint，或 (k, φ) 数组对

    Returns:
        复振幅
    """
    if not (z > 0 and math.isfinite(z)):
        raise InvalidParameterException("z", f"必须为正有限数，实际为 {z}")
    k, phi = p.as_tuple() if isinstance(p, ZakPoint) else p
    k = np.asarray(k, dtype=float)
    phi = np.asarray(phi, dtype=float)
    theta = jacobi_theta3(math.pi * k + 1j * math.pi * phi / z, math.exp(-2.0 * math.pi ** 2 / z))
    return _ho_ground(z, phi) * theta


def ho_zak_image_sum(z: float, p: ZakPoint, jmax: int = 20) -> complex:
    """直接镜像求和 Σ_j e^{−2πijk}·ψ₀(φ − 2πj)，|j| <= jmax"""
    j = np.arange(-jmax, jmax + 1)
    terms = np.exp(-1j * TWO_PI * j * p.k) * _ho_ground(z, p.phi - TWO_PI * j)
    return complex(np.sum(terms))


def zak_norm(z: float, nk: int = 64, nphi: int = 64) -> float:
    """
    ∫dk∫dφ |ψ₀|² 的周期梯形求积

    |ψ₀|² 在 k 与 φ 方向都是周期函数，梯形公式指数收敛。
    """
    k = -0.5 + np.arange(nk) / nk
    phi = -math.pi + TWO_PI * np.arange(nphi) / nphi
    kk, pp = np.meshgrid(k, phi, indexing="ij")
    density = np.abs(ho_zak_wavefunction(z, (kk, pp))) ** 2
    return float(np.sum(density) * (1.0 / nk) * (TWO_PI / nphi))
