#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
模式 1 哈密顿量的非微扰对角化

Ĥ₁(k, φ) = E_C(n̂₁+n_x)² + E_L(φ̂₁−φ_x)² − E_Q·cos(2π(n̂₁−k)) − E_J·cos(φ̂₁+φ)

在振子数态基中用解析位移矩阵元表示；(k, φ) 只以相位因子进入，
因此同一 (z, N) 的算符在整个网格扫描中复用。
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from config.settings import settings
from src.core.circuit import (
    BiasPoint,
    CircuitParams,
    ZakPoint,
    ZERO_BIAS,
    impedance,
    oscillator_gap,
)
from src.core.operators import (
    MIN_TRUNCATION,
    EigenResult,
    OscillatorOperators,
    TruncatedOperator,
    build_operators,
    eigensolve,
    eigenvalues,
)
from src.utils.exceptions import ConvergenceException, InvalidParameterException
from src.utils.logger import Logger

logger = Logger.get_logger("dualmon.fock")

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ModeOneSpec:
    """模式 1 哈密顿量的完整输入"""
    params: CircuitParams
    point: ZakPoint
    bias: BiasPoint = ZERO_BIAS
    truncation: int = field(default_factory=lambda: settings.DEFAULT_TRUNCATION)

    def __post_init__(self):
        """验证数据"""
        if self.truncation < MIN_TRUNCATION:
            raise InvalidParameterException("truncation", f"必须 >= {MIN_TRUNCATION}，实际为 {self.truncation}")
        impedance(self.params)  # E_C, E_L > 0

    @property
    def z(self) -> float:
        return impedance(self.params)

    @property
    def hbar_omega(self) -> float:
        return oscillator_gap(self.params)

    def with_truncation(self, N: int) -> "ModeOneSpec":
        return ModeOneSpec(self.params, self.point, self.bias, N)

    def with_point(self, point: ZakPoint, bias: Optional[BiasPoint] = None) -> "ModeOneSpec":
        return ModeOneSpec(self.params, point, self.bias if bias is None else bias, self.truncation)

    def operators(self) -> OscillatorOperators:
        return build_operators(self.z, self.truncation)


def _quadratic_part(params: CircuitParams, ops: OscillatorOperators, bias: BiasPoint) -> np.ndarray:
    """E_C(n̂₁+n_x)² + E_L(φ̂₁−φ_x)²"""
    identity = np.eye(ops.N, dtype=complex)
    charge = ops.n1_sq + 2.0 * bias.n_x * ops.n1 + bias.n_x ** 2 * identity
    flux = ops.phi1_sq - 2.0 * bias.phi_x * ops.phi1 + bias.phi_x ** 2 * identity
    return params.E_C * charge + params.E_L * flux


def _nonlinear_part(params: CircuitParams, ops: OscillatorOperators, point: ZakPoint) -> np.ndarray:
    """−(E_Q/2)(e^{−i2πk}exp(i2πn̂₁) + h.c.) − (E_J/2)(e^{iφ}exp(iφ̂₁) + h.c.)"""
    q_term = np.exp(-1j * TWO_PI * point.k) * ops.exp_i2pin
    j_term = np.exp(1j * point.phi) * ops.exp_iphi
    return (-0.5 * params.E_Q * (q_term + q_term.conj().T)
            - 0.5 * params.E_J * (j_term + j_term.conj().T))


def build_hamiltonian(spec: ModeOneSpec) -> TruncatedOperator:
    """
    构造截断数态基下的 Ĥ₁(k, φ; n_x, φ_x)

    Args:
        spec: 模式 1 输入

    Returns:
        厄米 TruncatedOperator
    """
    ops = spec.operators()
    H = _quadratic_part(spec.params, ops, spec.bias) + _nonlinear_part(spec.params, ops, spec.point)
    return TruncatedOperator(H)


def perturbation_matrix(spec: ModeOneSpec) -> np.ndarray:
    """非线性部分 V = Ĥ₁ − Ĥ_HO（零偏置）在数态基中的矩阵 ⟦V⟧"""
    return _nonlinear_part(spec.params, spec.operators(), spec.point)


def solve_mode_one(spec: ModeOneSpec, count: int = 2) -> EigenResult:
    """对 Ĥ₁ 求最低 count 个本征对"""
    return eigensolve(build_hamiltonian(spec), count)


def mode_one_energies(spec: ModeOneSpec, count: int = 2) -> np.ndarray:
    """Ĥ₁ 的最低 count 个本征值"""
    return eigenvalues(build_hamiltonian(spec), count)


# ==================== 噪声算符 ====================

def charge_noise_operator(spec: ModeOneSpec) -> TruncatedOperator:
    """电荷噪声算符 Â_n = ∂Ĥ/∂n_x = 2E_C(n̂₁+n_x)"""
    ops = spec.operators()
    identity = np.eye(ops.N, dtype=complex)
    return TruncatedOperator(2.0 * spec.params.E_C * (ops.n1 + spec.bias.n_x * identity))


def flux_noise_operator(spec: ModeOneSpec) -> TruncatedOperator:
    """磁通噪声算符 Â_φ = ∂Ĥ/∂φ_x = −2E_L(φ̂₁−φ_x)"""
    ops = spec.operators()
    identity = np.eye(ops.N, dtype=complex)
    return TruncatedOperator(-2.0 * spec.params.E_L * (ops.phi1 - spec.bias.phi_x * identity))


def elementary_operators(params: CircuitParams, z: float, N: int) -> Dict[str, TruncatedOperator]:
    """
    理想电路的 Ĥ、Â_n、Â_φ 在振子数态基中的表示

    Ĥ = −E_Q·cos(2πn̂) − E_J·cos(φ̂)，Â_n = 2πE_Q·sin(2πn̂)，Â_φ = E_J·sin(φ̂)。
    三者在无穷维中两两对易；截断后只在低数态子块中对易。

    Args:
        params: 电路参数（只用 E_Q, E_J）
        z: 表示所用振子基的阻抗
        N: 截断维数

    Returns:
        {"H", "A_n", "A_phi"}
    """
    ops = build_operators(z, N)
    U_n, U_phi = ops.exp_i2pin, ops.exp_iphi
    cos_n = 0.5 * (U_n + U_n.conj().T)
    sin_n = (U_n - U_n.conj().T) / 2j
    cos_phi = 0.5 * (U_phi + U_phi.conj().T)
    sin_phi = (U_phi - U_phi.conj().T) / 2j
    return {
        "H": TruncatedOperator(-params.E_Q * cos_n - params.E_J * cos_phi),
        "A_n": TruncatedOperator(TWO_PI * params.E_Q * sin_n),
        "A_phi": TruncatedOperator(params.E_J * sin_phi),
    }


def numeric_projected_noise(spec: ModeOneSpec, band: int = 0) -> Dict[str, float]:
    """
    用数值本征矢计算 ⟨Ψ_m|Â_n|Ψ_m⟩ 与 ⟨Ψ_m|Â_φ|Ψ_m⟩

    Args:
        spec: 模式 1 输入
        band: 能带 m

    Returns:
        {"charge": ..., "flux": ...}
    """
    result = solve_mode_one(spec, band + 1)
    vector = result.vectors[:, band]
    return {
        "charge": charge_noise_operator(spec).expectation(vector).real,
        "flux": flux_noise_operator(spec).expectation(vector).real,
    }


# ==================== 收敛性 ====================

@dataclass(frozen=True)
class ConvergenceReport:
    """截断收敛检查结果"""
    truncation: int
    reference_truncation: int
    drift: float  # 以 ħΩ 为单位
    tol: float

    @property
    def converged(self) -> bool:
        return self.drift < self.tol


def check_convergence(
    spec: ModeOneSpec,
    count: int = 2,
    step: Optional[int] = None,
    tol: Optional[float] = None,
    raise_on_failure: bool = False,
) -> ConvergenceReport:
    """
    比较截断 N 与 N + step 的最低 count 个本征值

    Args:
        spec: 模式 1 输入
        count: 比较的本征值个数
        step: 截断增量，默认 settings.CONVERGENCE_STEP
        tol: 相对 ħΩ 的容差，默认 settings.CONVERGENCE_TOL
        raise_on_failure: 未收敛时抛出 ConvergenceException

    Returns:
        ConvergenceReport
    """
    step = settings.CONVERGENCE_STEP if step is None else step
    tol = settings.CONVERGENCE_TOL if tol is None else tol
    low = mode_one_energies(spec, count)
    high = mode_one_energies(spec.with_truncation(spec.truncation + step), count)
    drift = float(np.max(np.abs(high - low))) / spec.hbar_omega
    report = ConvergenceReport(spec.truncation, spec.truncation + step, drift, tol)
    if not report.converged:
        logger.warning(f"⚠️  截断 N={spec.truncation} 未收敛: 漂移 {drift:.3e}·ħΩ")
        if raise_on_failure:
            raise ConvergenceException(f"截断 N={spec.truncation}", drift, tol)
    return report
