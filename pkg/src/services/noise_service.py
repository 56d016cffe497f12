#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
噪声与耗散服务
波导热噪声导致的纯退相干、本征算符热跃迁速率，以及二能级/基态流形退相干模型
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import qutip

from config.settings import settings
from src.core.circuit import VALIDATED_BANDS, CircuitParams, ZakPoint, renormalized_energies
from src.core.elementary import (
    NoiseChannel,
    NoiseSpec,
    energy,
    gamma_kernel,
    master_equation_rates,
    noise_operator_action,
)
from src.core.fock_engine import ModeOneSpec, solve_mode_one
from src.core.lindblad import (
    CoherenceFit,
    LindbladModel,
    SuperpositionSpec,
    evolve,
    fit_coherence,
)
from src.utils.exceptions import ConvergenceException, InvalidParameterException
from src.utils.logger import Logger

logger = Logger.get_logger("dualmon.noise")

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ThermalEnvironment:
    """欧姆热库：J(ω) = ν·ħω，温度 k_BT（能量单位）"""
    nu: float
    kT: float

    def __post_init__(self):
        """验证数据"""
        for name in ("nu", "kT"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise InvalidParameterException(name, f"必须为非负有限数，实际为 {value}")


# ==================== 热库 ====================

def _require_positive_frequency(omega: float):
    if not (omega > 0 and math.isfinite(omega)):
        raise InvalidParameterException("omega", f"频率必须为正，实际为 {omega}")


def spectral_density(env: ThermalEnvironment, omega: float) -> float:
    """J(ω) = ν·ħω"""
    return env.nu * omega


def bose(env: ThermalEnvironment, omega: float) -> float:
    """N(ω) = 1/(e^{ħω/k_BT} − 1)，T = 0 时为 0"""
    _require_positive_frequency(omega)
    if env.kT == 0:
        return 0.0
    x = omega / env.kT
    if x > 700.0:
        return 0.0
    return 1.0 / math.expm1(x)


def thermal_weight(env: ThermalEnvironment, omega: float) -> float:
    """
    J(ω)·N(ω) = ν·ħω/(e^{ħω/k_BT} − 1)

    Args:
        env: 热库
        omega: 跃迁频率（> 0）

    Returns:
        热激发权重；ω → 0 时趋于 ν·k_BT
    """
    return spectral_density(env, omega) * bose(env, omega)


def zero_frequency_noise(env: ThermalEnvironment) -> float:
    """lim_{ω→0} J(ω)(2N(ω) + 1) = 2ν·k_BT"""
    return 2.0 * env.nu * env.kT


def waveguide_pure_dephasing(
    params: CircuitParams,
    env: ThermalEnvironment,
    J0N0: Optional[float],
    k: float,
    k_prime: float,
) -> float:
    """
    波导电荷涨落导致的纯退相干速率

    Γ = (π²·E′_Q/E_C)·J0N0·γ(2πk, 2πk′)

    Args:
        params: 电路参数（E_C, E_L > 0）
        env: 热库
        J0N0: 零频噪声强度；None 时取热库默认 2ν·k_BT
        k: 第一个态的准电荷
        k_prime: 第二个态的准电荷

    Returns:
        退相干速率
    """
    J0N0 = zero_frequency_noise(env) if J0N0 is None else J0N0
    if not math.isfinite(J0N0) or J0N0 < 0:
        raise InvalidParameterException("J0N0", f"必须为非负有限数，实际为 {J0N0}")
    e_q, _ = renormalized_energies(params, 0)
    return (math.pi ** 2 * e_q / params.E_C) * J0N0 * gamma_kernel(TWO_PI * k, TWO_PI * k_prime)


# ==================== 本征算符跃迁 ====================

@dataclass(frozen=True)
class TransitionRate:
    """能级 m → n（m > n）之间的热跃迁"""
    upper: int
    lower: int
    frequency: float
    down_rate: float
    up_rate: float
    matrix_element_sq: float

    @property
    def transition(self) -> str:
        return f"{self.upper}->{self.lower}"

    @property
    def validated(self) -> bool:
        """两端能级都有一阶公式可对照"""
        return self.upper in VALIDATED_BANDS

    @property
    def detailed_balance(self) -> float:
        """up/down，应等于 N/(N+1)"""
        return self.up_rate / self.down_rate if self.down_rate > 0 else 0.0


def eigenoperator_parts(vectors: np.ndarray, operator: np.ndarray) -> Dict[str, np.ndarray]:
    """
    把算符在本征基中分解为升、降与对角三部分

    Args:
        vectors: 本征矢（按列，能量升序）
        operator: 数态基中的算符

    Returns:
        {"raising": ⟨m|O|n⟩ (m > n), "lowering": (m < n), "diagonal"}，三者之和为 V†OV
    """
    O = vectors.conj().T @ operator @ vectors
    return {
        "raising": np.tril(O, k=-1),
        "lowering": np.triu(O, k=1),
        "diagonal": np.diag(np.diag(O)),
    }


def eigenoperator_rates(
    params: CircuitParams,
    env: ThermalEnvironment,
    p: ZakPoint,
    bands: int = 2,
    truncation: Optional[int] = None,
) -> List[TransitionRate]:
    """
    固定 (k, φ) 上各能级对之间的热跃迁速率

    下行速率 πJ(Ω)(N(Ω)+1)，上行速率 πJ(Ω)N(Ω)；矩阵元 |⟨Ψ_m|n̂₁|Ψ_n⟩|² 单独给出。
    (k, φ) 守恒，不产生流形内的跃迁项。

    Args:
        params: 电路参数（E_C, E_L > 0）
        env: 热库
        p: Zak 点
        bands: 参与的能级数，超过已验证的 2 个能级时额外跃迁标记为未验证
        truncation: 数态截断

    Returns:
        TransitionRate 列表（按 (upper, lower) 排序）
    """
    if bands < 2:
        raise InvalidParameterException("bands", f"至少需要 2 个能级，实际为 {bands}")
    if bands > len(VALIDATED_BANDS):
        logger.warning(f"⚠️  bands={bands} 超出已验证的 {len(VALIDATED_BANDS)} 个能级，m >= {len(VALIDATED_BANDS)} 的跃迁标记为未验证")
    truncation = settings.DEFAULT_TRUNCATION if truncation is None else truncation
    spec = ModeOneSpec(params, p, truncation=truncation)
    result = solve_mode_one(spec, bands)
    n1 = spec.operators().n1
    elements = eigenoperator_parts(result.vectors, n1)["raising"]

    rates = []
    for m in range(1, bands):
        for n in range(m):
            omega = float(result.values[m] - result.values[n])
            weight = bose(env, omega)
            J = spectral_density(env, omega)
            rate = TransitionRate(
                upper=m,
                lower=n,
                frequency=omega,
                down_rate=math.pi * J * (weight + 1.0),
                up_rate=math.pi * J * weight,
                matrix_element_sq=float(abs(elements[m, n]) ** 2),
            )
            if rate.down_rate > 0:
                expected = math.exp(-omega / env.kT) if env.kT > 0 else 0.0
                if not math.isclose(rate.detailed_balance, expected, rel_tol=1e-9, abs_tol=1e-300):
                    raise ConvergenceException(f"细致平衡 {rate.transition}", abs(rate.detailed_balance - expected), 1e-9 * expected)
            rates.append(rate)
    return rates


def rates_frame(rates: Sequence[TransitionRate]) -> pd.DataFrame:
    """列为 transition, frequency, up_rate, down_rate, matrix_element_sq, validated 的表"""
    return pd.DataFrame([
        {
            "transition": r.transition,
            "frequency": r.frequency,
            "up_rate": r.up_rate,
            "down_rate": r.down_rate,
            "matrix_element_sq": r.matrix_element_sq,
            "validated": r.validated,
        }
        for r in rates
    ])


def ground_excitation_rate(rates: Sequence[TransitionRate]) -> float:
    """基态向外的总激发速率 Σ_m up_rate·|⟨Ψ_m|n̂₁|Ψ_0⟩|²"""
    return sum(r.up_rate * r.matrix_element_sq for r in rates if r.lower == 0)


# ==================== 退相干速率 ====================

def _require_rates(**rates: float):
    for name, value in rates.items():
        if not math.isfinite(value) or value < 0:
            raise InvalidParameterException(name, f"速率必须为非负有限数，实际为 {value}")


def two_level_dephasing(gamma_minus: float, gamma_plus: float) -> float:
    """二能级相干衰减速率 (γ₊ + γ₋)/2"""
    _require_rates(gamma_minus=gamma_minus, gamma_plus=gamma_plus)
    return 0.5 * (gamma_plus + gamma_minus)


def ground_manifold_dephasing(gamma_plus_1: float, gamma_plus_2: float) -> float:
    """
    基态流形中两个态的相干衰减速率 (γ₊⁽¹⁾ + γ₊⁽²⁾)/2

    弛豫回到基态流形的布居不携带两态之间的相位，因此与 γ₋ 无关。
    """
    _require_rates(gamma_plus_1=gamma_plus_1, gamma_plus_2=gamma_plus_2)
    return 0.5 * (gamma_plus_1 + gamma_plus_2)


def thermal_ground_dephasing(
    params: CircuitParams,
    env: ThermalEnvironment,
    p: ZakPoint,
    p_prime: ZakPoint,
    bands: int = 2,
    truncation: Optional[int] = None,
) -> float:
    """两个基态流形 Zak 态之间由热激发决定的退相干速率"""
    up = ground_excitation_rate(eigenoperator_rates(params, env, p, bands, truncation))
    up_prime = ground_excitation_rate(eigenoperator_rates(params, env, p_prime, bands, truncation))
    return ground_manifold_dephasing(up, up_prime)


# ==================== 主方程模型 ====================

def two_level_model(omega: float, gamma_minus: float, gamma_plus: float) -> LindbladModel:
    """
    基 (|g⟩, |e⟩) 上的二能级模型：H = diag(−ω/2, ω/2)，
    耗散 γ₋·D[σ⁻] + γ₊·D[σ⁺]
    """
    _require_rates(gamma_minus=gamma_minus, gamma_plus=gamma_plus)
    H = -0.5 * omega * qutip.sigmaz()
    lower = qutip.destroy(2)
    return LindbladModel.build(H, [(lower, gamma_minus), (lower.dag(), gamma_plus)])


def ground_manifold_model(
    omega_1: float,
    omega_2: float,
    gamma_plus: Tuple[float, float],
    gamma_minus: Tuple[float, float],
) -> LindbladModel:
    """
    基 (|g₁⟩, |e₁⟩, |g₂⟩, |e₂⟩) 上的四能级模型

    两个 (k, φ) 各自的激发/弛豫是独立的耗散项，没有把两者连起来的跃迁。

    Args:
        omega_1: 第一个态的跃迁频率
        omega_2: 第二个态的跃迁频率
        gamma_plus: (γ₊⁽¹⁾, γ₊⁽²⁾)
        gamma_minus: (γ₋⁽¹⁾, γ₋⁽²⁾)

    Returns:
        LindbladModel
    """
    _require_rates(gamma_plus_1=gamma_plus[0], gamma_plus_2=gamma_plus[1],
                   gamma_minus_1=gamma_minus[0], gamma_minus_2=gamma_minus[1])
    H = np.diag([-0.5 * omega_1, 0.5 * omega_1, -0.5 * omega_2, 0.5 * omega_2])
    terms = []
    for g, e, up, down in ((0, 1, gamma_plus[0], gamma_minus[0]), (2, 3, gamma_plus[1], gamma_minus[1])):
        lower = qutip.projection(4, g, e)
        terms.append((lower, down))
        terms.append((lower.dag(), up))
    return LindbladModel.build(H, terms)


def elementary_superposition_model(params: CircuitParams, noise: NoiseSpec, spec: SuperpositionSpec) -> LindbladModel:
    """
    理想电路白噪声下两 Zak 态的主方程

    基 (|p⟩, |p′⟩) 中 H 与两个噪声算符都是对角的。
    """
    H = np.diag([energy(params, spec.p), energy(params, spec.p_prime)])
    charge_rate, flux_rate = master_equation_rates(noise)
    A_n = np.diag([noise_operator_action(params, NoiseChannel.CHARGE, q) for q in (spec.p, spec.p_prime)])
    A_phi = np.diag([noise_operator_action(params, NoiseChannel.FLUX, q) for q in (spec.p, spec.p_prime)])
    return LindbladModel.build(H, [(A_n, charge_rate), (A_phi, flux_rate)])


def simulate_coherence(
    model: LindbladModel,
    rho0: np.ndarray,
    i: int,
    j: int,
    duration: float,
    samples: int = 41,
) -> CoherenceFit:
    """
    积分主方程并拟合 ρ_ij(t) 的衰减率与振荡频率

    Args:
        model: Lindblad 模型
        rho0: 初始密度矩阵
        i: 行指标
        j: 列指标
        duration: 积分时长
        samples: 采样点数

    Returns:
        CoherenceFit
    """
    if not (duration > 0):
        raise InvalidParameterException("duration", f"必须为正，实际为 {duration}")
    times = np.linspace(0.0, duration, samples)
    trajectory = evolve(model, rho0, times)
    fit = fit_coherence(times, trajectory.element(i, j))
    logger.debug(f"🔧 相干拟合: rate={fit.rate:.6e}, frequency={fit.frequency:.6e}, residual={fit.residual:.2e}")
    return fit
