#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
波导透射谱服务
耦合常数、带间跃迁频率图、驱动二能级透射、偏置扫描与谱学定位
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import qutip
from scipy import ndimage

from config.settings import settings
from src.core.circuit import (
    BiasPoint,
    CircuitParams,
    K_PERIOD,
    PHI_PERIOD,
    ZakPoint,
    ZERO_BIAS,
    impedance,
    oscillator_gap,
    renormalized_energies,
    wrap,
    zone_samples,
)
from src.core.fock_engine import ModeOneSpec, mode_one_energies
from src.core.lindblad import LindbladModel, evolve, steady_state
from src.utils.exceptions import ConvergenceException, InvalidParameterException
from src.utils.logger import Logger
from src.utils.parallel import parallel_map

logger = Logger.get_logger("dualmon.spectroscopy")

TWO_PI = 2.0 * math.pi
REFERENCE_POINT = ZakPoint(0.0, math.pi)

# 基 (|g⟩, |e⟩)，σ⁻ = |g⟩⟨e|
_SIGMA_MINUS = qutip.destroy(2)


# ==================== 耦合常数 ====================

def coupling_constants(coupling_ratio: float, impedance_factor: float, omega: float) -> Tuple[float, float, float]:
    """
    波导耦合常数（约化单位，8e²/πħ² 并入 Z_wg）

    ν = 8·(C_c/C)²·Z_wg/π，g(ω) = 2·(C_c/C)·sqrt(2ωZ_wg/π)，J(ω) = ν·ω = g(ω)²

    Args:
        coupling_ratio: C_c/C
        impedance_factor: 约化波导阻抗 Z_wg
        omega: 频率（> 0）

    Returns:
        (g, ν, J)
    """
    if not (omega > 0 and math.isfinite(omega)):
        raise InvalidParameterException("omega", f"频率必须为正，实际为 {omega}")
    for name, value in (("coupling_ratio", coupling_ratio), ("impedance_factor", impedance_factor)):
        if not math.isfinite(value) or value < 0:
            raise InvalidParameterException(name, f"必须为非负有限数，实际为 {value}")
    nu = 8.0 * coupling_ratio * coupling_ratio * impedance_factor / math.pi
    g = 2.0 * coupling_ratio * math.sqrt(2.0 * omega * impedance_factor / math.pi)
    J = nu * omega
    if not (math.isfinite(J) and math.isfinite(g * g)):
        raise InvalidParameterException("coupling_ratio", f"耦合常数溢出: ν = {nu}, g = {g}")
    if not math.isclose(J, g * g, rel_tol=1e-12, abs_tol=1e-300):
        raise ConvergenceException("耦合常数 g² = J", abs(J - g * g), 1e-12 * J)
    return g, nu, J


@dataclass(frozen=True)
class WaveguideParams:
    """驱动波导参数：线宽 γ、驱动幅度 α（sqrt(速率) 单位）、驱动频率 ω_D、谱密度斜率 ν"""
    gamma: float
    alpha: float
    omega_d: float
    nu: float = 0.0

    def __post_init__(self):
        """验证数据"""
        for name in ("gamma", "alpha", "omega_d", "nu"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise InvalidParameterException(name, f"必须为非负有限数，实际为 {value}")

    @property
    def drive_power(self) -> float:
        """ħα²"""
        return self.alpha ** 2

    def is_weak_drive(self, params: CircuitParams) -> bool:
        return self.drive_power <= params.E_J

    @classmethod
    def defaults(cls, params: CircuitParams, reference: ZakPoint = REFERENCE_POINT) -> "WaveguideParams":
        """
        γ = GAMMA_RATIO·ω_D，ħα² = DRIVE_POWER_RATIO·E_J，ω_D 取参考态的跃迁频率
        """
        omega_d = transition_frequency(params, reference)
        return cls(
            gamma=settings.GAMMA_RATIO * omega_d,
            alpha=math.sqrt(settings.DRIVE_POWER_RATIO * params.E_J),
            omega_d=omega_d,
        )


# ==================== 跃迁频率 ====================

def transition_frequency(params: CircuitParams, p: ZakPoint) -> float:
    """
    一阶带间跃迁频率 Ω⁽¹⁰⁾(k, φ) = ħΩ + (2π²/z)·E′_Q·cos 2πk + (z/2)·E′_J·cos φ

    Args:
        params: 电路参数（E_C, E_L > 0）
        p: Zak 点

    Returns:
        频率（ħ = 1）
    """
    z = impedance(params)
    e_q, e_j = renormalized_energies(params, 0)
    return (oscillator_gap(params)
            + (2.0 * math.pi ** 2 / z) * e_q * math.cos(TWO_PI * p.k)
            + (z / 2.0) * e_j * math.cos(p.phi))


def _transition_grid(params: CircuitParams, k: np.ndarray, phi: np.ndarray) -> np.ndarray:
    z = impedance(params)
    e_q, e_j = renormalized_energies(params, 0)
    kk, pp = np.meshgrid(k, phi, indexing="ij")
    return (oscillator_gap(params)
            + (2.0 * math.pi ** 2 / z) * e_q * np.cos(TWO_PI * kk)
            + (z / 2.0) * e_j * np.cos(pp))


def _distinct_points(k: np.ndarray, phi: np.ndarray, cells: np.ndarray) -> List[ZakPoint]:
    return sorted({wrap(k[i], phi[j]) for i, j in cells}, key=lambda q: q.as_tuple())


@dataclass(frozen=True, eq=False)
class TransitionMap:
    """Ω⁽¹⁰⁾ 在规范网格上的采样"""
    k: np.ndarray
    phi: np.ndarray
    omega: np.ndarray

    def level_set(self, target: float, delta: float) -> np.ndarray:
        """|Ω − target| <= δ 的格点掩码"""
        if not (delta > 0):
            raise InvalidParameterException("delta", f"必须为正，实际为 {delta}")
        return np.abs(self.omega - target) <= delta

    def level_set_count(self, target: float, delta: float) -> int:
        return int(np.sum(self.level_set(target, delta)))

    def extremum_points(self, kind: str) -> List[ZakPoint]:
        """取到全局最大（kind="max"）或最小（"min"）值的不同 Zak 点"""
        target = np.max(self.omega) if kind == "max" else np.min(self.omega)
        tol = 1e-12 * max(1.0, abs(float(target)))
        return _distinct_points(self.k, self.phi, np.argwhere(np.abs(self.omega - target) <= tol))

    def to_frame(self) -> pd.DataFrame:
        """列为 k, phi, omega10"""
        kk, pp = np.meshgrid(self.k, self.phi, indexing="ij")
        return pd.DataFrame({"k": kk.ravel(), "phi": pp.ravel(), "omega10": self.omega.ravel()})


def transition_map(params: CircuitParams, nk: int, nphi: int) -> TransitionMap:
    """
    Ω⁽¹⁰⁾ 的均匀网格采样

    Args:
        params: 电路参数
        nk: k 方向闭格点数（nk − 1 个规范样本）
        nphi: φ 方向闭格点数

    Returns:
        TransitionMap
    """
    k = zone_samples(nk, K_PERIOD)
    phi = zone_samples(nphi, PHI_PERIOD)
    return TransitionMap(k=k, phi=phi, omega=_transition_grid(params, k, phi))


# ==================== 谱学定位 ====================

@dataclass(frozen=True, eq=False)
class LocalizationResult:
    """
    测得跃迁频率后与之相容的格点区域

    flat_components 在展开的 (−1/2, 1/2] × (−π, π] 平面上计数；
    periodic_components 在环面上计数，首尾行、首尾列互为邻居。
    """
    omega_meas: float
    delta: float
    mask: np.ndarray
    k: np.ndarray
    phi: np.ndarray
    flat_components: int
    periodic_components: int

    @property
    def consistent(self) -> bool:
        return bool(np.any(self.mask))

    @property
    def cell_count(self) -> int:
        return int(np.sum(self.mask))

    def cells(self) -> List[Tuple[float, float]]:
        return [(float(self.k[i]), float(self.phi[j])) for i, j in np.argwhere(self.mask)]


def _periodic_component_count(labels: np.ndarray, count: int) -> int:
    """把跨越 k 与 φ 接缝（8 邻接）相邻的连通分量合并"""
    parent = list(range(count + 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int):
        if a and b:
            parent[find(a)] = find(b)

    rows, cols = labels.shape
    for shift in (-1, 0, 1):
        for j in range(cols):
            union(int(labels[0, j]), int(labels[-1, (j + shift) % cols]))
        for i in range(rows):
            union(int(labels[i, 0]), int(labels[(i + shift) % rows, -1]))
    return len({find(x) for x in range(1, count + 1)})


def localize_state(
    params: CircuitParams,
    omega_meas: float,
    delta: float,
    nk: Optional[int] = None,
    nphi: Optional[int] = None,
) -> LocalizationResult:
    """
    与测得频率 Ω_meas 相容（|Ω⁽¹⁰⁾ − Ω_meas| <= δΩ）的所有格点

    区域为空时返回 consistent=False 的结果而不抛异常；多个连通分量表示简并，
    需要调节偏置才能区分。

    Args:
        params: 电路参数
        omega_meas: 测得的跃迁频率
        delta: 频率分辨率 δΩ（> 0）
        nk: k 方向闭格点数，默认 settings.MAP_NK
        nphi: φ 方向闭格点数，默认 settings.MAP_NPHI

    Returns:
        LocalizationResult
    """
    tmap = transition_map(params, nk or settings.MAP_NK, nphi or settings.MAP_NPHI)
    mask = tmap.level_set(omega_meas, delta)
    labels, count = ndimage.label(mask, structure=np.ones((3, 3), dtype=int))
    periodic = _periodic_component_count(labels, count) if count else 0
    if count == 0:
        logger.info(f"⚠️  Ω_meas={omega_meas:.6g} 在 ±{delta:.3g} 内无相容态")
    return LocalizationResult(
        omega_meas=omega_meas, delta=delta, mask=mask, k=tmap.k, phi=tmap.phi,
        flat_components=int(count), periodic_components=periodic,
    )


# ==================== 透射谱 ====================

def drive_model(delta: float, gamma: float, alpha: float) -> LindbladModel:
    """
    旋转坐标系中的驱动二能级模型

    H = −δ·σ⁺σ⁻ + i·sqrt(γ)·(α·σ⁻ − α·σ⁺)，耗散 γ·D[σ⁻]；δ 为驱动相对该态跃迁的失谐。
    """
    amplitude = math.sqrt(gamma) * alpha
    sm = _SIGMA_MINUS
    H = -delta * sm.dag() * sm + 1j * amplitude * (sm - sm.dag())
    return LindbladModel.build(H, [(_SIGMA_MINUS, gamma)])


def output_transmission(rho: np.ndarray, gamma: float, alpha: float, eta: float = 1.0) -> float:
    """T = |⟨b⟩/α|²，⟨b⟩ = α + sqrt(γ)·η·⟨σ⁻⟩"""
    sigma_minus = complex(qutip.expect(_SIGMA_MINUS, qutip.Qobj(rho)))
    b = alpha + math.sqrt(gamma) * eta * sigma_minus
    return abs(b / alpha) ** 2


def optical_bloch_transmission(delta: np.ndarray, gamma: float, alpha: float) -> np.ndarray:
    """
    闭式稳态透射 T = 1 − 4s/(x² + s + 1)²，x = 2δ/γ，s = 8α²/γ

    Args:
        delta: 失谐（可为数组）
        gamma: 线宽
        alpha: 驱动幅度

    Returns:
        T
    """
    x = 2.0 * np.asarray(delta, dtype=float) / gamma
    s = 8.0 * alpha ** 2 / gamma
    return 1.0 - 4.0 * s / (x ** 2 + s + 1.0) ** 2


@dataclass(frozen=True, eq=False)
class TransmissionTrace:
    """以参考跃迁为零点的失谐轴与透射率"""
    detunings: np.ndarray
    transmission: np.ndarray
    state: ZakPoint
    state_offset: float  # Ω⁽¹⁰⁾(state) − Ω⁽¹⁰⁾(reference)
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    weak_drive: bool = True

    def __post_init__(self):
        """验证数据"""
        if self.detunings.shape != self.transmission.shape:
            raise InvalidParameterException("transmission", "失谐与透射率长度不一致")
        if np.any(self.transmission < -1e-12):
            raise InvalidParameterException("transmission", "透射率必须非负")

    def to_frame(self) -> pd.DataFrame:
        """列为 detuning, T"""
        return pd.DataFrame({"detuning": self.detunings, "T": self.transmission})

    def metadata(self) -> dict:
        return {
            "state": {"k": self.state.k, "phi": self.state.phi},
            "state_offset": self.state_offset,
            "max_residual": float(np.max(self.residuals)) if self.residuals.size else 0.0,
            "weak_drive": self.weak_drive,
        }


def locate_dip(trace: TransmissionTrace) -> float:
    """
    透射最小值所在失谐，用相邻三点抛物线插值细化

    Args:
        trace: 透射谱

    Returns:
        失谐
    """
    T = trace.transmission
    i = int(np.argmin(T))
    if i == 0 or i == T.size - 1:
        return float(trace.detunings[i])
    x0, x1, x2 = trace.detunings[i - 1:i + 2]
    y0, y1, y2 = T[i - 1:i + 2]
    denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
    b = (x2 ** 2 * (y0 - y1) + x1 ** 2 * (y2 - y0) + x0 ** 2 * (y1 - y2)) / denom
    if a <= 0:
        return float(x1)
    return float(-b / (2.0 * a))


class SpectroscopyService:
    """透射谱与偏置扫描服务"""

    def __init__(self, threads: Optional[int] = None, show_progress: Optional[bool] = None):
        """
        初始化谱学服务

        Args:
            threads: 并行线程数，默认 settings.THREADS
            show_progress: 是否显示进度条
        """
        self.threads = threads or settings.THREADS
        self.show_progress = settings.SHOW_PROGRESS if show_progress is None else show_progress

    def transmission_trace(
        self,
        params: CircuitParams,
        wg: WaveguideParams,
        p: ZakPoint,
        detunings: Sequence[float],
        reference: ZakPoint = REFERENCE_POINT,
    ) -> TransmissionTrace:
        """
        系统处于 |Ψ_{0;k,φ}⟩ 时的稳态透射谱

        失谐轴 Δ = ω_D − Ω⁽¹⁰⁾(reference)；每个 Δ 上求旋转坐标系二能级模型的零空间稳态。

        Args:
            params: 电路参数
            wg: 波导参数
            p: 系统所处的 Zak 态
            detunings: 失谐采样
            reference: 失谐零点对应的参考态，默认 (0, π)

        Returns:
            TransmissionTrace
        """
        weak = wg.is_weak_drive(params)
        if not weak:
            logger.warning(f"⚠️  驱动功率 ħα²={wg.drive_power:.3g} 超过 E_J={params.E_J:.3g}，不在弱驱动区")
        offset = transition_frequency(params, p) - transition_frequency(params, reference)
        detunings = np.asarray(detunings, dtype=float)

        def solve(detuning: float) -> Tuple[float, float]:
            result = steady_state(drive_model(detuning - offset, wg.gamma, wg.alpha))
            return output_transmission(result.rho.matrix, wg.gamma, wg.alpha), result.residual

        results = parallel_map(solve, list(detunings), threads=self.threads,
                               desc="透射谱", show_progress=self.show_progress)
        return TransmissionTrace(
            detunings=detunings,
            transmission=np.array([t for t, _ in results]),
            state=p,
            state_offset=offset,
            residuals=np.array([r for _, r in results]),
            weak_drive=weak,
        )

    def bias_scan(
        self,
        params: CircuitParams,
        p0: ZakPoint,
        nb_n: int,
        nb_phi: int,
        band: int = 0,
        truncation: Optional[int] = None,
    ) -> pd.DataFrame:
        """
        固定 (k, φ) = p0，在偏置网格上求第 band 条能级

        Args:
            params: 电路参数
            p0: 系统所处的 Zak 态
            nb_n: n_x 方向闭格点数（nb_n − 1 个偏置样本）
            nb_phi: φ_x 方向闭格点数
            band: 能级编号
            truncation: 数态截断

        Returns:
            列为 n_x, phi_x, E 的表
        """
        truncation = truncation or settings.DEFAULT_TRUNCATION
        ModeOneSpec(params, p0, ZERO_BIAS, truncation)  # 参数校验
        n_x = zone_samples(nb_n, K_PERIOD)
        phi_x = zone_samples(nb_phi, PHI_PERIOD)
        biases = [(float(a), float(b)) for a in n_x for b in phi_x]

        def solve(bias: Tuple[float, float]) -> float:
            spec = ModeOneSpec(params, p0, BiasPoint(*bias), truncation)
            return float(mode_one_energies(spec, band + 1)[band])

        energies = parallel_map(solve, biases, threads=self.threads,
                                desc="偏置扫描", show_progress=self.show_progress)
        return pd.DataFrame({
            "n_x": [b[0] for b in biases],
            "phi_x": [b[1] for b in biases],
            "E": energies,
        })


def transmission_time_domain(
    params: CircuitParams,
    wg: WaveguideParams,
    p: ZakPoint,
    detuning: float,
    duration: Optional[float] = None,
    reference: ZakPoint = REFERENCE_POINT,
) -> float:
    """
    从基态出发长时间积分驱动模型，返回末时刻的透射率

    Args:
        params: 电路参数
        wg: 波导参数
        p: Zak 态
        detuning: 相对参考跃迁的失谐
        duration: 积分时长，默认 60/γ
        reference: 参考态

    Returns:
        T
    """
    if wg.gamma <= 0:
        raise InvalidParameterException("gamma", "时间域透射要求 γ > 0")
    offset = transition_frequency(params, p) - transition_frequency(params, reference)
    duration = 60.0 / wg.gamma if duration is None else duration
    model = drive_model(detuning - offset, wg.gamma, wg.alpha)
    rho0 = qutip.fock_dm(2, 0)
    trajectory = evolve(model, rho0, np.linspace(0.0, duration, 3))
    return output_transmission(trajectory.final.matrix, wg.gamma, wg.alpha)


# ==================== 偏置等价 ====================

@dataclass(frozen=True)
class BiasCheck:
    """偏置与平移的谱比较结果"""
    passed: bool
    deviation: float


def bias_shift_check(
    params: CircuitParams,
    p: ZakPoint,
    b: BiasPoint,
    tol: Optional[float] = None,
    truncation: Optional[int] = None,
    count: int = 3,
) -> BiasCheck:
    """
    比较 Ĥ₁((k, φ); (n_x, φ_x)) 与 Ĥ₁((k + n_x, φ + φ_x); 0) 的最低 count 个本征值

    Args:
        params: 电路参数
        p: Zak 点
        b: 偏置
        tol: 容差，默认 settings.CONVERGENCE_TOL·ħΩ
        truncation: 数态截断
        count: 比较的本征值个数

    Returns:
        BiasCheck
    """
    truncation = truncation or settings.DEFAULT_TRUNCATION
    tol = settings.CONVERGENCE_TOL * oscillator_gap(params) if tol is None else tol
    if b.is_zero:
        return BiasCheck(passed=True, deviation=0.0)
    biased = mode_one_energies(ModeOneSpec(params, p, b, truncation), count)
    shifted = mode_one_energies(ModeOneSpec(params, p.shifted(b), ZERO_BIAS, truncation), count)
    deviation = float(np.max(np.abs(biased - shifted)))
    return BiasCheck(passed=deviation < tol, deviation=deviation)


# 全局单例
_spectroscopy_service: Optional[SpectroscopyService] = None


def get_spectroscopy_service() -> SpectroscopyService:
    """获取谱学服务单例"""
    global _spectroscopy_service
    if _spectroscopy_service is None:
        _spectroscopy_service = SpectroscopyService()
    return _spectroscopy_service


def transmission_trace(
    params: CircuitParams,
    wg: WaveguideParams,
    p: ZakPoint,
    detunings: Sequence[float],
) -> TransmissionTrace:
    """稳态透射谱（使用全局谱学服务）"""
    return get_spectroscopy_service().transmission_trace(params, wg, p, detunings)


def bias_scan(params: CircuitParams, p0: ZakPoint, nb_n: int, nb_phi: int, band: int = 0) -> pd.DataFrame:
    """偏置扫描（使用全局谱学服务）"""
    return get_spectroscopy_service().bias_scan(params, p0, nb_n, nb_phi, band)


def distinct_dips(traces: Dict[str, TransmissionTrace]) -> Dict[str, float]:
    """每条透射谱的谷位置"""
    return {name: locate_dip(trace) for name, trace in traces.items()}
