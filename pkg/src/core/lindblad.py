#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Lindblad 主方程（基于 qutip）

dρ/dt = −i[H, ρ] + Σ rate·D[A]ρ，D[A]ρ = AρA† − (A†Aρ + ρA†A)/2（ħ = 1）

模型以 TruncatedOperator 校验输入，求解交给 qutip：
liouvillian 构造超算符，steadystate 求稳态，mesolve 做时间积分。
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np
import qutip
from qutip.solver.integrator import IntegratorException
from scipy import linalg

from config.settings import settings
from src.core.circuit import ZakPoint
from src.core.operators import OperatorLike, TruncatedOperator, as_matrix
from src.utils.exceptions import (
    ConvergenceException,
    DimensionMismatchException,
    InvalidInputException,
    InvalidParameterException,
    NonUniqueSteadyStateException,
)
from src.utils.logger import Logger

logger = Logger.get_logger("dualmon.lindblad")


# ==================== 数据模型 ====================

@dataclass(frozen=True, eq=False)
class CollapseTerm:
    """耗散项 rate·D[A]，对应 qutip 的坍缩算符 sqrt(rate)·A"""
    operator: TruncatedOperator
    rate: float
    label: str = ""

    def __post_init__(self):
        """验证数据"""
        if not math.isfinite(self.rate) or self.rate < 0:
            raise InvalidParameterException("rate", f"耗散速率必须为非负有限数，实际为 {self.rate}")

    def to_qobj(self) -> qutip.Qobj:
        return math.sqrt(self.rate) * qutip.Qobj(self.operator.matrix)


@dataclass(frozen=True, eq=False)
class LindbladModel:
    """哈密顿量加一组耗散项"""
    H: TruncatedOperator
    collapse: Tuple[CollapseTerm, ...] = field(default_factory=tuple)

    def __post_init__(self):
        """验证数据"""
        self.H.require_hermitian()
        object.__setattr__(self, "collapse", tuple(self.collapse))
        for term in self.collapse:
            if term.operator.dim != self.H.dim:
                raise DimensionMismatchException(self.H.dim, term.operator.dim)

    @property
    def dim(self) -> int:
        return self.H.dim

    @cached_property
    def hamiltonian(self) -> qutip.Qobj:
        return qutip.Qobj(self.H.matrix)

    @cached_property
    def c_ops(self) -> List[qutip.Qobj]:
        return [term.to_qobj() for term in self.collapse]

    @classmethod
    def build(cls, H: OperatorLike, terms: Sequence[Tuple[OperatorLike, float]]) -> "LindbladModel":
        """由 (算符, 速率) 列表构造"""
        collapse = tuple(CollapseTerm(TruncatedOperator(as_matrix(op)), float(rate)) for op, rate in terms)
        return cls(TruncatedOperator(as_matrix(H)), collapse)


@dataclass(frozen=True)
class SuperpositionSpec:
    """两个 Zak 态的叠加 μ|p⟩ + μ′|p′⟩"""
    p: ZakPoint
    p_prime: ZakPoint
    mu: complex = 1.0 / math.sqrt(2.0)
    mu_prime: complex = 1.0 / math.sqrt(2.0)

    def __post_init__(self):
        """验证数据"""
        norm = abs(self.mu) ** 2 + abs(self.mu_prime) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise InvalidParameterException("mu", f"|μ|² + |μ′|² 必须为 1，实际为 {norm}")

    def density_matrix(self) -> np.ndarray:
        """基 (|p⟩, |p′⟩) 中的 2×2 密度矩阵"""
        return pure_state([self.mu, self.mu_prime])


def _require_state(model: LindbladModel, rho: OperatorLike) -> np.ndarray:
    rho = as_matrix(rho)
    if rho.shape != (model.dim, model.dim):
        raise DimensionMismatchException(model.dim, rho.shape[0])
    return rho


# ==================== 右端项与 Liouvillian ====================

def liouvillian(model: LindbladModel) -> qutip.Qobj:
    """
    qutip 超算符 L，dρ/dt = L·ρ

    Args:
        model: Lindblad 模型

    Returns:
        d²×d² 超算符（qutip 的列堆叠约定）
    """
    return qutip.liouvillian(model.hamiltonian, model.c_ops)


def lindblad_rhs(model: LindbladModel, rho: OperatorLike) -> TruncatedOperator:
    """
    主方程右端项 −i[H, ρ] + Σ rate·D[A]ρ

    Args:
        model: Lindblad 模型
        rho: 密度矩阵

    Returns:
        dρ/dt（迹为零）
    """
    rho = _require_state(model, rho)
    if not TruncatedOperator(rho).is_density_matrix(1e-8):
        raise InvalidInputException("ρ 不是合法的密度矩阵")
    drho = qutip.vector_to_operator(liouvillian(model) * qutip.operator_to_vector(qutip.Qobj(rho)))
    return TruncatedOperator(drho.full())


# ==================== 稳态 ====================

@dataclass(frozen=True, eq=False)
class SteadyState:
    """稳态及其残差"""
    rho: TruncatedOperator
    residual: float
    null_dim: int


def steady_state(model: LindbladModel, tol: Optional[float] = None) -> SteadyState:
    """
    求唯一稳态

    先由 Liouvillian 的奇异值判断零空间维数（小于 max(tol, tol·s_max) 的计入），
    唯一时再调用 qutip.steadystate。

    Args:
        model: Lindblad 模型
        tol: 零空间阈值，默认 settings.STEADY_STATE_TOL

    Returns:
        SteadyState（迹为 1 的厄米半正定 ρ_ss）

    Raises:
        NonUniqueSteadyStateException: 零空间维数大于 1
        ConvergenceException: 残差超过阈值或结果不是密度矩阵
    """
    tol = settings.STEADY_STATE_TOL if tol is None else tol
    L = liouvillian(model)
    s = linalg.svdvals(L.full())
    threshold = max(tol, tol * s[0])
    null_dim = int(np.sum(s < threshold))
    if null_dim > 1:
        raise NonUniqueSteadyStateException(null_dim)

    rho = qutip.steadystate(model.hamiltonian, model.c_ops).full()
    rho = rho / np.trace(rho)
    rho = 0.5 * (rho + rho.conj().T)
    state = TruncatedOperator(rho)
    if not state.is_density_matrix(tol):
        raise ConvergenceException("稳态正定性", float(-np.min(linalg.eigvalsh(rho))), tol)
    residual = float(np.linalg.norm(lindblad_rhs(model, rho).matrix))
    if residual > threshold:
        raise ConvergenceException("稳态残差", residual, threshold)
    logger.debug(f"🔧 稳态: d={model.dim}, 最小奇异值 {s[-1]:.3e}, 残差 {residual:.3e}")
    return SteadyState(rho=state, residual=residual, null_dim=max(null_dim, 1))


# ==================== 时间演化 ====================

@dataclass(frozen=True, eq=False)
class Trajectory:
    """时间序列 ρ(t_i)"""
    times: np.ndarray
    states: np.ndarray  # (T, d, d)

    def element(self, i: int, j: int) -> np.ndarray:
        return self.states[:, i, j]

    @property
    def final(self) -> TruncatedOperator:
        return TruncatedOperator(self.states[-1])

    def min_eigenvalue(self) -> float:
        return float(min(np.min(linalg.eigvalsh(0.5 * (s + s.conj().T))) for s in self.states))


def evolve(
    model: LindbladModel,
    rho0: OperatorLike,
    times: Sequence[float],
    rtol: Optional[float] = None,
    atol: Optional[float] = None,
) -> Trajectory:
    """
    qutip.mesolve 自适应积分

    Args:
        model: Lindblad 模型
        rho0: 初始密度矩阵
        times: 输出时刻（升序，第一个为初始时刻）
        rtol: 相对误差，默认 settings.ODE_RTOL
        atol: 绝对误差，默认 settings.ODE_ATOL

    Returns:
        Trajectory
    """
    rho0 = _require_state(model, rho0)
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 2 or np.any(np.diff(times) <= 0):
        raise InvalidInputException("times 必须是至少两个点的严格升序序列")

    options = {
        "method": settings.ODE_METHOD,
        "rtol": settings.ODE_RTOL if rtol is None else rtol,
        "atol": settings.ODE_ATOL if atol is None else atol,
        "nsteps": settings.ODE_NSTEPS,
        "store_states": True,
    }
    try:
        result = qutip.mesolve(model.hamiltonian, qutip.Qobj(rho0), times, model.c_ops, options=options)
    except IntegratorException as e:
        raise ConvergenceException(f"时间积分 ({e})", float("nan"), options["rtol"]) from e
    states = np.stack([state.full() for state in result.states])
    return Trajectory(times=times, states=states)


# ==================== 相干拟合 ====================

@dataclass(frozen=True)
class CoherenceFit:
    """ρ₀₁(t) ≈ A·exp(−rate·t − i·frequency·t)"""
    rate: float
    frequency: float
    residual: float


def fit_coherence(times: Sequence[float], rho01: Sequence[complex]) -> CoherenceFit:
    """
    对 ln|ρ₀₁| 与解卷绕相位做线性最小二乘

    Args:
        times: 时刻
        rho01: 非对角元

    Returns:
        CoherenceFit，residual 为两次拟合的最大绝对残差
    """
    times = np.asarray(times, dtype=float)
    rho01 = np.asarray(rho01, dtype=complex)
    if np.any(np.abs(rho01) == 0):
        raise InvalidInputException("相干元在拟合区间内为零")
    log_abs = np.log(np.abs(rho01))
    phase = np.unwrap(np.angle(rho01))
    amp_fit = np.polyfit(times, log_abs, 1)
    phase_fit = np.polyfit(times, phase, 1)
    residual = max(float(np.max(np.abs(np.polyval(amp_fit, times) - log_abs))),
                   float(np.max(np.abs(np.polyval(phase_fit, times) - phase))))
    return CoherenceFit(rate=float(-amp_fit[0]), frequency=float(-phase_fit[0]), residual=residual)


def pure_state(vector: Sequence[complex]) -> np.ndarray:
    """|ψ⟩⟨ψ|（自动归一化）"""
    psi = qutip.Qobj(np.asarray(vector, dtype=complex).reshape(-1, 1))
    return qutip.ket2dm(psi.unit()).full()
