#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
截断振子基下的算符
在 Ĥ_HO 的最低 N 个数态上表示 â、n̂₁、φ̂₁ 以及位移算符 exp(iφ̂₁)、exp(i2πn̂₁)
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

import numpy as np
import qutip
from scipy import linalg
from scipy.special import eval_genlaguerre, gammaln

from config.settings import settings
from src.utils.exceptions import (
    DimensionMismatchException,
    InvalidInputException,
    InvalidParameterException,
    NonHermitianOperatorException,
)
from src.utils.logger import Logger

logger = Logger.get_logger("dualmon.operators")

MIN_TRUNCATION = 8
MAX_TRUNCATION = 512


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    """N×N 复矩阵，数态基下的哈密顿量、噪声算符或密度矩阵"""
    matrix: np.ndarray

    def __post_init__(self):
        """验证数据"""
        m = np.asarray(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidInputException(f"算符必须是方阵，实际形状 {m.shape}")
        if m.shape[0] < 2:
            raise InvalidInputException("算符维数必须 >= 2")
        object.__setattr__(self, "matrix", m.astype(complex, copy=False))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dagger(self) -> "TruncatedOperator":
        return TruncatedOperator(self.matrix.conj().T)

    def hermitian_deviation(self) -> float:
        """‖M − M†‖∞（最大元素模）"""
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def is_hermitian(self, tol: Optional[float] = None) -> bool:
        tol = settings.HERMITIAN_TOL if tol is None else tol
        return self.hermitian_deviation() < tol * max(1.0, float(np.max(np.abs(self.matrix))))

    def require_hermitian(self, tol: Optional[float] = None):
        if not self.is_hermitian(tol):
            raise NonHermitianOperatorException(self.hermitian_deviation())

    def is_density_matrix(self, tol: float = 1e-10) -> bool:
        """迹为 1、厄米且半正定（容差 tol）"""
        if not self.is_hermitian(tol):
            return False
        if abs(np.trace(self.matrix) - 1.0) > tol:
            return False
        return bool(np.min(linalg.eigvalsh(self.matrix)) >= -tol)

    def expectation(self, vector: np.ndarray) -> complex:
        """⟨v|M|v⟩"""
        return complex(np.vdot(vector, self.matrix @ vector))

    def interior(self, keep: int) -> np.ndarray:
        """最低 keep 个数态上的子块"""
        return self.matrix[:keep, :keep]

    def __matmul__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        if other.dim != self.dim:
            raise DimensionMismatchException(self.dim, other.dim)
        return TruncatedOperator(self.matrix @ other.matrix)


OperatorLike = Union[TruncatedOperator, qutip.Qobj, np.ndarray]


def as_matrix(op: OperatorLike) -> np.ndarray:
    """取出底层矩阵"""
    if isinstance(op, TruncatedOperator):
        return op.matrix
    if isinstance(op, qutip.Qobj):
        return op.full()
    return np.asarray(op, dtype=complex)


# ==================== 位移算符矩阵元 ====================

def _lower_elements(m: np.ndarray, n: np.ndarray, beta: complex) -> np.ndarray:
    """m >= n 时的 ⟨m|D(β)|n⟩，对数空间计算前因子"""
    x = abs(beta) ** 2
    d = m - n
    laguerre = eval_genlaguerre(n, d.astype(float), x)
    with np.errstate(divide="ignore"):
        log_abs = (0.5 * (gammaln(n + 1.0) - gammaln(m + 1.0))
                   + d * math.log(abs(beta)) - 0.5 * x
                   + np.log(np.abs(laguerre)))
    phase = np.exp(1j * d * np.angle(beta))
    return np.sign(laguerre) * np.exp(log_abs) * phase


def displacement_element(m: int, n: int, beta: complex) -> complex:
    """
    位移算符 D(β) = exp(βâ† − β*â) 的矩阵元 ⟨m|D(β)|n⟩

    m >= n 时用广义 Laguerre 多项式闭式，m < n 时用 ⟨m|D(β)|n⟩ = ⟨n|D(−β)|m⟩*。

    Args:
        m: 行数态
        n: 列数态
        beta: 位移量

    Returns:
        复矩阵元
    """
    if m < 0 or n < 0:
        raise InvalidParameterException("m/n", f"数态指标必须非负，实际为 ({m}, {n})")
    beta = complex(beta)
    if not (math.isfinite(beta.real) and math.isfinite(beta.imag)):
        raise InvalidInputException(f"β = {beta}")
    if m < n:
        return displacement_element(n, m, -beta).conjugate()
    if beta == 0:
        return complex(1.0 if m == n else 0.0)
    return complex(_lower_elements(np.array(m), np.array(n), beta))


def displacement_matrix(N: int, beta: complex) -> np.ndarray:
    """
    D(β) 在最低 N 个数态上的矩阵

    Args:
        N: 截断维数
        beta: 位移量

    Returns:
        N×N 复矩阵
    """
    beta = complex(beta)
    if beta == 0:
        return np.eye(N, dtype=complex)
    rows, cols = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    lower = rows >= cols
    big = np.where(lower, rows, cols)
    small = np.where(lower, cols, rows)
    values = _lower_elements(big, small, beta)
    # 上三角: ⟨m|D(β)|n⟩ = ⟨n|D(−β)|m⟩*，而 D(−β) 的下三角元相差 (−1)^{n−m}
    sign = np.where((big - small) % 2 == 0, 1.0, -1.0)
    return np.where(lower, values, sign * values.conj())


# ==================== 振子算符组 ====================

@dataclass(frozen=True, eq=False)
class OscillatorOperators:
    """给定 (z, N) 的振子算符组"""
    z: float
    N: int
    a: np.ndarray
    adag: np.ndarray
    n1: np.ndarray
    phi1: np.ndarray
    n1_sq: np.ndarray
    phi1_sq: np.ndarray
    exp_iphi: np.ndarray
    exp_i2pin: np.ndarray

    @property
    def beta_phi(self) -> complex:
        return 1j * math.sqrt(self.z / 2.0)

    @property
    def beta_n(self) -> complex:
        return complex(-2.0 * math.pi / math.sqrt(2.0 * self.z))

    def number(self) -> np.ndarray:
        return np.diag(np.arange(self.N, dtype=float)).astype(complex)


def _frozen(matrix: np.ndarray) -> np.ndarray:
    matrix.flags.writeable = False
    return matrix


@lru_cache(maxsize=32)
def build_operators(z: float, N: int) -> OscillatorOperators:
    """
    构造截断振子算符

    n̂₁ = i(â† − â)/sqrt(2z)，φ̂₁ = sqrt(z/2)(â + â†)；
    exp(iφ̂₁) = D(i·sqrt(z/2))，exp(i2πn̂₁) = D(−2π/sqrt(2z))。
    n̂₁² 与 φ̂₁² 由 â² 等直接构造，避免截断矩阵相乘带来的边界误差。

    Args:
        z: 振子阻抗
        N: 截断维数

    Returns:
        只读算符组（按 (z, N) 缓存）
    """
    if not (z > 0 and math.isfinite(z)):
        raise InvalidParameterException("z", f"必须为正有限数，实际为 {z}")
    if not (MIN_TRUNCATION <= N <= MAX_TRUNCATION):
        raise InvalidParameterException("N", f"截断维数必须在 [{MIN_TRUNCATION}, {MAX_TRUNCATION}] 内，实际为 {N}")

    a = np.diag(np.sqrt(np.arange(1, N, dtype=float)), k=1).astype(complex)
    adag = a.conj().T
    number = np.diag(np.arange(N, dtype=float)).astype(complex)
    identity = np.eye(N, dtype=complex)
    a2 = a @ a
    adag2 = adag @ adag

    n1 = 1j * (adag - a) / math.sqrt(2.0 * z)
    phi1 = math.sqrt(z / 2.0) * (a + adag)
    n1_sq = (2.0 * number + identity - a2 - adag2) / (2.0 * z)
    phi1_sq = (z / 2.0) * (2.0 * number + identity + a2 + adag2)

    exp_iphi = displacement_matrix(N, 1j * math.sqrt(z / 2.0))
    exp_i2pin = displacement_matrix(N, -2.0 * math.pi / math.sqrt(2.0 * z))

    logger.debug(f"🔧 振子算符已构造: z={z:.6g}, N={N}")
    return OscillatorOperators(
        z=z, N=N,
        a=_frozen(a), adag=_frozen(adag),
        n1=_frozen(n1), phi1=_frozen(phi1),
        n1_sq=_frozen(n1_sq), phi1_sq=_frozen(phi1_sq),
        exp_iphi=_frozen(exp_iphi), exp_i2pin=_frozen(exp_i2pin),
    )


def unitarity_deviation(U: np.ndarray, keep: int) -> float:
    """最低 keep 个数态上 U†U − I 的最大元素模"""
    block = (U.conj().T @ U)[:keep, :keep]
    return float(np.max(np.abs(block - np.eye(keep))))


# ==================== 本征求解 ====================

@dataclass(frozen=True, eq=False)
class EigenResult:
    """升序本征值与对应的正交归一本征矢（按列）"""
    values: np.ndarray
    vectors: np.ndarray

    def residual(self, H: np.ndarray) -> float:
        """max_j ‖Hv_j − λ_j v_j‖"""
        r = H @ self.vectors - self.vectors * self.values[np.newaxis, :]
        return float(np.max(np.linalg.norm(r, axis=0)))


def eigensolve(H: OperatorLike, count: int) -> EigenResult:
    """
    稠密厄米本征求解，返回最低 count 对本征值/本征矢

    Args:
        H: 厄米算符
        count: 需要的本征对数量

    Returns:
        EigenResult
    """
    op = H if isinstance(H, TruncatedOperator) else TruncatedOperator(as_matrix(H))
    op.require_hermitian()
    if not (1 <= count <= op.dim):
        raise InvalidParameterException("count", f"必须在 [1, {op.dim}] 内，实际为 {count}")
    matrix = 0.5 * (op.matrix + op.matrix.conj().T)
    values, vectors = linalg.eigh(matrix, subset_by_index=[0, count - 1])
    return EigenResult(values=values, vectors=vectors)


def eigenvalues(H: OperatorLike, count: int) -> np.ndarray:
    """只求最低 count 个本征值"""
    op = H if isinstance(H, TruncatedOperator) else TruncatedOperator(as_matrix(H))
    op.require_hermitian()
    if not (1 <= count <= op.dim):
        raise InvalidParameterException("count", f"必须在 [1, {op.dim}] 内，实际为 {count}")
    matrix = 0.5 * (op.matrix + op.matrix.conj().T)
    return linalg.eigh(matrix, eigvals_only=True, subset_by_index=[0, count - 1])
