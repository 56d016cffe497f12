#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
能带服务
在 (k, φ) 网格上对 Ĥ₁ 做非微扰对角化，并与一阶微扰结果比较
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from config.settings import settings
from src.core.circuit import (
    BiasPoint,
    CircuitParams,
    K_PERIOD,
    PHI_PERIOD,
    VALIDATED_BANDS,
    ZakPoint,
    ZERO_BIAS,
    oscillator_gap,
    wrap,
    wrap_array,
    zone_samples,
)
from src.core.elementary import classify_hessian, critical_points
from src.core.fock_engine import ConvergenceReport, ModeOneSpec, check_convergence, mode_one_energies
from src.core.perturbation import first_order_energy
from src.utils.exceptions import DualmonException, InvalidParameterException
from src.utils.logger import Logger
from src.utils.parallel import parallel_map

logger = Logger.get_logger("dualmon.bands")


@dataclass(frozen=True, eq=False)
class BandGrid:
    """
    第 m 条能带在均匀 (k, φ) 网格上的取值

    采样都是 (−1/2, 1/2] × (−π, π] 中的规范代表元，每个 Zak 点至多出现一次。
    失败的格点取 NaN，错误信息记录在 failures 中。
    """
    band: int
    k: np.ndarray
    phi: np.ndarray
    values: np.ndarray
    params: CircuitParams
    truncation: int
    failures: Dict[Tuple[int, int], str] = field(default_factory=dict)
    convergence: Optional[ConvergenceReport] = None

    def __post_init__(self):
        """验证数据"""
        if self.values.shape != (self.k.size, self.phi.size):
            raise InvalidParameterException("values", f"形状 {self.values.shape} 与采样 ({self.k.size}, {self.phi.size}) 不符")
        if np.any(np.diff(self.k) <= 0) or np.any(np.diff(self.phi) <= 0):
            raise InvalidParameterException("samples", "采样必须严格升序")
        if not (np.array_equal(wrap_array(self.k, K_PERIOD), self.k) and np.array_equal(wrap_array(self.phi, PHI_PERIOD), self.phi)):
            raise InvalidParameterException("samples", "采样必须位于 (−1/2, 1/2] × (−π, π] 内")
        finite = np.isfinite(self.values)
        for i, j in zip(*np.nonzero(~finite)):
            if (int(i), int(j)) not in self.failures:
                raise InvalidParameterException("values", f"格点 ({i}, {j}) 非有限且未记录失败")

    @property
    def validated(self) -> bool:
        return self.band in VALIDATED_BANDS

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    def value_at(self, i: int, j: int) -> float:
        return float(self.values[i, j])

    def to_frame(self) -> pd.DataFrame:
        """列为 m, k, phi, E 的长表（k 外层、φ 内层）"""
        kk, pp = np.meshgrid(self.k, self.phi, indexing="ij")
        return pd.DataFrame({
            "m": self.band,
            "k": kk.ravel(),
            "phi": pp.ravel(),
            "E": self.values.ravel(),
        })

    def metadata(self) -> dict:
        meta = {
            "band": self.band,
            "validated": self.validated,
            "params": self.params.to_dict(),
            "truncation": self.truncation,
            "nk": int(self.k.size),
            "nphi": int(self.phi.size),
            "failures": len(self.failures),
        }
        if self.convergence is not None:
            meta["convergence"] = {
                "reference_truncation": self.convergence.reference_truncation,
                "drift_over_hbar_omega": self.convergence.drift,
                "converged": self.convergence.converged,
            }
        return meta


class BandService:
    """能带扫描服务"""

    def __init__(
        self,
        truncation: Optional[int] = None,
        threads: Optional[int] = None,
        show_progress: Optional[bool] = None,
    ):
        """
        初始化能带服务

        Args:
            truncation: 数态截断，默认 settings.DEFAULT_TRUNCATION
            threads: 并行线程数，默认 settings.THREADS
            show_progress: 是否显示进度条
        """
        self.truncation = truncation or settings.DEFAULT_TRUNCATION
        self.threads = threads or settings.THREADS
        self.show_progress = settings.SHOW_PROGRESS if show_progress is None else show_progress

    def _solve_cell(self, params: CircuitParams, bias: BiasPoint, count: int):
        def solve(point: Tuple[float, float]):
            try:
                spec = ModeOneSpec(params, wrap(*point), bias, self.truncation)
                return mode_one_energies(spec, count), None
            except (DualmonException, np.linalg.LinAlgError) as e:
                return None, str(e)
        return solve

    def band_grids(
        self,
        params: CircuitParams,
        bands: Sequence[int],
        nk: int,
        nphi: int,
        bias: BiasPoint = ZERO_BIAS,
        verify: bool = True,
    ) -> Dict[int, BandGrid]:
        """
        一次扫描得到多条能带（每个格点只对角化一次）

        Args:
            params: 电路参数（E_C, E_L > 0）
            bands: 能带编号
            nk: k 方向闭格点数（nk − 1 个规范样本）
            nphi: φ 方向闭格点数
            bias: 偏置
            verify: 是否在 (0, 0) 做截断收敛检查

        Returns:
            {m: BandGrid}
        """
        bands = sorted(set(int(m) for m in bands))
        if not bands or bands[0] < 0:
            raise InvalidParameterException("bands", f"能带编号必须非负，实际为 {bands}")
        for m in bands:
            if m not in VALIDATED_BANDS:
                logger.warning(f"⚠️  能带 m={m} 超出已验证范围 {VALIDATED_BANDS}")
        if not params.regime_ok:
            logger.warning(f"⚠️  参数不在微扰区: {params.to_dict()}")

        probe = ModeOneSpec(params, ZakPoint(0.0, 0.0), bias, self.truncation)
        count = bands[-1] + 1
        k = zone_samples(nk, K_PERIOD)
        phi = zone_samples(nphi, PHI_PERIOD)
        points = [(float(a), float(b)) for a in k for b in phi]
        results = parallel_map(
            self._solve_cell(params, bias, count), points,
            threads=self.threads, desc="能带扫描", show_progress=self.show_progress,
        )

        values = np.full((len(bands), k.size * phi.size), np.nan)
        failures: Dict[Tuple[int, int], str] = {}
        for idx, (energies, error) in enumerate(results):
            if error is not None:
                failures[divmod(idx, phi.size)] = error
                continue
            values[:, idx] = energies[bands]
        if failures:
            logger.warning(f"⚠️  {len(failures)} 个格点求解失败，已记录为 NaN")

        report = None
        if verify:
            report = check_convergence(probe, count)

        logger.info(f"✅ 能带扫描完成: {k.size}×{phi.size}, N={self.truncation}, 能带 {bands}")
        return {
            m: BandGrid(
                band=m, k=k, phi=phi, values=values[i].reshape(k.size, phi.size),
                params=params, truncation=self.truncation,
                failures=dict(failures), convergence=report,
            )
            for i, m in enumerate(bands)
        }

    def band_grid(self, params: CircuitParams, m: int, nk: int, nphi: int) -> BandGrid:
        """单条能带"""
        return self.band_grids(params, [m], nk, nphi)[m]

    # ==================== 数值导数 ====================

    def band_energy(self, params: CircuitParams, p: ZakPoint, band: int = 0) -> float:
        spec = ModeOneSpec(params, p, ZERO_BIAS, self.truncation)
        return float(mode_one_energies(spec, band + 1)[band])

    def numeric_gradient(self, params: CircuitParams, p: ZakPoint, band: int = 0, step: float = 1e-3) -> Tuple[float, float]:
        """
        中心差分梯度 (∂E/∂k, ∂E/∂φ)

        Args:
            params: 电路参数
            p: Zak 点
            band: 能带
            step: 差分步长（k 与 φ 相同）

        Returns:
            (dE/dk, dE/dφ)
        """
        def e(dk: float, dphi: float) -> float:
            return self.band_energy(params, wrap(p.k + dk, p.phi + dphi), band)

        return ((e(step, 0.0) - e(-step, 0.0)) / (2.0 * step),
                (e(0.0, step) - e(0.0, -step)) / (2.0 * step))

    def numeric_hessian_diagonal(self, params: CircuitParams, p: ZakPoint, band: int = 0, step: float = 1e-3) -> Tuple[float, float]:
        """二阶中心差分 (∂²E/∂k², ∂²E/∂φ²)"""
        def e(dk: float, dphi: float) -> float:
            return self.band_energy(params, wrap(p.k + dk, p.phi + dphi), band)

        centre = e(0.0, 0.0)
        return ((e(step, 0.0) - 2.0 * centre + e(-step, 0.0)) / step ** 2,
                (e(0.0, step) - 2.0 * centre + e(0.0, -step)) / step ** 2)

    def classify_critical_points(self, params: CircuitParams, band: int = 0, step: float = 1e-3) -> List[dict]:
        """
        在四个临界点上检查数值梯度并按离散 Hessian 分类

        Returns:
            每个临界点一行：point, expected, numeric, gradient_norm
        """
        rows = []
        for cp in critical_points():
            d2k, d2phi = self.numeric_hessian_diagonal(params, cp.point, band, step)
            gk, gphi = self.numeric_gradient(params, cp.point, band, step)
            rows.append({
                "point": cp.point,
                "codeword": cp.codeword,
                "expected": cp.kind,
                "numeric": classify_hessian(d2k, d2phi),
                "gradient_norm": math.hypot(gk, gphi),
            })
        return rows


# ==================== 与一阶微扰比较 ====================

def perturbative_comparison(grid: BandGrid) -> pd.DataFrame:
    """
    在 BandGrid 上附加一阶结果与偏差列

    deviation = (E − (m + 1/2)ħΩ) − first_order_energy
    """
    frame = grid.to_frame()
    offset = (grid.band + 0.5) * oscillator_gap(grid.params)
    frame["E_first_order"] = [
        offset + first_order_energy(grid.params, wrap(k, phi), grid.band)
        for k, phi in zip(frame["k"], frame["phi"])
    ]
    frame["deviation"] = frame["E"] - frame["E_first_order"]
    return frame


def max_first_order_deviation(grid: BandGrid) -> float:
    """max |数值 − 一阶|（忽略失败格点）"""
    return float(np.nanmax(np.abs(perturbative_comparison(grid)["deviation"].to_numpy())))


def band_extrema(grid: BandGrid) -> Dict[str, List[ZakPoint]]:
    """能带最小/最大值所在的 Zak 点"""
    result = {}
    for name, target in (("minimum", np.nanmin(grid.values)), ("maximum", np.nanmax(grid.values))):
        tol = 1e-9 * max(1.0, abs(target))
        cells = np.argwhere(np.abs(grid.values - target) <= tol)
        points = {wrap(grid.k[i], grid.phi[j]) for i, j in cells}
        result[name] = sorted(points, key=lambda q: q.as_tuple())
    return result


# 全局单例
_band_service: Optional[BandService] = None


def get_band_service() -> BandService:
    """获取能带服务单例"""
    global _band_service
    if _band_service is None:
        _band_service = BandService()
    return _band_service


def band_grid(params: CircuitParams, m: int, nk: int, nphi: int, N: Optional[int] = None) -> BandGrid:
    """
    第 m 条能带的网格采样

    Args:
        params: 电路参数
        m: 能带编号（0、1 为已验证范围）
        nk: k 方向采样数
        nphi: φ 方向采样数
        N: 数态截断

    Returns:
        BandGrid
    """
    service = get_band_service() if N is None else BandService(truncation=N)
    return service.band_grid(params, m, nk, nphi)
