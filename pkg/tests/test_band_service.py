"""
测试能带服务
"""
import math

import numpy as np
import pytest

from src.core.circuit import CircuitParams, ZakPoint
from src.core.elementary import CriticalKind
from src.services.band_service import (
    BandGrid,
    BandService,
    band_extrema,
    band_grid,
    max_first_order_deviation,
    perturbative_comparison,
)
from src.services.spectroscopy_service import transition_frequency
from src.utils.exceptions import InvalidParameterException


@pytest.fixture
def band_service():
    """单线程能带服务"""
    return BandService(truncation=40, threads=1, show_progress=False)


def test_band_grids_shape(realistic_params, band_service):
    """测试网格形状与元数据"""
    grids = band_service.band_grids(realistic_params, [0, 1], 9, 11)
    assert set(grids) == {0, 1}
    grid = grids[0]
    assert grid.shape == (8, 10)
    assert grid.validated
    assert not grid.failures
    assert grid.convergence is not None and grid.convergence.converged
    frame = grid.to_frame()
    assert list(frame.columns) == ["m", "k", "phi", "E"]
    assert len(frame) == 80
    meta = grid.metadata()
    assert meta["nk"] == 8 and meta["nphi"] == 10
    assert meta["convergence"]["converged"]
    # m = 1 位于 m = 0 之上约 ħΩ
    gap = grids[1].values - grids[0].values
    assert np.all(np.abs(gap - realistic_params.hbar_omega) < 5.0)


def test_band_grid_threads_deterministic(realistic_params):
    """测试线程数不影响结果"""
    serial = BandService(truncation=24, threads=1).band_grid(realistic_params, 0, 8, 8)
    threaded = BandService(truncation=24, threads=4).band_grid(realistic_params, 0, 8, 8)
    np.testing.assert_allclose(serial.values, threaded.values, atol=1e-12)


def test_band_grid_rejects_invalid(elementary_params, band_service, realistic_params):
    """测试非法输入在扫描前被拒绝"""
    with pytest.raises(InvalidParameterException):
        band_service.band_grids(elementary_params, [0], 8, 8)
    with pytest.raises(InvalidParameterException):
        band_service.band_grids(realistic_params, [-1], 8, 8)


def test_unvalidated_band_flagged(realistic_params, band_service):
    """测试 m >= 2 可以计算但标记为未验证"""
    grid = band_service.band_grid(realistic_params, 2, 8, 8)
    assert not grid.validated
    assert np.all(np.isfinite(grid.values))


def test_band_grid_validation(realistic_params):
    """测试 BandGrid 校验"""
    k = np.linspace(-0.5, 0.5, 3)
    phi = np.linspace(-math.pi, math.pi, 3)
    values = np.zeros((3, 3))
    values[1, 1] = np.nan
    with pytest.raises(InvalidParameterException):
        BandGrid(0, k, phi, values, realistic_params, 40)
    grid = BandGrid(0, k, phi, values, realistic_params, 40, failures={(1, 1): "求解失败"})
    assert grid.metadata()["failures"] == 1
    with pytest.raises(InvalidParameterException):
        BandGrid(0, k, phi, np.zeros((2, 3)), realistic_params, 40)
    with pytest.raises(InvalidParameterException):
        BandGrid(0, k[::-1], phi, np.zeros((3, 3)), realistic_params, 40)


def test_band_extrema(realistic_params, band_service):
    """测试能带极值点（闭网格的重复端点合并为同一 Zak 点）"""
    grids = band_service.band_grids(realistic_params, [0, 1], 9, 9)
    ground = band_extrema(grids[0])
    assert ground["minimum"] == [ZakPoint(0.0, 0.0)]
    assert ground["maximum"] == [ZakPoint(0.5, math.pi)]
    # m = 1 的重整化因子为负，能带翻转
    excited = band_extrema(grids[1])
    assert excited["minimum"] == [ZakPoint(0.5, math.pi)]
    assert excited["maximum"] == [ZakPoint(0.0, 0.0)]


def test_perturbative_comparison(realistic_params, band_service):
    """测试一阶比较列"""
    grid = band_service.band_grid(realistic_params, 0, 9, 9)
    frame = perturbative_comparison(grid)
    assert {"E_first_order", "deviation"} <= set(frame.columns)
    np.testing.assert_allclose(frame["deviation"], frame["E"] - frame["E_first_order"])


@pytest.mark.slow
def test_ground_band_agreement_full_grid(realistic_params, band_service):
    """测试 41×41 网格上 m = 0 数值能带与一阶结果之差小于 0.006·E_J，m = 1 小于 0.005·E_J"""
    grids = band_service.band_grids(realistic_params, [0, 1], 41, 41)
    assert max_first_order_deviation(grids[0]) < 0.006 * realistic_params.E_J
    assert max_first_order_deviation(grids[1]) < 0.005 * realistic_params.E_J


@pytest.mark.slow
def test_critical_point_structure(realistic_params, band_service):
    """测试数值能带在四个临界点上梯度为零，分类为最小/鞍点/鞍点/最大"""
    rows = band_service.classify_critical_points(realistic_params, band=0, step=1e-3)
    assert [row["numeric"] for row in rows] == [
        CriticalKind.MINIMUM, CriticalKind.SADDLE, CriticalKind.SADDLE, CriticalKind.MAXIMUM]
    for row in rows:
        assert row["gradient_norm"] < 1e-6 * realistic_params.E_J
        assert row["numeric"] == row["expected"]


def test_gradient_nonzero_off_critical(realistic_params, band_service):
    """测试非临界点的数值梯度与一阶梯度接近"""
    point = ZakPoint(0.2, 1.0)
    gk, gphi = band_service.numeric_gradient(realistic_params, point)
    e_q = math.exp(-math.pi ** 2 / realistic_params.z)
    e_j = math.exp(-realistic_params.z / 4.0)
    assert gk == pytest.approx(2.0 * math.pi * e_q * math.sin(0.4 * math.pi), abs=0.1)
    assert gphi == pytest.approx(e_j * math.sin(1.0), abs=0.05)


def test_module_level_band_grid(realistic_params):
    """测试模块级入口"""
    grid = band_grid(realistic_params, 0, 8, 8, N=24)
    assert grid.truncation == 24
    assert grid.shape == (7, 7)


def test_regime_warning_does_not_block():
    """测试不在微扰区时只告警不报错"""
    params = CircuitParams(E_Q=1.0, E_J=1.0, E_C=5.0, E_L=5.0)
    grid = BandService(truncation=32, threads=1).band_grid(params, 0, 8, 8)
    assert np.all(np.isfinite(grid.values))


def test_transition_frequency_matches_band_difference(realistic_params, band_service):
    """测试 Ω⁽¹⁰⁾ 与数值能带差 E₁ − E₀ 在 0.01·E_J 内一致"""
    grids = band_service.band_grids(realistic_params, [0, 1], 9, 9)
    gap = grids[1].values - grids[0].values
    expected = np.array([[transition_frequency(realistic_params, ZakPoint(float(k), float(phi)))
                          for phi in grids[0].phi] for k in grids[0].k])
    assert np.max(np.abs(gap - expected)) < 0.01 * realistic_params.E_J
