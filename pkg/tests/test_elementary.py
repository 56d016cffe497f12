"""
测试理想 dualmon 电路的解析结果
"""
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings as hypothesis_settings, strategies as st

from src.core.circuit import CircuitParams, ZakPoint, BiasPoint, wrap
from src.core.elementary import (
    CriticalKind,
    NoiseChannel,
    NoiseSpec,
    biased_energy,
    classify_hessian,
    critical_points,
    cx_energy_shift,
    cx_preserves_critical_points,
    dephasing_from_actions,
    dephasing_rate,
    elementary_grid,
    energy,
    gradient,
    is_critical,
    noise_operator_action,
)
from src.core.perturbation import realistic_dephasing_rate
from src.utils.exceptions import InvalidParameterException

zak_points = st.builds(
    ZakPoint,
    st.floats(min_value=-0.5, max_value=0.5, allow_nan=False, exclude_min=True),
    st.floats(min_value=-math.pi, max_value=math.pi, allow_nan=False, exclude_min=True),
)
energies = st.floats(min_value=0.1, max_value=10.0)

# hypothesis 用例不能使用函数级 fixture
ELEMENTARY = CircuitParams(E_Q=1.0, E_J=1.0)
REALISTIC = CircuitParams(E_Q=1.0, E_J=1.0, E_C=200.0, E_L=10.0)
WHITE_NOISE = NoiseSpec(eps_n=0.01, eps_phi=0.02)


def test_energy_at_critical_points(elementary_params):
    """测试临界点能量"""
    values = [energy(elementary_params, cp.point) for cp in critical_points()]
    assert values == pytest.approx([-2.0, 0.0, 0.0, 2.0])


def test_gradient_vanishes_at_critical_points(elementary_params, critical_zak_points):
    """测试临界点梯度为零"""
    for p in critical_zak_points:
        dk, dphi = gradient(elementary_params, p)
        assert abs(dk) < 1e-12
        assert abs(dphi) < 1e-12
        assert is_critical(p)


def test_critical_point_kinds():
    """测试临界点分类与码字"""
    kinds = [cp.kind for cp in critical_points()]
    assert kinds == [CriticalKind.MINIMUM, CriticalKind.SADDLE, CriticalKind.SADDLE, CriticalKind.MAXIMUM]
    assert critical_points()[0].codeword == "0"
    assert critical_points()[1].codeword == "1"


@pytest.mark.parametrize("d2k, d2phi, expected", [
    (1.0, 2.0, CriticalKind.MINIMUM),
    (-1.0, -2.0, CriticalKind.MAXIMUM),
    (1.0, -2.0, CriticalKind.SADDLE),
    (-1.0, 2.0, CriticalKind.SADDLE),
    (0.0, 1.0, None),
])
def test_classify_hessian(d2k, d2phi, expected):
    """测试 Hessian 符号分类"""
    assert classify_hessian(d2k, d2phi) == expected


@given(p=zak_points, e_q=energies, e_j=energies)
def test_gradient_matches_finite_difference(p, e_q, e_j):
    """测试解析梯度与差分一致"""
    params = CircuitParams(E_Q=e_q, E_J=e_j)
    h = 1e-6
    dk = (energy(params, wrap(p.k + h, p.phi)) - energy(params, wrap(p.k - h, p.phi))) / (2 * h)
    dphi = (energy(params, wrap(p.k, p.phi + h)) - energy(params, wrap(p.k, p.phi - h))) / (2 * h)
    gk, gphi = gradient(params, p)
    assert gk == pytest.approx(dk, abs=1e-5)
    assert gphi == pytest.approx(dphi, abs=1e-5)


@given(p=zak_points)
def test_noise_actions_equal_gradient(p):
    """测试噪声算符本征值等于能量梯度"""
    gk, gphi = gradient(ELEMENTARY, p)
    assert noise_operator_action(ELEMENTARY, NoiseChannel.CHARGE, p) == pytest.approx(gk)
    assert noise_operator_action(ELEMENTARY, "flux", p) == pytest.approx(gphi)


def test_dephasing_zero_between_critical_points(elementary_params, realistic_params, white_noise, critical_zak_points):
    """测试 6 对临界点之间 Γ 严格为零（理想与重整化两种形式）"""
    for p, q in itertools.combinations(critical_zak_points, 2):
        assert dephasing_rate(elementary_params, white_noise, p, q) == pytest.approx(0.0, abs=1e-28)
        assert realistic_dephasing_rate(realistic_params, white_noise, p, q) == pytest.approx(0.0, abs=1e-28)


@hypothesis_settings(max_examples=100)
@given(p=zak_points, q=zak_points)
def test_dephasing_positive_off_critical(p, q):
    """测试非临界态对的 Γ > 0"""
    noise = NoiseSpec(eps_n=0.01, eps_phi=0.01)
    # 只在两个噪声核都不为零时 Γ 严格为正
    if abs(math.sin(2 * math.pi * p.k) - math.sin(2 * math.pi * q.k)) < 1e-3:
        return
    if abs(math.sin(p.phi) - math.sin(q.phi)) < 1e-3:
        return
    assert dephasing_rate(ELEMENTARY, noise, p, q) > 0
    assert realistic_dephasing_rate(REALISTIC, noise, p, q) > 0


@given(p=zak_points, q=zak_points)
def test_dephasing_symmetric(p, q):
    """测试 Γ(p, p′) = Γ(p′, p)，且 Γ(p, p) = 0"""
    assert dephasing_rate(ELEMENTARY, WHITE_NOISE, p, q) == pytest.approx(
        dephasing_rate(ELEMENTARY, WHITE_NOISE, q, p))
    assert dephasing_rate(ELEMENTARY, WHITE_NOISE, p, p) == 0.0


@given(p=zak_points, q=zak_points)
def test_dephasing_from_actions(p, q):
    """测试由噪声算符本征值重建的 Γ 与闭式一致"""
    expected = dephasing_rate(ELEMENTARY, WHITE_NOISE, p, q)
    assert dephasing_from_actions(ELEMENTARY, WHITE_NOISE, p, q) == pytest.approx(expected, rel=1e-9, abs=1e-15)


def test_biased_energy(elementary_params):
    """测试偏置等价于平移"""
    p = ZakPoint(0.1, 0.3)
    b = BiasPoint(0.2, -0.4)
    assert biased_energy(elementary_params, p, b) == pytest.approx(energy(elementary_params, ZakPoint(0.3, -0.1)))


def test_cx_term(elementary_params):
    """测试次级电荷项只平移能量且保留临界点"""
    assert cx_energy_shift(0.1, ZakPoint(0.0, 0.0)) == pytest.approx(-0.1)
    assert cx_energy_shift(0.1, ZakPoint(0.25, 0.0)) == pytest.approx(0.1)
    assert cx_preserves_critical_points(elementary_params, 0.3)


def test_noise_spec_validation():
    """测试噪声幅度校验"""
    with pytest.raises(InvalidParameterException):
        NoiseSpec(eps_n=-0.1)


def test_elementary_grid(elementary_params, white_noise):
    """测试能谱网格"""
    frame = elementary_grid(elementary_params, white_noise, 101, 101)
    assert list(frame.columns) == ["k", "phi", "E", "dE_dk", "dE_dphi", "Gamma_vs_ground"]
    assert len(frame) == 100 * 100
    assert frame["E"].min() == pytest.approx(-2.0)
    assert frame["E"].max() == pytest.approx(2.0)

    # Γ 只在四个临界点上为零，每个临界点只采样一次
    zero = frame[np.isclose(frame["Gamma_vs_ground"], 0.0, atol=1e-20)]
    for k, phi in zip(zero["k"], zero["phi"]):
        assert is_critical(ZakPoint(k, phi))
    assert len(zero) == 4
    distinct = {(round(k, 9) + 0.0, round(phi, 9) + 0.0) for k, phi in zip(zero["k"], zero["phi"])}
    assert distinct == {(0.0, 0.0), (0.0, round(math.pi, 9)), (0.5, 0.0), (0.5, round(math.pi, 9))}
