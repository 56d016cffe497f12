"""
测试模式 1 哈密顿量的数态基对角化
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings as hypothesis_settings, strategies as st

from src.core.circuit import BiasPoint, CircuitParams, ZakPoint, wrap
from src.core.elementary import NoiseChannel
from src.core.fock_engine import (
    ModeOneSpec,
    build_hamiltonian,
    charge_noise_operator,
    check_convergence,
    elementary_operators,
    flux_noise_operator,
    mode_one_energies,
    numeric_projected_noise,
    perturbation_matrix,
    solve_mode_one,
)
from src.core.operators import build_operators
from src.core.perturbation import first_order_band_energy, projected_noise
from src.utils.exceptions import ConvergenceException, InvalidParameterException


def test_spec_validation(elementary_params, realistic_params):
    """测试输入校验"""
    with pytest.raises(InvalidParameterException):
        ModeOneSpec(elementary_params, ZakPoint(0.0, 0.0))
    with pytest.raises(InvalidParameterException):
        ModeOneSpec(realistic_params, ZakPoint(0.0, 0.0), truncation=4)
    spec = ModeOneSpec(realistic_params, ZakPoint(0.1, 0.2))
    assert spec.z == pytest.approx(math.sqrt(20.0))
    assert spec.with_truncation(48).truncation == 48
    assert spec.with_point(ZakPoint(0.0, 0.0)).point == ZakPoint(0.0, 0.0)


def test_hamiltonian_hermitian(realistic_params):
    """测试 Ĥ₁ 厄米"""
    spec = ModeOneSpec(realistic_params, ZakPoint(0.17, -1.3), BiasPoint(0.05, 0.4))
    H = build_hamiltonian(spec)
    assert H.dim == spec.truncation
    assert H.is_hermitian()


def test_quadratic_part_is_oscillator(realistic_params):
    """测试去掉非线性项后为 ħΩ(n + 1/2)"""
    spec = ModeOneSpec(realistic_params, ZakPoint(0.0, 0.0))
    H = build_hamiltonian(spec).matrix - perturbation_matrix(spec)
    keep = spec.truncation // 4
    expected = spec.hbar_omega * (np.arange(keep) + 0.5)
    np.testing.assert_allclose(np.diag(H)[:keep].real, expected, atol=1e-9)


@pytest.mark.parametrize("point", [ZakPoint(0.0, 0.0), ZakPoint(0.0, math.pi), ZakPoint(0.3, 1.1), ZakPoint(-0.42, -2.5)])
def test_ground_band_matches_first_order(realistic_params, point):
    """测试 m = 0 数值能量与一阶结果之差小于 0.006·E_J"""
    energy = mode_one_energies(ModeOneSpec(realistic_params, point), 1)[0]
    assert abs(energy - first_order_band_energy(realistic_params, point, 0)) < 0.006


def test_band_symmetry(realistic_params):
    """测试 E(k, φ) = E(−k, φ) = E(k, −φ)"""
    base = mode_one_energies(ModeOneSpec(realistic_params, ZakPoint(0.21, 0.8)), 2)
    mirror_k = mode_one_energies(ModeOneSpec(realistic_params, ZakPoint(-0.21, 0.8)), 2)
    mirror_phi = mode_one_energies(ModeOneSpec(realistic_params, ZakPoint(0.21, -0.8)), 2)
    np.testing.assert_allclose(base, mirror_k, atol=1e-9)
    np.testing.assert_allclose(base, mirror_phi, atol=1e-9)


@hypothesis_settings(max_examples=40, deadline=None)
@given(
    e_q=st.floats(0.1, 2.0),
    e_j=st.floats(0.1, 2.0),
    z=st.floats(1.0, 4.0 * math.pi ** 2),
    k=st.floats(-0.5, 0.5, exclude_min=True),
    phi=st.floats(-math.pi, math.pi, exclude_min=True),
)
def test_charge_flux_duality(e_q, e_j, z, k, phi):
    """测试交换 E_Q ↔ E_J、z ↔ 4π²/z、(k, φ) ↔ (−φ/2π, 2πk) 后能谱不变"""
    hbar_omega = 50.0
    params = CircuitParams.from_oscillator(e_q, e_j, z, hbar_omega)
    dual = CircuitParams.from_oscillator(e_j, e_q, 4.0 * math.pi ** 2 / z, hbar_omega)
    energies = mode_one_energies(ModeOneSpec(params, ZakPoint(k, phi), truncation=32), 2)
    dual_point = wrap(-phi / (2.0 * math.pi), 2.0 * math.pi * k)
    dual_energies = mode_one_energies(ModeOneSpec(dual, dual_point, truncation=32), 2)
    np.testing.assert_allclose(energies, dual_energies, atol=1e-9 * hbar_omega)


def test_solve_mode_one_vectors(realistic_params):
    """测试本征矢残差与正交归一"""
    spec = ModeOneSpec(realistic_params, ZakPoint(0.1, 0.5))
    result = solve_mode_one(spec, 3)
    H = build_hamiltonian(spec).matrix
    assert result.residual(H) < 1e-9
    np.testing.assert_allclose(result.vectors.conj().T @ result.vectors, np.eye(3), atol=1e-12)


def test_convergence_default_truncation(realistic_params):
    """测试默认截断已收敛"""
    report = check_convergence(ModeOneSpec(realistic_params, ZakPoint(0.0, 0.0)))
    assert report.converged
    assert report.reference_truncation > report.truncation


@pytest.mark.parametrize("point", [ZakPoint(0.0, 0.0), ZakPoint(0.5, math.pi)])
def test_convergence_against_n_plus_16(realistic_params, point):
    """测试 N = 40 与 N = 56 的最低两个本征值之差 < 1e−8·ħΩ"""
    report = check_convergence(ModeOneSpec(realistic_params, point, truncation=40), step=16)
    assert report.reference_truncation == 56
    assert report.converged


def test_convergence_failure_raises(realistic_params):
    """测试过小截断被判为未收敛"""
    spec = ModeOneSpec(realistic_params, ZakPoint(0.0, 0.0), truncation=8)
    report = check_convergence(spec)
    assert not report.converged
    with pytest.raises(ConvergenceException):
        check_convergence(spec, raise_on_failure=True)


def test_noise_operators_are_bias_derivatives(realistic_params):
    """测试 Â_n = ∂Ĥ/∂n_x，Â_φ = ∂Ĥ/∂φ_x"""
    point = ZakPoint(0.2, 0.3)
    bias = BiasPoint(0.1, -0.2)
    h = 1e-4

    def H(b):
        return build_hamiltonian(ModeOneSpec(realistic_params, point, b)).matrix

    spec = ModeOneSpec(realistic_params, point, bias)
    d_n = (H(BiasPoint(bias.n_x + h, bias.phi_x)) - H(BiasPoint(bias.n_x - h, bias.phi_x))) / (2 * h)
    d_phi = (H(BiasPoint(bias.n_x, bias.phi_x + h)) - H(BiasPoint(bias.n_x, bias.phi_x - h))) / (2 * h)
    np.testing.assert_allclose(d_n, charge_noise_operator(spec).matrix, atol=1e-6)
    np.testing.assert_allclose(d_phi, flux_noise_operator(spec).matrix, atol=1e-6)


def test_numeric_projected_noise(realistic_params):
    """测试数值投影噪声与一阶闭式接近"""
    point = ZakPoint(0.15, 0.9)
    numeric = numeric_projected_noise(ModeOneSpec(realistic_params, point))
    assert numeric["charge"] == pytest.approx(projected_noise(realistic_params, NoiseChannel.CHARGE, point), abs=0.1)
    assert numeric["flux"] == pytest.approx(projected_noise(realistic_params, NoiseChannel.FLUX, point), abs=0.1)

    # Hellmann–Feynman: ⟨Â⟩ 等于基态能量对偏置的导数
    h = 1e-5

    def e0(bias):
        return mode_one_energies(ModeOneSpec(realistic_params, point, bias), 1)[0]

    d_n = (e0(BiasPoint(h, 0.0)) - e0(BiasPoint(-h, 0.0))) / (2 * h)
    d_phi = (e0(BiasPoint(0.0, h)) - e0(BiasPoint(0.0, -h))) / (2 * h)
    assert numeric["charge"] == pytest.approx(d_n, abs=1e-5)
    assert numeric["flux"] == pytest.approx(d_phi, abs=1e-5)


def test_projected_noise_vanishes_at_critical_points(realistic_params, critical_zak_points):
    """测试临界点上的投影噪声为零（对称性）"""
    for p in critical_zak_points:
        numeric = numeric_projected_noise(ModeOneSpec(realistic_params, p))
        assert abs(numeric["charge"]) < 1e-6
        assert abs(numeric["flux"]) < 1e-6


def test_elementary_operators_commute_in_interior():
    """测试理想电路的三个算符在低数态子块中两两对易"""
    params = CircuitParams(E_Q=1.0, E_J=1.0)
    N = 64
    ops = elementary_operators(params, 2.0 * math.pi, N)
    keep = N // 4
    for a, b in [("H", "A_n"), ("H", "A_phi"), ("A_n", "A_phi")]:
        A, B = ops[a].matrix, ops[b].matrix
        commutator = (A @ B - B @ A)[:keep, :keep]
        assert np.max(np.abs(commutator)) < 1e-10
    assert ops["H"].is_hermitian()


def test_operators_reused_across_points(realistic_params):
    """测试同一 (z, N) 的算符在不同 Zak 点之间复用"""
    a = ModeOneSpec(realistic_params, ZakPoint(0.0, 0.0)).operators()
    b = ModeOneSpec(realistic_params, ZakPoint(0.4, -2.0)).operators()
    assert a is b
    assert a is build_operators(math.sqrt(20.0), a.N)
