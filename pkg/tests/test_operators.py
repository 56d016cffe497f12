"""
测试截断振子算符
"""
import math

import numpy as np
import pytest
from scipy import linalg

from src.core.operators import (
    TruncatedOperator,
    build_operators,
    displacement_element,
    displacement_matrix,
    eigensolve,
    eigenvalues,
    unitarity_deviation,
)
from src.utils.exceptions import (
    InvalidInputException,
    InvalidParameterException,
    NonHermitianOperatorException,
)

Z = math.sqrt(20.0)


def _number_basis_ladder(N):
    a = np.diag(np.sqrt(np.arange(1, N, dtype=float)), k=1)
    return a, a.T


@pytest.mark.parametrize("beta", [0.3 + 0.4j, 1j * math.sqrt(Z / 2.0), -2.0 * math.pi / math.sqrt(2.0 * Z)])
def test_displacement_matches_expm(beta):
    """测试闭式矩阵元与大截断下的矩阵指数一致（低数态子块）"""
    big = 120
    a, adag = _number_basis_ladder(big)
    reference = linalg.expm(beta * adag - np.conj(beta) * a)
    D = displacement_matrix(30, beta)
    np.testing.assert_allclose(D[:20, :20], reference[:20, :20], atol=1e-9)


def test_displacement_element_symmetry():
    """测试 ⟨m|D(β)|n⟩ = ⟨n|D(−β)|m⟩*"""
    beta = 0.7 - 0.2j
    for m, n in [(0, 3), (5, 1), (4, 4)]:
        assert displacement_element(m, n, beta) == pytest.approx(displacement_element(n, m, -beta).conjugate())
    assert displacement_element(0, 0, 0) == 1.0
    assert displacement_element(2, 1, 0) == 0.0


def test_displacement_element_errors():
    """测试非法指标与位移"""
    with pytest.raises(InvalidParameterException):
        displacement_element(-1, 0, 0.5)
    with pytest.raises(InvalidInputException):
        displacement_element(0, 0, complex(float("nan"), 0.0))


def test_ground_state_overlap():
    """测试 ⟨0|D(β)|0⟩ = exp(−|β|²/2)"""
    beta = 1j * math.sqrt(Z / 2.0)
    assert abs(displacement_element(0, 0, beta)) == pytest.approx(math.exp(-Z / 4.0))


def test_operator_identities():
    """测试 n̂₁、φ̂₁ 与平方算符"""
    N = 40
    ops = build_operators(Z, N)
    assert ops.N == N
    assert TruncatedOperator(ops.n1).is_hermitian()
    assert TruncatedOperator(ops.phi1).is_hermitian()
    keep = N // 4
    np.testing.assert_allclose((ops.n1 @ ops.n1)[:keep, :keep], ops.n1_sq[:keep, :keep], atol=1e-12)
    np.testing.assert_allclose((ops.phi1 @ ops.phi1)[:keep, :keep], ops.phi1_sq[:keep, :keep], atol=1e-12)
    # [φ̂₁, n̂₁] = i 在低数态子块成立
    commutator = ops.phi1 @ ops.n1 - ops.n1 @ ops.phi1
    np.testing.assert_allclose(commutator[:keep, :keep], 1j * np.eye(keep), atol=1e-12)


def test_displacement_unitarity_interior():
    """测试截断后的位移算符在低数态子块上幺正"""
    N = 64
    ops = build_operators(Z, N)
    keep = N // 4
    assert unitarity_deviation(ops.exp_iphi, keep) < 1e-10
    assert unitarity_deviation(ops.exp_i2pin, keep) < 1e-10


def test_build_operators_cached_and_readonly():
    """测试算符组缓存与只读"""
    ops1 = build_operators(Z, 16)
    ops2 = build_operators(Z, 16)
    assert ops1 is ops2
    with pytest.raises(ValueError):
        ops1.n1[0, 0] = 1.0


@pytest.mark.parametrize("z, N", [(0.0, 16), (-1.0, 16), (Z, 4), (Z, 1024)])
def test_build_operators_invalid(z, N):
    """测试非法 (z, N)"""
    with pytest.raises(InvalidParameterException):
        build_operators(z, N)


def test_truncated_operator_validation():
    """测试 TruncatedOperator 校验"""
    with pytest.raises(InvalidInputException):
        TruncatedOperator(np.zeros((2, 3)))
    with pytest.raises(InvalidInputException):
        TruncatedOperator(np.zeros((1, 1)))
    op = TruncatedOperator(np.array([[0.0, 1.0], [0.0, 0.0]]))
    assert not op.is_hermitian()
    with pytest.raises(NonHermitianOperatorException):
        op.require_hermitian()


def test_density_matrix_check():
    """测试密度矩阵判定"""
    assert TruncatedOperator(np.diag([0.25, 0.75])).is_density_matrix()
    assert not TruncatedOperator(np.diag([0.5, 0.6])).is_density_matrix()
    assert not TruncatedOperator(np.diag([1.5, -0.5])).is_density_matrix()


def test_eigensolve():
    """测试稠密厄米本征求解"""
    rng = np.random.default_rng(7)
    M = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
    H = M + M.conj().T
    result = eigensolve(H, 4)
    assert np.all(np.diff(result.values) >= 0)
    assert result.residual(H) < 1e-10
    np.testing.assert_allclose(result.values, eigenvalues(H, 4), atol=1e-12)
    np.testing.assert_allclose(result.values, np.linalg.eigvalsh(H)[:4], atol=1e-10)
    with pytest.raises(InvalidParameterException):
        eigensolve(H, 0)


@pytest.mark.parametrize("count", [0, 13])
def test_eigenvalues_count_bounds(count):
    """测试本征值个数超出 [1, 维数] 时抛出参数异常"""
    H = np.diag(np.arange(12, dtype=float))
    with pytest.raises(InvalidParameterException):
        eigenvalues(H, count)
    with pytest.raises(InvalidParameterException):
        eigensolve(H, count)
