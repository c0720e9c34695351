"""
表示服务测试
"""
import math

import numpy as np
import pytest

from su11cg.core.schemas import (
    CaseStatus,
    Complementary,
    Generator,
    GeneratorName,
    NegativeDiscrete,
    PositiveDiscrete,
    Principal,
)
from su11cg.services.repn import (
    TridiagonalOperator,
    casimir_scalar,
    commutator_check,
    conjugated_action_check,
    eigen_residual,
    eigenbasis_matrix,
    generator_matrix,
    resolve_offset,
    xc_eigenvalue,
    xc_eigenvector,
)
from su11cg.utils.exceptions import UnsupportedArgument, WindowError

SERIES = [
    PositiveDiscrete(k=0.7),
    NegativeDiscrete(k=1.2),
    Principal(rho=0.8, epsilon=0.3),
    Complementary(lam=-0.35, epsilon=0.2),
]


def test_casimir_scalar():
    """测试 Casimir 标量"""
    assert casimir_scalar(PositiveDiscrete(k=0.7)) == pytest.approx(0.21)
    assert casimir_scalar(Principal(rho=0.8, epsilon=0.3)) == pytest.approx(0.89)
    assert casimir_scalar(Complementary(lam=-0.35, epsilon=0.2)) == pytest.approx(0.2275)


def test_series_labels_validate():
    """测试表示标签的取值范围"""
    with pytest.raises(ValueError):
        Principal(rho=0.0, epsilon=0.5)
    with pytest.raises(ValueError):
        Complementary(lam=-0.1, epsilon=0.2)
    with pytest.raises(ValueError):
        PositiveDiscrete(k=0.0)


def test_window_rules():
    """测试离散系列只允许从 0 开始的窗口"""
    assert resolve_offset(PositiveDiscrete(k=1.0), 10) == 0
    assert resolve_offset(Principal(rho=0.5, epsilon=0.0), 10) == -5
    assert resolve_offset(Principal(rho=0.5, epsilon=0.0), 10, 3) == 3
    with pytest.raises(WindowError):
        resolve_offset(PositiveDiscrete(k=1.0), 10, 3)
    with pytest.raises(WindowError):
        resolve_offset(PositiveDiscrete(k=1.0), 0)


def test_tridiagonal_operator():
    """测试三对角算子的组合、矩阵向量积与本征值"""
    A = TridiagonalOperator(lower=[1.0, 2.0], diag=[0.0, 1.0, 2.0], upper=[1.0, 2.0])
    assert A.dim == 3
    assert A.is_symmetric
    v = np.array([1.0, -1.0, 2.0])
    np.testing.assert_allclose(A.matvec(v), A.dense() @ v)
    np.testing.assert_allclose(A.eigenvalues(), np.linalg.eigvalsh(A.dense()), atol=1e-12)
    np.testing.assert_allclose(A.lowest(2), np.linalg.eigvalsh(A.dense())[:2], atol=1e-12)
    with pytest.raises(ValueError):
        A.lowest(4)

    B = TridiagonalOperator(lower=[1.0, 0.0], diag=[0.0, 0.0, 0.0], upper=[0.0, 0.0])
    combined = TridiagonalOperator.combine([(2.0, A), (-1.0, B)])
    np.testing.assert_allclose(combined.dense(), 2.0 * A.dense() - B.dense())
    with pytest.raises(ValueError):
        B.eigenvalues()

    shifted = TridiagonalOperator(lower=[0.0, 0.0], diag=[1.0, 1.0, 1.0], upper=[0.0, 0.0], basis_offset=-1)
    with pytest.raises(WindowError):
        TridiagonalOperator.combine([(1.0, A), (1.0, shifted)])
    with pytest.raises(ValueError):
        TridiagonalOperator(lower=[1.0], diag=[0.0, 1.0, 2.0], upper=[1.0, 2.0])


def test_positive_discrete_generators():
    """测试正离散系列中 H、B、C 的矩阵元"""
    s = PositiveDiscrete(k=0.7)
    H = generator_matrix(s, Generator(name=GeneratorName.H), 5).dense()
    B = generator_matrix(s, Generator(name=GeneratorName.B), 5).dense()
    C = generator_matrix(s, Generator(name=GeneratorName.C), 5).dense()
    np.testing.assert_allclose(np.diag(H), 2.0 * (0.7 + np.arange(5)))
    # B e_n = √((n+1)(2k+n)) e_{n+1}，C = -B^T
    assert B[1, 0] == pytest.approx(math.sqrt(1.4))
    np.testing.assert_allclose(C, -B.T)


@pytest.mark.parametrize("series", SERIES, ids=lambda s: s.kind)
def test_commutation_relations(series):
    """测试截断内部的对易关系与 Casimir"""
    report = commutator_check(series, dim=40, c=0.5)
    assert report.status is CaseStatus.PASS
    assert report.id == f"commutator/{series.kind}"


@pytest.mark.parametrize("series", SERIES, ids=lambda s: s.kind)
def test_xc_eigenvector_residual(series):
    """测试 X_c 本征向量在窗口内部的残差"""
    c = 0.4
    dim = 200
    A = generator_matrix(series, Generator(name=GeneratorName.XC, c=c), dim)
    for x in (0, 2):
        pair = xc_eigenvector(series, x, c, dim)
        assert pair.eigenvalue == pytest.approx(xc_eigenvalue(series, x, c))
        assert eigen_residual(A, pair, series) < 1e-8


def test_xc_eigenvector_rejections():
    """测试本征向量的参数限制"""
    with pytest.raises(UnsupportedArgument):
        xc_eigenvector(PositiveDiscrete(k=0.7), 0, 0.97, 20)
    with pytest.raises(UnsupportedArgument):
        xc_eigenvector(PositiveDiscrete(k=0.7), -1, 0.4, 20)
    with pytest.raises(ValueError):
        Generator(name=GeneratorName.XC)


@pytest.mark.parametrize("series", SERIES, ids=lambda s: s.kind)
def test_conjugated_action(series):
    """测试 H_c、B_c、C_c 在本征向量上的作用"""
    xs = range(0, 4) if isinstance(series, (PositiveDiscrete, NegativeDiscrete)) else range(-3, 4)
    report = conjugated_action_check(series, 0.4, 200, xs=xs)
    assert report.status is CaseStatus.PASS, report.lhs_re


def test_eigenbasis_is_orthogonal():
    """测试离散系列本征基矩阵近似正交"""
    E = eigenbasis_matrix(PositiveDiscrete(k=0.9), 0.3, 120)
    block = E[:, :20]
    np.testing.assert_allclose(block.T @ block, np.eye(20), atol=1e-8)
    np.testing.assert_allclose(E, E.T, atol=1e-12)
