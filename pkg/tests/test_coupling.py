"""
张量积耦合服务测试
"""
import numpy as np
import pytest

from su11cg.core.schemas import CaseStatus, CDHParams, CoupledIndex, DecompositionKind, TensorPair
from su11cg.services.coupling import (
    casimir_on_Hp,
    clebsch_gordan,
    coupled_eigenvector_check,
    decompose,
    decomposition_spec,
    recompose,
    sector_params,
    extrapolate_lowest,
    spectral_profile,
)
from su11cg.services.orthopoly import cdh_orthonormal, cdh_recurrence_coeffs
from su11cg.utils.exceptions import BoundaryError, UnsupportedArgument


def test_decomposition_kinds():
    """测试三种分解类型"""
    continuous = decomposition_spec(TensorPair(k1=0.4, k2=0.45))
    assert continuous.kind is DecompositionKind.CONTINUOUS_ONLY
    assert continuous.L == 1
    assert continuous.epsilon == pytest.approx(0.95)

    complementary = decomposition_spec(TensorPair(k1=0.1, k2=0.2))
    assert complementary.kind is DecompositionKind.WITH_COMPLEMENTARY
    assert complementary.complementary_lambda == pytest.approx(-0.3)

    discrete = decomposition_spec(TensorPair(k1=0.2, k2=1.0))
    assert discrete.kind is DecompositionKind.WITH_DISCRETE
    assert discrete.K == 0
    assert discrete.discrete_ks == pytest.approx([0.8])
    assert discrete.epsilon == pytest.approx(0.2)


def test_decomposition_boundaries():
    """测试情形边界与参数顺序"""
    with pytest.raises(BoundaryError):
        decomposition_spec(TensorPair(k1=0.25, k2=0.25))
    with pytest.raises(BoundaryError):
        decomposition_spec(TensorPair(k1=0.25, k2=0.75))
    with pytest.raises(ValueError):
        TensorPair(k1=1.0, k2=0.5)


def test_coupled_index():
    """测试 (n1, n2) 与 (n, p) 的互换"""
    for n1, n2 in ((0, 0), (3, 1), (1, 4)):
        index = CoupledIndex.from_uncoupled(n1, n2)
        assert index.uncoupled == (n1, n2)
    assert CoupledIndex.from_uncoupled(3, 1).p == 2


def test_sector_params():
    """测试子空间参数"""
    t = TensorPair(k1=0.2, k2=1.0)
    assert sector_params(t, 0).as_tuple() == pytest.approx((-0.3, 0.7, 1.3))
    assert sector_params(t, 1).as_tuple()[0] == pytest.approx(0.7)


def test_casimir_is_cdh_jacobi_matrix():
    """测试 H_p 上的 Casimir 减去 ¼ 后为连续对偶 Hahn 的 Jacobi 矩阵"""
    t = TensorPair(k1=0.6, k2=0.9)
    for p in (-2, 0, 3):
        A = casimir_on_Hp(t, p, 8)
        params = sector_params(t, p)
        for n in range(7):
            a_n, b_n = cdh_recurrence_coeffs(n, params)
            assert A.diag[n] - 0.25 == pytest.approx(b_n, rel=1e-12)
            assert A.upper[n] == pytest.approx(a_n, rel=1e-12)
    with pytest.raises(ValueError):
        casimir_on_Hp(t, 0, 3)


def test_spectral_profile_with_discrete_point():
    """测试带离散点的子空间：预测点 ¼ - 0.09 = 0.16"""
    profile = spectral_profile(TensorPair(k1=0.2, k2=1.0), 0, 400)
    assert profile.predicted == pytest.approx([0.16])
    assert min(profile.eigenvalues) >= 0.16 - 1e-6
    assert profile.deviations[0] == pytest.approx(min(profile.eigenvalues) - 0.16, abs=1e-9)
    assert len(profile.eigenvalues) == 400
    assert all(value >= 0.25 - 1e-6 for value in profile.unmatched())


def test_spectral_profile_extrapolation():
    """测试维数外推把离散点偏差压到远低于单次截断"""
    profile = spectral_profile(TensorPair(k1=0.2, k2=1.0), 0, 400)
    assert profile.extrapolation_dims == [400, 800, 1600, 3200, 6400]
    assert profile.deviations[0] > 1e-3
    assert profile.extrapolated_deviations[0] < 1e-4
    assert profile.extrapolated_deviations[0] < 0.02 * profile.deviations[0]
    assert profile.extrapolated_deviations[0] == pytest.approx(abs(profile.extrapolated[0] - 0.16))

    plain = spectral_profile(TensorPair(k1=0.2, k2=1.0), 0, 50, extrapolate=False)
    assert plain.extrapolated == [] and plain.extrapolation_dims == []
    assert spectral_profile(TensorPair(k1=0.4, k2=0.45), 0, 50).extrapolated == []


def test_extrapolate_lowest_several_points():
    """测试有两个离散点时逐列外推，且单轮外推只用三个维数"""
    t = TensorPair(k1=0.2, k2=2.0)
    profile = spectral_profile(t, 0, 200, extrapolate=False)
    assert len(profile.predicted) == 2
    dims, values, errors = extrapolate_lowest(t, 0, 200, 2, passes=1)
    assert dims == [200, 400, 800]
    assert len(values) == len(errors) == 2
    for value, point, deviation in zip(values, profile.predicted, profile.deviations):
        assert abs(value - point) <= deviation + 1e-10


def test_spectral_profile_continuous():
    """测试纯连续谱的子空间没有预测点，且本征值不低于 ¼"""
    assert spectral_profile(TensorPair(k1=0.2, k2=1.0), 1, 100).predicted == []
    profile = spectral_profile(TensorPair(k1=0.4, k2=0.45), 0, 200)
    assert profile.predicted == []
    assert min(profile.eigenvalues) >= 0.25 - 1e-6


def test_clebsch_gordan_and_decompose():
    """测试 Clebsch-Gordan 系数与分解结果"""
    t = TensorPair(k1=0.5, k2=0.8)
    assert clebsch_gordan(0, 0, 1.3, t) == pytest.approx(1.0)
    component = decompose(3, 1, t)
    assert (component.p, component.n, component.sign) == (2, 1, -1)
    assert component.at(0.7) == pytest.approx(clebsch_gordan(3, 1, 0.7, t))
    assert component.at(0.7) == pytest.approx(-cdh_orthonormal(1, 0.7, sector_params(t, 2)))
    with pytest.raises(UnsupportedArgument):
        decompose(-1, 0, t)


@pytest.mark.parametrize(
    "pair,r",
    [((0.4, 0.45), 0), ((0.2, 1.0), 0), ((0.5, 0.8), -1), ((0.1, 0.3), 0), ((0.1, 0.3), 2)],
)
def test_recompose_round_trip(pair, r):
    """测试把 Ŝ_m(y; r) 重构后只在对应的 e_{n1}⊗e_{n2} 上有系数"""
    t = TensorPair(k1=pair[0], k2=pair[1])
    params: CDHParams = sector_params(t, r)
    m = 2

    def spectral(y: float) -> float:
        return cdh_orthonormal(m, y, params)

    coefficients = recompose(spectral, r, t, dim=5)
    assert len(coefficients) == 5
    target = CoupledIndex(n=m, p=r).uncoupled
    for key, value in coefficients.items():
        expected = 1.0 if key == target else 0.0
        assert abs(abs(value) - expected) < 1e-8
    assert coefficients[target] == pytest.approx((-1.0) ** target[1])


def test_recompose_zero_function():
    """测试零谱函数重构为零"""
    t = TensorPair(k1=0.4, k2=0.45)
    coefficients = recompose(lambda y: 0.0, 1, t, dim=3, squared=False)
    assert set(coefficients) == {(1, 0), (2, 1), (3, 2)}
    assert np.allclose(list(coefficients.values()), 0.0)


def test_coupled_eigenvector_kronecker_part():
    """测试 v⁺⊗v⁻ 在 X_c⊗1 + 1⊗X_c 下的本征性（不做 dν 积分）"""
    t = TensorPair(k1=0.5, k2=0.8)
    for x1, x2 in ((0, 0), (2, 1)):
        report = coupled_eigenvector_check(x1, x2, t, 0.3, dim=200, sectors=(), tolerance=1e-8)
        assert report.status is CaseStatus.PASS, report.abs_err
        assert report.id == f"coupled_eigenvector/{x1}-{x2}"


def test_recompose_complementary_kind():
    """测试带补系列的分解：H_0 的测度在 y = -(k1-k2+½)² 处有质点，重构仍为单位映射"""
    t = TensorPair(k1=0.1, k2=0.3)
    assert decomposition_spec(t).kind is DecompositionKind.WITH_COMPLEMENTARY
    params = sector_params(t, 0)
    assert params.as_tuple()[0] == pytest.approx(-0.1)
    for m in range(4):
        coefficients = recompose(lambda y: cdh_orthonormal(m, y, params), 0, t, dim=5)
        values = np.array([coefficients[(n, n)] * (-1.0) ** n for n in range(5)])
        np.testing.assert_allclose(values, np.eye(5)[m], atol=1e-8)


def test_coupled_eigenvector_overlaps():
    """测试 v⁺⊗v⁻ 与 e_{n1}⊗e_{n2} 的内积等于 dν 上的积分（默认 p = -2..2, n = 0..2）"""
    t = TensorPair(k1=0.5, k2=0.8)
    report = coupled_eigenvector_check(0, 0, t, 0.3, dim=300, tolerance=1e-7)
    assert report.status is CaseStatus.PASS, report.abs_err
    mixed = coupled_eigenvector_check(2, 1, t, 0.3, dim=300, sectors=(0, 1), degrees=(0, 1), tolerance=1e-7)
    assert mixed.status is CaseStatus.PASS, mixed.abs_err
    # 容差收紧到机器精度以下时 (ii) 的积分误差使检查失败
    strict = coupled_eigenvector_check(0, 0, t, 0.3, dim=300, sectors=(0,), degrees=(0, 1, 2), tolerance=1e-30)
    assert strict.status is CaseStatus.FAIL
    assert strict.abs_err > 0
