"""
Meixner 函数服务测试
"""
import math

import pytest

from su11cg.core.schemas import MeixnerFunctionParams, Regime, classify_regime
from su11cg.services.mfunctions import (
    meixner_function,
    meixner_function_normalized,
    meixner_function_weight,
    terminating_data,
)
from su11cg.utils.exceptions import InvalidRegime
from su11cg.utils.helpers import bilateral_sum


PRINCIPAL = MeixnerFunctionParams.principal(rho=0.5, epsilon=0.2, c=0.3)
COMPLEMENTARY = MeixnerFunctionParams.real(lam=-0.35, epsilon=0.2, c=0.3)


def test_regime_classification():
    """测试参数区间判定"""
    assert PRINCIPAL.regime is Regime.PRINCIPAL
    assert COMPLEMENTARY.regime is Regime.COMPLEMENTARY
    assert MeixnerFunctionParams.real(lam=0.5, epsilon=0.5, c=0.3).regime is Regime.TERMINATING
    with pytest.raises(InvalidRegime):
        MeixnerFunctionParams.real(lam=0.3, epsilon=0.2, c=0.4)
    with pytest.raises(ValueError):
        MeixnerFunctionParams.principal(rho=0.5, epsilon=0.2, c=1.2)


def test_reducible_principal_point_rejected():
    """测试 ρ = 0, ε = ½ 的可约点不被判为主系列"""
    with pytest.raises(InvalidRegime):
        MeixnerFunctionParams.principal(rho=0.0, epsilon=0.5, c=0.3)
    with pytest.raises(InvalidRegime):
        classify_regime(complex(-0.5, 0.0), 0.5)
    assert classify_regime(complex(-0.5, 1e-3), 0.5) is Regime.PRINCIPAL
    assert MeixnerFunctionParams.principal(rho=0.0, epsilon=0.2, c=0.3).regime is Regime.PRINCIPAL


def test_weight_at_origin():
    """测试 w̃(0) = (1-c)^{-2ε} / Γ(ε+½)²（ρ = 0）"""
    c = 0.45
    p = MeixnerFunctionParams.principal(rho=0.0, epsilon=0.3, c=c)
    expected = (1 - c) ** (-0.6) / math.gamma(0.8) ** 2
    assert meixner_function_weight(0, p) == pytest.approx(expected, rel=1e-13)


def test_weight_ratio():
    """测试 w̃(x)/w̃(x+1) = c(ε+x-λ)(ε+λ+x+1)"""
    lam, eps, c = -0.35, 0.2, 0.4
    p = MeixnerFunctionParams.real(lam=lam, epsilon=eps, c=c)
    for x in range(-3, 4):
        ratio = meixner_function_weight(x, p) / meixner_function_weight(x + 1, p)
        assert ratio == pytest.approx(c * (eps + x - lam) * (eps + lam + x + 1), rel=1e-11)


def test_normalized_matches_product():
    """测试 m̂_n(x)√w̃(x) 与分开计算的乘积一致"""
    for p in (PRINCIPAL, COMPLEMENTARY):
        for n, x in ((0, 0), (2, -1), (-3, 4), (5, 5)):
            expected = meixner_function(n, x, p) * math.sqrt(meixner_function_weight(x, p))
            assert meixner_function_normalized(n, x, p) == pytest.approx(expected, rel=1e-10, abs=1e-14)


@pytest.mark.parametrize("p", [PRINCIPAL, COMPLEMENTARY], ids=["principal", "complementary"])
@pytest.mark.parametrize("first,second", [(0, 0), (1, -2), (3, 3)])
def test_dual_orthonormality(p, first, second):
    """测试 Σ_n m̂_n(x) m̂_n(y) √(w̃(x)w̃(y)) = δ_xy"""

    def term(n: int) -> float:
        return meixner_function_normalized(n, first, p) * meixner_function_normalized(n, second, p)

    total = bilateral_sum(term, floor_ratio=math.sqrt(p.c))
    assert abs(total.value - (1.0 if first == second else 0.0)) < 1e-6


@pytest.mark.parametrize("first,second", [(0, 0), (1, -2), (-2, -2)])
def test_orthonormality(first, second):
    """测试 Σ_x m̂_m(x) m̂_n(x) w̃(x) = δ_mn"""

    def term(x: int) -> float:
        return meixner_function_normalized(first, x, PRINCIPAL) * meixner_function_normalized(second, x, PRINCIPAL)

    total = bilateral_sum(term, floor_ratio=math.sqrt(PRINCIPAL.c))
    assert abs(total.value - (1.0 if first == second else 0.0)) < 1e-6


def test_terminating_regime():
    """测试截断区间：未归一化函数拒绝求值，归一化形式在 n > J 时为 0"""
    p = MeixnerFunctionParams.real(lam=0.5, epsilon=0.5, c=0.3)
    with pytest.raises(InvalidRegime):
        meixner_function(0, 0, p)
    J, k = terminating_data(p)
    assert J == -2
    assert k == pytest.approx(1.5)
    assert meixner_function_normalized(0, 0, p) == 0.0
    assert meixner_function_normalized(-3, 1, p) == 0.0
    with pytest.raises(InvalidRegime):
        terminating_data(PRINCIPAL)
