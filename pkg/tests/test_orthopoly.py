"""
正交多项式服务测试
"""
import itertools
import math

import numpy as np
import pytest

from su11cg.core.schemas import CDHParams, MeixnerParams
from su11cg.services.orthopoly import (
    cdh,
    cdh_orthonormal,
    cdh_orthonormal_sequence,
    cdh_recurrence_coeffs,
    cdh_unrestricted,
    jacobi_function,
    meixner,
    meixner_orthonormal,
    meixner_sequence,
    meixner_weight,
)
from su11cg.utils.exceptions import UnsupportedArgument


def test_meixner_examples():
    """测试 Meixner 多项式的简单取值"""
    p = MeixnerParams(beta=1.0, c=0.5)
    assert meixner(0, 5, p) == 1.0
    assert meixner(1, 2, p) == pytest.approx(-1.0, abs=1e-14)


def test_meixner_self_duality():
    """测试 M_n(x) = M_x(n)"""
    p = MeixnerParams(beta=1.7, c=0.35)
    for n, x in ((3, 5), (0, 7), (12, 4), (8, 6)):
        assert meixner(n, x, p) == pytest.approx(meixner(x, n, p), rel=1e-12, abs=1e-12)


def test_meixner_orthonormal_first_degree():
    """测试 M̂_1(x;2k,c) = √(2kc) - (1-c)x/√(2kc)"""
    k, c = 0.8, 0.4
    p = MeixnerParams(beta=2 * k, c=c)
    root = math.sqrt(2 * k * c)
    for x in range(6):
        assert meixner_orthonormal(1, x, p) == pytest.approx(root - (1 - c) * x / root, rel=1e-13, abs=1e-14)
    assert meixner_orthonormal(0, 3, p) == 1.0


def test_meixner_weight():
    """测试权函数的初值、比值与总质量"""
    p = MeixnerParams(beta=2.3, c=0.45)
    assert meixner_weight(0, p) == pytest.approx((1 - p.c) ** p.beta, rel=1e-14)
    for x in range(10):
        ratio = meixner_weight(x, p) / meixner_weight(x + 1, p)
        assert ratio == pytest.approx((x + 1) / ((p.beta + x) * p.c), rel=1e-12)
    q = MeixnerParams(beta=1.0, c=0.5)
    assert math.fsum(meixner_weight(x, q) for x in range(200)) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(UnsupportedArgument):
        meixner_weight(-1, p)


def test_meixner_recurrence():
    """测试 Meixner 三项递推"""
    p = MeixnerParams(beta=1.3, c=0.6)
    beta, c = p.beta, p.c
    for n in range(1, 16):
        for x in (0, 3, 11):
            lhs = (c - 1) * x * meixner(n, x, p)
            rhs = (
                c * (n + beta) * meixner(n + 1, x, p)
                - (n + (n + beta) * c) * meixner(n, x, p)
                + n * meixner(n - 1, x, p)
            )
            assert abs(lhs - rhs) <= 1e-8 * (1 + abs(lhs) + abs(c * (n + beta) * meixner(n + 1, x, p)))


def test_meixner_dual_orthogonality():
    """测试 Σ_n M̂_n(x) M̂_n(y) w(x) = δ_xy"""
    p = MeixnerParams(beta=0.9, c=0.3)
    for x, y in ((0, 0), (2, 2), (1, 3), (4, 0)):
        total = math.fsum(meixner_orthonormal(n, x, p) * meixner_orthonormal(n, y, p) for n in range(150))
        total *= math.sqrt(meixner_weight(x, p) * meixner_weight(y, p))
        assert total == pytest.approx(1.0 if x == y else 0.0, abs=1e-8)


def test_meixner_sequence_matches_direct():
    """测试按次数批量求值与逐个求值一致"""
    p = MeixnerParams(beta=1.4, c=0.3)
    for x in (0, 1, 4):
        values = meixner_sequence(25, x, p)
        expected = np.array([meixner(n, x, p) for n in range(25)])
        np.testing.assert_allclose(values, expected, rtol=1e-11, atol=1e-12)
    with pytest.raises(UnsupportedArgument):
        meixner_sequence(5, -1, p)


def test_cdh_examples():
    """测试连续对偶 Hahn 多项式的简单取值"""
    p = CDHParams(a=0.5, b=0.5, c=0.5)
    assert cdh(0, 3.2, p) == 1.0
    assert cdh(1, 0.0, p) == pytest.approx(0.75, abs=1e-15)
    assert cdh_orthonormal(1, 0.0, p) == pytest.approx(-0.75, abs=1e-15)


def test_cdh_params_canonical_order():
    """测试参数按最小值排到 a"""
    p = CDHParams(a=1.2, b=-0.3, c=0.8)
    assert p.as_tuple() == (-0.3, 1.2, 0.8)
    with pytest.raises(ValueError):
        CDHParams(a=-0.5, b=0.2, c=1.0)


def test_cdh_symmetry():
    """测试 S_n 对 (a, b, c) 的全部置换对称"""
    base = (0.3, 0.7, 1.1)
    for n in (1, 4, 9, 15):
        for y in (-0.05, 0.6, 3.5):
            reference = cdh_unrestricted(n, y, *base)
            for perm in itertools.permutations(base):
                assert cdh_unrestricted(n, y, *perm) == pytest.approx(reference, rel=1e-11, abs=1e-11)


def test_cdh_recurrence_coefficients():
    """测试递推系数"""
    a_0, b_0 = cdh_recurrence_coeffs(0, CDHParams(a=0.5, b=0.5, c=0.5))
    assert a_0 == pytest.approx(1.0)
    assert b_0 == pytest.approx(0.75)
    p = CDHParams(a=-0.3, b=1.0, c=1.5)
    assert all(cdh_recurrence_coeffs(n, p)[0] > 0 for n in range(20))


@pytest.mark.parametrize("params", [(0.7, 0.9, 1.2), (-0.3, 1.0, 1.5), (0.6, 0.6, 0.6)])
def test_cdh_recurrence_residual(params):
    """测试求和求值满足三项递推"""
    p = CDHParams(a=params[0], b=params[1], c=params[2])
    for y in (-0.09, 0.4, 2.3):
        for n in range(1, 20):
            a_n, b_n = cdh_recurrence_coeffs(n, p)
            a_prev, _ = cdh_recurrence_coeffs(n - 1, p)
            current = cdh_orthonormal(n, y, p)
            upper = a_n * cdh_orthonormal(n + 1, y, p)
            lower = a_prev * cdh_orthonormal(n - 1, y, p)
            scale = max(1.0, abs(y * current), abs(upper), abs(b_n * current))
            assert abs(y * current - (upper + b_n * current + lower)) <= 1e-10 * scale


def test_cdh_orthonormal_sequence_matches_sum():
    """测试递推生成的序列与求和求值一致"""
    p = CDHParams(a=0.7, b=0.9, c=1.2)
    for y in (0.2, 1.7):
        values = cdh_orthonormal_sequence(12, y, p)
        expected = np.array([cdh_orthonormal(n, y, p) for n in range(12)])
        np.testing.assert_allclose(values, expected, rtol=1e-9, atol=1e-11)
    assert len(cdh_orthonormal_sequence(0, 1.0, p)) == 0


def test_cdh_leading_coefficient():
    """测试 Ŝ_n 在 y 中的首项系数"""
    a, b, c = 0.7, 0.9, 1.2
    p = CDHParams(a=a, b=b, c=c)
    n = 3
    ys = np.array([0.0, 1.0, 2.0, 3.0])
    values = np.array([cdh_orthonormal(n, y, p) for y in ys])
    leading = np.polyfit(ys, values, n)[0]
    norm = math.factorial(n)
    for s in (a + b, a + c, b + c):
        norm *= math.prod(s + j for j in range(n))
    assert leading == pytest.approx(1.0 / math.sqrt(norm), rel=1e-8)


def test_degree_must_be_non_negative():
    """测试负次数"""
    with pytest.raises(UnsupportedArgument):
        cdh(-1, 0.0, CDHParams(a=0.5, b=0.5, c=0.5))
    with pytest.raises(UnsupportedArgument):
        meixner(-2, 1.0, MeixnerParams(beta=1.0, c=0.5))


def test_jacobi_function():
    """测试 Jacobi 函数"""
    assert jacobi_function(0.5, 1.5, 0.8, 0.0) == pytest.approx(1.0)
    # ½(α+β+1+iσ) = 0 时恒为 1
    assert jacobi_function(0.0, -1.0, 0.0, 0.7) == pytest.approx(1.0)
    value = jacobi_function(-2.0, 1.0, 0.6, 0.4, regularized=True)
    assert np.isfinite(abs(value))
