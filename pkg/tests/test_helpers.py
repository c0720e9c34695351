"""
辅助工具与日志测试
"""
import logging
import math

import pytest

from su11cg.utils.exceptions import ConvergenceError
from su11cg.utils.helpers import bilateral_sum, forward_sum, geometric_tail, relative_error, stable_hash
from su11cg.utils.logger import ROOT_LOGGER_NAME, get_logger


def test_relative_error():
    """测试相对误差，参考值为零时退化为绝对误差"""
    assert relative_error(1.1, 1.0) == pytest.approx(0.1)
    assert relative_error(1e-3, 0.0) == pytest.approx(1e-3)
    assert relative_error(1j, 1j) == 0.0


def test_stable_hash():
    """测试哈希与进程无关且落在 64 位范围内"""
    assert stable_hash("conti1/main") == stable_hash("conti1/main")
    assert stable_hash("conti1/main") != stable_hash("conti1/companion")
    assert 0 <= stable_hash("x") < 2 ** 64


def test_geometric_tail():
    """测试几何尾部估计"""
    assert geometric_tail([]) == 0.0
    assert geometric_tail([1.0, 0.5, 0.25]) == pytest.approx(4.0)
    assert geometric_tail([1.0, 1.0, 1.0]) > geometric_tail([1.0, 0.1, 0.01])


def test_forward_sum():
    """测试单侧级数的停止规则与固定项数"""
    result = forward_sum(lambda n: 0.5 ** n)
    assert result.value == pytest.approx(2.0, rel=1e-14)
    assert result.terms_used < 100
    fixed = forward_sum(lambda n: 0.5 ** n, fixed_terms=3)
    assert fixed.value == pytest.approx(1.75)
    assert fixed.terms_used == 3
    shifted = forward_sum(lambda n: 1.0 / math.factorial(n), start=1)
    assert shifted.value.real == pytest.approx(math.e - 1.0, rel=1e-14)


def test_bilateral_sum():
    """测试双边级数 Σ e^{-|n|} = coth(1/2)"""
    result = bilateral_sum(lambda n: math.exp(-abs(n)))
    assert result.value.real == pytest.approx(1.0 / math.tanh(0.5), rel=1e-14)
    assert result.terms_used % 2 == 1
    assert result.tail_estimate < 1e-12


def test_bilateral_sum_max_terms():
    """测试双边级数达到最大项数仍未收敛时抛出 ConvergenceError"""
    with pytest.raises(ConvergenceError):
        bilateral_sum(lambda n: 1.0 / (1.0 + n * n), max_terms=50)
    # 只有一侧慢衰减也算未收敛
    with pytest.raises(ConvergenceError):
        bilateral_sum(lambda n: 1.0 / (1.0 + n * n) if n > 0 else math.exp(n), max_terms=50)


def test_forward_sum_max_terms():
    """测试单侧级数达到最大项数仍未收敛时抛出 ConvergenceError，固定项数时不抛出"""
    with pytest.raises(ConvergenceError, match="max_terms=30"):
        forward_sum(lambda n: 1.0 / (1.0 + n), max_terms=30)
    fixed = forward_sum(lambda n: 1.0 / (1.0 + n), fixed_terms=30)
    assert fixed.terms_used == 30


def test_logger_hierarchy():
    """测试模块日志器挂在根日志器下"""
    logger = get_logger("su11cg.services.special")
    assert logger.name == f"{ROOT_LOGGER_NAME}.su11cg.services.special"
    assert logger.parent is not None
    assert isinstance(logging.getLogger(ROOT_LOGGER_NAME), logging.Logger)
