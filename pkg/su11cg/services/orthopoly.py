"""
正交多项式服务
Meixner 多项式与连续对偶 Hahn 多项式、归一化形式、权函数、三项递推和 Jacobi 函数
"""
import math
from typing import Tuple

import numpy as np

from su11cg.core.schemas import CDHParams, MeixnerParams
from su11cg.services.special import (
    Number,
    gauss_2f1,
    gauss_2f1_regularized,
    mp_context,
)
from su11cg.utils.exceptions import UnsupportedArgument
from su11cg.utils.logger import get_logger

logger = get_logger(__name__)

_BASE_DPS = 30
_MAX_DPS = 400
_GUARD_DIGITS = 20


def _check_degree(n: int):
    if n < 0:
        raise UnsupportedArgument(f"polynomial degree must be non-negative, got {n}")


# ==================== Meixner ====================

def meixner(n: int, x: float, p: MeixnerParams) -> float:
    """
    Meixner 多项式 M_n(x; β, c) = 2F1(-n, -x; β; 1 - 1/c)

    Args:
        n: 次数
        x: 自变量
        p: 参数

    Returns:
        多项式值
    """
    _check_degree(n)
    if n == 0:
        return 1.0
    return gauss_2f1(-n, -x, p.beta, 1.0 - 1.0 / p.c).real


def meixner_orthonormal(n: int, x: float, p: MeixnerParams) -> float:
    """归一化 Meixner 多项式 √((β)_n c^n / n!) M_n(x)"""
    _check_degree(n)
    log_norm = 0.5 * (math.lgamma(p.beta + n) - math.lgamma(p.beta) + n * math.log(p.c) - math.lgamma(n + 1))
    return math.exp(log_norm) * meixner(n, x, p)


def meixner_weight(x: int, p: MeixnerParams) -> float:
    """Meixner 权函数 (β)_x c^x (1-c)^β / x!"""
    if x < 0:
        raise UnsupportedArgument(f"Meixner weight is defined on x >= 0, got {x}")
    log_w = (
        math.lgamma(p.beta + x) - math.lgamma(p.beta) + x * math.log(p.c)
        + p.beta * math.log1p(-p.c) - math.lgamma(x + 1)
    )
    return math.exp(log_w)


def meixner_sequence(N: int, x: int, p: MeixnerParams) -> np.ndarray:
    """
    M_0(x), ..., M_{N-1}(x)，x 为非负整数

    由自对偶性 M_n(x) = M_x(n)，对 n 是 x 次多项式，逐项求和（无消去问题）。

    Args:
        N: 个数
        x: 非负整数自变量
        p: 参数

    Returns:
        长度为 N 的数组
    """
    if x < 0:
        raise UnsupportedArgument(f"meixner_sequence needs integer x >= 0, got {x}")
    n = np.arange(N, dtype=float)
    ratio = 1.0 - 1.0 / p.c
    total = np.ones(N)
    falling = np.ones(N)  # (-n)_j
    coef = 1.0  # (-x)_j z^j / ((β)_j j!)
    for j in range(x):
        falling = falling * (j - n)
        coef *= (j - x) * ratio / ((p.beta + j) * (j + 1))
        total = total + coef * falling
    return total


# ==================== 连续对偶 Hahn ====================

def _cdh_sum(n: int, y: float, a: float, b: float, c: float, normalized: bool) -> float:
    """
    S_n(y; a, b, c) = Σ_j (-n)_j Π_{m<j}((a+m)²+y) / j! · (a+b+j)_{n-j} (a+c+j)_{n-j}

    即消去分母后的终止 3F2，y < 0 时不出现 √y。
    """
    _check_degree(n)
    if n == 0:
        return 1.0
    ctx = mp_context()
    dps = _BASE_DPS
    while True:
        ctx.dps = dps
        A, B, C, Y = ctx.mpf(a), ctx.mpf(b), ctx.mpf(c), ctx.mpf(y)
        # 右因子 (a+b+j)_{n-j}(a+c+j)_{n-j}，自后向前累乘
        right = [ctx.mpf(1)] * (n + 1)
        for j in range(n - 1, -1, -1):
            right[j] = right[j + 1] * (A + B + j) * (A + C + j)
        left = ctx.mpf(1)
        total = right[0]
        peak = abs(total)
        for j in range(1, n + 1):
            left *= (j - 1 - n) * ((A + j - 1) ** 2 + Y) / j
            term = left * right[j]
            total += term
            peak = max(peak, abs(term))
        if total == 0:
            return 0.0
        lost = float(ctx.log10(peak / abs(total)))
        if lost < dps - _GUARD_DIGITS or dps >= _MAX_DPS:
            break
        dps = min(_MAX_DPS, int(lost) + 2 * _GUARD_DIGITS)
    if normalized:
        norm = ctx.sqrt(ctx.factorial(n) * ctx.rf(A + B, n) * ctx.rf(A + C, n) * ctx.rf(B + C, n))
        total = total / norm
        if n % 2:
            total = -total
    return float(total)


def cdh_unrestricted(n: int, y: float, a: float, b: float, c: float) -> float:
    """任意实参数的 S_n(y; a, b, c)，不检查测度正性"""
    return _cdh_sum(n, y, a, b, c, normalized=False)


def cdh(n: int, y: float, p: CDHParams) -> float:
    """
    连续对偶 Hahn 多项式 S_n(y; a, b, c)

    Args:
        n: 次数
        y: 自变量 y = x²，可为负
        p: 参数

    Returns:
        多项式值
    """
    return _cdh_sum(n, y, p.a, p.b, p.c, normalized=False)


def cdh_orthonormal(n: int, y: float, p: CDHParams) -> float:
    """归一化 Ŝ_n = (-1)^n S_n / √(n!(a+b)_n(a+c)_n(b+c)_n)"""
    return _cdh_sum(n, y, p.a, p.b, p.c, normalized=True)


def cdh_recurrence_coeffs(n: int, p: CDHParams) -> Tuple[float, float]:
    """
    Ŝ_n 三项递推系数

    y Ŝ_n = a_n Ŝ_{n+1} + b_n Ŝ_n + a_{n-1} Ŝ_{n-1}

    Returns:
        (a_n, b_n)
    """
    _check_degree(n)
    a, b, c = p.as_tuple()
    a_n = math.sqrt((n + 1) * (n + a + b) * (n + a + c) * (n + b + c))
    b_n = 2 * n * n + 2 * n * (a + b + c - 0.5) + a * b + a * c + b * c
    return a_n, b_n


def cdh_orthonormal_sequence(N: int, y: float, p: CDHParams) -> np.ndarray:
    """
    Ŝ_0(y), ..., Ŝ_{N-1}(y)，由三项递推逐次生成

    Args:
        N: 个数
        y: 自变量
        p: 参数

    Returns:
        长度为 N 的数组
    """
    values = np.zeros(N)
    if N == 0:
        return values
    values[0] = 1.0
    prev_a = 0.0
    for n in range(N - 1):
        a_n, b_n = cdh_recurrence_coeffs(n, p)
        previous = values[n - 1] if n > 0 else 0.0
        values[n + 1] = ((y - b_n) * values[n] - prev_a * previous) / a_n
        prev_a = a_n
    return values


# ==================== Jacobi 函数 ====================

def jacobi_function(
    alpha: float,
    beta: float,
    sigma: Number,
    t: float,
    regularized: bool = False,
) -> complex:
    """
    Jacobi 函数 φ_σ^{(α,β)}(t) = 2F1(½(α+β+1-iσ), ½(α+β+1+iσ); α+1; -t)

    Args:
        alpha, beta: 参数
        sigma: 谱参数
        t: 自变量，t > -1
        regularized: 为 True 时返回除以 Γ(α+1) 的形式（α+1 可为非正整数）

    Returns:
        函数值
    """
    half = 0.5 * (alpha + beta + 1)
    a = half - 0.5j * sigma
    b = half + 0.5j * sigma
    if regularized:
        return gauss_2f1_regularized(a, b, alpha + 1, -t)
    return gauss_2f1(a, b, alpha + 1, -t)
