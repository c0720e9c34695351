"""
Meixner 函数服务
m̂_n(x; λ, ε, c) 及其权函数 w̃，三个参数区间的求值
"""
import math
from typing import Tuple

from su11cg.core.schemas import MeixnerFunctionParams, Regime, terminating_root
from su11cg.services.special import (
    gauss_2f1_regularized_scaled,
    log_gamma,
    real_gamma_ratio,
)
from su11cg.utils.exceptions import InvalidRegime
from su11cg.utils.logger import get_logger

logger = get_logger(__name__)


def _half_log_gamma_pair(n: int, p: MeixnerFunctionParams) -> float:
    """½ log(Γ(n+λ+ε+1) Γ(n+ε-λ))，区间 (i)(ii) 中该乘积为正"""
    if p.regime is Regime.PRINCIPAL:
        # Γ(n+ε+½+iρ)Γ(n+ε+½-iρ) = |Γ(n+ε+½+iρ)|²
        return log_gamma(n + p.epsilon + 0.5 + 1j * p.rho).real
    lam = p.lam_re
    return 0.5 * (math.lgamma(n + lam + p.epsilon + 1.0) + math.lgamma(n + p.epsilon - lam))


def _log_prefactor(n: int, p: MeixnerFunctionParams) -> float:
    """log [((1-c)/√c)^{-n} √(Γ(n+λ+ε+1)Γ(n+ε-λ))]"""
    return -n * math.log((1.0 - p.c) / math.sqrt(p.c)) + _half_log_gamma_pair(n, p)


def _hypergeometric_part(n: int, x: int, p: MeixnerFunctionParams):
    lam = p.lam
    return gauss_2f1_regularized_scaled(
        n + p.epsilon + lam + 1.0,
        n + p.epsilon - lam,
        n + 1 - x,
        p.c / (p.c - 1.0),
    )


def _require_unitary(p: MeixnerFunctionParams) -> Regime:
    regime = p.regime
    if regime is Regime.TERMINATING:
        raise InvalidRegime(
            f"lambda={p.lam_re}, epsilon={p.epsilon} is in the terminating regime; "
            "use meixner_function_normalized"
        )
    return regime


def meixner_function(n: int, x: int, p: MeixnerFunctionParams) -> float:
    """
    Meixner 函数 m̂_n(x; λ, ε, c)

    Args:
        n: 整数指标
        x: 整数自变量
        p: 主系列或补系列参数

    Returns:
        函数值
    """
    _require_unitary(p)
    scaled = _hypergeometric_part(n, x, p)
    if scaled.mantissa == 0:
        return 0.0
    return (scaled.mantissa * math.exp(scaled.log_scale + _log_prefactor(n, p))).real


def _log_weight(x: int, p: MeixnerFunctionParams) -> float:
    return -x * math.log(p.c) - 2.0 * p.epsilon * math.log1p(-p.c) - 2.0 * _half_log_gamma_pair(x, p)


def meixner_function_weight(x: int, p: MeixnerFunctionParams) -> float:
    """
    权函数 w̃(x) = c^{-x}(1-c)^{-2ε} / (Γ(ε+x-λ)Γ(ε+λ+x+1))

    截断区间中 Gamma 乘积可为负或在极点处给出 0。
    """
    if p.regime is Regime.TERMINATING:
        lam = p.lam_re
        ratio = real_gamma_ratio([], [p.epsilon + x - lam, p.epsilon + lam + x + 1.0])
        return ratio * math.exp(-x * math.log(p.c) - 2.0 * p.epsilon * math.log1p(-p.c))
    return math.exp(_log_weight(x, p))


def terminating_data(p: MeixnerFunctionParams) -> Tuple[int, float]:
    """
    截断区间的 (J, k)：λ' > -½ 为规范根，k = λ'+1，J = -(λ'+ε+1) 为负整数
    """
    root = terminating_root(p.lam_re, p.epsilon)
    if root is None:
        raise InvalidRegime(f"lambda={p.lam_re}, epsilon={p.epsilon} is not terminating")
    J = int(round(-(root + p.epsilon + 1.0)))
    return J, root + 1.0


def _terminating_normalized(n: int, x: int, p: MeixnerFunctionParams) -> float:
    """
    截断区间中 m̂_n(x)√w̃(x) 的解析延拓

    n > J 或 x > J 时为 0；其余情形两侧 Gamma 极点相消，留下正的有限乘积
    R = Π_{m=x}^{n-1}(m-J)(m-J+1-2k)（n < x 时取倒数）。
    """
    J, k = terminating_data(p)
    if n > J or x > J:
        return 0.0
    log_r = 0.0
    if n >= x:
        for m in range(x, n):
            log_r += math.log((m - J) * (m - J + 1.0 - 2.0 * k))
    else:
        for m in range(n, x):
            log_r -= math.log((m - J) * (m - J + 1.0 - 2.0 * k))
    scaled = gauss_2f1_regularized_scaled(n - J, n - J + 1.0 - 2.0 * k, n + 1 - x, p.c / (p.c - 1.0))
    if scaled.mantissa == 0:
        return 0.0
    log_total = (
        -n * math.log((1.0 - p.c) / math.sqrt(p.c))
        + 0.5 * log_r
        - 0.5 * x * math.log(p.c)
        - p.epsilon * math.log1p(-p.c)
        + scaled.log_scale
    )
    return (scaled.mantissa * math.exp(log_total)).real


def meixner_function_normalized(n: int, x: int, p: MeixnerFunctionParams) -> float:
    """
    m̂_n(x)√w̃(x)，即 X_c 本征向量的第 n 个分量

    Args:
        n: 整数指标
        x: 整数自变量
        p: 任意区间的参数

    Returns:
        分量值
    """
    if p.regime is Regime.TERMINATING:
        return _terminating_normalized(n, x, p)
    scaled = _hypergeometric_part(n, x, p)
    if scaled.mantissa == 0:
        return 0.0
    log_total = scaled.log_scale + _log_prefactor(n, p) + 0.5 * _log_weight(x, p)
    return (scaled.mantissa * math.exp(log_total)).real
