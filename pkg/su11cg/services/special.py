"""
特殊函数内核
复 Gamma 函数、Pochhammer 符号与超几何级数求值
"""
import cmath
import math
import threading
from typing import NamedTuple, Optional, Sequence, Tuple, Union

from mpmath.ctx_mp import MPContext

from su11cg.core.schemas import SeriesControl
from su11cg.utils.exceptions import (
    ConvergenceError,
    DegenerateDenominator,
    PoleError,
    SeriesRadiusError,
    UnsupportedArgument,
)
from su11cg.utils.logger import get_logger

logger = get_logger(__name__)

Number = Union[int, float, complex]

# Lanczos 近似 (g=7, 9项)
LANCZOS_G = 7.0
LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)
_LOG_HALF = -math.log(2.0)

POLE_TOL = 1e-12
SERIES_RADIUS = 0.95
DEFAULT_CONTROL = SeriesControl()

# 终止级数的工作精度（十进制位数）
_BASE_DPS = 30
_MAX_DPS = 400
_GUARD_DIGITS = 20

_local = threading.local()


class Scaled(NamedTuple):
    """exp(log_scale) * mantissa 形式的数值，避免溢出"""
    log_scale: float
    mantissa: complex

    @property
    def value(self) -> complex:
        if self.mantissa == 0:
            return 0j
        if self.log_scale > 709.0:
            raise UnsupportedArgument(f"value exp({self.log_scale:.1f}) overflows double precision")
        return self.mantissa * math.exp(self.log_scale)


def mp_context() -> MPContext:
    """当前线程专用的 mpmath 上下文"""
    ctx = getattr(_local, "ctx", None)
    if ctx is None:
        ctx = MPContext()
        _local.ctx = ctx
    return ctx


def as_complex(z: Number, name: str = "z") -> complex:
    """转换为复数并拒绝 NaN/Inf"""
    value = complex(z)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise UnsupportedArgument(f"{name} must be finite, got {z!r}")
    return value


def nonpositive_integer(z: complex, tol: float = POLE_TOL) -> Optional[int]:
    """z 距某个非正整数不超过 tol 时返回该整数"""
    z = complex(z)
    if abs(z.imag) > tol or z.real > tol:
        return None
    m = round(z.real)
    if abs(z.real - m) <= tol:
        return int(m)
    return None


# ==================== Gamma ====================

def _log_sin_pi(z: complex) -> complex:
    """
    闭上半平面内连续的 log sin(πz)，实轴上取上侧极限

    sin(πz) = (i/2)·e^{-iπz}·(1 - e^{2πiz})，Im z ≥ 0 时 |e^{2πiz}| ≤ 1，主值对数不跨割线
    """
    w = cmath.exp(2j * math.pi * z)
    return _LOG_HALF + 1j * math.pi * (0.5 - z) + cmath.log(1.0 - w)


def log_gamma(z: Number) -> complex:
    """
    复 log Γ 的主值分支

    Args:
        z: 复数自变量

    Returns:
        log Γ(z)
    """
    z = as_complex(z)
    if nonpositive_integer(z) is not None:
        raise PoleError(f"Gamma has a pole at z={z}")
    if z.real < 0.5:
        if z.imag < 0.0:
            return log_gamma(z.conjugate()).conjugate()
        # 反射公式 Γ(z)Γ(1-z) = π / sin(πz)
        return _LOG_PI - _log_sin_pi(z) - log_gamma(1.0 - z)
    z -= 1.0
    series = LANCZOS_COEFFS[0]
    for i, coeff in enumerate(LANCZOS_COEFFS[1:], start=1):
        series += coeff / (z + i)
    t = z + LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(series)


def gamma(z: Number) -> complex:
    return cmath.exp(log_gamma(z))


def rgamma(z: Number) -> complex:
    """1/Γ(z)，在极点处为 0"""
    z = as_complex(z)
    if nonpositive_integer(z) is not None:
        return 0j
    return cmath.exp(-log_gamma(z))


def _gamma_sign(x: float) -> int:
    if x > 0:
        return 1
    return -1 if math.floor(-x) % 2 == 0 else 1


def real_gamma_ratio(numer: Sequence[float], denom: Sequence[float]) -> float:
    """
    实参数的 ΠΓ(numer) / ΠΓ(denom)，带符号；分母极点给出 0

    Args:
        numer: 分子Gamma的参数
        denom: 分母Gamma的参数

    Returns:
        比值
    """
    for x in denom:
        if nonpositive_integer(x) is not None:
            return 0.0
    log_value = 0.0
    sign = 1
    for x in numer:
        if nonpositive_integer(x) is not None:
            raise PoleError(f"Gamma has a pole at {x}")
        log_value += math.lgamma(x)
        sign *= _gamma_sign(x)
    for x in denom:
        log_value -= math.lgamma(x)
        sign *= _gamma_sign(x)
    return sign * math.exp(log_value)


def pochhammer(z: Number, n: int) -> Number:
    """
    升阶乘 (z)_n = z(z+1)...(z+n-1)

    Args:
        z: 底数
        n: 非负整数

    Returns:
        (z)_n，与 z 同类型（整数按浮点返回）
    """
    if n < 0:
        raise UnsupportedArgument(f"pochhammer needs n >= 0, got {n}")
    return math.prod((z + j for j in range(n)), start=1.0)


# ==================== 终止级数 ====================

def _terminating_length(numer: Sequence[complex]) -> Optional[int]:
    lengths = [-m + 1 for m in (nonpositive_integer(a) for a in numer) if m is not None]
    return min(lengths) if lengths else None


def terminating_sum(numer: Sequence[complex], denom: Sequence[complex], z: complex) -> complex:
    """
    终止超几何和 Σ_j Π(numer)_j / (Π(denom)_j j!) z^j

    工作精度随观测到的抵消位数自动提高，结果以双精度返回。

    Args:
        numer: 分子参数（至少一个为非正整数）
        denom: 分母参数
        z: 自变量

    Returns:
        和
    """
    n_terms = _terminating_length(numer)
    if n_terms is None:
        raise UnsupportedArgument("terminating_sum needs a non-positive integer numerator parameter")
    for b in denom:
        m = nonpositive_integer(b)
        if m is not None and -m < n_terms - 1:
            raise DegenerateDenominator(f"denominator parameter {b} vanishes before termination")

    ctx = mp_context()
    dps = _BASE_DPS
    while True:
        ctx.dps = dps
        nums = [ctx.mpc(complex(a)) for a in numer]
        dens = [ctx.mpc(complex(b)) for b in denom]
        arg = ctx.mpc(complex(z))
        term = ctx.mpc(1)
        total = ctx.mpc(1)
        peak = ctx.mpf(1)
        for j in range(n_terms - 1):
            ratio = arg / (j + 1)
            for a in nums:
                ratio *= a + j
            for b in dens:
                ratio /= b + j
            term *= ratio
            total += term
            peak = max(peak, abs(term))
        if total == 0:
            return 0j
        lost = float(ctx.log10(peak / abs(total)))
        if lost < dps - _GUARD_DIGITS or dps >= _MAX_DPS:
            return complex(total)
        dps = min(_MAX_DPS, int(lost) + 2 * _GUARD_DIGITS)


def hyp_3f2_terminating(n: int, num2: Number, num3: Number, den1: Number, den2: Number) -> complex:
    """
    终止 3F2(-n, num2, num3; den1, den2; 1)

    Args:
        n: 非负整数
        num2, num3: 分子参数
        den1, den2: 分母参数

    Returns:
        和
    """
    if n < 0:
        raise UnsupportedArgument(f"hyp_3f2_terminating needs n >= 0, got {n}")
    if n == 0:
        return 1 + 0j
    params = [as_complex(v, name) for v, name in ((num2, "num2"), (num3, "num3"), (den1, "den1"), (den2, "den2"))]
    return terminating_sum((complex(-n), params[0], params[1]), (params[2], params[3]), 1.0)


# ==================== 非终止级数 ====================

def _float_series(
    numer: Sequence[complex],
    denom: Sequence[complex],
    z: complex,
    control: SeriesControl,
) -> complex:
    """双精度超几何级数，连续 consecutive_small 个小项后停止，fsum 补偿累加"""
    term = 1 + 0j
    re_parts = [1.0]
    im_parts = [0.0]
    running = 1 + 0j
    small = 0
    for j in range(control.max_terms):
        ratio = z / (j + 1)
        for a in numer:
            ratio *= a + j
        for b in denom:
            ratio /= b + j
        term *= ratio
        re_parts.append(term.real)
        im_parts.append(term.imag)
        running += term
        if abs(term) <= control.rel_tol * abs(running):
            small += 1
            if small >= control.consecutive_small:
                return complex(math.fsum(re_parts), math.fsum(im_parts))
        else:
            small = 0
    raise ConvergenceError(f"hypergeometric series did not converge in {control.max_terms} terms at z={z}")


def _pfaff_choice(a: complex, b: complex, c: complex, z: complex) -> Tuple[complex, complex, complex, complex]:
    """
    选择直接级数或 Pfaff 变换 z -> z/(z-1)

    Returns:
        (a', b', 级数自变量, 前因子的对数)
    """
    if z.imag == 0 and z.real >= 1.0:
        raise SeriesRadiusError(f"z={z} lies on the branch cut [1, inf)")
    mapped = z / (z - 1.0)
    if abs(z) <= abs(mapped):
        if abs(z) > SERIES_RADIUS:
            raise SeriesRadiusError(f"|z|={abs(z):.4f} exceeds series radius {SERIES_RADIUS}")
        return a, b, z, 0j
    if abs(mapped) > SERIES_RADIUS:
        raise SeriesRadiusError(f"|z/(z-1)|={abs(mapped):.4f} exceeds series radius {SERIES_RADIUS}")
    return a, c - b, mapped, -a * cmath.log(1.0 - z)


def _terminates(*params: complex) -> bool:
    return any(nonpositive_integer(p) is not None for p in params)


def _hyp2f1_unchecked(a: complex, b: complex, c: complex, z: complex, control: SeriesControl) -> complex:
    if z == 0:
        return 1 + 0j
    if _terminates(a, b):
        return terminating_sum((a, b), (c,), z)
    a2, b2, arg, log_pref = _pfaff_choice(a, b, c, z)
    if _terminates(a2, b2):
        value = terminating_sum((a2, b2), (c,), arg)
    else:
        value = _float_series((a2, b2), (c,), arg, control)
    return value * cmath.exp(log_pref) if log_pref else value


def describe_2f1_strategy(a: Number, b: Number, c: Number, z: Number) -> str:
    """返回 2F1 求值所走的路径，供命令行输出"""
    a, b, c, z = (as_complex(v) for v in (a, b, c, z))
    if z == 0:
        return "trivial (z=0)"
    if _terminates(a, b):
        return "terminating sum"
    _, b2, arg, log_pref = _pfaff_choice(a, b, c, z)
    route = "Pfaff-mapped series" if log_pref else "direct series"
    return f"{route} at |argument|={abs(arg):.4f}"


def gauss_2f1(a: Number, b: Number, c: Number, z: Number, control: Optional[SeriesControl] = None) -> complex:
    """
    Gauss 超几何函数 2F1(a, b; c; z)

    Args:
        a, b, c: 参数，c 不能是非正整数
        z: 自变量，不在 [1, ∞) 上
        control: 级数截断控制

    Returns:
        2F1 的值
    """
    a, b, c, z = (as_complex(v, name) for v, name in ((a, "a"), (b, "b"), (c, "c"), (z, "z")))
    if nonpositive_integer(c) is not None:
        raise DegenerateDenominator(f"c={c} is a non-positive integer; use gauss_2f1_regularized")
    return _hyp2f1_unchecked(a, b, c, z, control or DEFAULT_CONTROL)


def _log_pochhammer(z: complex, n: int) -> Optional[complex]:
    """log (z)_n，因子为零时返回 None"""
    total = 0j
    for j in range(n):
        factor = z + j
        if abs(factor) <= POLE_TOL:
            return None
        total += cmath.log(factor)
    return total


def gauss_2f1_regularized_scaled(
    a: Number,
    b: Number,
    c: Number,
    z: Number,
    control: Optional[SeriesControl] = None,
) -> Scaled:
    """
    正则化 2F1(a, b; c; z)/Γ(c)，以 Scaled 形式返回

    c 为非正整数 1-r 时使用指标平移：
    (a)_r (b)_r z^r / r! · 2F1(a+r, b+r; r+1; z)
    """
    a, b, c, z = (as_complex(v, name) for v, name in ((a, "a"), (b, "b"), (c, "c"), (z, "z")))
    control = control or DEFAULT_CONTROL
    m = nonpositive_integer(c)

    if z == 0:
        if m is not None:
            return Scaled(0.0, 0j)
        lg = log_gamma(c)
        return Scaled(-lg.real, cmath.exp(-1j * lg.imag))

    if _terminates(a, b):
        a2, b2, arg, log_pref = a, b, z, 0j
    else:
        a2, b2, arg, log_pref = _pfaff_choice(a, b, c, z)

    if m is None:
        value = _hyp2f1_unchecked(a2, b2, c, arg, control)
        log_total = log_pref - log_gamma(c)
    else:
        r = 1 - m
        log_a = _log_pochhammer(a2, r)
        log_b = _log_pochhammer(b2, r)
        if log_a is None or log_b is None:
            return Scaled(0.0, 0j)
        value = _hyp2f1_unchecked(a2 + r, b2 + r, complex(r + 1), arg, control)
        log_total = log_pref + log_a + log_b + r * cmath.log(arg) - math.lgamma(r + 1)
    if value == 0:
        return Scaled(0.0, 0j)
    return Scaled(log_total.real, value * cmath.exp(1j * log_total.imag))


def gauss_2f1_regularized(
    a: Number,
    b: Number,
    c: Number,
    z: Number,
    control: Optional[SeriesControl] = None,
) -> complex:
    """正则化 Gauss 超几何函数 2F1(a, b; c; z)/Γ(c)，对 c 连续"""
    return gauss_2f1_regularized_scaled(a, b, c, z, control).value


def hyp_3f2(
    a1: Number,
    a2: Number,
    a3: Number,
    b1: Number,
    b2: Number,
    z: Number,
    control: Optional[SeriesControl] = None,
) -> complex:
    """
    3F2(a1, a2, a3; b1, b2; z)，|z| ≤ 0.95 的直接级数
    """
    numer = [as_complex(v) for v in (a1, a2, a3)]
    denom = [as_complex(v) for v in (b1, b2)]
    z = as_complex(z)
    for b in denom:
        if nonpositive_integer(b) is not None:
            raise DegenerateDenominator(f"denominator parameter {b} is a non-positive integer")
    if z == 0:
        return 1 + 0j
    if _terminates(*numer):
        return terminating_sum(numer, denom, z)
    if abs(z) > SERIES_RADIUS:
        raise SeriesRadiusError(f"|z|={abs(z):.4f} exceeds series radius {SERIES_RADIUS}")
    return _float_series(numer, denom, z, control or DEFAULT_CONTROL)
