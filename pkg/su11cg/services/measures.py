"""
正交测度服务
连续对偶 Hahn 测度 dμ²、dμ，对角乘积测度 dν，以及对它们的复合 Gauss-Legendre 求积
"""
import math
from typing import Callable, List, NamedTuple, Optional, Protocol, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial.legendre import leggauss

from su11cg.core.schemas import CDHParams, QuadratureSpec
from su11cg.services.special import log_gamma
from su11cg.utils.exceptions import TailTooLarge
from su11cg.utils.logger import get_logger

logger = get_logger(__name__)

Integrand = Callable[[float], Union[float, np.ndarray]]

_LOG_2PI = math.log(2.0 * math.pi)
# 质点位置相同的判定容差
_LOCATION_TOL = 1e-10
# 尾部估计使用的最小衰减率
_MIN_DECAY_RATE = 0.25 * math.pi


class Mass(NamedTuple):
    """离散质点 (位置 y, 权重)"""
    location: float
    weight: float


class SpectralMeasure(Protocol):
    """[0,∞) 上的密度（以 x = √y 为变量）加有限个质点"""

    masses: List[Mass]

    def density(self, x: float) -> float:
        ...

    def pole_distance(self) -> float:
        ...


def _log_norm(p: CDHParams) -> float:
    """log[Γ(a+b)Γ(a+c)Γ(b+c)]"""
    a, b, c = p.as_tuple()
    return math.lgamma(a + b) + math.lgamma(a + c) + math.lgamma(b + c)


def _log_density_squared(x: float, p: CDHParams) -> float:
    """log of (1/2π)|Γ(a+ix)Γ(b+ix)Γ(c+ix)/Γ(2ix)|² / (Γ(a+b)Γ(a+c)Γ(b+c))，x > 0"""
    a, b, c = p.as_tuple()
    log_abs = (
        log_gamma(a + 1j * x).real + log_gamma(b + 1j * x).real
        + log_gamma(c + 1j * x).real - log_gamma(2j * x).real
    )
    return 2.0 * log_abs - _LOG_2PI - _log_norm(p)


def _distance_to_poles(values: Sequence[float]) -> float:
    """参数到 Γ 非正整数极点的最小距离"""
    distances = []
    for v in values:
        if v > 0:
            distances.append(v)
        else:
            distances.append(abs(v - round(v)))
    return min(distances)


def discrete_masses(p: CDHParams, squared: bool = True) -> List[Mass]:
    """
    dμ² (或 dμ) 的离散质点

    a ≥ 0 时测度绝对连续；否则在 y = -(a+k)², k = 0..K 处有质点，
    K 为满足 a+K < 0 的最大整数。权重在对数空间计算，
    (-1)^k 与 (2a)_k 的符号解析相消后存为正数。

    Args:
        p: 规范顺序的参数（a 为最小值）
        squared: True 给出 dμ² 的权重，False 给出其平方根

    Returns:
        质点列表
    """
    a, b, c = p.as_tuple()
    if a >= 0:
        return []
    K = math.ceil(-a) - 1
    # Γ(b-a)Γ(c-a) / (Γ(-2a)Γ(b+c)) 的对数与符号
    head_sign = 1
    log_head = math.lgamma(b - a) + math.lgamma(c - a) - math.lgamma(-2 * a) - math.lgamma(b + c)
    for value in (b - a, c - a, -2 * a):
        if value < 0 and math.floor(-value) % 2 == 0:
            head_sign = -head_sign

    masses: List[Mass] = []
    log_term = 0.0
    sign = head_sign
    for k in range(K + 1):
        if k > 0:
            j = k - 1
            factors = [
                (2 * a + j), (a + 1 + j), (a + b + j), (a + c + j),
                1.0 / (a + j), 1.0 / (a - b + 1 + j), 1.0 / (a - c + 1 + j), 1.0 / k, -1.0,
            ]
            for f in factors:
                if f < 0:
                    sign = -sign
                log_term += math.log(abs(f))
        log_weight = log_head + log_term
        if sign <= 0:
            logger.warning(f"Non-positive mass weight at k={k} for params {p.as_tuple()}")
        weight = math.exp(log_weight if squared else 0.5 * log_weight)
        masses.append(Mass(location=-(a + k) ** 2, weight=weight))
    return masses


class CDHMeasure:
    """
    连续对偶 Hahn 测度

    squared=True 为 dμ²（概率测度），False 为逐点取平方根的 dμ。
    """

    def __init__(self, params: CDHParams, squared: bool = True):
        self.params = params
        self.squared = squared
        self.masses: List[Mass] = discrete_masses(params, squared)

    @classmethod
    def from_params(cls, a: float, b: float, c: float, squared: bool = True) -> "CDHMeasure":
        return cls(CDHParams(a=a, b=b, c=c), squared)

    def density(self, x: float) -> float:
        return cdh_density(x, self)

    def pole_distance(self) -> float:
        return _distance_to_poles(self.params.as_tuple())

    def __repr__(self) -> str:
        return f"CDHMeasure(params={self.params.as_tuple()}, squared={self.squared}, masses={len(self.masses)})"


def cdh_density(x: float, m: CDHMeasure) -> float:
    """
    连续部分密度（以 x 为积分变量）

    Args:
        x: x ≥ 0
        m: 测度

    Returns:
        dμ² 密度或其平方根 W(x²; a, b, c)；x = 0 处为 0
    """
    if x < 0:
        raise ValueError(f"density is defined for x >= 0, got {x}")
    if x == 0:
        return 0.0
    log_value = _log_density_squared(x, m.params)
    return math.exp(log_value if m.squared else 0.5 * log_value)


def nu_density(x: float, p_left: CDHParams, p_right: CDHParams) -> float:
    """对角乘积测度 dν 的密度 W(x²; p_left) W(x²; p_right)"""
    if x == 0:
        return 0.0
    return math.exp(0.5 * (_log_density_squared(x, p_left) + _log_density_squared(x, p_right)))


class DiagonalProductMeasure:
    """dμ(·; p_left) 与 dμ(·; p_right) 乘积测度在对角线上的限制 dν"""

    def __init__(self, p_left: CDHParams, p_right: CDHParams):
        self.p_left = p_left
        self.p_right = p_right
        left = discrete_masses(p_left, squared=False)
        right = discrete_masses(p_right, squared=False)
        self.masses: List[Mass] = [
            Mass(ml.location, ml.weight * mr.weight)
            for ml in left for mr in right
            if abs(ml.location - mr.location) <= _LOCATION_TOL * max(1.0, abs(ml.location))
        ]

    def density(self, x: float) -> float:
        return nu_density(x, self.p_left, self.p_right)

    def pole_distance(self) -> float:
        return _distance_to_poles(self.p_left.as_tuple() + self.p_right.as_tuple())


# ==================== 求积 ====================

class QuadratureResult(NamedTuple):
    """求积结果"""
    value: Union[float, np.ndarray]
    refinement_error: float
    tail_estimate: float


def _breakpoints(x_max: float, panels: int, pole_distance: float) -> np.ndarray:
    """
    面板端点；参数接近 Γ 极点时密度在 x = 0 附近有宽度约为该距离的峰，按几何级数加密
    """
    uniform = np.linspace(0.0, x_max, panels + 1)
    if pole_distance >= 0.25:
        return uniform
    width = uniform[1]
    graded = []
    edge = max(pole_distance, 1e-6) / 8.0
    while edge < width:
        graded.append(edge)
        edge *= 2.0
    return np.concatenate(([0.0], np.asarray(graded), uniform[1:]))


def gauss_legendre_nodes(x_max: float, panels: int, nodes_per_panel: int, pole_distance: float = 1.0) -> Tuple[np.ndarray, np.ndarray]:
    """
    [0, x_max] 上复合 Gauss-Legendre 节点与权重

    Returns:
        (节点, 权重)
    """
    ref_nodes, ref_weights = leggauss(nodes_per_panel)
    edges = _breakpoints(x_max, panels, pole_distance)
    left, right = edges[:-1], edges[1:]
    half = 0.5 * (right - left)
    mid = 0.5 * (right + left)
    nodes = (mid[:, None] + half[:, None] * ref_nodes[None, :]).ravel()
    weights = (half[:, None] * ref_weights[None, :]).ravel()
    return nodes, weights


def _evaluate(f: Integrand, y: float) -> np.ndarray:
    return np.atleast_1d(np.asarray(f(y), dtype=float))


def _rule(f: Integrand, m: SpectralMeasure, q: QuadratureSpec, nodes_per_panel: int) -> np.ndarray:
    nodes, weights = gauss_legendre_nodes(q.x_max, q.panels, nodes_per_panel, m.pole_distance())
    total = None
    for x, w in zip(nodes, weights):
        d = m.density(float(x))
        if d == 0.0:
            continue
        contribution = (w * d) * _evaluate(f, float(x) * float(x))
        total = contribution if total is None else total + contribution
    for mass in m.masses:
        contribution = mass.weight * _evaluate(f, mass.location)
        total = contribution if total is None else total + contribution
    if total is None:
        total = np.zeros_like(_evaluate(f, 0.0))
    return total


def _envelope(f: Integrand, m: SpectralMeasure, x: float) -> float:
    return float(np.max(np.abs(_evaluate(f, x * x)))) * m.density(x)


def _tail_estimate(f: Integrand, m: SpectralMeasure, q: QuadratureSpec) -> float:
    """
    x_max 之外的尾部：包络 g 按 e^{-πx}·x^k 衰减，尾部 ≤ g(x_max) / 衰减率

    k > 0 时衰减率 π - k/x 小于 π，取 [x_max-h, x_max] 上的割线斜率；
    割线斜率大于 π 或包络未下降时分别退回 π 与 π/4。
    """
    endpoint = _envelope(f, m, q.x_max)
    if endpoint == 0.0:
        return 0.0
    h = min(1.0, 0.25 * q.x_max)
    before = _envelope(f, m, q.x_max - h)
    rate = math.log(before / endpoint) / h if before > endpoint else _MIN_DECAY_RATE
    return endpoint / max(min(rate, math.pi), _MIN_DECAY_RATE)


def integrate_detailed(f: Integrand, m: SpectralMeasure, q: Optional[QuadratureSpec] = None) -> QuadratureResult:
    """
    ∫ f dm，附带求积加密误差与尾部估计

    Args:
        f: y 的函数，可返回向量（逐分量积分）
        m: 测度
        q: 求积规格

    Returns:
        QuadratureResult
    """
    q = q or QuadratureSpec()
    tail = _tail_estimate(f, m, q)
    if tail > q.tail_tol:
        raise TailTooLarge(f"tail estimate {tail:.3e} exceeds tail_tol={q.tail_tol:.1e} at x_max={q.x_max:.2f}")
    value = _rule(f, m, q, q.nodes_per_panel)
    coarse = _rule(f, m, q, max(2, q.nodes_per_panel // 2))
    refinement = float(np.max(np.abs(value - coarse)))
    result = value if value.size > 1 else float(value[0])
    return QuadratureResult(result, refinement, tail)


def integrate(f: Integrand, m: SpectralMeasure, q: Optional[QuadratureSpec] = None) -> Union[float, np.ndarray]:
    """
    复合 Gauss-Legendre 求积 ∫_0^{x_max} f(x²) density(x) dx + Σ 质点权重·f(位置)

    Args:
        f: y 的函数，可返回向量
        m: 测度
        q: 求积规格

    Returns:
        积分值
    """
    q = q or QuadratureSpec()
    tail = _tail_estimate(f, m, q)
    if tail > q.tail_tol:
        raise TailTooLarge(f"tail estimate {tail:.3e} exceeds tail_tol={q.tail_tol:.1e} at x_max={q.x_max:.2f}")
    value = _rule(f, m, q, q.nodes_per_panel)
    return value if value.size > 1 else float(value[0])
