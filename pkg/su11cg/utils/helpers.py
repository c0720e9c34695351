"""
辅助工具函数
误差度量、级数累加与稳定哈希
"""
import hashlib
import math
from typing import Callable, List, NamedTuple, Optional, Sequence

from su11cg.utils.exceptions import ConvergenceError


class SeriesSum(NamedTuple):
    """截断级数的值与截断元数据"""
    value: complex
    terms_used: int
    tail_estimate: float


def relative_error(value: complex, reference: complex) -> float:
    """
    计算相对误差，参考值为零时返回绝对误差
    
    Args:
        value: 计算值
        reference: 参考值
    
    Returns:
        相对误差
    """
    diff = abs(complex(value) - complex(reference))
    scale = abs(complex(reference))
    return diff / scale if scale > 0 else diff


def stable_hash(text: str) -> int:
    """
    与进程无关的64位字符串哈希（内置hash带随机盐，不能用于可复现种子）
    
    Args:
        text: 输入字符串
    
    Returns:
        非负64位整数
    """
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def geometric_tail(magnitudes: Sequence[float], floor_ratio: float = 0.0) -> float:
    """
    按最近几项的衰减率估计几何级数剩余尾部
    
    Args:
        magnitudes: 最近若干项的模（按求和顺序）
        floor_ratio: 已知的渐近衰减率下界
    
    Returns:
        尾部上界估计
    """
    recent = [m for m in magnitudes if m > 0]
    if not recent:
        return 0.0
    peak = max(recent[-3:])
    ratios = [b / a for a, b in zip(recent[:-1], recent[1:])]
    ratio = min(max([floor_ratio] + ratios[-3:]), 0.99)
    return 4.0 * peak * ratio / (1.0 - ratio)


class _Accumulator:
    """实部虚部分开保存，最终用 math.fsum 补偿求和"""
    
    def __init__(self):
        self.re: List[float] = []
        self.im: List[float] = []
    
    def add(self, term: complex):
        self.re.append(term.real)
        self.im.append(term.imag)
    
    def total(self) -> complex:
        return complex(math.fsum(self.re), math.fsum(self.im))


def forward_sum(
    term: Callable[[int], complex],
    start: int = 0,
    tol: float = 1e-16,
    consecutive_small: int = 20,
    max_terms: int = 2000,
    fixed_terms: Optional[int] = None,
    floor_ratio: float = 0.0,
) -> SeriesSum:
    """
    单侧级数 Σ_{n≥start} term(n)
    
    Args:
        term: 通项
        start: 起始指标
        tol: 相对最大项的小项阈值
        consecutive_small: 连续小项个数达到后停止
        max_terms: 最大项数
        fixed_terms: 指定时恰好累加这么多项
        floor_ratio: 已知的渐近衰减率，用于尾部估计
    
    Returns:
        SeriesSum
    
    Raises:
        ConvergenceError: 未指定 fixed_terms 且 max_terms 项内未满足停止规则
    """
    acc = _Accumulator()
    recent: List[float] = []
    peak = 0.0
    small = 0
    limit = fixed_terms if fixed_terms is not None else max_terms
    count = 0
    for n in range(start, start + limit):
        value = complex(term(n))
        acc.add(value)
        count += 1
        magnitude = abs(value)
        recent = (recent + [magnitude])[-6:]
        peak = max(peak, magnitude)
        if fixed_terms is not None:
            continue
        if peak > 0 and magnitude <= tol * peak:
            small += 1
            if small >= consecutive_small:
                break
        else:
            small = 0
    else:
        if fixed_terms is None:
            raise ConvergenceError(
                f"Series reached max_terms={max_terms} before {consecutive_small} consecutive small terms"
                f" (last term {recent[-1] if recent else 0.0:.3e}, peak {peak:.3e})"
            )
    return SeriesSum(acc.total(), count, geometric_tail(recent, floor_ratio))


def bilateral_sum(
    term: Callable[[int], complex],
    tol: float = 1e-16,
    consecutive_small: int = 20,
    max_terms: int = 2000,
    floor_ratio: float = 0.0,
) -> SeriesSum:
    """
    双边级数 Σ_{n∈ℤ} term(n)，两侧交替扩展，各自按连续小项规则停止
    
    Args:
        term: 通项
        tol: 相对最大项的小项阈值
        consecutive_small: 每侧连续小项个数
        max_terms: 每侧最大项数
        floor_ratio: 已知的渐近衰减率
    
    Returns:
        SeriesSum
    
    Raises:
        ConvergenceError: 任一侧在 max_terms 项内未满足停止规则
    """
    acc = _Accumulator()
    center = complex(term(0))
    acc.add(center)
    peak = abs(center)
    sides = {1: [0, [], False], -1: [0, [], False]}  # 已用项数, 最近模, 是否停止
    small = {1: 0, -1: 0}
    n = 0
    while not (sides[1][2] and sides[-1][2]):
        n += 1
        for direction in (1, -1):
            state = sides[direction]
            if state[2]:
                continue
            value = complex(term(direction * n))
            acc.add(value)
            state[0] += 1
            magnitude = abs(value)
            state[1] = (state[1] + [magnitude])[-6:]
            peak = max(peak, magnitude)
            if peak > 0 and magnitude <= tol * peak:
                small[direction] += 1
            else:
                small[direction] = 0
            if small[direction] >= consecutive_small:
                state[2] = True
            elif state[0] >= max_terms:
                raise ConvergenceError(
                    f"Bilateral series side {direction:+d} reached max_terms={max_terms}"
                    f" (last term {magnitude:.3e}, peak {peak:.3e})"
                )
    tail = geometric_tail(sides[1][1], floor_ratio) + geometric_tail(sides[-1][1], floor_ratio)
    return SeriesSum(acc.total(), 1 + sides[1][0] + sides[-1][0], tail)
