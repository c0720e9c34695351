"""
张量积耦合服务
耦合基 f_n^p、H_p 上的 Casimir Jacobi 算子、Clebsch-Gordan 系数、分解与重构映射
"""
import math
from typing import Callable, Dict, List, NamedTuple, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from su11cg.core.schemas import (
    CDHParams,
    CoupledIndex,
    DecompositionKind,
    DecompositionSpec,
    Generator,
    GeneratorName,
    IdentityCase,
    MeixnerFunctionParams,
    MeixnerParams,
    NegativeDiscrete,
    PositiveDiscrete,
    QuadratureSpec,
    TensorPair,
    VerificationReport,
)
from su11cg.services.measures import CDHMeasure, DiagonalProductMeasure, discrete_masses, integrate
from su11cg.services.mfunctions import meixner_function_normalized
from su11cg.services.orthopoly import cdh_orthonormal, cdh_orthonormal_sequence, meixner_orthonormal, meixner_weight
from su11cg.services.repn import (
    EDGE_FRACTION,
    TridiagonalOperator,
    generator_matrix,
    xc_eigenvector,
)
from su11cg.utils.exceptions import BoundaryError, UnsupportedArgument
from su11cg.utils.logger import get_logger

logger = get_logger(__name__)

BOUNDARY_TOL = 1e-9
# 维数外推的加倍次数为 2·EXTRAPOLATION_PASSES
EXTRAPOLATION_PASSES = 2


# ==================== 分解结构 ====================

def decomposition_spec(t: TensorPair) -> DecompositionSpec:
    """
    π_{k1}^+ ⊗ π_{k2}^- 的分解类型

    Args:
        t: 张量积参数，k1 ≤ k2

    Returns:
        DecompositionSpec

    Raises:
        BoundaryError: 参数距某个情形边界不足 1e-9
    """
    k1, k2 = t.k1, t.k2
    diff = k1 - k2
    if abs(k1 + k2 - 0.5) < BOUNDARY_TOL:
        raise BoundaryError(f"k1+k2={k1 + k2} sits on the complementary boundary 1/2")
    shifted = diff + 0.5
    if shifted <= BOUNDARY_TOL and abs(shifted - round(shifted)) < BOUNDARY_TOL:
        raise BoundaryError(f"k1-k2+1/2={shifted} sits on a discrete-series boundary")

    L = -math.floor(diff)
    epsilon = diff + L
    if k1 + k2 < 0.5:
        return DecompositionSpec(
            epsilon=epsilon, L=L, kind=DecompositionKind.WITH_COMPLEMENTARY, complementary_lambda=-k1 - k2
        )
    if diff < -0.5:
        K = math.ceil(-shifted) - 1
        ks = [k2 - k1 - j for j in range(K + 1)]
        return DecompositionSpec(epsilon=epsilon, L=L, kind=DecompositionKind.WITH_DISCRETE, discrete_ks=ks, K=K)
    return DecompositionSpec(epsilon=epsilon, L=L, kind=DecompositionKind.CONTINUOUS_ONLY)


def sector_params(t: TensorPair, p: int) -> CDHParams:
    """子空间 H_p 对应的连续对偶 Hahn 参数"""
    k1, k2 = t.k1, t.k2
    if p <= 0:
        return CDHParams(a=k1 - k2 + 0.5, b=k1 + k2 - 0.5, c=k2 - k1 - p + 0.5)
    return CDHParams(a=k2 - k1 + 0.5, b=k1 + k2 - 0.5, c=k1 - k2 + p + 0.5)


def sector_measure(t: TensorPair, p: int, squared: bool = True) -> CDHMeasure:
    return CDHMeasure(sector_params(t, p), squared)


def casimir_on_Hp(t: TensorPair, p: int, dim: int) -> TridiagonalOperator:
    """
    ΔΩ 在耦合基 f_n^p (n = 0..dim-1) 上的三对角矩阵

    减去 ¼ 后即为 sector_params(t, p) 的连续对偶 Hahn Jacobi 矩阵。
    """
    if dim < 4:
        raise ValueError(f"dim must be at least 4, got {dim}")
    k1, k2 = t.k1, t.k2
    diag = np.zeros(dim)
    off = np.zeros(dim - 1)
    for n in range(dim):
        n1, n2 = CoupledIndex(n=n, p=p).uncoupled
        diag[n] = k1 * (1 - k1) + k2 * (1 - k2) + 2 * (k1 + n1) * (k2 + n2)
        if n < dim - 1:
            off[n] = math.sqrt((n1 + 1) * (2 * k1 + n1) * (n2 + 1) * (2 * k2 + n2))
    return TridiagonalOperator(lower=off, diag=diag, upper=off)


class SpectralProfile(BaseModel):
    """H_p 上截断 Casimir 的谱与预测离散点"""

    k1: float
    k2: float
    p: int
    dim: int
    eigenvalues: List[float]
    predicted: List[float] = Field(default_factory=list)
    deviations: List[float] = Field(default_factory=list)
    extrapolation_dims: List[int] = Field(default_factory=list)
    extrapolated: List[float] = Field(default_factory=list)
    extrapolated_deviations: List[float] = Field(default_factory=list)
    extrapolation_errors: List[float] = Field(default_factory=list)

    @property
    def continuous_floor(self) -> float:
        return 0.25

    def unmatched(self) -> List[float]:
        """去掉与预测点最近的本征值后剩下的本征值"""
        remaining = list(self.eigenvalues)
        for point in self.predicted:
            if not remaining:
                break
            closest = min(range(len(remaining)), key=lambda i: abs(remaining[i] - point))
            remaining.pop(closest)
        return remaining


def _aitken(values: List[float]) -> List[float]:
    """Aitken Δ² 加速：每相邻三项给出一个外推值"""
    accelerated = []
    for s0, s1, s2 in zip(values, values[1:], values[2:]):
        denominator = (s2 - s1) - (s1 - s0)
        accelerated.append(s2 if denominator == 0.0 else s2 - (s2 - s1) ** 2 / denominator)
    return accelerated


def extrapolate_lowest(t: TensorPair, p: int, dim: int, count: int,
                       passes: int = EXTRAPOLATION_PASSES) -> Tuple[List[int], List[float], List[float]]:
    """
    最小 count 个截断本征值在维数上的外推

    离散点处本征向量分量只按幂次衰减，截断误差约为 C·dim^{-α}。
    在 dim, 2dim, …, 2^{2·passes}·dim 上取最小本征值，逐列做 passes 轮 Aitken 加速。

    Returns:
        (所用维数, 外推值, 最后两轮外推之差)
    """
    dims = [dim * 2 ** j for j in range(2 * passes + 1)]
    table = np.array([casimir_on_Hp(t, p, d).lowest(count) for d in dims])
    values, errors = [], []
    for column in table.T:
        previous: List[float] = []
        current = [float(v) for v in column]
        while len(current) >= 3:
            previous, current = current, _aitken(current)
        values.append(current[-1])
        errors.append(abs(current[-1] - previous[-1]))
    return dims, values, errors


def spectral_profile(t: TensorPair, p: int, dim: int, extrapolate: bool = True) -> SpectralProfile:
    """
    截断 Casimir 的升序本征值、由测度质点给出的离散谱预测 ¼+位置，以及逐点偏差

    Args:
        t: 张量积参数
        p: 子空间指标
        dim: 截断维数
        extrapolate: 有预测点时再给出维数外推后的偏差

    Returns:
        SpectralProfile
    """
    decomposition_spec(t)
    eigenvalues = casimir_on_Hp(t, p, dim).eigenvalues()
    predicted = sorted(0.25 + mass.location for mass in discrete_masses(sector_params(t, p)))
    deviations = [float(np.min(np.abs(eigenvalues - point))) for point in predicted]
    logger.info(f"Spectrum k1={t.k1}, k2={t.k2}, p={p}, dim={dim}: {len(predicted)} predicted discrete points")
    profile = SpectralProfile(
        k1=t.k1, k2=t.k2, p=p, dim=dim,
        eigenvalues=[float(v) for v in eigenvalues],
        predicted=predicted,
        deviations=deviations,
    )
    if not (extrapolate and predicted):
        return profile
    dims, values, errors = extrapolate_lowest(t, p, dim, len(predicted))
    extrapolated_deviations = [abs(v - point) for v, point in zip(values, predicted)]
    logger.info(f"Extrapolated over dims {dims}: max deviation {max(extrapolated_deviations):.3e}")
    return profile.model_copy(update={
        "extrapolation_dims": dims,
        "extrapolated": values,
        "extrapolated_deviations": extrapolated_deviations,
        "extrapolation_errors": errors,
    })


# ==================== Clebsch-Gordan ====================

def clebsch_gordan(n1: int, n2: int, y: float, t: TensorPair) -> float:
    """
    e_{n1} ⊗ e_{n2} 在谱点 y 处的系数 (-1)^{n2} Ŝ_n(y; n1-n2)，n = min(n1, n2)
    """
    if n1 < 0 or n2 < 0:
        raise UnsupportedArgument(f"n1, n2 must be non-negative, got ({n1}, {n2})")
    index = CoupledIndex.from_uncoupled(n1, n2)
    sign = -1.0 if n2 % 2 else 1.0
    return sign * cdh_orthonormal(index.n, y, sector_params(t, index.p))


class SectorComponent(NamedTuple):
    """e_{n1} ⊗ e_{n2} 的分解：所在子空间 p 与系数函数 y ↦ sign·Ŝ_n(y;p)"""
    p: int
    n: int
    sign: int
    params: CDHParams

    def at(self, y: float) -> float:
        return self.sign * cdh_orthonormal(self.n, y, self.params)

    def target_index(self, spec: DecompositionSpec) -> int:
        """直积分中目标向量 e_{n1-n2-L} 的指标"""
        return self.p - spec.L


def decompose(n1: int, n2: int, t: TensorPair) -> SectorComponent:
    """
    e_{n1} ⊗ e_{n2} 的分解

    Args:
        n1, n2: 非负整数
        t: 张量积参数

    Returns:
        SectorComponent
    """
    if n1 < 0 or n2 < 0:
        raise UnsupportedArgument(f"n1, n2 must be non-negative, got ({n1}, {n2})")
    index = CoupledIndex.from_uncoupled(n1, n2)
    return SectorComponent(index.p, index.n, -1 if n2 % 2 else 1, sector_params(t, index.p))


def _recompose_pair(r: int, p: int) -> Tuple[Tuple[int, int], int]:
    """第 p 个系数所在的 (n1, n2) 与符号"""
    if r >= 0:
        return (p + r, p), (-1 if p % 2 else 1)
    return (p, p - r), (-1 if (p - r) % 2 else 1)


def recompose(
    f: Callable[[float], float],
    r: int,
    t: TensorPair,
    dim: int,
    q: Optional[QuadratureSpec] = None,
    squared: bool = True,
) -> Dict[Tuple[int, int], float]:
    """
    由子空间 H_r 中的谱函数 f(y) 重构 e_{n1} ⊗ e_{n2} 上的系数

    系数为 sign·∫ Ŝ_p(y;r) f(y) dμ²(y;r)，p = 0..dim-1；离散分量来自测度质点处的取值。
    squared=False 时改对 dμ 积分，即把 f 视为相对 dμ 的谱函数。

    Args:
        f: 谱函数
        r: 子空间指标 n1-n2
        t: 张量积参数
        dim: 截断个数
        q: 求积规格
        squared: 积分测度取 dμ² 还是 dμ

    Returns:
        {(n1, n2): 系数}
    """
    params = sector_params(t, r)
    measure = CDHMeasure(params, squared=squared)
    q = q or QuadratureSpec.for_degree(dim)

    def integrand(y: float) -> np.ndarray:
        value = f(y)
        if value == 0:
            return np.zeros(dim)
        return cdh_orthonormal_sequence(dim, y, params) * value

    projections = np.atleast_1d(integrate(integrand, measure, q))
    result: Dict[Tuple[int, int], float] = {}
    for p in range(dim):
        pair, sign = _recompose_pair(r, p)
        result[pair] = sign * float(projections[p])
    return result


# ==================== 张量积本征向量 ====================

def _coupled_eigenvalue(x1: int, x2: int, t: TensorPair, c: float) -> float:
    return (c - 1.0) * (x1 - x2 + t.k1 - t.k2) / math.sqrt(c)


def _kronecker_residual(x1: int, x2: int, t: TensorPair, c: float, dim: int) -> float:
    """(X_c⊗1 + 1⊗X_c)(v⁺⊗v⁻) - λ(v⁺⊗v⁻) 在内部行上的相对 Frobenius 范数"""
    plus, minus = PositiveDiscrete(k=t.k1), NegativeDiscrete(k=t.k2)
    generator = Generator(name=GeneratorName.XC, c=c)
    a = xc_eigenvector(plus, x1, c, dim)
    b = xc_eigenvector(minus, x2, c, dim)
    xa = generator_matrix(plus, generator, dim).matvec(a.vector)
    xb = generator_matrix(minus, generator, dim).matvec(b.vector)
    eigenvalue = _coupled_eigenvalue(x1, x2, t, c)
    edge = max(2, int(math.ceil(EDGE_FRACTION * dim)))
    rows = slice(0, dim - edge)
    va, vb = a.vector[rows], b.vector[rows]
    residual = np.outer(xa[rows], vb) + np.outer(va, xb[rows]) - eigenvalue * np.outer(va, vb)
    norm = float(np.linalg.norm(a.vector) * np.linalg.norm(b.vector))
    return float(np.linalg.norm(residual)) / norm


def _uncoupled_overlap(n1: int, n2: int, x1: int, x2: int, t: TensorPair, c: float) -> float:
    """M̂_{n1}(x1;2k1,c) M̂_{n2}(x2;2k2,c) √(w(x1) w(x2))"""
    p1 = MeixnerParams(beta=2 * t.k1, c=c)
    p2 = MeixnerParams(beta=2 * t.k2, c=c)
    return (
        meixner_orthonormal(n1, x1, p1) * meixner_orthonormal(n2, x2, p2)
        * math.sqrt(meixner_weight(x1, p1) * meixner_weight(x2, p2))
    )


def _coupled_overlaps(
    p: int,
    ns: List[int],
    x1: int,
    x2: int,
    t: TensorPair,
    c: float,
    spec: DecompositionSpec,
    q: QuadratureSpec,
) -> np.ndarray:
    """
    对同一子空间 p 的多个 n，用 dν 上的积分计算 ⟨v⁺_{x1}⊗v⁻_{x2}, e_{n1}⊗e_{n2}⟩
    """
    px = x1 - x2
    x = min(x1, x2)
    params_n = sector_params(t, p)
    params_x = sector_params(t, px)
    measure = DiagonalProductMeasure(params_n, params_x)
    index = p - spec.L
    argument = px - spec.L
    size = max(ns) + 1

    def overlap(y: float) -> float:
        if y >= 0:
            mf = MeixnerFunctionParams.principal(math.sqrt(y), spec.epsilon, c)
        else:
            # 质点处 λ = -½ ± √(-y)，落在补系列或截断区间
            mf = MeixnerFunctionParams.real(-0.5 + math.sqrt(-y), spec.epsilon, c)
        return meixner_function_normalized(index, argument, mf)

    def integrand(y: float) -> np.ndarray:
        return (
            cdh_orthonormal_sequence(size, y, params_n)[ns]
            * cdh_orthonormal_sequence(x + 1, y, params_x)[x]
            * overlap(y)
        )

    return np.atleast_1d(integrate(integrand, measure, q))


def coupled_eigenvector_check(
    x1: int,
    x2: int,
    t: TensorPair,
    c: float,
    dim: int = 300,
    q: Optional[QuadratureSpec] = None,
    sectors: Tuple[int, ...] = (-2, -1, 0, 1, 2),
    degrees: Tuple[int, ...] = (0, 1, 2),
    tolerance: float = 1e-7,
) -> VerificationReport:
    """
    v⁺_{x1} ⊗ v⁻_{x2} 的两项检查

    (i) ΔX_c 作用下为本征向量，本征值 (c-1)(x1-x2+k1-k2)/√c；
    (ii) 与 e_{n1}⊗e_{n2} 的内积（Meixner 多项式乘积）等于 dν 上的
    Ŝ_n(y;n1-n2) Ŝ_x(y;x1-x2) m̂√w̃ 积分乘以 (-1)^{n2+x1}。

    Args:
        x1, x2: 非负整数
        t: 张量积参数
        c: 0 < c ≤ 0.95
        dim: 截断维数
        q: 求积规格
        sectors: 参与 (ii) 的 p = n1-n2
        degrees: 参与 (ii) 的 n = min(n1, n2)
        tolerance: 通过阈值

    Returns:
        VerificationReport，lhs 为两项中较大的残差
    """
    spec = decomposition_spec(t)
    kronecker = _kronecker_residual(x1, x2, t, c, dim)
    q = q or QuadratureSpec.for_degree(max(degrees) + min(x1, x2) + 2, tail_tol=1e-12)

    worst = 0.0
    for p in sectors:
        ns = list(degrees)
        integrals = _coupled_overlaps(p, ns, x1, x2, t, c, spec, q)
        for n, integral in zip(ns, integrals):
            n1, n2 = CoupledIndex(n=n, p=p).uncoupled
            sign = -1.0 if (n2 + x1) % 2 else 1.0
            expected = _uncoupled_overlap(n1, n2, x1, x2, t, c)
            worst = max(worst, abs(sign * integral - expected))
    logger.debug(f"Coupled eigenvector check x1={x1}, x2={x2}: kronecker={kronecker:.3e}, overlap={worst:.3e}")

    case = IdentityCase(
        id=f"coupled_eigenvector/{x1}-{x2}",
        identity="coupled_eigenvector",
        params={"k1": t.k1, "k2": t.k2, "x1": float(x1), "x2": float(x2), "c": c, "dim": float(dim)},
        tolerance=tolerance,
    )
    return VerificationReport.compare(case, max(kronecker, worst), 0.0)
