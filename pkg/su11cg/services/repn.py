"""
表示服务
su(1,1) 四个酉表示系列在截断基上的矩阵实现、元素 X_c、共轭生成元及 X_c 本征向量
"""
import math
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator
from scipy.linalg import eigvalsh_tridiagonal

from su11cg.core.schemas import (
    Complementary,
    Generator,
    GeneratorName,
    IdentityCase,
    MeixnerFunctionParams,
    MeixnerParams,
    NegativeDiscrete,
    PositiveDiscrete,
    Principal,
    VerificationReport,
)
from su11cg.services.mfunctions import meixner_function_normalized
from su11cg.services.orthopoly import meixner_orthonormal, meixner_weight
from su11cg.utils.exceptions import UnsupportedArgument, WindowError
from su11cg.utils.logger import get_logger

logger = get_logger(__name__)

Series = Union[PositiveDiscrete, NegativeDiscrete, Principal, Complementary]

# 本征向量计算允许的最大 c
EIGEN_C_MAX = 0.95
# 算子恒等式检查排除的边缘行数
EDGE_ROWS = 2
# 本征残差排除的边缘比例
EDGE_FRACTION = 0.05


class TridiagonalOperator(BaseModel):
    """
    截断基上的三对角算子

    lower[i] 为矩阵元 (i+1, i)，upper[i] 为 (i, i+1)；第 i 行对应基向量 e_{basis_offset+i}。
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    basis_offset: int = 0

    @field_validator("lower", "diag", "upper", mode="before")
    @classmethod
    def _as_array(cls, v) -> np.ndarray:
        array = np.array(v, dtype=float)
        array.setflags(write=False)
        return array

    def model_post_init(self, __context) -> None:
        if len(self.lower) != self.dim - 1 or len(self.upper) != self.dim - 1:
            raise ValueError(f"off-diagonals must have length {self.dim - 1}")

    @property
    def dim(self) -> int:
        return len(self.diag)

    @property
    def indices(self) -> np.ndarray:
        """各行对应的基指标"""
        return np.arange(self.basis_offset, self.basis_offset + self.dim)

    @property
    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.lower, self.upper))

    @classmethod
    def combine(cls, terms: Iterable[Tuple[float, "TridiagonalOperator"]]) -> "TridiagonalOperator":
        """线性组合 Σ coef·op，各算子须共享窗口"""
        terms = list(terms)
        if not terms:
            raise ValueError("combine needs at least one term")
        first = terms[0][1]
        for _, op in terms[1:]:
            if op.dim != first.dim or op.basis_offset != first.basis_offset:
                raise WindowError("operators live on different truncation windows")
        return cls(
            lower=sum(coef * op.lower for coef, op in terms),
            diag=sum(coef * op.diag for coef, op in terms),
            upper=sum(coef * op.upper for coef, op in terms),
            basis_offset=first.basis_offset,
        )

    def scaled(self, factor: float) -> "TridiagonalOperator":
        return TridiagonalOperator.combine([(factor, self)])

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.lower, -1) + np.diag(self.upper, 1)

    def matvec(self, v: Sequence[float]) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        out = self.diag * v
        out[1:] += self.lower * v[:-1]
        out[:-1] += self.upper * v[1:]
        return out

    def eigenvalues(self) -> np.ndarray:
        """对称三对角矩阵的全部本征值（升序）"""
        if not self.is_symmetric:
            raise ValueError("eigenvalues need a symmetric tridiagonal operator")
        return eigvalsh_tridiagonal(self.diag, self.lower)

    def lowest(self, count: int) -> np.ndarray:
        """最小的 count 个本征值，二分法求到机器精度附近"""
        if not self.is_symmetric:
            raise ValueError("eigenvalues need a symmetric tridiagonal operator")
        if not 0 < count <= self.dim:
            raise ValueError(f"count must be in [1, {self.dim}], got {count}")
        return eigvalsh_tridiagonal(
            self.diag, self.lower, select="i", select_range=(0, count - 1),
            lapack_driver="stebz", tol=1e-15,
        )


# ==================== 生成元矩阵 ====================

def _is_discrete(s: Series) -> bool:
    return isinstance(s, (PositiveDiscrete, NegativeDiscrete))


def resolve_offset(s: Series, dim: int, offset: Optional[int] = None) -> int:
    """
    校验截断窗口；离散系列只允许 offset = 0，双边系列默认以 0 为中心
    """
    if dim < 1:
        raise WindowError(f"dim must be positive, got {dim}")
    if _is_discrete(s):
        if offset not in (None, 0):
            raise WindowError(f"discrete series live on n >= 0, offset must be 0, got {offset}")
        return 0
    return -(dim // 2) if offset is None else int(offset)


def _raising_coeffs(s: Series, n: np.ndarray) -> np.ndarray:
    """e_n -> e_{n+1} 方向的非负系数 β_n"""
    if _is_discrete(s):
        return np.sqrt((n + 1.0) * (2.0 * s.k + n))
    if isinstance(s, Principal):
        return np.sqrt((n + s.epsilon + 0.5) ** 2 + s.rho ** 2)
    return np.sqrt((n + s.epsilon + 1.0 + s.lam) * (n + s.epsilon - s.lam))


def casimir_scalar(s: Series) -> float:
    """Casimir 元在不可约表示中的标量"""
    if _is_discrete(s):
        return s.k * (1.0 - s.k)
    if isinstance(s, Principal):
        return s.rho ** 2 + 0.25
    return -s.lam * (1.0 + s.lam)


def _basic_matrices(s: Series, dim: int, offset: int) -> Tuple[TridiagonalOperator, TridiagonalOperator, TridiagonalOperator]:
    n = np.arange(offset, offset + dim, dtype=float)
    beta = _raising_coeffs(s, n[:-1])
    zeros = np.zeros(dim - 1)
    if isinstance(s, PositiveDiscrete):
        h_diag = 2.0 * (s.k + n)
    elif isinstance(s, NegativeDiscrete):
        h_diag = -2.0 * (s.k + n)
    else:
        h_diag = 2.0 * (s.epsilon + n)
    H = TridiagonalOperator(lower=zeros, diag=h_diag, upper=zeros, basis_offset=offset)
    if isinstance(s, NegativeDiscrete):
        # B 降指标、C 升指标
        B = TridiagonalOperator(lower=zeros, diag=np.zeros(dim), upper=-beta, basis_offset=offset)
        C = TridiagonalOperator(lower=beta, diag=np.zeros(dim), upper=zeros, basis_offset=offset)
    else:
        B = TridiagonalOperator(lower=beta, diag=np.zeros(dim), upper=zeros, basis_offset=offset)
        C = TridiagonalOperator(lower=zeros, diag=np.zeros(dim), upper=-beta, basis_offset=offset)
    return H, B, C


def generator_matrix(s: Series, g: Generator, dim: int, offset: Optional[int] = None) -> TridiagonalOperator:
    """
    生成元在截断基上的矩阵

    Args:
        s: 表示系列
        g: 生成元（共轭生成元带参数 c）
        dim: 截断维数
        offset: 窗口起点，离散系列必须为 0，双边系列默认 -dim//2

    Returns:
        TridiagonalOperator
    """
    offset = resolve_offset(s, dim, offset)
    H, B, C = _basic_matrices(s, dim, offset)
    name = g.name
    if name is GeneratorName.H:
        return H
    if name is GeneratorName.B:
        return B
    if name is GeneratorName.C:
        return C
    if name is GeneratorName.OMEGA:
        zeros = np.zeros(dim - 1)
        return TridiagonalOperator(lower=zeros, diag=np.full(dim, casimir_scalar(s)), upper=zeros, basis_offset=offset)

    c = g.c
    root = math.sqrt(c)
    if name is GeneratorName.XC:
        return TridiagonalOperator.combine([(-(1.0 + c) / (2.0 * root), H), (1.0, B), (-1.0, C)])
    if name is GeneratorName.HC:
        return TridiagonalOperator.combine([((1.0 + c) / (1.0 - c), H), (-2.0 * root / (1.0 - c), B), (2.0 * root / (1.0 - c), C)])
    if name is GeneratorName.BC:
        return TridiagonalOperator.combine([(-root / (1.0 - c), H), (1.0 / (1.0 - c), B), (-c / (1.0 - c), C)])
    return TridiagonalOperator.combine([(root / (1.0 - c), H), (-c / (1.0 - c), B), (1.0 / (1.0 - c), C)])


# ==================== X_c 本征向量 ====================

class Eigenpair(NamedTuple):
    """截断窗口上的本征向量与本征值"""
    vector: np.ndarray
    eigenvalue: float
    basis_offset: int


def xc_eigenvalue(s: Series, x: int, c: float) -> float:
    if isinstance(s, PositiveDiscrete):
        return (c - 1.0) * (x + s.k) / math.sqrt(c)
    if isinstance(s, NegativeDiscrete):
        return -(c - 1.0) * (x + s.k) / math.sqrt(c)
    return (c - 1.0) * (s.epsilon + x) / math.sqrt(c)


def function_params(s: Union[Principal, Complementary], c: float) -> MeixnerFunctionParams:
    """主系列/补系列标签对应的 Meixner 函数参数"""
    if isinstance(s, Principal):
        return MeixnerFunctionParams.principal(s.rho, s.epsilon, c)
    return MeixnerFunctionParams.real(s.lam, s.epsilon, c)


def _check_eigen_c(c: float):
    if not 0.0 < c <= EIGEN_C_MAX:
        raise UnsupportedArgument(f"eigenvector construction needs 0 < c <= {EIGEN_C_MAX}, got {c}")


def xc_eigenvector(s: Series, x: int, c: float, dim: int, offset: Optional[int] = None) -> Eigenpair:
    """
    X_c 的本征向量，截断到窗口

    离散系列系数为 M̂_n(x;2k,c)√w(x;2k,c)，主系列/补系列为 m̂_n(x;λ,ε,c)√w̃(x)。

    Args:
        s: 表示系列
        x: 本征指标（离散系列 x ≥ 0）
        c: 0 < c ≤ 0.95
        dim: 截断维数
        offset: 窗口起点

    Returns:
        Eigenpair
    """
    _check_eigen_c(c)
    offset = resolve_offset(s, dim, offset)
    indices = range(offset, offset + dim)
    if _is_discrete(s):
        if x < 0:
            raise UnsupportedArgument(f"discrete series eigenvectors need x >= 0, got {x}")
        mp = MeixnerParams(beta=2.0 * s.k, c=c)
        root_weight = math.sqrt(meixner_weight(x, mp))
        vector = np.array([meixner_orthonormal(n, x, mp) * root_weight for n in indices])
    else:
        params = function_params(s, c)
        vector = np.array([meixner_function_normalized(n, x, params) for n in indices])
    return Eigenpair(vector, xc_eigenvalue(s, x, c), offset)


def _interior(s: Series, dim: int, edge: int) -> slice:
    """截断内部行；离散系列下端 n = 0 不是截断边"""
    start = 0 if _is_discrete(s) else edge
    return slice(start, dim - edge)


def _edge_rows(dim: int) -> int:
    return max(EDGE_ROWS, int(math.ceil(EDGE_FRACTION * dim)))


def eigen_residual(A: TridiagonalOperator, pair: Eigenpair, s: Series) -> float:
    """‖Av − λv‖/‖v‖，只计窗口内部（排除边缘 5% 的行）"""
    residual = A.matvec(pair.vector) - pair.eigenvalue * pair.vector
    rows = _interior(s, A.dim, _edge_rows(A.dim))
    norm = float(np.linalg.norm(pair.vector))
    if norm == 0.0:
        return 0.0
    return float(np.linalg.norm(residual[rows])) / norm


def eigenbasis_matrix(s: Union[PositiveDiscrete, NegativeDiscrete], c: float, dim: int) -> np.ndarray:
    """
    离散系列的本征基矩阵 E[n, x] = M̂_n(x;2k,c)√w(x;2k,c)，n, x < dim

    E 由自对偶性对称；每列在 n ≤ x 段按递推向增长方向计算，其余由对称性补齐。
    """
    _check_eigen_c(c)
    if not _is_discrete(s):
        raise UnsupportedArgument("eigenbasis_matrix is defined for the discrete series")
    k = s.k
    root = math.sqrt(c)
    mp = MeixnerParams(beta=2.0 * k, c=c)
    E = np.zeros((dim, dim))
    for x in range(dim):
        lam = (c - 1.0) * (x + k) / root
        column = np.zeros(x + 1)
        column[0] = math.sqrt(meixner_weight(x, mp))
        if x >= 1:
            column[1] = (lam + (1.0 + c) * k / root) * column[0] / math.sqrt(2.0 * k)
        for n in range(1, x):
            diag = -(1.0 + c) * (k + n) / root
            column[n + 1] = (
                (lam - diag) * column[n] - math.sqrt(n * (2.0 * k + n - 1.0)) * column[n - 1]
            ) / math.sqrt((n + 1.0) * (2.0 * k + n))
        E[: x + 1, x] = column
        E[x, : x + 1] = column
    return E


# ==================== 校验 ====================

def series_params(s: Series) -> dict:
    return {key: float(value) for key, value in s.model_dump(exclude={"kind"}).items()}


def _residual_report(identity: str, s: Series, params: dict, residual: float, tolerance: float) -> VerificationReport:
    case = IdentityCase(
        id=f"{identity}/{s.kind}",
        identity=identity,
        variant=s.kind,
        params={**series_params(s), **params},
        tolerance=tolerance,
    )
    return VerificationReport.compare(case, residual, 0.0)


def expected_conjugated_actions(s: Series, x: int) -> List[Tuple[GeneratorName, float, int]]:
    """
    共轭生成元在 X_c 本征向量 v_x 上的作用 (生成元, 系数, 指标平移)
    """
    if isinstance(s, PositiveDiscrete):
        k = s.k
        return [
            (GeneratorName.HC, 2.0 * (k + x), 0),
            (GeneratorName.BC, -math.sqrt((x + 1.0) * (2.0 * k + x)), 1),
            (GeneratorName.CC, math.sqrt(x * (2.0 * k + x - 1.0)), -1),
        ]
    if isinstance(s, NegativeDiscrete):
        k = s.k
        return [
            (GeneratorName.HC, -2.0 * (k + x), 0),
            (GeneratorName.BC, math.sqrt(x * (2.0 * k + x - 1.0)), -1),
            (GeneratorName.CC, -math.sqrt((x + 1.0) * (2.0 * k + x)), 1),
        ]
    eps = s.epsilon
    if isinstance(s, Principal):
        up = (x + eps + 0.5) ** 2 + s.rho ** 2
        down = (x + eps - 0.5) ** 2 + s.rho ** 2
    else:
        lam = s.lam
        up = (x + eps - lam) * (x + eps + lam + 1.0)
        down = (x + eps + lam) * (x + eps - lam - 1.0)
    return [
        (GeneratorName.HC, 2.0 * (eps + x), 0),
        (GeneratorName.BC, math.sqrt(up), 1),
        (GeneratorName.CC, -math.sqrt(down), -1),
    ]


def _default_eigen_indices(s: Series) -> range:
    return range(0, 21) if _is_discrete(s) else range(-10, 11)


def conjugated_action_check(
    s: Series,
    c: float,
    dim: int,
    offset: Optional[int] = None,
    xs: Optional[Iterable[int]] = None,
    tolerance: float = 1e-8,
) -> VerificationReport:
    """
    用 X_c 本征向量检查 H_c、B_c、C_c 的作用公式，报告窗口内部的最大残差

    Args:
        s: 表示系列
        c: 0 < c ≤ 0.95
        dim: 截断维数
        offset: 窗口起点
        xs: 本征指标，默认离散系列 0..20、双边系列 -10..10
        tolerance: 通过阈值

    Returns:
        VerificationReport
    """
    offset = resolve_offset(s, dim, offset)
    xs = list(xs) if xs is not None else list(_default_eigen_indices(s))
    matrices = {
        name: generator_matrix(s, Generator(name=name, c=c), dim, offset)
        for name in (GeneratorName.HC, GeneratorName.BC, GeneratorName.CC)
    }
    cache = {}

    def vector(x: int) -> np.ndarray:
        if x not in cache:
            cache[x] = xc_eigenvector(s, x, c, dim, offset).vector
        return cache[x]

    rows = _interior(s, dim, _edge_rows(dim))
    worst = 0.0
    for x in xs:
        v = vector(x)
        for name, coef, shift in expected_conjugated_actions(s, x):
            image = matrices[name].matvec(v)
            if coef != 0.0:
                image = image - coef * vector(x + shift)
            residual = float(np.max(np.abs(image[rows]))) / max(1.0, abs(coef))
            worst = max(worst, residual)
    logger.debug(f"Conjugated action residual {worst:.3e} for {s.kind} at c={c}, dim={dim}")
    return _residual_report("conjugated_action", s, {"c": c, "dim": float(dim)}, worst, tolerance)


def _relative_interior(M: np.ndarray, rows: slice, scale: float) -> float:
    return float(np.max(np.abs(M[rows, rows]))) / max(1.0, scale)


def _triple_residual(H: np.ndarray, B: np.ndarray, C: np.ndarray, omega: float, rows: slice) -> float:
    scale = max(float(np.max(np.abs(M[rows, rows]))) for M in (H, B, C))
    identity = np.eye(H.shape[0])
    residuals = [
        H @ B - B @ H - 2.0 * B,
        H @ C - C @ H + 2.0 * C,
        B @ C - C @ B - H,
    ]
    worst = max(_relative_interior(R, rows, scale) for R in residuals)
    casimir = omega * identity + 0.25 * (H @ H + 2.0 * H + 4.0 * C @ B)
    return max(worst, _relative_interior(casimir, rows, scale * scale))


def commutator_check(
    s: Series,
    dim: int,
    c: float = 0.5,
    offset: Optional[int] = None,
    tolerance: float = 1e-10,
) -> VerificationReport:
    """
    截断内部（离两端至少 2 行）检查 [H,B]=2B、[H,C]=-2C、[B,C]=H 及
    Ω = -¼(H²+2H+4CB)，对 (H,B,C) 与 (H_c,B_c,C_c) 两组分别检查

    Returns:
        VerificationReport，lhs 为两组中最大的相对残差
    """
    offset = resolve_offset(s, dim, offset)
    rows = _interior(s, dim, EDGE_ROWS + 1)
    omega = casimir_scalar(s)

    def dense(name: GeneratorName, conj: Optional[float]) -> np.ndarray:
        return generator_matrix(s, Generator(name=name, c=conj), dim, offset).dense()

    plain = _triple_residual(
        dense(GeneratorName.H, None), dense(GeneratorName.B, None), dense(GeneratorName.C, None), omega, rows
    )
    conjugated = _triple_residual(
        dense(GeneratorName.HC, c), dense(GeneratorName.BC, c), dense(GeneratorName.CC, c), omega, rows
    )
    logger.debug(f"Commutator residuals plain={plain:.3e} conjugated={conjugated:.3e} for {s.kind}")
    return _residual_report("commutator", s, {"c": c, "dim": float(dim)}, max(plain, conjugated), tolerance)
