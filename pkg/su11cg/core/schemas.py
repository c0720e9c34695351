"""
数据模型定义
参数类型、表示标签、验证用例与运行报告
"""
import hashlib
import math
from enum import Enum
from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from su11cg.utils.exceptions import InvalidRegime

# 参数严格边界的安全距离
PARAM_MARGIN = 1e-9
# 区间判定时的整数/边界容差
REGIME_TOL = 1e-9
MACHINE_EPS = 2.220446049250313e-16


def _require_unit_interval(value: float, name: str) -> float:
    if not (PARAM_MARGIN <= value <= 1.0 - PARAM_MARGIN):
        raise ValueError(f"{name} must lie strictly inside (0, 1), got {value}")
    return value


# ==================== 级数控制 ====================

class SeriesControl(BaseModel):
    """超几何级数截断控制"""
    model_config = ConfigDict(frozen=True)
    
    max_terms: int = Field(default=100_000, gt=0, le=1_000_000, description="最大项数")
    # 阈值不得低于机器精度，默认取 MACHINE_EPS 而非 1e-16
    rel_tol: float = Field(default=MACHINE_EPS, ge=MACHINE_EPS, description="单项相对阈值")
    consecutive_small: int = Field(default=8, gt=0, description="连续小项个数")


# ==================== 正交多项式参数 ====================

class MeixnerParams(BaseModel):
    """Meixner多项式参数 (β, c)"""
    model_config = ConfigDict(frozen=True)
    
    beta: float = Field(..., description="β > 0")
    c: float = Field(..., description="0 < c < 1")
    
    @field_validator("beta")
    @classmethod
    def _beta_positive(cls, v: float) -> float:
        if not v >= PARAM_MARGIN:
            raise ValueError(f"beta must be positive, got {v}")
        return v
    
    @field_validator("c")
    @classmethod
    def _c_in_unit_interval(cls, v: float) -> float:
        return _require_unit_interval(v, "c")


class CDHParams(BaseModel):
    """连续对偶Hahn多项式参数，a 始终存放三者中的最小值"""
    model_config = ConfigDict(frozen=True)
    
    a: float
    b: float
    c: float
    
    @model_validator(mode="before")
    @classmethod
    def _canonical_order(cls, data):
        if isinstance(data, dict) and all(key in data for key in ("a", "b", "c")):
            values = [float(data["a"]), float(data["b"]), float(data["c"])]
            low = values.index(min(values))
            rest = values[:low] + values[low + 1:]
            data = {**data, "a": values[low], "b": rest[0], "c": rest[1]}
        return data
    
    @model_validator(mode="after")
    def _positive_pair_sums(self) -> "CDHParams":
        for name, total in (("a+b", self.a + self.b), ("a+c", self.a + self.c), ("b+c", self.b + self.c)):
            if not total >= PARAM_MARGIN:
                raise ValueError(f"{name} must be positive, got {total}")
        return self
    
    def as_tuple(self) -> Tuple[float, float, float]:
        return self.a, self.b, self.c


# ==================== Meixner函数参数 ====================

class Regime(str, Enum):
    """Meixner函数参数区间"""
    PRINCIPAL = "principal"
    COMPLEMENTARY = "complementary"
    TERMINATING = "terminating"


def _in_complementary_range(lam: float, epsilon: float) -> bool:
    if 0.0 <= epsilon < 0.5:
        return -0.5 + REGIME_TOL < lam < -epsilon - REGIME_TOL
    if 0.5 < epsilon < 1.0:
        return -0.5 + REGIME_TOL < lam < epsilon - 1.0 - REGIME_TOL
    return False


def terminating_root(lam: float, epsilon: float) -> Optional[float]:
    """
    返回 {λ, -1-λ} 中满足 λ' > -1/2 且 ε+λ'+1 为整数的根，不存在时返回 None
    """
    root = lam if lam > -0.5 else -1.0 - lam
    shift = epsilon + root + 1.0
    if root > -0.5 and abs(shift - round(shift)) <= REGIME_TOL:
        return root
    return None


def classify_regime(lam: complex, epsilon: float) -> Regime:
    """判定 (λ, ε) 所属的参数区间；ρ = 0, ε = ½ 处主系列可约，不属于任何区间"""
    if abs(lam.real + 0.5) <= REGIME_TOL:
        if abs(lam.imag) <= REGIME_TOL and abs(epsilon - 0.5) <= REGIME_TOL:
            raise InvalidRegime(f"(rho=0, epsilon={epsilon}) is the reducible principal point")
        return Regime.PRINCIPAL
    if abs(lam.imag) > REGIME_TOL:
        raise InvalidRegime(f"lambda={lam} is neither on Re=-1/2 nor real")
    if _in_complementary_range(lam.real, epsilon):
        return Regime.COMPLEMENTARY
    if terminating_root(lam.real, epsilon) is not None:
        return Regime.TERMINATING
    raise InvalidRegime(f"(lambda={lam.real}, epsilon={epsilon}) fits no unitary regime")


class MeixnerFunctionParams(BaseModel):
    """Meixner函数参数 (λ, ε, c)"""
    model_config = ConfigDict(frozen=True)
    
    lam_re: float = Field(..., description="λ 实部")
    lam_im: float = Field(default=0.0, description="λ 虚部")
    epsilon: float = Field(..., description="ε ∈ [0, 1)")
    c: float = Field(..., description="0 < c < 1")
    
    @field_validator("epsilon")
    @classmethod
    def _epsilon_range(cls, v: float) -> float:
        if not (0.0 <= v < 1.0):
            raise ValueError(f"epsilon must lie in [0, 1), got {v}")
        return v
    
    @field_validator("c")
    @classmethod
    def _c_in_unit_interval(cls, v: float) -> float:
        return _require_unit_interval(v, "c")
    
    @model_validator(mode="after")
    def _check_regime(self) -> "MeixnerFunctionParams":
        classify_regime(self.lam, self.epsilon)
        return self
    
    @classmethod
    def principal(cls, rho: float, epsilon: float, c: float) -> "MeixnerFunctionParams":
        return cls(lam_re=-0.5, lam_im=abs(rho), epsilon=epsilon, c=c)
    
    @classmethod
    def real(cls, lam: float, epsilon: float, c: float) -> "MeixnerFunctionParams":
        """实 λ：补系列或截断区间"""
        return cls(lam_re=lam, lam_im=0.0, epsilon=epsilon, c=c)
    
    @property
    def lam(self) -> complex:
        return complex(self.lam_re, self.lam_im)
    
    @property
    def rho(self) -> float:
        return abs(self.lam_im)
    
    @property
    def regime(self) -> Regime:
        return classify_regime(self.lam, self.epsilon)


# ==================== 求积 ====================

def default_x_max(tail_tol: float) -> float:
    return 2.0 / math.pi * math.log(1.0 / tail_tol) + 10.0


class QuadratureSpec(BaseModel):
    """[0, x_max] 上的复合Gauss-Legendre求积规格"""
    model_config = ConfigDict(frozen=True)
    
    x_max: float = Field(..., gt=0)
    panels: int = Field(default=64, gt=0)
    nodes_per_panel: int = Field(default=16, gt=0)
    tail_tol: float = Field(default=1e-14, gt=0)
    
    @model_validator(mode="before")
    @classmethod
    def _fill_x_max(cls, data):
        if isinstance(data, dict) and data.get("x_max") is None:
            data = {**data, "x_max": default_x_max(data.get("tail_tol", 1e-14))}
        return data
    
    @classmethod
    def for_degree(cls, degree: int, tail_tol: float = 1e-14) -> "QuadratureSpec":
        """
        为y的 degree 次多项式被积函数选取截断点和面板数
        
        Args:
            degree: 被积多项式在 y = x² 中的次数
            tail_tol: 尾部容差
        """
        x_max = default_x_max(tail_tol)
        power = 2 * degree + 6
        target = math.log(1.0 / tail_tol)
        while math.pi * x_max - power * math.log(x_max) < target:
            x_max += 1.0
        panels = max(64, math.ceil(x_max / 0.48))
        return cls(x_max=x_max, panels=panels, tail_tol=tail_tol)


# ==================== 表示标签 ====================

class PositiveDiscrete(BaseModel):
    """正离散系列 π_k^+"""
    model_config = ConfigDict(frozen=True)
    
    kind: Literal["positive"] = "positive"
    k: float = Field(..., gt=0)


class NegativeDiscrete(BaseModel):
    """负离散系列 π_k^-"""
    model_config = ConfigDict(frozen=True)
    
    kind: Literal["negative"] = "negative"
    k: float = Field(..., gt=0)


class Principal(BaseModel):
    """主系列 π^{ρ,ε}"""
    model_config = ConfigDict(frozen=True)
    
    kind: Literal["principal"] = "principal"
    rho: float = Field(..., ge=0)
    epsilon: float = Field(..., ge=0, lt=1)
    
    @model_validator(mode="after")
    def _irreducible(self) -> "Principal":
        if self.rho <= REGIME_TOL and abs(self.epsilon - 0.5) <= REGIME_TOL:
            raise ValueError("(rho, epsilon) = (0, 1/2) is reducible")
        return self


class Complementary(BaseModel):
    """补系列 π^{λ,ε}"""
    model_config = ConfigDict(frozen=True)
    
    kind: Literal["complementary"] = "complementary"
    lam: float
    epsilon: float = Field(..., ge=0, lt=1)
    
    @model_validator(mode="after")
    def _in_range(self) -> "Complementary":
        if not _in_complementary_range(self.lam, self.epsilon):
            raise ValueError(f"(lambda={self.lam}, epsilon={self.epsilon}) outside the complementary range")
        return self


SeriesLabel = Annotated[
    Union[PositiveDiscrete, NegativeDiscrete, Principal, Complementary],
    Field(discriminator="kind"),
]


class GeneratorName(str, Enum):
    """su(1,1) 生成元"""
    H = "H"
    B = "B"
    C = "C"
    OMEGA = "Omega"
    XC = "Xc"
    HC = "Hc"
    BC = "Bc"
    CC = "Cc"


CONJUGATED_GENERATORS = (GeneratorName.XC, GeneratorName.HC, GeneratorName.BC, GeneratorName.CC)


class Generator(BaseModel):
    """生成元，共轭生成元附带参数 c"""
    model_config = ConfigDict(frozen=True)
    
    name: GeneratorName
    c: Optional[float] = None
    
    @model_validator(mode="after")
    def _c_when_conjugated(self) -> "Generator":
        if self.name in CONJUGATED_GENERATORS:
            if self.c is None:
                raise ValueError(f"generator {self.name.value} needs c")
            _require_unit_interval(self.c, "c")
        elif self.c is not None:
            raise ValueError(f"generator {self.name.value} takes no c")
        return self


# ==================== 张量积 ====================

class TensorPair(BaseModel):
    """张量积 π_{k1}^+ ⊗ π_{k2}^-，约定 k1 ≤ k2"""
    model_config = ConfigDict(frozen=True)
    
    k1: float = Field(..., gt=0)
    k2: float = Field(..., gt=0)
    
    @model_validator(mode="after")
    def _ordered(self) -> "TensorPair":
        if self.k1 > self.k2:
            raise ValueError(f"k1 <= k2 required, got k1={self.k1}, k2={self.k2}")
        return self


class DecompositionKind(str, Enum):
    """张量积分解类型"""
    CONTINUOUS_ONLY = "continuous_only"
    WITH_COMPLEMENTARY = "with_complementary"
    WITH_DISCRETE = "with_discrete"


class DecompositionSpec(BaseModel):
    """张量积分解的结构数据"""
    model_config = ConfigDict(frozen=True)
    
    epsilon: float
    L: int
    kind: DecompositionKind
    complementary_lambda: Optional[float] = None
    discrete_ks: List[float] = Field(default_factory=list)
    K: Optional[int] = None


class CoupledIndex(BaseModel):
    """耦合基 f_n^p 的指标"""
    model_config = ConfigDict(frozen=True)
    
    n: int = Field(..., ge=0)
    p: int
    
    @classmethod
    def from_uncoupled(cls, n1: int, n2: int) -> "CoupledIndex":
        return cls(n=min(n1, n2), p=n1 - n2)
    
    @property
    def uncoupled(self) -> Tuple[int, int]:
        if self.p <= 0:
            return self.n, self.n - self.p
        return self.n + self.p, self.n
    
    @property
    def sign(self) -> int:
        return -1 if self.n % 2 else 1


# ==================== 验证用例与报告 ====================

class CaseStatus(str, Enum):
    """用例状态"""
    PASS = "PASS"
    FAIL = "FAIL"
    SKIPPED = "SKIPPED"


class IdentityCase(BaseModel):
    """单个恒等式验证用例"""
    model_config = ConfigDict(frozen=True)
    
    id: str
    identity: str
    variant: str = ""
    params: Dict[str, float] = Field(default_factory=dict)
    truncation: int = Field(default=0, ge=0, description="0 表示自适应截断")
    tolerance: float = Field(..., gt=0)
    
    def param(self, name: str) -> float:
        return self.params[name]
    
    def integer(self, name: str) -> int:
        return int(round(self.params[name]))


class VerificationReport(BaseModel):
    """单个用例的验证结果"""
    
    id: str
    params: Dict[str, float] = Field(default_factory=dict)
    lhs_re: float = 0.0
    lhs_im: float = 0.0
    rhs_re: float = 0.0
    rhs_im: float = 0.0
    abs_err: float = 0.0
    rel_err: float = 0.0
    terms_used: int = 0
    tail_estimate: float = 0.0
    status: CaseStatus
    message: Optional[str] = None
    
    @property
    def passed(self) -> bool:
        return self.status is not CaseStatus.FAIL
    
    @property
    def lhs(self) -> complex:
        return complex(self.lhs_re, self.lhs_im)
    
    @property
    def rhs(self) -> complex:
        return complex(self.rhs_re, self.rhs_im)
    
    @classmethod
    def compare(
        cls,
        case: IdentityCase,
        lhs: complex,
        rhs: complex,
        terms_used: int = 0,
        tail_estimate: float = 0.0,
    ) -> "VerificationReport":
        """按相对误差比较两侧，|rhs| 低于容差时改用绝对误差"""
        lhs, rhs = complex(lhs), complex(rhs)
        abs_err = abs(lhs - rhs)
        scale = abs(rhs)
        if scale > 0:
            rel_err = abs_err / scale
        else:
            rel_err = 0.0 if abs_err == 0 else math.inf
        measured = abs_err if scale < case.tolerance else rel_err
        status = CaseStatus.PASS if measured <= case.tolerance else CaseStatus.FAIL
        return cls(
            id=case.id,
            params=dict(case.params),
            lhs_re=lhs.real,
            lhs_im=lhs.imag,
            rhs_re=rhs.real,
            rhs_im=rhs.imag,
            abs_err=abs_err,
            rel_err=rel_err,
            terms_used=terms_used,
            tail_estimate=tail_estimate,
            status=status,
        )
    
    @classmethod
    def skipped(cls, case: IdentityCase, message: str) -> "VerificationReport":
        return cls(id=case.id, params=dict(case.params), status=CaseStatus.SKIPPED, message=message)
    
    @classmethod
    def failed(cls, case: IdentityCase, message: str) -> "VerificationReport":
        return cls(id=case.id, params=dict(case.params), status=CaseStatus.FAIL, message=message)


class RngInfo(BaseModel):
    """随机网格生成器说明"""
    algorithm: str = "philox"
    seed: int


class RunReport(BaseModel):
    """一次验证运行的报告"""
    
    run_id: str
    config_digest: str
    identity: str
    rng: RngInfo
    cases: List[VerificationReport] = Field(default_factory=list)
    
    @property
    def all_passed(self) -> bool:
        return all(case.passed for case in self.cases)
    
    def count(self, status: CaseStatus) -> int:
        return sum(1 for case in self.cases if case.status is status)


# ==================== 运行配置 ====================

class OutputFormat(str, Enum):
    """报告格式"""
    JSON = "json"
    CSV = "csv"


class RunConfig(BaseModel):
    """批量验证的运行配置"""
    model_config = ConfigDict(frozen=True)
    
    seed: int = 0
    output_path: Optional[str] = None
    output_format: OutputFormat = OutputFormat.JSON
    max_workers: int = Field(default=4, gt=0)
    identities: List[str] = Field(default_factory=list, description="verify all 时运行的恒等式，空表示全部")
    
    # 容差档案
    tolerance: Optional[float] = Field(default=None, description="命令行全局容差，高于其他来源")
    tolerances: Dict[str, float] = Field(default_factory=dict, description="配置文件中按恒等式覆盖的容差")
    file_tolerance: Optional[float] = Field(default=None, description="配置文件 [tolerance] default")
    env_tolerance: Optional[float] = Field(default=None, description="环境变量 SU11_TOLERANCE")
    
    # 截断档案
    dim: int = Field(default=400, ge=4)
    x_max: Optional[float] = Field(default=None, gt=0)
    max_terms: int = Field(default=2000, gt=0)
    bilinear_max_terms: int = Field(default=600, gt=0)
    
    # 网格定义
    samples: int = Field(default=200, gt=0)
    poisson_t: List[float] = Field(default_factory=lambda: [0.8, 1.0])
    poisson_t_factor: float = Field(default=1.2, gt=0)
    
    @field_validator("tolerance", "file_tolerance", "env_tolerance")
    @classmethod
    def _global_positive(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not v > 0:
            raise ValueError(f"tolerance must be positive, got {v}")
        return v
    
    @field_validator("tolerances")
    @classmethod
    def _all_positive(cls, v: Dict[str, float]) -> Dict[str, float]:
        for name, value in v.items():
            if not value > 0:
                raise ValueError(f"tolerance for {name} must be positive, got {value}")
        return v
    
    def tolerance_for(self, identity: str, default: float) -> float:
        """按 命令行 > 文件单项 > 文件 default > 环境变量 > 内置默认值 的顺序取容差"""
        if self.tolerance is not None:
            return self.tolerance
        if identity in self.tolerances:
            return self.tolerances[identity]
        for fallback in (self.file_tolerance, self.env_tolerance):
            if fallback is not None:
                return fallback
        return default
    
    def digest(self) -> str:
        """配置的规范摘要（不含输出位置）"""
        payload = self.model_dump_json(exclude={"output_path", "output_format"})
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()
