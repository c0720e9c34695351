"""
恒等式验证服务
各恒等式的验证引擎、Philox 随机参数网格与注册表

每个引擎接收一个 IdentityCase，返回 VerificationReport；
网格构造函数由 RunConfig（种子、采样数、截断档案）确定性地生成用例。
"""
import cmath
import math
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence

import numpy as np

from su11cg.core.schemas import (
    CDHParams,
    Complementary,
    Generator,
    GeneratorName,
    IdentityCase,
    MeixnerFunctionParams,
    MeixnerParams,
    NegativeDiscrete,
    PositiveDiscrete,
    Principal,
    QuadratureSpec,
    RunConfig,
    TensorPair,
    VerificationReport,
)
from su11cg.services.coupling import coupled_eigenvector_check, decomposition_spec, recompose
from su11cg.services.measures import gauss_legendre_nodes
from su11cg.services.mfunctions import meixner_function, meixner_function_normalized
from su11cg.services.orthopoly import (
    cdh,
    cdh_orthonormal,
    cdh_unrestricted,
    meixner_orthonormal,
    meixner_sequence,
    meixner_weight,
)
from su11cg.services.repn import (
    Series,
    commutator_check,
    conjugated_action_check,
    eigen_residual,
    generator_matrix,
    xc_eigenvector,
)
from su11cg.services.special import (
    gauss_2f1,
    gauss_2f1_regularized,
    gauss_2f1_regularized_scaled,
    hyp_3f2,
    hyp_3f2_terminating,
    log_gamma,
    pochhammer,
)
from su11cg.utils.exceptions import (
    AnnulusError,
    SeriesRadiusError,
    SU11Error,
    UnknownIdentityError,
    UnsupportedArgument,
)
from su11cg.utils.helpers import SeriesSum, bilateral_sum, forward_sum, stable_hash
from su11cg.utils.logger import get_logger

logger = get_logger(__name__)

Engine = Callable[[IdentityCase], VerificationReport]
GridBuilder = Callable[[RunConfig], List[IdentityCase]]

# Poisson 核的 t 与环域边界的最小距离
ANNULUS_MARGIN = 1e-3
# 积分实现检查：谱变量截断与复合求积
RHO_MAX = 7.0
RHO_PANELS = 12
RHO_NODES = 12
# 较重的引擎每个变体最多取的随机点数
HEAVY_SAMPLES = 40

_LOG_2PI = math.log(2.0 * math.pi)


def grid_rng(seed: int, name: str) -> np.random.Generator:
    """
    以 (seed, 名称哈希) 为 key 的 Philox 计数器生成器

    不同恒等式/变体的网格互不相关，且只依赖种子。
    """
    key = np.array([seed % 2**64, stable_hash(name)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def make_case(
    identity: str,
    variant: str,
    index: int,
    params: Dict[str, float],
    tolerance: float,
    truncation: int = 0,
) -> IdentityCase:
    return IdentityCase(
        id=f"{identity}/{variant}/{index:04d}",
        identity=identity,
        variant=variant,
        params={key: float(value) for key, value in params.items()},
        truncation=truncation,
        tolerance=tolerance,
    )


def _sign(power: int) -> float:
    return -1.0 if power % 2 else 1.0


def _complex_param(case: IdentityCase, name: str) -> complex:
    return complex(case.param(f"{name}_re"), case.param(f"{name}_im"))


def _random_disk_point(rng: np.random.Generator, radius: float) -> complex:
    r = radius * math.sqrt(rng.uniform())
    return cmath.rect(r, rng.uniform(-math.pi, math.pi))


# ==================== 邻接关系 ====================

def verify_conti1(case: IdentityCase) -> VerificationReport:
    """
    Ŝ_n 关于第三个参数的邻接关系

    main:      (c²+y)/√((a+c)(b+c)) Ŝ_n(y;a,b,c+1) = √((n+1)(a+b+n)) Ŝ_{n+1}(y;a,b,c) + √((a+c+n)(b+c+n)) Ŝ_n(y;a,b,c)
    companion: √((a+c-1)(b+c-1)) Ŝ_n(y;a,b,c-1) = √((n+a+c-1)(n+b+c-1)) Ŝ_n(y;a,b,c) + √(n(n+a+b-1)) Ŝ_{n-1}(y;a,b,c)
    """
    n = case.integer("n")
    y = case.param("y")
    a, b, c = case.param("a"), case.param("b"), case.param("c")
    base = CDHParams(a=a, b=b, c=c)
    if case.variant == "companion":
        lower = CDHParams(a=a, b=b, c=c - 1.0)
        lhs = math.sqrt((a + c - 1.0) * (b + c - 1.0)) * cdh_orthonormal(n, y, lower)
        rhs = math.sqrt((n + a + c - 1.0) * (n + b + c - 1.0)) * cdh_orthonormal(n, y, base)
        if n > 0:
            rhs += math.sqrt(n * (n + a + b - 1.0)) * cdh_orthonormal(n - 1, y, base)
    else:
        upper = CDHParams(a=a, b=b, c=c + 1.0)
        lhs = (c * c + y) / math.sqrt((a + c) * (b + c)) * cdh_orthonormal(n, y, upper)
        rhs = (
            math.sqrt((n + 1.0) * (a + b + n)) * cdh_orthonormal(n + 1, y, base)
            + math.sqrt((a + c + n) * (b + c + n)) * cdh_orthonormal(n, y, base)
        )
    return VerificationReport.compare(case, lhs, rhs, terms_used=n + 2)


def grid_conti1(config: RunConfig) -> List[IdentityCase]:
    tolerance = config.tolerance_for("conti1", 1e-10)
    cases = []
    for variant in ("main", "companion"):
        rng = grid_rng(config.seed, f"conti1/{variant}")
        for i in range(config.samples):
            params = {
                "a": rng.uniform(0.1, 1.5),
                "b": rng.uniform(0.1, 1.5),
                # c > 1.2 使 c-1 仍满足正性
                "c": rng.uniform(1.2, 2.5),
                "n": int(rng.integers(0, 9)),
                "y": rng.uniform(-1.0, 9.0),
            }
            cases.append(make_case("conti1", variant, i, params, tolerance))
    return cases


def verify_2f1_contiguous(case: IdentityCase) -> VerificationReport:
    """
    2F1 的两个邻接关系

    three_term: c(c-1)(1-z)F(c-1) = (c-a)(c-b)z F(c+1) + c(c-1-(2c-a-b-1)z) F(c)
    difference: F(c) = F(c-1) - abz/(c(c-1)) F(a+1,b+1;c+1)
    """
    a = _complex_param(case, "a")
    b = _complex_param(case, "b")
    c = case.param("c")
    z = _complex_param(case, "z")
    if case.variant == "difference":
        lhs = gauss_2f1(a, b, c, z)
        rhs = gauss_2f1(a, b, c - 1.0, z) - a * b * z / (c * (c - 1.0)) * gauss_2f1(a + 1, b + 1, c + 1.0, z)
    else:
        lhs = c * (c - 1.0) * (1 - z) * gauss_2f1(a, b, c - 1.0, z)
        rhs = (
            (c - a) * (c - b) * z * gauss_2f1(a, b, c + 1.0, z)
            + c * (c - 1.0 - (2 * c - a - b - 1) * z) * gauss_2f1(a, b, c, z)
        )
    return VerificationReport.compare(case, lhs, rhs)


def grid_2f1_contiguous(config: RunConfig) -> List[IdentityCase]:
    tolerance = config.tolerance_for("2f1_contiguous", 1e-10)
    cases = []
    for variant in ("three_term", "difference"):
        rng = grid_rng(config.seed, f"2f1_contiguous/{variant}")
        for i in range(config.samples):
            z = _random_disk_point(rng, 0.9)
            params = {
                "a_re": rng.uniform(-2.0, 2.0),
                "a_im": rng.uniform(-1.0, 1.0),
                "b_re": rng.uniform(-2.0, 2.0),
                "b_im": rng.uniform(-1.0, 1.0),
                "c": rng.uniform(1.3, 3.5),
                "z_re": z.real,
                "z_im": z.imag,
            }
            cases.append(make_case("2f1_contiguous", variant, i, params, tolerance))
    return cases


# ==================== 双线性生成函数 ====================

def scaled_cdh_sequence(y: float, a: float, b: float, c: float, shift: int, count: int) -> np.ndarray:
    """
    G_n = S_n(y;a,b,c) / (n! Γ(n+shift+1))，n < count，要求 a+c = 1+shift

    n < -shift 时 1/Γ(n+shift+1) = 0。其余项由未归一化三项递推
    S_{n+1} = (b_n - y) S_n - n(n-1+a+b)(n-1+a+c)(n-1+b+c) S_{n-1}
    改写而来，因子 n-1+a+c = n+shift 与 Γ 比值相消：
    G_{n+1} = [(b_n - y) G_n - (n-1+a+b)(n-1+b+c) G_{n-1}] / ((n+1)(n+shift+1))
    """
    values = np.zeros(count)
    start = max(0, -shift)
    if start >= count:
        return values
    values[start] = cdh_unrestricted(start, y, a, b, c) / (math.factorial(start) * math.factorial(start + shift))
    for n in range(start, count - 1):
        b_n = (n + a + b) * (n + a + c) + n * (n + b + c - 1.0) - a * a
        previous = values[n - 1] if n > start else 0.0
        values[n + 1] = (
            (b_n - y) * values[n] - (n - 1.0 + a + b) * (n - 1.0 + b + c) * previous
        ) / ((n + 1.0) * (n + shift + 1.0))
    return values


def _log_meixner_prefactor(k1: float, k2: float, c: float, x1: int, x2: int, p: int) -> float:
    """log[(1-c)^{2k1+p} (2k1)_{x1} (2k2)_{x2}]"""
    return (
        (2 * k1 + p) * math.log1p(-c)
        + math.lgamma(2 * k1 + x1) - math.lgamma(2 * k1)
        + math.lgamma(2 * k2 + x2) - math.lgamma(2 * k2)
    )


def bilinear_rhs_plus(k1: float, k2: float, c: float, y: float, x1: int, x2: int, p: int, max_terms: int) -> SeriesSum:
    """
    Σ_n C_n S_n(y; k2-k1+½, k1+k2-½, k1-k2+p+½) M_{n+p}(x1;2k1,c) M_n(x2;2k2,c)

    C_n = (-1)^{x1+x2} c^{n+x1} (1-c)^{2k1+p} (2k1)_{x1} (2k2)_{x2} / (Γ(n+1)Γ(n+p+1))，
    p < 0 时求和从 n = -p 开始。
    """
    start = max(0, -p)
    scaled = scaled_cdh_sequence(y, k2 - k1 + 0.5, k1 + k2 - 0.5, k1 - k2 + p + 0.5, p, max_terms)
    m1 = meixner_sequence(max_terms + max(p, 0), x1, MeixnerParams(beta=2 * k1, c=c))
    m2 = meixner_sequence(max_terms, x2, MeixnerParams(beta=2 * k2, c=c))
    log_pref = x1 * math.log(c) + _log_meixner_prefactor(k1, k2, c, x1, x2, p)
    sign = _sign(x1 + x2)
    log_c = math.log(c)

    def term(n: int) -> float:
        return sign * math.exp(log_pref + n * log_c) * scaled[n] * m1[n + p] * m2[n]

    return forward_sum(term, start=start, max_terms=max_terms - start, floor_ratio=c)


def bilinear_rhs_minus(k1: float, k2: float, c: float, y: float, x1: int, x2: int, p: int, max_terms: int) -> SeriesSum:
    """
    另一分支 Σ_n C_n^- S_n(y; k1-k2+½, k1+k2-½, k2-k1-p+½) M_n(x1;2k1,c) M_{n-p}(x2;2k2,c)

    C_n^- 比 C_n 多出 |Γ|-比值，p > 0 时求和从 n = p 开始。y 须为正。
    """
    if y <= 0:
        raise UnsupportedArgument(f"branch comparison needs y > 0, got {y}")
    start = max(0, p)
    scaled = scaled_cdh_sequence(y, k1 - k2 + 0.5, k1 + k2 - 0.5, k2 - k1 - p + 0.5, -p, max_terms)
    m1 = meixner_sequence(max_terms, x1, MeixnerParams(beta=2 * k1, c=c))
    m2 = meixner_sequence(max_terms + max(-p, 0), x2, MeixnerParams(beta=2 * k2, c=c))
    root = 1j * math.sqrt(y)
    log_ratio = (
        log_gamma(k1 - k2 + 0.5 + root).real + log_gamma(k2 - k1 - p + 0.5 + root).real
        - log_gamma(k1 - k2 + p + 0.5 + root).real - log_gamma(k2 - k1 + 0.5 + root).real
    )
    log_pref = (x1 - p) * math.log(c) + _log_meixner_prefactor(k1, k2, c, x1, x2, p) + log_ratio
    sign = _sign(x1 + x2 + p)
    log_c = math.log(c)

    def term(n: int) -> float:
        return sign * math.exp(log_pref + n * log_c) * scaled[n] * m1[n] * m2[n - p]

    return forward_sum(term, start=start, max_terms=max_terms - start, floor_ratio=c)


def bilinear_lhs(k1: float, k2: float, c: float, y: float, x1: int, x2: int, p: int) -> float:
    """S_{x2}(y; k2-k1+½, k1+k2-½, k1-k2+x1-x2+½) · 2F1(p+k1-k2+½±i√y; p+x2-x1+1; c/(c-1)) / Γ(p+x2-x1+1)"""
    poly = cdh_unrestricted(x2, y, k2 - k1 + 0.5, k1 + k2 - 0.5, k1 - k2 + x1 - x2 + 0.5)
    root = 1j * cmath.sqrt(y)
    base = p + k1 - k2 + 0.5
    jacobi = gauss_2f1_regularized(base + root, base - root, p + x2 - x1 + 1, c / (c - 1.0))
    return poly * jacobi.real


def verify_bilinear_sum(case: IdentityCase) -> VerificationReport:
    """
    CDH 与 Meixner 多项式的双线性和

    sum:    左侧闭式 vs 右侧级数（截断 N，尾部按比值 c 估计）
    branch: 右侧的 p ≥ 0 形式 vs p ≤ 0 形式
    """
    k1, k2 = case.param("k1"), case.param("k2")
    TensorPair(k1=k1, k2=k2)
    c, y = case.param("c"), case.param("y")
    x1, x2, p = case.integer("x1"), case.integer("x2"), case.integer("p")
    if x1 < 0 or x2 < 0:
        raise UnsupportedArgument(f"x1, x2 must be non-negative, got ({x1}, {x2})")
    N = case.truncation or 600
    plus = bilinear_rhs_plus(k1, k2, c, y, x1, x2, p, N)
    if case.variant == "branch":
        minus = bilinear_rhs_minus(k1, k2, c, y, x1, x2, p, N)
        return VerificationReport.compare(
            case, plus.value, minus.value,
            terms_used=plus.terms_used + minus.terms_used,
            tail_estimate=plus.tail_estimate + minus.tail_estimate,
        )
    lhs = bilinear_lhs(k1, k2, c, y, x1, x2, p)
    return VerificationReport.compare(case, lhs, plus.value, plus.terms_used, plus.tail_estimate)


_BILINEAR_PAIRS = ((0.5, 0.8), (0.3, 0.3), (0.2, 1.2))
_BILINEAR_C = (0.2, 0.4, 0.6)
_BILINEAR_Y = (0.25, 1.0, 4.0)
_BILINEAR_X = ((0, 0), (2, 1), (1, 3))


def grid_bilinear_sum(config: RunConfig) -> List[IdentityCase]:
    tolerance = config.tolerance_for("bilinear_sum", 1e-8)
    N = config.bilinear_max_terms
    cases = []
    index = 0
    for k1, k2 in _BILINEAR_PAIRS:
        for c in _BILINEAR_C:
            for y in _BILINEAR_Y:
                for x1, x2 in _BILINEAR_X:
                    # p = x1 - x2 与相邻的 p 各一组
                    for p in (x1 - x2, x1 - x2 + 1):
                        params = {"k1": k1, "k2": k2, "c": c, "y": y, "x1": x1, "x2": x2, "p": p}
                        cases.append(make_case("bilinear_sum", "sum", index, params, tolerance, N))
                        index += 1
    index = 0
    for k1, k2 in _BILINEAR_PAIRS:
        for x1, x2 in _BILINEAR_X:
            for p in (-2, 1, 3):
                params = {"k1": k1, "k2": k2, "c": 0.4, "y": 1.0, "x1": x1, "x2": x2, "p": p}
                cases.append(make_case("bilinear_sum", "branch", index, params, tolerance, N))
                index += 1
    return cases


def verify_eqS_shift(case: IdentityCase) -> VerificationReport:
    """
    S_n(y; k1-k2+½, k1+k2-½, k2-k1-p+½)
      = (-1)^p Π_{m<p}((k1-k2+½+m)² + y) · S_{n-p}(y; k2-k1+½, k1+k2-½, k1-k2+p+½)，0 ≤ p ≤ n

    乘积即 |Γ(k1-k2+p+½+i√y)/Γ(k1-k2+½+i√y)|²，对任意实 y 成立。
    """
    k1, k2, y = case.param("k1"), case.param("k2"), case.param("y")
    n, p = case.integer("n"), case.integer("p")
    if not 0 <= p <= n:
        raise UnsupportedArgument(f"shift needs 0 <= p <= n, got n={n}, p={p}")
    lhs = cdh_unrestricted(n, y, k1 - k2 + 0.5, k1 + k2 - 0.5, k2 - k1 - p + 0.5)
    factor = math.prod((k1 - k2 + 0.5 + m) ** 2 + y for m in range(p))
    rhs = _sign(p) * factor * cdh_unrestricted(n - p, y, k2 - k1 + 0.5, k1 + k2 - 0.5, k1 - k2 + p + 0.5)
    return VerificationReport.compare(case, lhs, rhs, terms_used=n + 1)


def grid_eqS_shift(config: RunConfig) -> List[IdentityCase]:
    tolerance = config.tolerance_for("eqS_shift", 1e-9)
    rng = grid_rng(config.seed, "eqS_shift")
    cases = []
    for i in range(config.samples):
        k1 = rng.uniform(0.1, 1.0)
        n = int(rng.integers(0, 9))
        params = {
            "k1": k1,
            "k2": k1 + rng.uniform(0.0, 1.5),
            "y": rng.uniform(-1.0, 6.0),
            "n": n,
            "p": int(rng.integers(0, n + 1)),
        }
        cases.append(make_case("eqS_shift", "shift", i, params, tolerance))
    return cases


# ==================== Poisson 核 ====================

def check_annulus(c: float, s: float, t: float):
    """√(cs) < |t| < 1/√(cs)，且与边界相距至少 ANNULUS_MARGIN"""
    inner = math.sqrt(c * s)
    outer = 1.0 / inner
    size = abs(t)
    if not inner < size < outer:
        raise AnnulusError(f"|t|={size} lies outside the annulus ({inner:.6f}, {outer:.6f})")
    if min(size - inner, outer - size) < ANNULUS_MARGIN:
        raise AnnulusError(f"|t|={size} is within {ANNULUS_MARGIN} of the annulus boundary")


def poisson_kernel_closed(x: int, y: int, c: float, s: float, rho: float, eps: float, t: float) -> complex:
    """
    Σ_n m̂_n(x;-½+iρ,ε,c) m̂_n(y;-½+iρ,ε,s) t^n 的闭式，t > 0

    x ≥ y 时含 (√s t-√c)^{x-y} 与 2F1(-y-ε+½±iρ; 1+x-y; A)/Γ(1+x-y)；
    x < y 时把 (√s t-√c)^{x-y} A^{y-x} 合并，超几何部分按指标平移改写。
    """
    if t <= 0:
        raise UnsupportedArgument(f"closed form is evaluated for t > 0, got {t}")
    root_c, root_s = math.sqrt(c), math.sqrt(s)
    A = (root_c - root_s * t) * (root_c - root_s / t) / ((1.0 - c) * (s - 1.0))
    log_common = (
        y * math.log(t)
        + (2 * eps + y) * (math.log1p(-s) + math.log1p(-c))
        - (2 * eps + x + y) * math.log(1.0 - math.sqrt(c * s) * t)
        + 0.5 * x * math.log(c)
        + 0.5 * y * math.log(s)
        + 2.0 * log_gamma(x + eps + 0.5 + 1j * rho).real
    )
    common = math.exp(log_common)
    if x >= y:
        d = x - y
        a = -y - eps + 0.5 + 1j * rho
        hyper = gauss_2f1(a, a.conjugate(), 1 + d, A) / math.factorial(d)
        return common * (root_s * t - root_c) ** d * hyper
    r = y - x
    shifted = ((root_s / t - root_c) / ((1.0 - c) * (s - 1.0))) ** r
    poch = abs(pochhammer(-y - eps + 0.5 + 1j * rho, r)) ** 2 / math.factorial(r)
    a = -x - eps + 0.5 + 1j * rho
    return common * shifted * poch * gauss_2f1(a, a.conjugate(), 1 + r, A)


def verify_poisson_kernel(case: IdentityCase) -> VerificationReport:
    """
    Meixner 函数的非对称 Poisson 核

    kernel: 双边级数 vs 闭式
    dual:   t=1, s=c 时 Σ_n m̂_n(x) m̂_n(y) √(w̃(x)w̃(y)) = δ_xy
    swap:   闭式在 (x,c) ↔ (y,s) 交换下不变
    """
    x, y = case.integer("x"), case.integer("y")
    c, rho, eps = case.param("c"), case.param("rho"), case.param("eps")
    max_terms = case.truncation or 2000
    if case.variant == "dual":
        params = MeixnerFunctionParams.principal(rho, eps, c)
        total = bilateral_sum(
            lambda n: meixner_function_normalized(n, x, params) * meixner_function_normalized(n, y, params),
            max_terms=max_terms,
            floor_ratio=c,
        )
        return VerificationReport.compare(
            case, total.value, 1.0 if x == y else 0.0, total.terms_used, total.tail_estimate
        )

    s, t = case.param("s"), case.param("t")
    check_annulus(c, s, t)
    if case.variant == "swap":
        lhs = poisson_kernel_closed(x, y, c, s, rho, eps, t)
        rhs = poisson_kernel_closed(y, x, s, c, rho, eps, t)
        return VerificationReport.compare(case, lhs, rhs)

    left = MeixnerFunctionParams.principal(rho, eps, c)
    right = MeixnerFunctionParams.principal(rho, eps, s)
    root = math.sqrt(c * s)
    total = bilateral_sum(
        lambda n: meixner_function(n, x, left) * meixner_function(n, y, right) * t ** n,
        max_terms=max_terms,
        floor_ratio=max(root * t, root / t),
    )
    rhs = poisson_kernel_closed(x, y, c, s, rho, eps, t)
    return VerificationReport.compare(case, total.value, rhs, total.terms_used, total.tail_estimate)


_POISSON_XY = ((0, 0), (2, -1), (-3, 1))
_POISSON_CS = ((0.3, 0.3), (0.3, 0.6))
_POISSON_RHO = (0.5, 1.5)
_POISSON_EPS = (0.2, 0.7)


def grid_poisson_kernel(config: RunConfig) -> List[IdentityCase]:
    kernel_tol = config.tolerance_for("poisson_kernel", 1e-7)
    dual_tol = config.tolerance_for("poisson_kernel", 1e-6)
    cases = []
    index = 0
    for x, y in _POISSON_XY:
        for c, s in _POISSON_CS:
            ts = list(config.poisson_t) + [config.poisson_t_factor * math.sqrt(c * s)]
            for rho in _POISSON_RHO:
                for eps in _POISSON_EPS:
                    for t in ts:
                        params = {"x": x, "y": y, "c": c, "s": s, "rho": rho, "eps": eps, "t": t}
                        cases.append(make_case("poisson_kernel", "kernel", index, params, kernel_tol, config.max_terms))
                        index += 1
    index = 0
    for x, y in _POISSON_XY + ((1, 1), (0, 2)):
        for rho in _POISSON_RHO:
            for eps in _POISSON_EPS:
                params = {"x": x, "y": y, "c": 0.3, "rho": rho, "eps": eps}
                cases.append(make_case("poisson_kernel", "dual", index, params, dual_tol, config.max_terms))
                index += 1
    index = 0
    for x, y in _POISSON_XY:
        for rho in _POISSON_RHO:
            for eps in _POISSON_EPS:
                params = {"x": x, "y": y, "c": 0.3, "s": 0.6, "rho": rho, "eps": eps, "t": 0.8}
                cases.append(make_case("poisson_kernel", "swap", index, params, kernel_tol))
                index += 1
    return cases


# ==================== 生成函数 ====================

def meixner_generating_coefficients(k: float, c: float, x: int, order: int) -> np.ndarray:
    """
    (1-z/√c)^x (1-√c z)^{-x-2k} 的 Taylor 系数 0..order

    两个二项式因子的系数分别递推，再做卷积。
    """
    root = math.sqrt(c)
    first = np.zeros(order + 1)
    first[0] = 1.0
    for j in range(1, min(x, order) + 1):
        first[j] = first[j - 1] * (x - j + 1) / j * (-1.0 / root)
    second = np.zeros(order + 1)
    second[0] = 1.0
    for m in range(1, order + 1):
        second[m] = second[m - 1] * (x + 2 * k + m - 1) / m * root
    return np.convolve(first, second)[: order + 1]


def _basis_scale(k: float, n: int) -> float:
    """√((2k)_n / n!)"""
    return math.exp(0.5 * (math.lgamma(2 * k + n) - math.lgamma(2 * k) - math.lgamma(n + 1)))


def _meixner_log_derivative(k: float, c: float, x: int, z: complex) -> complex:
    """(1-z/√c)^x (1-√c z)^{-x-2k} 的对数导数"""
    root = math.sqrt(c)
    return -x / (root - z) + root * (x + 2 * k) / (1 - root * z)


def verify_generating_functions(case: IdentityCase) -> VerificationReport:
    """
    生成函数

    meixner:           Σ √((2k)_n/n!) M̂_n(x;2k,c) z^n 的系数与闭式 Taylor 系数（n ≤ 30）
    meixner_conjugate: 反全纯实现 v⁻_x(w̄) 的级数与闭式在一点比较
    meixner_ode:       闭式满足 π⁺(X_c) 本征方程对应的一阶 ODE
    cdh:               Σ S_n t^n/(n!(a+c)_n) = (1-t)^{-b+ix} 2F1(a+ix, c+ix; a+c; t)
    cdh_gamma:         Σ (γ)_n S_n t^n/((a+b)_n(a+c)_n n!) = (1-t)^{-γ} 3F2(γ, a±ix; a+b, a+c; t/(t-1))
    """
    variant = case.variant
    if variant in ("meixner", "meixner_conjugate", "meixner_ode"):
        k, c, x = case.param("k"), case.param("c"), case.integer("x")
        mp = MeixnerParams(beta=2 * k, c=c)
        if variant == "meixner":
            order = case.truncation or 30
            closed = meixner_generating_coefficients(k, c, x, order)
            series = np.array([_basis_scale(k, n) * meixner_orthonormal(n, x, mp) for n in range(order + 1)])
            deviation = float(np.max(np.abs(closed - series)) / np.max(np.abs(series)))
            return VerificationReport.compare(case, deviation, 0.0, terms_used=order + 1)
        if variant == "meixner_conjugate":
            wbar = _complex_param(case, "w").conjugate()
            root = math.sqrt(c)
            closed = (1 - wbar / root) ** x * (1 - root * wbar) ** (-x - 2 * k)
            total = forward_sum(
                lambda n: _basis_scale(k, n) * meixner_orthonormal(n, x, mp) * wbar ** n,
                floor_ratio=abs(wbar) * root,
            )
            return VerificationReport.compare(case, total.value, closed, total.terms_used, total.tail_estimate)
        z = _complex_param(case, "z")
        L = _meixner_log_derivative(k, c, x, z)
        root = math.sqrt(c)
        lhs = -(1 + c) / (2 * root) * (2 * z * L + 2 * k) + (z * z + 1) * L + 2 * k * z
        return VerificationReport.compare(case, lhs, (c - 1.0) * (x + k) / root)

    a, b, c = case.param("a"), case.param("b"), case.param("c")
    x, t = case.param("x"), case.param("t")
    params = CDHParams(a=a, b=b, c=c)
    y = x * x
    if variant == "cdh":
        total = forward_sum(
            lambda n: cdh(n, y, params) * t ** n / (math.factorial(n) * pochhammer(a + c, n)),
            floor_ratio=abs(t),
        )
        closed = (1 - t) ** complex(-b, x) * gauss_2f1(a + 1j * x, c + 1j * x, a + c, t)
        return VerificationReport.compare(case, total.value, closed, total.terms_used, total.tail_estimate)
    gamma_ = case.param("gamma")
    total = forward_sum(
        lambda n: (
            pochhammer(gamma_, n) * cdh(n, y, params) * t ** n
            / (pochhammer(a + b, n) * pochhammer(a + c, n) * math.factorial(n))
        ),
        floor_ratio=abs(t),
    )
    closed = (1 - t) ** (-gamma_) * hyp_3f2(gamma_, a + 1j * x, a - 1j * x, a + b, a + c, t / (t - 1))
    return VerificationReport.compare(case, total.value, closed, total.terms_used, total.tail_estimate)


_MEIXNER_GENERATING_POINTS = ((0.7, 0.4, 0), (1.2, 0.3, 3))


def grid_generating_functions(config: RunConfig) -> List[IdentityCase]:
    tolerance = config.tolerance_for("generating_functions", 1e-10)
    cases = []
    for i, (k, c, x) in enumerate(_MEIXNER_GENERATING_POINTS):
        cases.append(make_case("generating_functions", "meixner", i, {"k": k, "c": c, "x": x}, tolerance, 30))

    samples = min(config.samples, HEAVY_SAMPLES)
    rng = grid_rng(config.seed, "generating_functions/meixner_conjugate")
    for i in range(samples):
        w = _random_disk_point(rng, 0.8)
        params = {
            "k": rng.uniform(0.2, 1.5),
            "c": rng.uniform(0.1, 0.9),
            "x": int(rng.integers(0, 6)),
            "w_re": w.real,
            "w_im": w.imag,
        }
        cases.append(make_case("generating_functions", "meixner_conjugate", i, params, tolerance))

    rng = grid_rng(config.seed, "generating_functions/meixner_ode")
    for i in range(samples):
        z = _random_disk_point(rng, 0.9)
        params = {
            "k": rng.uniform(0.2, 1.5),
            "c": rng.uniform(0.1, 0.9),
            "x": int(rng.integers(0, 8)),
            "z_re": z.real,
            "z_im": z.imag,
        }
        cases.append(make_case("generating_functions", "meixner_ode", i, params, tolerance))

    for variant, t_range in (("cdh", 0.6), ("cdh_gamma", 0.45)):
        rng = grid_rng(config.seed, f"generating_functions/{variant}")
        for i in range(samples):
            params = {
                "a": rng.uniform(0.2, 1.5),
                "b": rng.uniform(0.2, 1.5),
                "c": rng.uniform(0.2, 1.5),
                "x": rng.uniform(0.0, 3.0),
                "t": rng.uniform(-t_range, t_range),
            }
            if variant == "cdh_gamma":
                params["gamma"] = rng.uniform(0.3, 2.5)
            cases.append(make_case("generating_functions", variant, i, params, tolerance))
    return cases


# ==================== 积分实现的一致性 ====================

def _test_function(y: float) -> float:
    """检验函数 f(y) = e^{-y}"""
    return math.exp(-y)


def _spectral_weight(rho: float, k1: float, k2: float) -> float:
    """f(ρ²)|Γ(k2-k1+½+iρ)Γ(k1+k2-½+iρ)/Γ(2iρ)| / √(2πΓ(2k1)Γ(2k2))"""
    log_value = (
        log_gamma(k2 - k1 + 0.5 + 1j * rho).real
        + log_gamma(k1 + k2 - 0.5 + 1j * rho).real
        - log_gamma(2j * rho).real
        - 0.5 * (_LOG_2PI + math.lgamma(2 * k1) + math.lgamma(2 * k2))
    )
    return _test_function(rho * rho) * math.exp(log_value)


def _rho_integral(integrand: Callable[[float], complex]) -> complex:
    nodes, weights = gauss_legendre_nodes(RHO_MAX, RHO_PANELS, RHO_NODES)
    return sum(float(w) * integrand(float(rho)) for rho, w in zip(nodes, weights))


def _jacobi_factor(rho: float, shift: int, k1: float, k2: float, argument: complex) -> complex:
    """|Γ(shift+k1-k2+½+iρ)| · 2F1(k2-k1+½±iρ; 1+shift; argument)/Γ(1+shift)"""
    alpha = k2 - k1 + 0.5
    scaled = gauss_2f1_regularized_scaled(alpha + 1j * rho, alpha - 1j * rho, 1 + shift, argument)
    if scaled.mantissa == 0:
        return 0j
    log_abs = log_gamma(shift + k1 - k2 + 0.5 + 1j * rho).real
    return scaled.mantissa * math.exp(scaled.log_scale + log_abs)


def f_tensor_v_sum(k1: float, k2: float, c: float, x: int, z: complex, wbar: complex) -> complex:
    """
    (f ⊗ v_{x-L})(z, w̄)：内层对 n 的双边和（Meixner 函数的非对称 Poisson 核）再对 ρ 积分
    """
    spec = decomposition_spec(TensorPair(k1=k1, k2=k2))
    zeta = z * wbar / (z * wbar - 1)

    def integrand(rho: float) -> complex:
        params = MeixnerFunctionParams.principal(rho, spec.epsilon, c)

        def term(n: int) -> complex:
            component = meixner_function_normalized(n - spec.L, x - spec.L, params)
            if component == 0.0:
                return 0j
            return component * _jacobi_factor(rho, n, k1, k2, zeta) * z ** n

        inner = bilateral_sum(term, tol=1e-15, consecutive_small=6, max_terms=400)
        return _spectral_weight(rho, k1, k2) * inner.value

    return (1 - z * wbar) ** (-2 * k2) * _rho_integral(integrand)


def f_tensor_v_closed(k1: float, k2: float, c: float, x: int, z: complex, wbar: complex) -> complex:
    """
    (f ⊗ v_{x-L})(z, w̄)：由 v⁺⊗v⁻ 的闭式与 Z = (√c-z)/(1-z√c) 代换得到的单积分形式
    """
    root = math.sqrt(c)
    Z = (root - z) / (1 - z * root)
    W = (root - wbar) / (1 - wbar * root)
    prefactor = (
        _sign(x)
        * (1 - z * root) ** (-2 * k1)
        * (1 - wbar * root) ** (-2 * k2)
        * (1 - c) ** (k1 + k2)
        * Z ** x
        * (1 - Z * W) ** (-2 * k2)
    )
    argument = Z * W / (Z * W - 1)
    integral = _rho_integral(lambda rho: _spectral_weight(rho, k1, k2) * _jacobi_factor(rho, x, k1, k2, argument))
    return prefactor * integral


def f_tensor_e_closed(k1: float, k2: float, r: int, z: complex, wbar: complex) -> complex:
    """(f ⊗ e_{r-L})(z, w̄)，r ≥ 0 的单积分闭式"""
    zeta = z * wbar / (z * wbar - 1)
    integral = _rho_integral(lambda rho: _spectral_weight(rho, k1, k2) * _jacobi_factor(rho, r, k1, k2, zeta))
    return z ** r * (1 - z * wbar) ** (-2 * k2) * integral


def f_tensor_e_series(
    k1: float, k2: float, r: int, z: complex, wbar: complex, dim: int, x_max: float = RHO_MAX + 1.0
) -> complex:
    """Σ_p (-1)^p [∫Ŝ_p f dμ] e_{p+r}(z) e_p(w̄)，系数由 recompose 在 dμ 下给出"""
    pair = TensorPair(k1=k1, k2=k2)
    q = QuadratureSpec(x_max=x_max, panels=max(48, math.ceil(x_max / 0.2)), tail_tol=1e-12)
    coefficients = recompose(_test_function, r, pair, dim, q, squared=False)
    return sum(
        coef * _basis_scale(k1, n1) * z ** n1 * _basis_scale(k2, n2) * wbar ** n2
        for (n1, n2), coef in coefficients.items()
    )


def verify_realization_consistency(case: IdentityCase) -> VerificationReport:
    """
    张量积在 (z, w̄) 函数实现中的两种积分表示

    eigenvector: f ⊗ v_{x-L} 的双边和形式 vs 代换后的单积分形式
    basis:       f ⊗ e_{r-L} 的单积分闭式 vs recompose 系数展开
    """
    k1, k2 = case.param("k1"), case.param("k2")
    z = _complex_param(case, "z")
    wbar = _complex_param(case, "w").conjugate()
    if case.variant == "basis":
        r = case.integer("r")
        if r < 0:
            raise UnsupportedArgument(f"basis realization is evaluated for r >= 0, got {r}")
        dim = case.truncation or 30
        lhs = f_tensor_e_closed(k1, k2, r, z, wbar)
        rhs = f_tensor_e_series(k1, k2, r, z, wbar, dim, case.params.get("x_max", RHO_MAX + 1.0))
        return VerificationReport.compare(case, lhs, rhs, terms_used=dim)
    c, x = case.param("c"), case.integer("x")
    lhs = f_tensor_v_sum(k1, k2, c, x, z, wbar)
    rhs = f_tensor_v_closed(k1, k2, c, x, z, wbar)
    return VerificationReport.compare(case, lhs, rhs, terms_used=RHO_PANELS * RHO_NODES)


_REALIZATION_PAIRS = ((0.5, 0.8), (0.45, 0.7))


def grid_realization_consistency(config: RunConfig) -> List[IdentityCase]:
    tolerance = config.tolerance_for("realization_consistency", 1e-6)
    rng = grid_rng(config.seed, "realization_consistency")
    cases = []
    index = 0
    for k1, k2 in _REALIZATION_PAIRS:
        for x in (-1, 0, 2):
            z, w = _random_disk_point(rng, 0.5), _random_disk_point(rng, 0.5)
            params = {"k1": k1, "k2": k2, "c": 0.3, "x": x, "z_re": z.real, "z_im": z.imag, "w_re": w.real, "w_im": w.imag}
            cases.append(make_case("realization_consistency", "eigenvector", index, params, tolerance))
            index += 1
    index = 0
    for k1, k2 in _REALIZATION_PAIRS:
        for r in (0, 1, 3):
            z, w = _random_disk_point(rng, 0.5), _random_disk_point(rng, 0.5)
            params = {"k1": k1, "k2": k2, "r": r, "z_re": z.real, "z_im": z.imag, "w_re": w.real, "w_im": w.imag}
            if config.x_max is not None:
                params["x_max"] = config.x_max
            cases.append(make_case("realization_consistency", "basis", index, params, tolerance, 30))
            index += 1
    return cases


# ==================== Saalschütz 与对偶正交性 ====================

def verify_saalschutz(case: IdentityCase) -> VerificationReport:
    """3F2(-n, a, b; c, 1+a+b-c-n; 1) = (c-a)_n (c-b)_n / ((c)_n (c-a-b)_n)"""
    n = case.integer("n")
    a, b, c = case.param("a"), case.param("b"), case.param("c")
    lhs = hyp_3f2_terminating(n, a, b, c, 1 + a + b - c - n)
    rhs = pochhammer(c - a, n) * pochhammer(c - b, n) / (pochhammer(c, n) * pochhammer(c - a - b, n))
    return VerificationReport.compare(case, lhs, rhs, terms_used=n + 1)


def _min_shifted_distance(value: float, n: int) -> float:
    """min_{0≤j<n} |value + j|"""
    return min((abs(value + j) for j in range(n)), default=1.0)


def grid_saalschutz(config: RunConfig) -> List[IdentityCase]:
    tolerance = config.tolerance_for("saalschutz", 1e-10)
    rng = grid_rng(config.seed, "saalschutz")
    cases = []
    while len(cases) < config.samples:
        n = int(rng.integers(0, 11))
        a, b, c = rng.uniform(0.1, 3.0), rng.uniform(0.1, 3.0), rng.uniform(0.5, 4.0)
        # 分母因子远离零
        if min(_min_shifted_distance(c - a - b, n), _min_shifted_distance(1 + a + b - c - n, n)) < 0.05:
            continue
        params = {"n": n, "a": a, "b": b, "c": c}
        cases.append(make_case("saalschutz", "balanced", len(cases), params, tolerance))
    return cases


def _function_params_from_case(case: IdentityCase, c: float) -> MeixnerFunctionParams:
    if "rho" in case.params:
        return MeixnerFunctionParams.principal(case.param("rho"), case.param("eps"), c)
    return MeixnerFunctionParams.real(case.param("lam"), case.param("eps"), c)


def verify_dual_orthogonality(case: IdentityCase) -> VerificationReport:
    """
    正交性与对偶正交性

    polynomial:              Σ_n M̂_n(x) M̂_n(y) √(w(x)w(y)) = δ_xy
    function:                Σ_n m̂_n(x) m̂_n(y) √(w̃(x)w̃(y)) = δ_xy（主系列与补系列）
    function_orthonormality: Σ_x m̂_m(x) m̂_n(x) w̃(x) = δ_mn
    """
    c = case.param("c")
    max_terms = case.truncation or 2000
    if case.variant == "polynomial":
        x, y = case.integer("x"), case.integer("y")
        mp = MeixnerParams(beta=case.param("beta"), c=c)
        scale = math.sqrt(meixner_weight(x, mp) * meixner_weight(y, mp))
        total = forward_sum(
            lambda n: meixner_orthonormal(n, x, mp) * meixner_orthonormal(n, y, mp) * scale,
            max_terms=max_terms,
            floor_ratio=c,
        )
        target = 1.0 if x == y else 0.0
    else:
        params = _function_params_from_case(case, c)
        dual = case.variant == "function"
        first, second = (case.integer("x"), case.integer("y")) if dual else (case.integer("m"), case.integer("n"))

        def term(j: int) -> float:
            # dual: 对次数 j 求和；orthonormality: 对格点 j 求和
            if dual:
                return meixner_function_normalized(j, first, params) * meixner_function_normalized(j, second, params)
            return meixner_function_normalized(first, j, params) * meixner_function_normalized(second, j, params)

        total = bilateral_sum(term, max_terms=max_terms, floor_ratio=math.sqrt(c))
        target = 1.0 if first == second else 0.0
    return VerificationReport.compare(case, total.value, target, total.terms_used, total.tail_estimate)


_DUAL_FUNCTION_PARAMS = (
    {"rho": 0.5, "eps": 0.2},
    {"rho": 1.5, "eps": 0.7},
    {"lam": -0.35, "eps": 0.2},
    {"lam": -0.4, "eps": 0.7},
)
_DUAL_PAIRS = ((0, 0), (1, -2), (3, 3), (-2, -2), (0, 1))


def grid_dual_orthogonality(config: RunConfig) -> List[IdentityCase]:
    tolerance = config.tolerance_for("dual_orthogonality", 1e-8)
    cases = []
    rng = grid_rng(config.seed, "dual_orthogonality/polynomial")
    for i in range(min(config.samples, HEAVY_SAMPLES)):
        params = {
            "beta": rng.uniform(0.2, 3.0),
            "c": rng.uniform(0.1, 0.6),
            "x": int(rng.integers(0, 6)),
            "y": int(rng.integers(0, 6)),
        }
        cases.append(make_case("dual_orthogonality", "polynomial", i, params, tolerance, config.max_terms))
    for variant, names in (("function", ("x", "y")), ("function_orthonormality", ("m", "n"))):
        index = 0
        for extra in _DUAL_FUNCTION_PARAMS:
            for c in (0.3, 0.6):
                for first, second in _DUAL_PAIRS:
                    params = {**extra, "c": c, names[0]: first, names[1]: second}
                    cases.append(make_case("dual_orthogonality", variant, index, params, tolerance, config.max_terms))
                    index += 1
    return cases


# ==================== 表示的矩阵检查 ====================

_SERIES_POINTS: Dict[str, Dict[str, float]] = {
    "positive": {"k": 0.7},
    "negative": {"k": 1.2},
    "principal": {"rho": 0.8, "epsilon": 0.3},
    "complementary": {"lam": -0.35, "epsilon": 0.2},
}


def series_from_case(case: IdentityCase) -> Series:
    """用例的 variant 为系列名，参数为系列标签字段"""
    kind = case.variant
    if kind == "positive":
        return PositiveDiscrete(k=case.param("k"))
    if kind == "negative":
        return NegativeDiscrete(k=case.param("k"))
    if kind == "principal":
        return Principal(rho=case.param("rho"), epsilon=case.param("epsilon"))
    if kind == "complementary":
        return Complementary(lam=case.param("lam"), epsilon=case.param("epsilon"))
    raise UnsupportedArgument(f"unknown series kind '{kind}'")


def _eigen_indices(s: Series) -> range:
    return range(0, 6) if isinstance(s, (PositiveDiscrete, NegativeDiscrete)) else range(-5, 6)


def verify_xc_eigenvector(case: IdentityCase) -> VerificationReport:
    """‖X_c v - λv‖/‖v‖ 在窗口内部的最大值，|x| ≤ 5"""
    s = series_from_case(case)
    c = case.param("c")
    dim = case.truncation or 400
    A = generator_matrix(s, Generator(name=GeneratorName.XC, c=c), dim)
    worst = max(eigen_residual(A, xc_eigenvector(s, x, c, dim), s) for x in _eigen_indices(s))
    return VerificationReport.compare(case, worst, 0.0, terms_used=dim)


def verify_conjugated_action(case: IdentityCase) -> VerificationReport:
    s = series_from_case(case)
    report = conjugated_action_check(
        s, case.param("c"), case.truncation or 400, xs=_eigen_indices(s), tolerance=case.tolerance
    )
    return report.model_copy(update={"id": case.id, "params": dict(case.params)})


def verify_commutator(case: IdentityCase) -> VerificationReport:
    report = commutator_check(
        series_from_case(case), case.truncation or 60, c=case.param("c"), tolerance=case.tolerance
    )
    return report.model_copy(update={"id": case.id, "params": dict(case.params)})


def _series_grid(identity: str, default_tol: float, dim: int = 0) -> GridBuilder:
    """dim 为 0 时取配置中的截断维数"""
    def build(config: RunConfig) -> List[IdentityCase]:
        tolerance = config.tolerance_for(identity, default_tol)
        size = dim or config.dim
        return [
            make_case(identity, kind, 0, {**params, "c": 0.3}, tolerance, size)
            for kind, params in _SERIES_POINTS.items()
        ]
    return build


def verify_coupled_eigenvector(case: IdentityCase) -> VerificationReport:
    """v⁺_{x1} ⊗ v⁻_{x2} 在 ΔX_c 下的本征性与 dν 积分表示"""
    pair = TensorPair(k1=case.param("k1"), k2=case.param("k2"))
    q = None
    if "x_max" in case.params:
        x_max = case.param("x_max")
        q = QuadratureSpec(x_max=x_max, panels=max(64, math.ceil(x_max / 0.48)), tail_tol=1e-12)
    report = coupled_eigenvector_check(
        case.integer("x1"), case.integer("x2"), pair, case.param("c"),
        dim=case.truncation or 300, q=q, tolerance=case.tolerance,
    )
    return report.model_copy(update={"id": case.id, "params": dict(case.params)})


def grid_coupled_eigenvector(config: RunConfig) -> List[IdentityCase]:
    tolerance = config.tolerance_for("coupled_eigenvector", 1e-7)
    extra = {} if config.x_max is None else {"x_max": config.x_max}
    return [
        make_case(
            "coupled_eigenvector", "continuous", i,
            {"k1": 0.5, "k2": 0.8, "c": 0.3, "x1": x1, "x2": x2, **extra}, tolerance, 300,
        )
        for i, (x1, x2) in enumerate(((0, 0), (2, 1), (1, 3)))
    ]


# ==================== 注册表 ====================

class IdentityEngine(NamedTuple):
    """注册表条目：验证函数与默认网格"""
    verify: Engine
    grid: GridBuilder
    description: str


REGISTRY: Dict[str, IdentityEngine] = {
    "conti1": IdentityEngine(verify_conti1, grid_conti1, "Contiguous relation of Ŝ_n in the third parameter and its companion"),
    "2f1_contiguous": IdentityEngine(verify_2f1_contiguous, grid_2f1_contiguous, "Two contiguous relations of Gauss 2F1"),
    "bilinear_sum": IdentityEngine(verify_bilinear_sum, grid_bilinear_sum, "Bilinear sum of CDH and Meixner polynomials and its branch equality"),
    "eqS_shift": IdentityEngine(verify_eqS_shift, grid_eqS_shift, "Parameter shift of S_n across sectors"),
    "poisson_kernel": IdentityEngine(verify_poisson_kernel, grid_poisson_kernel, "Non-symmetric Poisson kernel for Meixner functions"),
    "generating_functions": IdentityEngine(verify_generating_functions, grid_generating_functions, "Meixner and CDH generating functions"),
    "realization_consistency": IdentityEngine(verify_realization_consistency, grid_realization_consistency, "Integral realizations of f⊗v and f⊗e"),
    "saalschutz": IdentityEngine(verify_saalschutz, grid_saalschutz, "Pfaff-Saalschütz summation"),
    "dual_orthogonality": IdentityEngine(verify_dual_orthogonality, grid_dual_orthogonality, "Orthogonality and dual orthogonality of Meixner polynomials and functions"),
    "xc_eigenvector": IdentityEngine(verify_xc_eigenvector, _series_grid("xc_eigenvector", 1e-8), "X_c eigenvector residuals in all four series"),
    "conjugated_action": IdentityEngine(verify_conjugated_action, _series_grid("conjugated_action", 1e-8), "Actions of H_c, B_c, C_c on X_c eigenvectors"),
    "commutator": IdentityEngine(verify_commutator, _series_grid("commutator", 1e-10, 60), "Commutation relations and Casimir on truncations"),
    "coupled_eigenvector": IdentityEngine(verify_coupled_eigenvector, grid_coupled_eigenvector, "Tensor product eigenvectors of ΔX_c"),
}


def get_engine(identity: str) -> IdentityEngine:
    engine = REGISTRY.get(identity)
    if engine is None:
        known = ", ".join(sorted(REGISTRY))
        raise UnknownIdentityError(f"Unknown identity '{identity}'. Known identities: {known}")
    return engine


def build_grid(identity: str, config: RunConfig) -> List[IdentityCase]:
    """按配置生成某个恒等式的全部用例，按 id 排序"""
    cases = get_engine(identity).grid(config)
    return sorted(cases, key=lambda case: case.id)


def run_case(case: IdentityCase) -> VerificationReport:
    """
    执行单个用例

    只有 Poisson 环域之外或超几何级数收敛半径之外的点记为 SKIPPED；
    其余库异常（溢出、非法参数、级数不收敛）与参数校验失败记为 FAIL 并附带消息。
    """
    engine = get_engine(case.identity)
    try:
        return engine.verify(case)
    except (AnnulusError, SeriesRadiusError) as e:
        logger.debug(f"Case {case.id} skipped: {e}")
        return VerificationReport.skipped(case, str(e))
    except (SU11Error, ValueError, ArithmeticError) as e:
        logger.warning(f"Case {case.id} failed with {type(e).__name__}: {e}")
        return VerificationReport.failed(case, f"{type(e).__name__}: {e}")


def identity_names(selected: Optional[Sequence[str]] = None) -> List[str]:
    """verify all 运行的恒等式列表；selected 为空时取注册表全部"""
    names = list(selected) if selected else sorted(REGISTRY)
    for name in names:
        get_engine(name)
    return names
