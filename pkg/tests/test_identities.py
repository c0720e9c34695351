"""
恒等式验证引擎与参数网格测试
"""
import pytest

from su11cg.core.schemas import CaseStatus, IdentityCase, RunConfig
from su11cg.services.identities import (
    REGISTRY,
    build_grid,
    check_annulus,
    get_engine,
    grid_rng,
    identity_names,
    make_case,
    meixner_generating_coefficients,
    run_case,
    scaled_cdh_sequence,
)
from su11cg.services.orthopoly import cdh_unrestricted
from su11cg.utils.exceptions import AnnulusError, UnknownIdentityError

SMALL = RunConfig(samples=4)

EXPECTED_IDENTITIES = {
    "conti1", "2f1_contiguous", "bilinear_sum", "eqS_shift", "poisson_kernel",
    "generating_functions", "realization_consistency", "saalschutz", "dual_orthogonality",
    "xc_eigenvector", "conjugated_action", "commutator", "coupled_eigenvector",
}


def test_registry():
    """测试注册表内容"""
    assert set(REGISTRY) == EXPECTED_IDENTITIES
    assert identity_names() == sorted(REGISTRY)
    assert identity_names(["conti1", "saalschutz"]) == ["conti1", "saalschutz"]
    with pytest.raises(UnknownIdentityError):
        get_engine("conti2")
    with pytest.raises(UnknownIdentityError):
        identity_names(["conti1", "bogus"])


def test_grid_rng_is_deterministic():
    """测试 Philox 网格只依赖种子与名称"""
    first = grid_rng(7, "conti1/main").uniform(size=5)
    second = grid_rng(7, "conti1/main").uniform(size=5)
    assert (first == second).all()
    assert not (first == grid_rng(8, "conti1/main").uniform(size=5)).all()
    assert not (first == grid_rng(7, "conti1/companion").uniform(size=5)).all()


@pytest.mark.parametrize("identity", sorted(EXPECTED_IDENTITIES))
def test_grids_are_reproducible(identity):
    """测试同一配置两次生成的网格完全相同，id 唯一且有序"""
    first = build_grid(identity, SMALL)
    second = build_grid(identity, SMALL)
    assert first == second
    ids = [case.id for case in first]
    assert ids == sorted(ids)
    assert len(set(ids)) == len(ids)
    assert all(case.identity == identity for case in first)


def test_seed_changes_random_grids():
    """测试种子改变随机网格"""
    assert build_grid("conti1", SMALL) != build_grid("conti1", RunConfig(samples=4, seed=1))
    assert len(build_grid("conti1", SMALL)) == 8


def test_tolerance_profile():
    """测试容差的优先顺序：命令行 > 单项 > 文件 default > 内置默认"""
    default = build_grid("eqS_shift", SMALL)
    assert {case.tolerance for case in default} == {1e-9}
    custom = build_grid("eqS_shift", RunConfig(samples=4, tolerances={"eqS_shift": 1e-6}))
    assert {case.tolerance for case in custom} == {1e-6}
    fallback = build_grid("eqS_shift", RunConfig(samples=4, file_tolerance=1e-5, tolerances={"conti1": 1e-6}))
    assert {case.tolerance for case in fallback} == {1e-5}
    overall = build_grid("eqS_shift", RunConfig(samples=4, tolerance=1e-4, tolerances={"eqS_shift": 1e-6}))
    assert {case.tolerance for case in overall} == {1e-4}


@pytest.mark.parametrize("identity", ["conti1", "2f1_contiguous", "eqS_shift", "saalschutz"])
def test_cheap_identities_pass(identity):
    """测试代数恒等式在小网格上全部通过"""
    reports = [run_case(case) for case in build_grid(identity, SMALL)]
    failed = [(report.id, report.rel_err, report.message) for report in reports if report.status is CaseStatus.FAIL]
    assert failed == []


def test_meixner_generating_function_cases_pass():
    """测试 Meixner 生成函数的系数比较与一阶 ODE"""
    cases = [
        case for case in build_grid("generating_functions", SMALL)
        if case.variant in ("meixner", "meixner_ode")
    ]
    assert len(cases) == 2 + 4
    for case in cases:
        report = run_case(case)
        assert report.status is CaseStatus.PASS, (report.id, report.abs_err)


def test_meixner_generating_coefficients():
    """测试 x = 0 时只剩 (1-√c z)^{-2k} 的二项式系数"""
    coeffs = meixner_generating_coefficients(0.5, 0.25, 0, 3)
    # (1 - z/2)^{-1}
    assert coeffs == pytest.approx([1.0, 0.5, 0.25, 0.125])


def test_scaled_cdh_sequence_matches_direct_sum():
    """测试缩放递推 G_n = S_n/(n!(n+shift)!) 与直接求和一致"""
    k1, k2, p = 0.6, 0.9, 1
    a, b, c = k2 - k1 + 0.5, k1 + k2 - 0.5, k1 - k2 + p + 0.5
    values = scaled_cdh_sequence(1.3, a, b, c, p, 8)
    for n in range(8):
        direct = cdh_unrestricted(n, 1.3, a, b, c) / (_factorial(n) * _factorial(n + p))
        assert values[n] == pytest.approx(direct, rel=1e-9, abs=1e-14)


def _factorial(n: int) -> float:
    result = 1.0
    for j in range(2, n + 1):
        result *= j
    return result


def test_annulus_check():
    """测试 Poisson 核的环域"""
    check_annulus(0.3, 0.6, 0.8)
    with pytest.raises(AnnulusError):
        check_annulus(0.3, 0.6, 5.0)
    with pytest.raises(AnnulusError):
        check_annulus(0.3, 0.3, 0.3 + 1e-4)


def test_poisson_cases_outside_annulus_are_skipped():
    """测试环域外与贴近边界的 t 记为 SKIPPED"""
    config = RunConfig(samples=1, poisson_t=[5.0], poisson_t_factor=1.0)
    kernel_cases = [case for case in build_grid("poisson_kernel", config) if case.variant == "kernel"]
    assert kernel_cases
    for case in kernel_cases:
        report = run_case(case)
        assert report.status is CaseStatus.SKIPPED
        assert "annulus" in report.message


def test_run_case_error_paths():
    """测试库异常转成 SKIPPED/FAIL，而未知恒等式直接抛出"""
    beyond_radius = run_case(make_case(
        "2f1_contiguous", "three_term", 0,
        {"a_re": 0.5, "a_im": 0.0, "b_re": 0.5, "b_im": 0.0, "c": 1.5, "z_re": 1.5, "z_im": 0.0}, 1e-10,
    ))
    assert beyond_radius.status is CaseStatus.SKIPPED
    invalid = run_case(make_case("conti1", "main", 0, {"a": -0.5, "b": 0.2, "c": 1.5, "n": 1, "y": 0.3}, 1e-10))
    assert invalid.status is CaseStatus.FAIL
    assert invalid.message.startswith("ValidationError")
    with pytest.raises(UnknownIdentityError):
        run_case(IdentityCase(id="nope/0", identity="nope", tolerance=1e-8))


def test_invalid_case_parameters_fail_instead_of_skipping():
    """测试非法参数点记为 FAIL，不混入 SKIPPED"""
    shift = run_case(make_case("eqS_shift", "shift", 0, {"k1": 0.5, "k2": 0.8, "y": 1.0, "n": 1, "p": 3}, 1e-9))
    assert shift.status is CaseStatus.FAIL
    assert shift.message.startswith("UnsupportedArgument")
    params = {"k1": 0.4, "k2": 0.7, "c": 0.4, "y": 1.0, "x1": -1, "x2": 0, "p": -1}
    negative = run_case(make_case("bilinear_sum", "sum", 0, params, 1e-8, 600))
    assert negative.status is CaseStatus.FAIL
    branch = run_case(make_case("bilinear_sum", "branch", 0, {**params, "x1": 1, "p": 1, "y": -0.5}, 1e-8, 600))
    assert branch.status is CaseStatus.FAIL


def test_truncation_profile_reaches_grids():
    """测试截断档案中的 dim 与 x_max 进入用例"""
    config = RunConfig(samples=1, dim=120, x_max=12.0)
    assert {case.truncation for case in build_grid("xc_eigenvector", config)} == {120}
    assert {case.truncation for case in build_grid("commutator", config)} == {60}
    assert all(case.params["x_max"] == 12.0 for case in build_grid("coupled_eigenvector", config))
    basis = [case for case in build_grid("realization_consistency", config) if case.variant == "basis"]
    assert basis and all(case.params["x_max"] == 12.0 for case in basis)
    assert all("x_max" not in case.params for case in build_grid("coupled_eigenvector", SMALL))


def test_unconverged_series_fails():
    """测试截断项数不足以满足停止规则时记为 FAIL"""
    params = {"k1": 0.5, "k2": 0.8, "c": 0.6, "y": 1.0, "x1": 2, "x2": 1, "p": 1}
    report = run_case(make_case("bilinear_sum", "sum", 0, params, 1e-8, 30))
    assert report.status is CaseStatus.FAIL
    assert report.message.startswith("ConvergenceError")


def _failures(reports):
    return [(report.id, report.rel_err, report.message) for report in reports if report.status is CaseStatus.FAIL]


def test_generating_function_variants_pass():
    """测试反全纯实现、CDH 与带 γ 的 CDH 生成函数在小网格上通过"""
    cases = [
        case for case in build_grid("generating_functions", SMALL)
        if case.variant in ("meixner_conjugate", "cdh", "cdh_gamma")
    ]
    assert {case.variant for case in cases} == {"meixner_conjugate", "cdh", "cdh_gamma"}
    assert len(cases) == 3 * 4
    reports = [run_case(case) for case in cases]
    assert _failures(reports) == []
    assert all(report.status is CaseStatus.PASS for report in reports)
    assert all(report.terms_used > 0 for report in reports)


def test_bilinear_sum_grid_passes():
    """测试双线性和：3×3×3 网格上闭式与截断级数一致，且两种分支形式一致"""
    cases = build_grid("bilinear_sum", SMALL)
    sums = [case for case in cases if case.variant == "sum"]
    assert len(sums) == 3 * 3 * 3 * 3 * 2
    reports = [run_case(case) for case in cases]
    assert _failures(reports) == []
    for report in reports:
        assert report.status is CaseStatus.PASS
        if report.id.startswith("bilinear_sum/sum/"):
            assert 0 < report.terms_used <= 600


def test_poisson_kernel_cases_pass():
    """测试 Poisson 核：t = 0.8 的双边和与闭式一致，t = 1、s = c 时退化为 δ_xy"""
    config = RunConfig(samples=1, poisson_t=[0.8], poisson_t_factor=1.2)
    cases = [
        case for case in build_grid("poisson_kernel", config)
        if case.variant in ("dual", "swap") or case.params["t"] == 0.8
    ]
    reports = [run_case(case) for case in cases]
    assert _failures(reports) == []
    passed = [report for report in reports if report.status is CaseStatus.PASS]
    assert len(passed) >= 3 * 2 * 2 * 2 + 5 * 2 * 2
    dual = [report for report in reports if report.id.startswith("poisson_kernel/dual/")]
    assert dual and all(report.status is CaseStatus.PASS for report in dual)
    # δ_xy：对角为 1，非对角为 0
    for report in dual:
        expected = 1.0 if report.params["x"] == report.params["y"] else 0.0
        assert report.rhs == pytest.approx(expected)


def test_realization_consistency_cases_pass():
    """测试 (z, w̄) 实现中 f⊗v 与 f⊗e 的两种积分表示一致"""
    cases = build_grid("realization_consistency", SMALL)
    chosen = [
        next(case for case in cases if case.variant == "eigenvector" and case.params["x"] == 0.0),
        next(case for case in cases if case.variant == "basis" and case.params["r"] == 1.0),
    ]
    for case in chosen:
        report = run_case(case)
        assert report.status is CaseStatus.PASS, (report.id, report.rel_err, report.message)
