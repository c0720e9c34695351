"""
验证运行服务测试
"""
import csv
import io
import json

import pytest

from su11cg.api.dependencies import get_verification_service, reset_verification_service
from su11cg.core.schemas import CaseStatus, OutputFormat, RunConfig, VerificationReport
from su11cg.services.harness import (
    CSV_FIELDS,
    VerificationService,
    failed_ids,
    format_params,
    make_run_id,
    render_report,
    report_to_csv,
    write_report,
)
from su11cg.services.identities import make_case
from su11cg.utils.exceptions import UnknownIdentityError

CONFIG = RunConfig(samples=2, identities=["conti1", "eqS_shift"], max_workers=2)


@pytest.fixture
def service():
    return VerificationService()


def test_collect_cases(service):
    """测试 all 只收集配置中列出的恒等式，结果按 id 排序"""
    cases = service.collect_cases("all", CONFIG)
    assert len(cases) == 2 * 2 + 2
    assert {case.identity for case in cases} == {"conti1", "eqS_shift"}
    ids = [case.id for case in cases]
    assert ids == sorted(ids)
    with pytest.raises(UnknownIdentityError):
        service.collect_cases("bogus", CONFIG)


@pytest.mark.asyncio
async def test_run_cases_keeps_id_order(service):
    """测试并行执行后结果按 id 排序"""
    cases = list(reversed(service.collect_cases("conti1", CONFIG)))
    reports = await service.run_cases(cases, max_workers=3)
    assert [report.id for report in reports] == sorted(case.id for case in cases)
    assert all(report.status is CaseStatus.PASS for report in reports)


@pytest.mark.asyncio
async def test_verify_report_metadata(service):
    """测试运行报告的标识、摘要与随机数说明"""
    run = await service.verify("conti1", CONFIG)
    digest = CONFIG.digest()
    assert run.run_id == f"conti1-{digest[:12]}"
    assert run.config_digest == digest
    assert run.rng.algorithm == "philox"
    assert run.rng.seed == 0
    assert run.all_passed
    assert run.count(CaseStatus.PASS) == 4


def test_run_is_deterministic(service):
    """测试相同配置的两次运行输出完全相同"""
    first = render_report(service.run("eqS_shift", CONFIG), OutputFormat.JSON)
    second = render_report(service.run("eqS_shift", CONFIG), OutputFormat.JSON)
    assert first == second
    assert json.loads(first)["identity"] == "eqS_shift"


def test_digest_ignores_output_location():
    """测试配置摘要不含输出路径与格式"""
    moved = RunConfig(samples=2, identities=["conti1", "eqS_shift"], max_workers=2,
                      output_path="/tmp/report.csv", output_format="csv")
    assert moved.digest() == CONFIG.digest()
    assert RunConfig(samples=2, seed=3).digest() != RunConfig(samples=2).digest()


def test_make_run_id():
    """测试运行标识"""
    assert make_run_id("conti1", "abcdef0123456789") == "conti1-abcdef012345"


def test_format_params():
    """测试参数列按键排序"""
    assert format_params({"b": 1.0, "a": 0.5}) == "a=0.5;b=1.0"


def test_csv_report(service):
    """测试 CSV 报告的注释头与列"""
    run = service.run("conti1", CONFIG)
    text = report_to_csv(run)
    lines = text.splitlines()
    assert lines[0] == f"# run_id={run.run_id}"
    assert lines[1].startswith(f"# config_digest={run.config_digest} rng=philox:0")
    rows = list(csv.reader(io.StringIO("\n".join(lines[2:]))))
    assert tuple(rows[0]) == CSV_FIELDS
    assert len(rows) == 1 + len(run.cases)
    assert rows[1][1] == "PASS"


def test_write_report(tmp_path, service):
    """测试写出报告时创建父目录"""
    run = service.run("conti1", CONFIG)
    target = tmp_path / "reports" / "conti1.json"
    text = write_report(run, OutputFormat.JSON, str(target))
    assert target.read_text(encoding="utf-8") == text
    assert json.loads(text)["run_id"] == run.run_id


def test_failed_ids():
    """测试失败用例列表"""
    case = make_case("conti1", "main", 0, {"n": 0}, 1e-10)
    reports = [
        VerificationReport.failed(case, "boom"),
        VerificationReport.skipped(case.model_copy(update={"id": "conti1/main/0001"}), "outside"),
    ]
    assert failed_ids(reports) == ["conti1/main/0000"]


def test_service_singleton():
    """测试依赖注入的单例"""
    reset_verification_service()
    first = get_verification_service()
    assert get_verification_service() is first
    reset_verification_service()
    assert get_verification_service() is not first
