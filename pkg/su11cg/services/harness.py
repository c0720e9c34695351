"""
验证运行服务
按运行配置生成网格、并行执行用例、组装报告并写出 JSON/CSV
"""
import asyncio
import csv
import io
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from su11cg.core.schemas import (
    CaseStatus,
    IdentityCase,
    OutputFormat,
    RngInfo,
    RunConfig,
    RunReport,
    VerificationReport,
)
from su11cg.services.identities import build_grid, get_engine, identity_names, run_case
from su11cg.utils.logger import get_logger

logger = get_logger(__name__)

ALL_IDENTITIES = "all"

CSV_FIELDS = (
    "id", "status", "params", "lhs_re", "lhs_im", "rhs_re", "rhs_im",
    "abs_err", "rel_err", "terms_used", "tail_estimate", "message",
)


def make_run_id(identity: str, digest: str) -> str:
    """运行标识只依赖恒等式名与配置摘要"""
    return f"{identity}-{digest[:12]}"


class VerificationService:
    """批量验证服务类"""

    def __init__(self, max_workers: Optional[int] = None):
        self.max_workers = max_workers

    def collect_cases(self, identity: str, config: RunConfig) -> List[IdentityCase]:
        """
        生成一个恒等式（或 all）的全部用例

        Args:
            identity: 恒等式名，或 "all"
            config: 运行配置

        Returns:
            按 id 排序的用例列表
        """
        if identity == ALL_IDENTITIES:
            names = identity_names(config.identities)
        else:
            get_engine(identity)
            names = [identity]
        cases: List[IdentityCase] = []
        for name in names:
            grid = build_grid(name, config)
            logger.info(f"Identity {name}: {len(grid)} cases")
            cases.extend(grid)
        return sorted(cases, key=lambda case: case.id)

    async def run_cases(self, cases: Sequence[IdentityCase], max_workers: int) -> List[VerificationReport]:
        """
        并行执行用例（线程池 + 信号量限流），结果按用例 id 排序

        Args:
            cases: 用例
            max_workers: 同时执行的用例数上限

        Returns:
            报告列表
        """
        semaphore = asyncio.Semaphore(max_workers)

        async def run_one(case: IdentityCase) -> VerificationReport:
            async with semaphore:
                return await asyncio.to_thread(run_case, case)

        reports = await asyncio.gather(*(run_one(case) for case in cases))
        return sorted(reports, key=lambda report: report.id)

    async def verify(self, identity: str, config: RunConfig) -> RunReport:
        """
        执行一次验证运行

        Args:
            identity: 恒等式名，或 "all"
            config: 运行配置

        Returns:
            RunReport
        """
        cases = self.collect_cases(identity, config)
        workers = self.max_workers or config.max_workers
        logger.info(f"Running {len(cases)} cases for '{identity}' with {workers} workers")
        reports = await self.run_cases(cases, workers)

        digest = config.digest()
        run = RunReport(
            run_id=make_run_id(identity, digest),
            config_digest=digest,
            identity=identity,
            rng=RngInfo(seed=config.seed),
            cases=reports,
        )
        logger.info(
            f"Run {run.run_id}: {run.count(CaseStatus.PASS)} passed, "
            f"{run.count(CaseStatus.FAIL)} failed, {run.count(CaseStatus.SKIPPED)} skipped"
        )
        return run

    def run(self, identity: str, config: RunConfig) -> RunReport:
        """verify 的同步入口"""
        return asyncio.run(self.verify(identity, config))


# ==================== 报告输出 ====================

def format_params(params: dict) -> str:
    """CSV 中的参数列：key=value;key=value，按键排序"""
    return ";".join(f"{key}={value!r}" for key, value in sorted(params.items()))


def report_to_json(run: RunReport) -> str:
    return run.model_dump_json(indent=2, exclude_none=True)


def report_to_csv(run: RunReport) -> str:
    """展平为每个用例一行；表头前两行注释记录运行信息"""
    buffer = io.StringIO()
    buffer.write(f"# run_id={run.run_id}\n")
    buffer.write(f"# config_digest={run.config_digest} rng={run.rng.algorithm}:{run.rng.seed}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for case in run.cases:
        writer.writerow([
            case.id,
            case.status.value,
            format_params(case.params),
            repr(case.lhs_re), repr(case.lhs_im),
            repr(case.rhs_re), repr(case.rhs_im),
            repr(case.abs_err), repr(case.rel_err),
            case.terms_used,
            repr(case.tail_estimate),
            case.message or "",
        ])
    return buffer.getvalue()


def render_report(run: RunReport, fmt: OutputFormat) -> str:
    if fmt is OutputFormat.CSV:
        return report_to_csv(run)
    return report_to_json(run)


def write_report(run: RunReport, fmt: OutputFormat, path: Optional[str] = None) -> str:
    """
    写出报告

    Args:
        run: 运行报告
        fmt: 格式
        path: 输出路径，为空时只返回文本

    Returns:
        报告文本
    """
    text = render_report(run, fmt)
    if path:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
        logger.info(f"Report written to {target}")
    return text


def failed_ids(reports: Iterable[VerificationReport]) -> List[str]:
    return [report.id for report in reports if report.status is CaseStatus.FAIL]
