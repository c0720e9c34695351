"""
命令行接口
eval / verify / spectrum 三个子命令与退出码约定
"""
import argparse
import sys
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, TextIO

from pydantic import ValidationError

from su11cg import __version__
from su11cg.api.dependencies import get_verification_service
from su11cg.core.config import build_run_config
from su11cg.core.schemas import CDHParams, MeixnerFunctionParams, MeixnerParams, OutputFormat, TensorPair
from su11cg.services.coupling import spectral_profile
from su11cg.services.harness import ALL_IDENTITIES, write_report
from su11cg.services.identities import REGISTRY
from su11cg.services.measures import CDHMeasure, cdh_density
from su11cg.services.mfunctions import meixner_function, meixner_function_normalized
from su11cg.services.orthopoly import (
    cdh,
    cdh_orthonormal,
    jacobi_function,
    meixner,
    meixner_orthonormal,
    meixner_weight,
)
from su11cg.services.special import (
    describe_2f1_strategy,
    gauss_2f1,
    gauss_2f1_regularized,
    hyp_3f2,
    log_gamma,
)
from su11cg.utils.exceptions import (
    ConfigError,
    DomainError,
    NumericalError,
    UnknownFunctionError,
    UnknownIdentityError,
)
from su11cg.utils.logger import get_logger, setup_logger

logger = get_logger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3


class UsageError(Exception):
    """命令行参数格式错误"""
    pass


# ==================== eval ====================

Value = complex
Params = Dict[str, Value]


def _real(params: Params, name: str) -> float:
    value = params[name]
    if value.imag != 0:
        raise UsageError(f"parameter '{name}' must be real, got {value}")
    return value.real


def _integer(params: Params, name: str) -> int:
    value = _real(params, name)
    if value != int(value):
        raise UsageError(f"parameter '{name}' must be an integer, got {value}")
    return int(value)


def _function_params(params: Params) -> MeixnerFunctionParams:
    """rho 给出主系列，lam 给出实 λ"""
    if "rho" in params:
        return MeixnerFunctionParams.principal(_real(params, "rho"), _real(params, "eps"), _real(params, "c"))
    if "lam" in params:
        return MeixnerFunctionParams.real(_real(params, "lam"), _real(params, "eps"), _real(params, "c"))
    raise UsageError("meixner_function needs either rho=... or lam=...")


def _meixner_provenance(p: Params) -> str:
    return "2F1 " + describe_2f1_strategy(-p["n"], -p["x"], p["beta"], 1.0 - 1.0 / p["c"])


def _cdh_provenance(p: Params) -> str:
    return "terminating 3F2 sum in mpmath working precision"


def _function_provenance(p: Params) -> str:
    return "regularized 2F1 at c/(c-1), log-scaled prefactors"


class EvalFunction(NamedTuple):
    """eval 注册表条目：必需参数、求值函数与截断说明"""
    required: Sequence[str]
    evaluate: Callable[[Params], Value]
    provenance: Callable[[Params], str]


EVAL_FUNCTIONS: Dict[str, EvalFunction] = {
    "meixner": EvalFunction(
        ("n", "x", "beta", "c"),
        lambda p: meixner(_integer(p, "n"), _real(p, "x"), MeixnerParams(beta=_real(p, "beta"), c=_real(p, "c"))),
        _meixner_provenance,
    ),
    "meixner_orthonormal": EvalFunction(
        ("n", "x", "beta", "c"),
        lambda p: meixner_orthonormal(
            _integer(p, "n"), _real(p, "x"), MeixnerParams(beta=_real(p, "beta"), c=_real(p, "c"))
        ),
        _meixner_provenance,
    ),
    "meixner_weight": EvalFunction(
        ("x", "beta", "c"),
        lambda p: meixner_weight(_integer(p, "x"), MeixnerParams(beta=_real(p, "beta"), c=_real(p, "c"))),
        lambda p: "closed form in log domain",
    ),
    "cdh": EvalFunction(
        ("n", "y", "a", "b", "c"),
        lambda p: cdh(_integer(p, "n"), _real(p, "y"), CDHParams(a=_real(p, "a"), b=_real(p, "b"), c=_real(p, "c"))),
        _cdh_provenance,
    ),
    "cdh_orthonormal": EvalFunction(
        ("n", "y", "a", "b", "c"),
        lambda p: cdh_orthonormal(
            _integer(p, "n"), _real(p, "y"), CDHParams(a=_real(p, "a"), b=_real(p, "b"), c=_real(p, "c"))
        ),
        _cdh_provenance,
    ),
    "cdh_density": EvalFunction(
        ("x", "a", "b", "c"),
        lambda p: cdh_density(_real(p, "x"), CDHMeasure.from_params(_real(p, "a"), _real(p, "b"), _real(p, "c"))),
        lambda p: "log-gamma closed form",
    ),
    "meixner_function": EvalFunction(
        ("n", "x", "eps", "c"),
        lambda p: meixner_function(_integer(p, "n"), _integer(p, "x"), _function_params(p)),
        _function_provenance,
    ),
    "meixner_function_normalized": EvalFunction(
        ("n", "x", "eps", "c"),
        lambda p: meixner_function_normalized(_integer(p, "n"), _integer(p, "x"), _function_params(p)),
        _function_provenance,
    ),
    "jacobi_function": EvalFunction(
        ("alpha", "beta", "sigma", "t"),
        lambda p: jacobi_function(_real(p, "alpha"), _real(p, "beta"), p["sigma"], _real(p, "t")),
        lambda p: "2F1 " + describe_2f1_strategy(
            0.5 * (p["alpha"] + p["beta"] + 1 - 1j * p["sigma"]),
            0.5 * (p["alpha"] + p["beta"] + 1 + 1j * p["sigma"]),
            p["alpha"] + 1,
            -p["t"],
        ),
    ),
    "gauss_2f1": EvalFunction(
        ("a", "b", "c", "z"),
        lambda p: gauss_2f1(p["a"], p["b"], p["c"], p["z"]),
        lambda p: describe_2f1_strategy(p["a"], p["b"], p["c"], p["z"]),
    ),
    "gauss_2f1_regularized": EvalFunction(
        ("a", "b", "c", "z"),
        lambda p: gauss_2f1_regularized(p["a"], p["b"], p["c"], p["z"]),
        lambda p: describe_2f1_strategy(p["a"], p["b"], p["c"], p["z"]),
    ),
    "hyp_3f2": EvalFunction(
        ("a1", "a2", "a3", "b1", "b2", "z"),
        lambda p: hyp_3f2(p["a1"], p["a2"], p["a3"], p["b1"], p["b2"], p["z"]),
        lambda p: f"direct series at |z|={abs(p['z']):.4f}",
    ),
    "log_gamma": EvalFunction(
        ("z",),
        lambda p: log_gamma(p["z"]),
        lambda p: "principal branch",
    ),
}


def parse_assignments(items: Sequence[str]) -> Params:
    """
    解析 key=value 参数，值接受实数或 Python 复数字面量（如 0.5+1j）

    Args:
        items: 命令行中的 key=value 列表

    Returns:
        参数名到复数值的映射
    """
    params: Params = {}
    for item in items:
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise UsageError(f"expected key=value, got '{item}'")
        text = raw.strip().replace("−", "-")
        try:
            params[key.strip()] = complex(float(text))
        except ValueError:
            try:
                params[key.strip()] = complex(text.replace(" ", ""))
            except ValueError as e:
                raise UsageError(f"parameter '{key}' is not a number: '{raw}'") from e
    return params


def format_value(value: Value) -> str:
    """15 位有效数字；虚部为零时只输出实部"""
    value = complex(value)
    if value.imag == 0:
        return f"{value.real:.15g}"
    return f"{value.real:.15g}{value.imag:+.15g}j"


def cmd_eval(function: str, items: Sequence[str], out: TextIO = sys.stdout) -> int:
    """
    对注册表中的函数求值并输出

    Args:
        function: 函数名
        items: key=value 参数
        out: 输出流

    Returns:
        退出码
    """
    entry = EVAL_FUNCTIONS.get(function)
    if entry is None:
        known = ", ".join(sorted(EVAL_FUNCTIONS))
        raise UnknownFunctionError(f"Unknown function '{function}'. Known functions: {known}")
    params = parse_assignments(items)
    missing = [name for name in entry.required if name not in params]
    if missing:
        raise UsageError(f"{function} needs parameters: {', '.join(missing)}")
    value = entry.evaluate(params)
    out.write(format_value(value) + "\n")
    out.write(f"# {function}: {entry.provenance(params)}\n")
    return EXIT_PASS


# ==================== verify ====================

def cmd_verify(args: argparse.Namespace, out: TextIO = sys.stdout) -> int:
    """
    运行恒等式验证，写出报告

    Returns:
        全部 PASS/SKIPPED 时为 0，否则为 1
    """
    if args.identity != ALL_IDENTITIES and args.identity not in REGISTRY:
        known = ", ".join(sorted(REGISTRY))
        raise UnknownIdentityError(f"Unknown identity '{args.identity}'. Known identities: {known}")
    overrides = {
        "tolerance": args.tol,
        "seed": args.seed,
        "output_path": args.out,
        "output_format": args.format,
        "samples": args.samples,
        "max_workers": args.workers,
    }
    config = build_run_config(args.config, overrides)
    run = get_verification_service().run(args.identity, config)
    text = write_report(run, config.output_format, config.output_path)
    if not config.output_path:
        out.write(text if text.endswith("\n") else text + "\n")
    return EXIT_PASS if run.all_passed else EXIT_FAIL


# ==================== spectrum ====================

def cmd_spectrum(args: argparse.Namespace, out: TextIO = sys.stdout) -> int:
    """
    H_p 上截断 Casimir 的谱、离散点预测与偏差

    Returns:
        退出码
    """
    pair = TensorPair(k1=args.k1, k2=args.k2)
    profile = spectral_profile(pair, args.p, args.dim)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(profile.model_dump_json(indent=2))
        logger.info(f"Spectrum written to {args.out}")
        return EXIT_PASS

    out.write(f"# k1={profile.k1} k2={profile.k2} p={profile.p} dim={profile.dim}\n")
    if profile.predicted:
        out.write("# predicted discrete points and deviations\n")
        if profile.extrapolation_dims:
            out.write(f"# extrapolated over dims {profile.extrapolation_dims}\n")
        for i, (point, deviation) in enumerate(zip(profile.predicted, profile.deviations)):
            line = f"predicted {point:.15g} deviation {deviation:.3e}"
            if profile.extrapolated:
                line += (
                    f" extrapolated {profile.extrapolated[i]:.15g}"
                    f" deviation {profile.extrapolated_deviations[i]:.3e}"
                    f" error {profile.extrapolation_errors[i]:.1e}"
                )
            out.write(line + "\n")
    else:
        out.write("# no predicted discrete points\n")
    out.write("# eigenvalues\n")
    for value in profile.eigenvalues:
        out.write(f"{value:.15g}\n")
    return EXIT_PASS


# ==================== 入口 ====================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="su11cg", description="su(1,1) Clebsch-Gordan special functions and identity checks")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help="日志级别（覆盖 SU11_LOG_LEVEL）")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="对单个函数求值")
    p_eval.add_argument("function", help="函数名")
    p_eval.add_argument("params", nargs="*", help="key=value 参数")

    p_verify = sub.add_parser("verify", help="在参数网格上验证恒等式")
    p_verify.add_argument("identity", help=f"恒等式名，或 {ALL_IDENTITIES}")
    p_verify.add_argument("--config", default=None, help="INI 运行配置文件")
    p_verify.add_argument("--tol", type=float, default=None, help="全局容差")
    p_verify.add_argument("--seed", type=int, default=None, help="随机网格种子")
    p_verify.add_argument("--out", default=None, help="报告输出路径")
    p_verify.add_argument("--format", choices=[f.value for f in OutputFormat], default=None, help="报告格式")
    p_verify.add_argument("--samples", type=int, default=None, help="随机网格采样点数")
    p_verify.add_argument("--workers", type=int, default=None, help="并行线程数")

    p_spec = sub.add_parser("spectrum", help="H_p 上 Casimir 的截断谱")
    p_spec.add_argument("--k1", type=float, required=True)
    p_spec.add_argument("--k2", type=float, required=True)
    p_spec.add_argument("--p", type=int, default=0)
    p_spec.add_argument("--dim", type=int, default=400)
    p_spec.add_argument("--out", default=None, help="JSON 输出路径，为空时输出文本表")
    return parser


def main(argv: Optional[List[str]] = None, out: TextIO = sys.stdout) -> int:
    """
    命令行主入口

    退出码：0 通过，1 验证失败，2 用法/配置错误，3 定义域错误

    Args:
        argv: 命令行参数，默认取 sys.argv[1:]
        out: 命令结果输出流

    Returns:
        退出码
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_PASS

    setup_logger(level=args.log_level)
    try:
        if args.command == "eval":
            return cmd_eval(args.function, args.params, out)
        if args.command == "verify":
            return cmd_verify(args, out)
        return cmd_spectrum(args, out)
    except (UsageError, ConfigError, UnknownIdentityError, UnknownFunctionError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_USAGE
    except (DomainError, NumericalError, ValidationError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_DOMAIN
    except (ValueError, ZeroDivisionError, OverflowError) as e:
        logger.error(f"Domain error: {e}")
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
