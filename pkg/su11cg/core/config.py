"""
配置管理模块
使用Pydantic Settings管理环境配置，使用INI文件描述单次验证运行
优先级：默认值 < 环境变量(SU11_*) < 配置文件 < 命令行参数
"""
import configparser
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from pydantic import Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from su11cg.core.schemas import RunConfig
from su11cg.utils.exceptions import ConfigError


class Settings(BaseSettings):
    """应用配置"""
    
    # 项目基本信息
    PROJECT_NAME: str = "su11cg"
    VERSION: str = "0.1.1"
    
    # 运行配置
    SEED: int = Field(
        default=0,
        description="随机参数网格种子（Philox计数器生成器的key）"
    )
    OUTPUT_FORMAT: str = Field(
        default="json",
        description="报告格式：json/csv"
    )
    OUTPUT_PATH: Optional[str] = Field(
        default=None,
        description="报告输出路径，为空时写到标准输出"
    )
    CONFIG_PATH: Optional[str] = Field(
        default=None,
        description="默认的运行配置文件路径（INI格式）"
    )
    MAX_WORKERS: int = Field(
        default=4,
        description="并行验证的线程数上限"
    )
    
    # 容差与截断
    TOLERANCE: Optional[float] = Field(
        default=None,
        description="容差，低于配置文件与命令行中的容差设置"
    )
    DIM: int = Field(
        default=400,
        description="截断矩阵维数"
    )
    X_MAX: Optional[float] = Field(
        default=None,
        description="积分截断点，为空时按尾部容差自动选取"
    )
    MAX_TERMS: int = Field(
        default=2000,
        description="双边级数单侧最大项数"
    )
    BILINEAR_MAX_TERMS: int = Field(
        default=600,
        description="双线性生成函数级数最大项数"
    )
    SAMPLES: int = Field(
        default=200,
        description="随机网格的采样点数"
    )
    
    # 日志配置
    LOG_LEVEL: str = Field(
        default="INFO",
        description="日志级别"
    )
    LOG_DIR: str = Field(
        default="./logs",
        description="日志目录"
    )
    LOG_TO_FILE: bool = Field(
        default=True,
        description="是否写入滚动日志文件"
    )
    
    model_config = SettingsConfigDict(
        env_prefix="SU11_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )


# 创建全局配置实例
settings = Settings()


def _float_list(raw: str) -> List[float]:
    return [float(item) for item in raw.split(",") if item.strip()]


def _name_list(raw: str) -> List[str]:
    return [item.strip() for item in raw.split(",") if item.strip()]


def _optional_str(raw: str) -> Optional[str]:
    return raw.strip() or None


# INI 节与键到 RunConfig 字段的映射
_SECTION_KEYS: Dict[str, Dict[str, tuple]] = {
    "run": {
        "seed": ("seed", int),
        "output_path": ("output_path", _optional_str),
        "output_format": ("output_format", str.strip),
        "max_workers": ("max_workers", int),
        "identities": ("identities", _name_list),
    },
    "truncation": {
        "dim": ("dim", int),
        "x_max": ("x_max", float),
        "max_terms": ("max_terms", int),
        "bilinear_max_terms": ("bilinear_max_terms", int),
    },
    "grid": {
        "samples": ("samples", int),
        "poisson_t": ("poisson_t", _float_list),
        "poisson_t_factor": ("poisson_t_factor", float),
    },
}


def load_config_file(path: str) -> Dict[str, Any]:
    """
    读取INI格式的运行配置
    
    Args:
        path: 配置文件路径
    
    Returns:
        RunConfig 字段名到值的映射（仅包含文件中出现的键）
    """
    config_path = Path(path)
    if not config_path.exists():
        raise ConfigError(f"Config file not found: {config_path}")
    
    parser = configparser.ConfigParser()
    # 恒等式名区分大小写（eqS_shift）
    parser.optionxform = str
    try:
        parser.read(config_path, encoding="utf-8")
    except configparser.Error as e:
        raise ConfigError(f"Failed to parse config file {config_path}: {e}") from e
    
    values: Dict[str, Any] = {}
    for section in parser.sections():
        if section == "tolerance":
            tolerances: Dict[str, float] = {}
            for key, raw in parser.items(section):
                try:
                    value = float(raw)
                except ValueError as e:
                    raise ConfigError(f"[tolerance] {key}: not a number: {raw!r}") from e
                if key == "default":
                    values["file_tolerance"] = value
                else:
                    tolerances[key] = value
            values["tolerances"] = tolerances
            continue
        
        known = _SECTION_KEYS.get(section)
        if known is None:
            raise ConfigError(f"Unknown config section [{section}] in {config_path}")
        for key, raw in parser.items(section):
            if key not in known:
                raise ConfigError(f"Unknown key '{key}' in section [{section}]")
            field_name, convert = known[key]
            try:
                values[field_name] = convert(raw)
            except ValueError as e:
                raise ConfigError(f"[{section}] {key}: invalid value {raw!r}") from e
    return values


def _environment_values(env: Settings) -> Dict[str, Any]:
    values: Dict[str, Any] = {
        "seed": env.SEED,
        "output_format": env.OUTPUT_FORMAT,
        "output_path": env.OUTPUT_PATH,
        "max_workers": env.MAX_WORKERS,
        "env_tolerance": env.TOLERANCE,
        "dim": env.DIM,
        "x_max": env.X_MAX,
        "max_terms": env.MAX_TERMS,
        "bilinear_max_terms": env.BILINEAR_MAX_TERMS,
        "samples": env.SAMPLES,
    }
    return {key: value for key, value in values.items() if value is not None}


def build_run_config(
    config_path: Optional[str] = None,
    overrides: Optional[Dict[str, Any]] = None,
    env_factory: Callable[[], Settings] = Settings,
) -> RunConfig:
    """
    合并环境变量、配置文件与命令行参数，生成运行配置
    
    Args:
        config_path: INI配置文件路径，为空时使用 SU11_CONFIG_PATH
        overrides: 命令行参数（值为None的键忽略）
        env_factory: 读取环境变量的工厂，测试时可替换
    
    Returns:
        RunConfig: 校验后的运行配置
    """
    env = env_factory()
    values = _environment_values(env)
    
    path = config_path or env.CONFIG_PATH
    if path:
        values.update(load_config_file(path))
    
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    
    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise ConfigError(f"Invalid run configuration: {e}") from e
