"""配置管理模块"""

import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml
from pydantic import BaseModel, Field, field_validator

from .models import CorruptionMode, DatasetKind


class Config:
    """全局配置"""

    # 项目路径
    BASE_DIR = Path(__file__).parent.parent
    CONFIG_DIR = BASE_DIR / "config"
    DEFAULTS_FILE = CONFIG_DIR / "defaults.yaml"
    SEVERITY_TABLE_FILE = CONFIG_DIR / "corruption_severity.yaml"

    # 输出根目录可由环境变量覆盖
    OUTPUT_ROOT_ENV = "VIREID_OUTPUT_ROOT"
    OUTPUT_DIR = BASE_DIR / "outputs"

    # 预处理
    IMAGE_WIDTH = 144
    IMAGE_HEIGHT = 288
    CROP_PADDING = 10

    # 实验协议
    DEFAULT_SEED = 0
    DEFAULT_FOLDS = 5
    SYSU_TRIALS = 30
    BATCH_IDENTITIES = 8
    BATCH_INSTANCES = 4

    # 输出
    RUN_CONFIG_NAME = "run_config.yaml"
    METRIC_OPTIONS = ["euclidean", "cosine"]
    MODE_OPTIONS = [m.value for m in CorruptionMode]
    SEVERITY_OPTIONS = ["random", "1", "2", "3", "4", "5"]

    @classmethod
    def output_root(cls) -> Path:
        """默认输出根目录"""
        value = cls.get_env_var(cls.OUTPUT_ROOT_ENV)
        return Path(value) if value else cls.OUTPUT_DIR

    @classmethod
    def ensure_dirs(cls, *extra: Path):
        """确保输出目录存在（只由命令行调用），未指定时创建默认输出根目录"""
        for path in extra or (cls.output_root(),):
            Path(path).mkdir(parents=True, exist_ok=True)

    @classmethod
    def load_defaults(cls) -> dict:
        """加载 config/defaults.yaml"""
        if cls.DEFAULTS_FILE.exists():
            with open(cls.DEFAULTS_FILE, "r", encoding="utf-8") as f:
                return yaml.safe_load(f) or {}
        return {}

    @classmethod
    def get_env_var(cls, key: str, default: Optional[str] = None) -> Optional[str]:
        """获取环境变量"""
        return os.getenv(key, default)


class RunConfig(BaseModel):
    """
    一次运行的完整配置

    解析顺序：defaults.yaml → --config 文件 → 命令行参数（命令行优先）。
    每次运行都会把解析结果原样写入输出目录的 run_config.yaml。
    """

    # 为 None 时使用清单表头中的类型
    dataset_kind: Optional[DatasetKind] = None
    manifest: Optional[str] = None
    image_root: Optional[str] = None
    seed: int = Field(default=Config.DEFAULT_SEED, ge=0, lt=2**64)
    mode: CorruptionMode = CorruptionMode.BOTH
    severity: str = "random"
    severity_table: Optional[str] = None
    redraw_corruption: bool = True
    preset: str = "ML-MDA"
    overrides: Dict[str, Any] = Field(default_factory=dict)
    trials: Optional[int] = Field(default=None, ge=1)
    folds: int = Field(default=Config.DEFAULT_FOLDS, ge=2)
    metric: str = "euclidean"
    normalize: bool = False
    workers: int = Field(default=1, ge=1)
    samples: int = Field(default=4, ge=1)
    out: Optional[str] = None
    log_level: str = "INFO"

    @field_validator("severity")
    @classmethod
    def _check_severity(cls, value) -> str:
        value = str(value).strip().lower()
        if value not in Config.SEVERITY_OPTIONS:
            raise ValueError(f"severity 必须是 random 或 1..5，实际为 {value}")
        return value

    @field_validator("metric")
    @classmethod
    def _check_metric(cls, value: str) -> str:
        value = value.strip().lower()
        if value not in Config.METRIC_OPTIONS:
            raise ValueError(f"metric 必须是 {Config.METRIC_OPTIONS} 之一，实际为 {value}")
        return value

    @field_validator("dataset_kind", mode="before")
    @classmethod
    def _parse_dataset(cls, value):
        if isinstance(value, str) and value:
            return DatasetKind.parse(value)
        return value

    @property
    def severity_level(self) -> Optional[int]:
        """固定等级；随机等级返回 None"""
        return None if self.severity == "random" else int(self.severity)

    def trials_for(self, kind: DatasetKind) -> int:
        """未指定时 SYSU 为 30 次，其余为 1 次"""
        if self.trials is not None:
            return self.trials
        return Config.SYSU_TRIALS if kind == DatasetKind.SYSU else 1

    def output_dir(self, command: str) -> Path:
        """本次运行的输出目录"""
        if self.out:
            return Path(self.out)
        return Config.output_root() / command

    def to_yaml(self) -> str:
        data = self.model_dump(mode="json")
        return yaml.safe_dump(data, allow_unicode=True, sort_keys=True)

    def save(self, directory: Union[str, Path]) -> Path:
        """把配置快照写入目录"""
        path = Path(directory) / Config.RUN_CONFIG_NAME
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(self.to_yaml())
        return path

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> Dict[str, Any]:
        """读取 YAML 配置文件，返回字段字典"""
        with open(path, "r", encoding="utf-8") as f:
            return yaml.safe_load(f) or {}

    @classmethod
    def resolve(cls, config_file: Optional[Union[str, Path]] = None,
                flags: Optional[Dict[str, Any]] = None) -> "RunConfig":
        """
        合并默认值、配置文件和命令行参数

        Args:
            config_file: --config 指定的 YAML
            flags: 命令行显式给出的参数（值为 None 的项忽略）

        Returns:
            RunConfig
        """
        data: Dict[str, Any] = {}
        defaults = Config.load_defaults()
        data.update(defaults.get("run", {}) or {})
        level = (defaults.get("logging", {}) or {}).get("level")
        if level:
            data["log_level"] = level
        if config_file:
            data.update(cls.from_file(config_file))
        for key, value in (flags or {}).items():
            if value is None:
                continue
            if key == "overrides":
                merged = dict(data.get("overrides") or {})
                merged.update(value)
                data[key] = merged
            else:
                data[key] = value
        known = set(cls.model_fields)
        return cls(**{k: v for k, v in data.items() if k in known})


def parse_overrides(items: List[str]) -> Dict[str, Any]:
    """
    解析 --set key=value 参数

    值按 YAML 标量解析，因此 0、0.5、true 等得到对应类型。
    """
    overrides: Dict[str, Any] = {}
    for item in items:
        if "=" not in item:
            raise ValueError(f"--set 参数必须形如 key=value: {item}")
        key, raw = item.split("=", 1)
        overrides[key.strip()] = yaml.safe_load(raw)
    return overrides
