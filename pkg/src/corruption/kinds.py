"""腐蚀类型适用性与严重等级参数表"""

import logging
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml
from pydantic import BaseModel, ValidationError, field_validator

from ..exceptions import InvalidArgumentError
from ..models import CorruptionKind, ModalityTag

logger = logging.getLogger(__name__)

DEFAULT_TABLE_PATH = Path(__file__).resolve().parent.parent.parent / "config" / "corruption_severity.yaml"
SUPPORTED_TABLE_VERSIONS = (1,)


def applicable_kinds(modality: ModalityTag) -> List[CorruptionKind]:
    """
    某模态可用的腐蚀类型

    Args:
        modality: 图像模态

    Returns:
        可见光 20 种；红外 19 种（去掉 brightness），顺序与枚举声明一致
    """
    if modality == ModalityTag.INFRARED:
        return [k for k in CorruptionKind if k.applies_to_infrared]
    return list(CorruptionKind)


class SeverityTable(BaseModel):
    """20 × 5 的严重等级参数表"""

    version: int
    kinds: Dict[CorruptionKind, List[Any]]

    @field_validator("version")
    @classmethod
    def _check_version(cls, value: int) -> int:
        if value not in SUPPORTED_TABLE_VERSIONS:
            raise ValueError(f"不支持的参数表版本: {value}")
        return value

    @field_validator("kinds")
    @classmethod
    def _check_kinds(cls, value: Dict[CorruptionKind, List[Any]]) -> Dict[CorruptionKind, List[Any]]:
        missing = [k.value for k in CorruptionKind if k not in value]
        if missing:
            raise ValueError(f"参数表缺少腐蚀类型: {', '.join(missing)}")
        for kind, levels in value.items():
            if len(levels) != 5:
                raise ValueError(f"{kind.value} 需要 5 个等级的参数，实际 {len(levels)} 个")
        return value

    def params(self, kind: CorruptionKind, severity: int) -> Any:
        """取某类型某等级的参数"""
        if not 1 <= severity <= 5:
            raise InvalidArgumentError(f"严重等级必须在 [1, 5] 内，实际为 {severity}")
        return self.kinds[kind][severity - 1]


def load_severity_table(path: Optional[Union[str, Path]] = None) -> SeverityTable:
    """
    读取严重等级参数表

    Args:
        path: YAML 文件路径；为空时使用仓库自带的 config/corruption_severity.yaml

    Returns:
        校验后的 SeverityTable
    """
    if path is None:
        return _default_table()
    return _read_table(Path(path))


@lru_cache(maxsize=1)
def _default_table() -> SeverityTable:
    return _read_table(DEFAULT_TABLE_PATH)


def _read_table(path: Path) -> SeverityTable:
    with open(path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    try:
        table = SeverityTable(**data)
    except ValidationError as e:
        raise InvalidArgumentError(f"参数表 {path} 无效: {e}") from e
    logger.debug("已加载严重等级参数表 %s (version=%d)", path, table.version)
    return table
