"""数据增强相关数据模型"""

from enum import Enum
from typing import Any, Dict, Iterator, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .image import ModalityTag, Rect


def _check_range(name: str, value: Tuple[float, float], upper: Optional[float] = 1.0):
    low, high = value
    if low > high:
        raise ValueError(f"{name} 下界不能大于上界: {value}")
    if low <= 0 or (upper is not None and high > upper):
        raise ValueError(f"{name} 取值必须在 (0, {upper}] 内: {value}")


class EraseParams(BaseModel):
    """软随机擦除（S-REA / MS-REA）参数"""

    model_config = ConfigDict(frozen=True)

    probability: float = Field(default=0.5, ge=0.0, le=1.0)
    area_ratio_range: Tuple[float, float] = (0.02, 0.4)
    aspect_range: Tuple[float, float] = (0.3, 3.3)
    pixel_fill_fraction: float = Field(default=0.5, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _check_ranges(self) -> "EraseParams":
        _check_range("area_ratio_range", self.area_ratio_range)
        _check_range("aspect_range", self.aspect_range, upper=None)
        return self


class PatchParams(BaseModel):
    """补丁混合（S-PATCH / MS-PATCH / M-PATCH）参数"""

    model_config = ConfigDict(frozen=True)

    probability: float = Field(default=0.5, ge=0.0, le=1.0)
    area_ratio_range: Tuple[float, float] = (0.02, 0.4)
    aspect_range: Tuple[float, float] = (0.3, 3.3)

    @model_validator(mode="after")
    def _check_ranges(self) -> "PatchParams":
        _check_range("area_ratio_range", self.area_ratio_range)
        _check_range("aspect_range", self.aspect_range, upper=None)
        return self


class PatchVariant(str, Enum):
    """M-PATCH 变体：源/目标位置相同(S)或不同(D)"""

    SS = "SS"
    SD = "SD"
    DD = "DD"


class RectLogEntry(BaseModel):
    """增强算子使用的一个矩形"""

    model_config = ConfigDict(frozen=True)

    operator: str
    modality: ModalityTag
    role: str = "rect"
    rect: Rect
    direction: str = ""

    def to_line(self) -> str:
        return "\t".join([self.operator, self.modality.value, self.role,
                          self.direction or "-", self.rect.as_tsv()])


class RectLog:
    """矩形日志，用于审计局部增强的几何"""

    def __init__(self):
        self.entries: List[RectLogEntry] = []

    def add(self, operator: str, modality: ModalityTag, rect: Rect,
            role: str = "rect", direction: str = ""):
        self.entries.append(RectLogEntry(operator=operator, modality=modality,
                                         role=role, rect=rect, direction=direction))

    def for_operator(self, operator: str) -> List[RectLogEntry]:
        return [e for e in self.entries if e.operator == operator]

    def find(self, operator: str, modality: ModalityTag, role: str) -> List[Rect]:
        return [e.rect for e in self.entries
                if e.operator == operator and e.modality == modality and e.role == role]

    def to_lines(self) -> List[str]:
        return [e.to_line() for e in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[RectLogEntry]:
        return iter(self.entries)


class OperatorSpec(BaseModel):
    """策略中的一个算子及其参数"""

    name: str
    params: Dict[str, Any] = Field(default_factory=dict)


class AugmentPolicy(BaseModel):
    """
    增强策略：按声明顺序执行的算子列表

    masking_probability 供 modality_mask 算子使用。
    sync_geometry 为真时，裁剪偏移和翻转对两个模态共用一次抽样。
    """

    name: str
    operators: List[OperatorSpec] = Field(default_factory=list)
    masking_probability: float = Field(default=0.125, ge=0.0, le=1.0)
    sync_geometry: bool = True

    def operator_names(self) -> List[str]:
        return [op.name for op in self.operators]

    def with_overrides(self, overrides: Dict[str, Any]) -> "AugmentPolicy":
        """
        返回覆盖参数后的新策略

        Args:
            overrides: 形如 {"ms_rea.probability": 0.0, "masking_probability": 0.0}

        Returns:
            新的 AugmentPolicy
        """
        data = self.model_dump()
        for key, value in overrides.items():
            if "." not in key:
                if key not in ("masking_probability", "sync_geometry"):
                    raise ValueError(f"未知的策略字段: {key}")
                data[key] = value
                continue
            op_name, param = key.split(".", 1)
            matched = [op for op in data["operators"] if op["name"] == op_name]
            if not matched:
                raise ValueError(f"策略 {self.name} 中没有算子 {op_name}")
            for op in matched:
                op["params"][param] = value
        return AugmentPolicy(**data)
