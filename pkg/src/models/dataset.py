"""数据集与实验协议数据模型"""

from collections import OrderedDict
from enum import Enum
from typing import Dict, List, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .image import ModalityTag


class DatasetKind(str, Enum):
    """数据集类型"""

    SYSU = "SYSU"
    REGDB = "RegDB"
    TWORLD = "TWORLD"
    CUSTOM = "Custom"

    @classmethod
    def parse(cls, value: str) -> "DatasetKind":
        text = str(value).strip().lower()
        for kind in cls:
            if kind.value.lower() == text:
                return kind
        raise ValueError(f"未知的数据集类型: {value}")


class ManifestRecord(BaseModel):
    """清单中的一条图像记录"""

    model_config = ConfigDict(frozen=True)

    image_id: str
    identity: int
    camera: str
    modality: ModalityTag
    path: str

    def to_line(self) -> str:
        return "\t".join([self.image_id, str(self.identity), self.camera,
                          self.modality.value, self.path])


class DatasetManifest(BaseModel):
    """数据集清单：身份 / 相机 / 模态 / 路径"""

    dataset_kind: DatasetKind = DatasetKind.CUSTOM
    paired_cameras: bool = False
    records: List[ManifestRecord] = Field(default_factory=list)

    def identities(self) -> List[int]:
        """排序后的身份列表"""
        return sorted({r.identity for r in self.records})

    def group_by_identity(self) -> "OrderedDict[int, Tuple[List[ManifestRecord], List[ManifestRecord]]]":
        """
        按身份分组，保持清单中的出现顺序

        Returns:
            {identity: (可见光记录列表, 红外记录列表)}，按身份升序
        """
        groups: Dict[int, Tuple[List[ManifestRecord], List[ManifestRecord]]] = {}
        for record in self.records:
            visible, infrared = groups.setdefault(record.identity, ([], []))
            if record.modality == ModalityTag.VISIBLE:
                visible.append(record)
            else:
                infrared.append(record)
        return OrderedDict(sorted(groups.items()))

    def lookup(self) -> Dict[str, ManifestRecord]:
        return {r.image_id: r for r in self.records}

    def subset(self, identities) -> "DatasetManifest":
        """只保留给定身份的记录"""
        keep = set(identities)
        return DatasetManifest(
            dataset_kind=self.dataset_kind,
            paired_cameras=self.paired_cameras,
            records=[r for r in self.records if r.identity in keep],
        )


class SplitSpec(BaseModel):
    """训练 / 测试身份划分及训练集上的 k 折"""

    dataset_kind: DatasetKind = DatasetKind.CUSTOM
    seed: int = 0
    train_identities: List[int] = Field(default_factory=list)
    test_identities: List[int] = Field(default_factory=list)
    folds: List[List[int]] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_partition(self) -> "SplitSpec":
        train = set(self.train_identities)
        if train & set(self.test_identities):
            raise ValueError("训练集与测试集身份重叠")
        if self.folds:
            seen: List[int] = [i for fold in self.folds for i in fold]
            if len(seen) != len(set(seen)) or set(seen) != train:
                raise ValueError("各折必须恰好划分训练集")
        return self


class PairEntry(BaseModel):
    """一个可见光-红外图像对"""

    model_config = ConfigDict(frozen=True)

    identity: int
    visible_id: str
    infrared_id: str
    camera_v: str = ""
    camera_i: str = ""

    @property
    def camera(self) -> str:
        """特征表中的相机标签"""
        return f"{self.camera_v}+{self.camera_i}"


class PairingResult(BaseModel):
    """一次配对的结果，pair id 即其在 pairs 中的下标"""

    pairs: List[PairEntry] = Field(default_factory=list)
    trial_index: int = 0

    @model_validator(mode="after")
    def _check_no_reuse(self) -> "PairingResult":
        ids = [p.visible_id for p in self.pairs] + [p.infrared_id for p in self.pairs]
        if len(ids) != len(set(ids)):
            raise ValueError("同一张图像出现在多个配对中")
        return self

    def __len__(self) -> int:
        return len(self.pairs)

    def identities(self) -> List[int]:
        return [p.identity for p in self.pairs]


class LooqTrial(BaseModel):
    """LOOQ 的一次试验：probe 为一个 pair，其余 pair 组成图库"""

    model_config = ConfigDict(frozen=True)

    probe: int = Field(ge=0)
    num_pairs: int = Field(ge=2)

    @model_validator(mode="after")
    def _check_probe(self) -> "LooqTrial":
        if self.probe >= self.num_pairs:
            raise ValueError("probe 超出 pair 数量")
        return self

    @property
    def gallery(self) -> List[int]:
        return [i for i in range(self.num_pairs) if i != self.probe]
