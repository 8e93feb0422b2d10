"""评估相关数据模型"""

import math
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


CMC_RANKS = (1, 5, 10)
METRIC_NAMES = ("mAP", "mINP", "cmc@1", "cmc@5", "cmc@10")


class EmbeddingTable(BaseModel):
    """每个 pair 一行的拼接特征表，构造后只读

    cameras 为每行的相机标签（可见光相机+红外相机），二进制格式不保存，可为空。
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    ids: List[int]
    identities: List[int]
    rows: np.ndarray
    cameras: Optional[List[str]] = None

    @field_validator("rows", mode="before")
    @classmethod
    def _coerce_rows(cls, value) -> np.ndarray:
        arr = np.array(value, dtype=np.float64, copy=True)
        if arr.ndim != 2:
            raise ValueError(f"特征矩阵必须是二维，实际形状 {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("特征中存在非有限值")
        arr.flags.writeable = False
        return arr

    @model_validator(mode="after")
    def _check_lengths(self) -> "EmbeddingTable":
        n = self.rows.shape[0]
        if len(self.ids) != n or len(self.identities) != n:
            raise ValueError("ids / identities 数量与特征行数不一致")
        if self.cameras is not None and len(self.cameras) != n:
            raise ValueError("cameras 数量与特征行数不一致")
        if len(set(self.ids)) != n:
            raise ValueError("pair id 重复")
        return self

    @property
    def dim(self) -> int:
        return int(self.rows.shape[1])

    def __len__(self) -> int:
        return len(self.ids)

    def index(self) -> Dict[int, int]:
        """pair id -> 行号"""
        return {pid: i for i, pid in enumerate(self.ids)}


class Ranking(BaseModel):
    """一个 probe 对图库的完整排序（距离升序，同距离按 pair id 升序）"""

    probe_id: int
    order: List[int]
    distances: List[float]
    positives: List[bool]

    @model_validator(mode="after")
    def _check(self) -> "Ranking":
        if not (len(self.order) == len(self.distances) == len(self.positives)):
            raise ValueError("排序各字段长度不一致")
        return self

    def positive_ranks(self) -> List[int]:
        """正样本的名次（从 1 开始）"""
        return [k + 1 for k, hit in enumerate(self.positives) if hit]


class TrialMetrics(BaseModel):
    """一次配对试验上的平均指标"""

    trial_index: int
    mAP: float
    mINP: float
    cmc: Dict[int, float]
    num_queries: int
    num_excluded: int = 0

    def value(self, name: str) -> float:
        if name.startswith("cmc@"):
            return self.cmc[int(name[4:])]
        return getattr(self, name)


class MetricSummary(BaseModel):
    """多次试验的均值 ± 样本标准差"""

    mean: float
    std: float

    @classmethod
    def from_values(cls, values: List[float]) -> "MetricSummary":
        n = len(values)
        if n == 0:
            return cls(mean=float("nan"), std=0.0)
        mean = math.fsum(values) / n
        if n == 1:
            return cls(mean=mean, std=0.0)
        var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
        return cls(mean=mean, std=math.sqrt(var))


class SignificanceResult(BaseModel):
    """显著性检验结果"""

    test: str = "cochran_q"
    models: List[str]
    statistic: float
    p_value: float
    num_queries: int


class EvalReport(BaseModel):
    """评估报告"""

    trials: List[TrialMetrics] = Field(default_factory=list)
    aggregate: Dict[str, MetricSummary] = Field(default_factory=dict)
    metric: str = "euclidean"
    corruption_mode: str = "clean"
    policy_name: str = ""
    excluded_queries: int = 0
    significance: List[SignificanceResult] = Field(default_factory=list)

    def recompute_aggregate(self) -> "EvalReport":
        """由各试验结果重新计算汇总（原地更新并返回自身）"""
        self.aggregate = {
            name: MetricSummary.from_values([t.value(name) for t in self.trials])
            for name in METRIC_NAMES
        }
        self.excluded_queries = sum(t.num_excluded for t in self.trials)
        return self


class BinaryOutcomeMatrix(BaseModel):
    """行为查询、列为模型的 rank-1 命中矩阵"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    data: np.ndarray
    models: Optional[List[str]] = None

    @field_validator("data", mode="before")
    @classmethod
    def _coerce(cls, value) -> np.ndarray:
        arr = np.array(value, dtype=np.int64, copy=True)
        if arr.ndim != 2:
            raise ValueError("结果矩阵必须是二维")
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("结果矩阵元素只能为 0 或 1")
        arr.flags.writeable = False
        return arr

    @property
    def num_models(self) -> int:
        return int(self.data.shape[1])

    @property
    def num_queries(self) -> int:
        return int(self.data.shape[0])
