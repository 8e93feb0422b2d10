"""数据模型模块"""

from .image import ModalityTag, Rect, ImageBuffer, ImagePair
from .corruption import CorruptionKind, CorruptionMode, CorruptionPolicy, CorruptionRecord, SeverityLevel
from .augment import (
    EraseParams, PatchParams, PatchVariant, RectLog, RectLogEntry, OperatorSpec, AugmentPolicy,
)
from .dataset import (
    DatasetKind, ManifestRecord, DatasetManifest, SplitSpec, PairEntry, PairingResult, LooqTrial,
)
from .evaluation import (
    EmbeddingTable, Ranking, TrialMetrics, MetricSummary, SignificanceResult, EvalReport,
    BinaryOutcomeMatrix, CMC_RANKS, METRIC_NAMES,
)

__all__ = [
    "ModalityTag", "Rect", "ImageBuffer", "ImagePair",
    "CorruptionKind", "CorruptionMode", "CorruptionPolicy", "CorruptionRecord", "SeverityLevel",
    "EraseParams", "PatchParams", "PatchVariant", "RectLog", "RectLogEntry", "OperatorSpec", "AugmentPolicy",
    "DatasetKind", "ManifestRecord", "DatasetManifest", "SplitSpec", "PairEntry", "PairingResult", "LooqTrial",
    "EmbeddingTable", "Ranking", "TrialMetrics", "MetricSummary", "SignificanceResult", "EvalReport",
    "BinaryOutcomeMatrix", "CMC_RANKS", "METRIC_NAMES",
]
