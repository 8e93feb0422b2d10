"""单图 / 图像对腐蚀"""

import logging
from typing import List, Optional, Tuple

import numpy as np

from ..exceptions import InvalidArgumentError, NotApplicableError
from ..imaging.ops import float_to_uint8
from ..imaging.rng import Rng
from ..models import (
    CorruptionKind, CorruptionPolicy, CorruptionRecord, ImageBuffer, ImagePair, ModalityTag,
)
from .functional import CORRUPTION_FUNCTIONS
from .kinds import SeverityTable, applicable_kinds, load_severity_table

logger = logging.getLogger(__name__)


def apply_corruption(img: ImageBuffer, kind: CorruptionKind, severity: int, rng: Rng,
                     table: Optional[SeverityTable] = None) -> ImageBuffer:
    """
    对单张图像施加指定类型和等级的腐蚀

    红外图像以单通道计算，输出保持 R=G=B；红外上的 saturate 按 brightness 的传递函数执行。

    Args:
        img: 输入图像
        kind: 腐蚀类型
        severity: 严重等级 1..5
        rng: 该图像独立的随机数发生器
        table: 参数表，默认为仓库自带表

    Returns:
        同尺寸、同模态的腐蚀图像

    Raises:
        NotApplicableError: brightness 用于红外图像
        InvalidArgumentError: 等级超出范围
    """
    kind = CorruptionKind(kind)
    if isinstance(severity, bool) or not 1 <= int(severity) <= 5:
        raise InvalidArgumentError(f"严重等级必须在 [1, 5] 内，实际为 {severity}")
    severity = int(severity)
    infrared = img.modality == ModalityTag.INFRARED
    if infrared and not kind.applies_to_infrared:
        raise NotApplicableError(f"{kind.value} 不适用于红外图像")

    table = table or load_severity_table()
    fn_kind = kind
    if infrared and kind is CorruptionKind.SATURATE:
        fn_kind = CorruptionKind.BRIGHTNESS
    params = table.params(fn_kind, severity)

    x = img.to_float()
    if infrared:
        x = x[:, :, :1]
    out = float_to_uint8(CORRUPTION_FUNCTIONS[fn_kind](x, params, rng))
    if infrared:
        out = np.repeat(out[:, :, :1], 3, axis=2)
    return img.with_pixels(out)


def draw_corruption(modality: ModalityTag, policy: CorruptionPolicy, rng: Rng) -> Tuple[CorruptionKind, int, int]:
    """
    按策略抽取 (类型, 等级, 子种子)

    抽样顺序固定：类型 → 等级（随机等级时）→ 子种子。
    """
    kinds = applicable_kinds(modality)
    kind = kinds[rng.choice_index(len(kinds))]
    severity = policy.severity if policy.severity is not None else rng.integers(1, 6)
    return kind, severity, rng.next_seed()


def corrupt_image(img: ImageBuffer, image_id: str, policy: CorruptionPolicy, rng: Rng,
                  table: Optional[SeverityTable] = None) -> Tuple[ImageBuffer, Optional[CorruptionRecord]]:
    """按策略腐蚀一张图像；策略不作用于该模态时原样返回，记录为 None"""
    if not policy.mode.corrupts(img.modality):
        return img, None
    kind, severity, seed = draw_corruption(img.modality, policy, rng)
    out = apply_corruption(img, kind, severity, Rng(seed), table)
    record = CorruptionRecord(image_id=image_id, modality=img.modality,
                              kind=kind, severity=severity, seed=seed)
    return out, record


def corrupt_pair(pair: ImagePair, policy: CorruptionPolicy, rng: Rng,
                 table: Optional[SeverityTable] = None) -> Tuple[ImagePair, List[CorruptionRecord]]:
    """
    按策略腐蚀一个图像对，两个模态独立抽取类型和等级

    Returns:
        (新图像对, 腐蚀记录列表)；先可见光后红外
    """
    records: List[CorruptionRecord] = []
    images = {}
    for modality, image_id in ((ModalityTag.VISIBLE, pair.visible_id),
                               (ModalityTag.INFRARED, pair.infrared_id)):
        out, record = corrupt_image(pair.get(modality), image_id, policy, rng, table)
        if record is not None:
            images["visible" if modality == ModalityTag.VISIBLE else "infrared"] = out
            records.append(record)
    if not images:
        return pair, records
    return pair.replace(**images), records


def replay_record(img: ImageBuffer, record: CorruptionRecord,
                  table: Optional[SeverityTable] = None) -> ImageBuffer:
    """按记录重放腐蚀"""
    if img.modality != record.modality:
        raise InvalidArgumentError(f"{record.image_id}: 图像模态与记录不一致")
    return apply_corruption(img, record.kind, record.severity, Rng(record.seed), table)
