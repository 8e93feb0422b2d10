"""P×K 批采样"""

import logging
from collections import OrderedDict
from typing import Dict, List, Optional

from ..exceptions import InvalidArgumentError
from ..imaging.rng import Rng
from ..models import DatasetManifest, PairEntry, PairingResult

logger = logging.getLogger(__name__)


def pk_batches(pairing: PairingResult, P: int, K: int, seed: int, epochs: int = 1,
               random_hetero: bool = False,
               manifest: Optional[DatasetManifest] = None) -> List[List[PairEntry]]:
    """
    按身份组批：每批 P 个不同身份，每个身份 K 个配对

    每个 epoch 打乱身份顺序后按 P 个一组切分，不足 P 个的尾部丢弃。
    身份配对数 ≥ K 时不放回抽样，否则放回抽样。
    random_hetero 为真且数据集非共址时，每次抽取都在该身份的红外图像中重新随机选一张。

    Args:
        pairing: 限定在训练身份上的配对
        P: 每批身份数
        K: 每个身份的配对数
        seed: 随机种子
        epochs: 遍历身份的轮数
        random_hetero: 是否随机替换红外图像
        manifest: random_hetero 时用于查找红外图像

    Returns:
        批列表，每批 P×K 个 PairEntry，同一身份的配对相邻
    """
    if P < 1 or K < 1:
        raise InvalidArgumentError(f"P 与 K 必须 ≥ 1，实际为 P={P}, K={K}")
    if epochs < 1:
        raise InvalidArgumentError(f"epochs 必须 ≥ 1，实际为 {epochs}")

    by_identity: Dict[int, List[PairEntry]] = OrderedDict()
    for pair in pairing.pairs:
        by_identity.setdefault(pair.identity, []).append(pair)
    identities = sorted(by_identity)
    if len(identities) < P:
        raise InvalidArgumentError(f"身份数 {len(identities)} 少于每批身份数 P={P}")

    hetero: Dict[int, list] = {}
    if random_hetero:
        if manifest is None:
            raise InvalidArgumentError("random_hetero 需要提供清单")
        if not manifest.paired_cameras:
            hetero = {identity: infrared for identity, (_, infrared) in manifest.group_by_identity().items()}

    rng = Rng(seed)
    batches: List[List[PairEntry]] = []
    for _ in range(epochs):
        order = [identities[i] for i in rng.permutation(len(identities))]
        for start in range(0, len(order) - P + 1, P):
            batch: List[PairEntry] = []
            for identity in order[start:start + P]:
                pool = by_identity[identity]
                if len(pool) >= K:
                    picks = rng.sample_without_replacement(len(pool), K)
                else:
                    picks = [rng.choice_index(len(pool)) for _ in range(K)]
                for index in picks:
                    pair = pool[int(index)]
                    if identity in hetero:
                        record = hetero[identity][rng.choice_index(len(hetero[identity]))]
                        pair = pair.model_copy(update={"infrared_id": record.image_id,
                                                       "camera_i": record.camera})
                    batch.append(pair)
            batches.append(batch)
    logger.debug("P×K 采样: %d 批, P=%d, K=%d", len(batches), P, K)
    return batches
