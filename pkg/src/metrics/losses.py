"""
损失函数参考值（只有前向）

供训练代码对照：批内最难三元组损失与标签平滑交叉熵。
"""

from collections import Counter
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from ..exceptions import InvalidArgumentError

DEFAULT_MARGIN = 0.3
DEFAULT_EPSILON = 0.1


def pairwise_euclidean(features: np.ndarray) -> np.ndarray:
    diff = features[:, None, :] - features[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def batch_hard_triplet_loss(features: Sequence[Sequence[float]], labels: Sequence[int],
                            margin: float = DEFAULT_MARGIN) -> float:
    """
    批内最难三元组损失

    对每个锚点取距离最远的同类样本和距离最近的异类样本，
    损失为 mean(max(0, margin + d_ap - d_an))。

    Args:
        features: (N, D) 特征
        labels: 长度 N 的身份标签
        margin: 间隔

    Returns:
        标量损失
    """
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels)
    if x.ndim != 2 or x.shape[0] != y.shape[0]:
        raise InvalidArgumentError("features 与 labels 数量不一致")
    counts = Counter(y.tolist())
    if len(counts) < 2:
        raise InvalidArgumentError("至少需要 2 个不同标签")
    lonely = sorted(label for label, n in counts.items() if n < 2)
    if lonely:
        raise InvalidArgumentError(f"标签只有 1 个样本: {lonely}")

    dist = pairwise_euclidean(x)
    same = y[:, None] == y[None, :]
    hardest_pos = np.where(same, dist, -np.inf).max(axis=1)
    hardest_neg = np.where(same, np.inf, dist).min(axis=1)
    return float(np.mean(np.maximum(0.0, margin + hardest_pos - hardest_neg)))


def label_smoothed_ce(logits: Sequence[Sequence[float]], labels: Sequence[int],
                      epsilon: float = DEFAULT_EPSILON) -> float:
    """
    标签平滑交叉熵

    目标分布：真实类别 1-ε，其余类别各 ε/(C-1)。
    """
    z = np.asarray(logits, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if not 0.0 <= epsilon < 1.0:
        raise InvalidArgumentError(f"epsilon 必须在 [0, 1) 内，实际为 {epsilon}")
    if z.ndim != 2 or z.shape[0] != y.shape[0]:
        raise InvalidArgumentError("logits 与 labels 数量不一致")
    n, c = z.shape
    if c < 2:
        raise InvalidArgumentError("至少需要 2 个类别")
    if np.any(y < 0) or np.any(y >= c):
        raise InvalidArgumentError(f"标签超出类别范围 [0, {c})")

    log_probs = z - logsumexp(z, axis=1, keepdims=True)
    target = np.full((n, c), epsilon / (c - 1))
    target[np.arange(n), y] = 1.0 - epsilon
    return float(np.mean(-np.sum(target * log_probs, axis=1)))
