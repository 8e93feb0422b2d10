"""
距离排序与逐查询指标

排序按距离升序，距离相同时按 pair id 升序，因此结果与图库的存储顺序无关。
"""

from typing import Optional, Sequence

import numpy as np

from ..exceptions import ExcludedQueryError, InvalidArgumentError
from ..models import EmbeddingTable, Ranking

METRICS = ("euclidean", "cosine")


def concat_embeddings(v: Sequence[float], i: Sequence[float]) -> np.ndarray:
    """拼接可见光与红外特征，可见光在前"""
    v = np.asarray(v, dtype=np.float64).ravel()
    i = np.asarray(i, dtype=np.float64).ravel()
    if not (np.all(np.isfinite(v)) and np.all(np.isfinite(i))):
        raise InvalidArgumentError("特征中存在非有限值")
    return np.concatenate([v, i])


def l2_normalize(rows: np.ndarray) -> np.ndarray:
    """逐行 L2 归一化，零向量保持不变"""
    rows = np.asarray(rows, dtype=np.float64)
    norms = np.sqrt(np.sum(rows * rows, axis=-1, keepdims=True))
    return np.divide(rows, norms, out=rows.copy(), where=norms > 0)


def distances(probe: np.ndarray, rows: np.ndarray, metric: str = "euclidean") -> np.ndarray:
    """
    probe 到每一行的距离

    cosine 距离为 1 - 余弦相似度，零向量的相似度记为 0。
    """
    if metric not in METRICS:
        raise InvalidArgumentError(f"未知的距离度量: {metric}，可选 {', '.join(METRICS)}")
    probe = np.asarray(probe, dtype=np.float64).ravel()
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] != probe.shape[0]:
        raise InvalidArgumentError(f"特征维度不一致: probe {probe.shape[0]}, 图库 {rows.shape[1:]}")
    if metric == "euclidean":
        diff = rows - probe
        return np.sqrt(np.sum(diff * diff, axis=1))
    norms = np.sqrt(np.sum(rows * rows, axis=1)) * np.sqrt(np.dot(probe, probe))
    dots = rows @ probe
    sims = np.divide(dots, norms, out=np.zeros_like(dots), where=norms > 0)
    return 1.0 - sims


def rank_by_distance(probe_id: int, probe_identity: Optional[int], dist: np.ndarray,
                     ids: Sequence[int], identities: Sequence[int]) -> Ranking:
    """由已计算的距离生成排序"""
    ids = np.asarray(ids, dtype=np.int64)
    order = np.lexsort((ids, dist))
    if probe_identity is None:
        positives = [False] * len(order)
    else:
        gallery_identities = np.asarray(identities, dtype=np.int64)
        positives = (gallery_identities[order] == probe_identity).tolist()
    return Ranking(
        probe_id=probe_id,
        order=ids[order].tolist(),
        distances=dist[order].tolist(),
        positives=positives,
    )


def rank_gallery(probe: Sequence[float], gallery: EmbeddingTable, metric: str = "euclidean",
                 probe_identity: Optional[int] = None, probe_id: int = -1) -> Ranking:
    """
    按距离对整个图库排序

    Args:
        probe: 查询特征
        gallery: 图库特征表
        metric: euclidean 或 cosine
        probe_identity: 查询身份，用于标记正样本
        probe_id: 查询的 pair id

    Returns:
        Ranking
    """
    dist = distances(probe, gallery.rows, metric)
    return rank_by_distance(probe_id, probe_identity, dist, gallery.ids, gallery.identities)


def _require_positives(r: Ranking):
    ranks = r.positive_ranks()
    if not ranks:
        raise ExcludedQueryError(f"查询 {r.probe_id} 在图库中没有正样本")
    return ranks


def average_precision(r: Ranking) -> float:
    """AP = 1/|P| · Σ_k (名次 ≤ k 的正样本数) / k，k 取各正样本名次"""
    ranks = _require_positives(r)
    return sum((j + 1) / k for j, k in enumerate(ranks)) / len(ranks)


def inverse_negative_penalty(r: Ranking) -> float:
    """INP = |P| / 最难正样本（最后一个正样本）的名次"""
    ranks = _require_positives(r)
    return len(ranks) / ranks[-1]


def cmc_at(r: Ranking, k: int) -> int:
    """前 k 名内有正样本时为 1"""
    if k < 1:
        raise InvalidArgumentError(f"k 必须 ≥ 1，实际为 {k}")
    return int(any(r.positives[:k]))
