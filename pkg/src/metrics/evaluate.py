"""
多次试验的 LOOQ 评估

每次配对试验有一张特征表（pair id 为行 id），LOOQ 中每个 pair 轮流作为 probe。
probe 上的计算可以并行，归约按 probe 顺序进行，结果与 workers 无关。
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import InvalidArgumentError, InvalidDatasetError, MissingEmbeddingError
from ..models import CMC_RANKS, EmbeddingTable, EvalReport, LooqTrial, TrialMetrics
from .ranking import (
    METRICS, average_precision, cmc_at, distances, inverse_negative_penalty, l2_normalize, rank_by_distance,
)

logger = logging.getLogger(__name__)


class QueryResult(NamedTuple):
    """单个 probe 的结果，excluded 为真时其余指标无意义"""

    excluded: bool
    ap: float
    inp: float
    cmc: Tuple[int, ...]
    rank1: int


class EvaluationResult(NamedTuple):
    report: EvalReport
    # 每次试验、每个 probe 的 rank-1 命中（0/1），供显著性检验使用
    outcomes: List[List[int]]


def _rows_for(table: EmbeddingTable, num_pairs: int) -> np.ndarray:
    """按 pair id 0..num_pairs-1 取出特征行下标"""
    index = table.index()
    rows = []
    for pid in range(num_pairs):
        if pid not in index:
            raise MissingEmbeddingError(pid)
        rows.append(index[pid])
    return np.asarray(rows, dtype=np.int64)


def _evaluate_probe(trial: LooqTrial, features: np.ndarray, identities: np.ndarray,
                    metric: str) -> QueryResult:
    gallery = np.asarray(trial.gallery, dtype=np.int64)
    dist = distances(features[trial.probe], features[gallery], metric)
    ranking = rank_by_distance(trial.probe, int(identities[trial.probe]), dist,
                               gallery, identities[gallery])
    rank1 = cmc_at(ranking, 1)
    if not any(ranking.positives):
        return QueryResult(True, 0.0, 0.0, tuple(0 for _ in CMC_RANKS), rank1)
    return QueryResult(
        excluded=False,
        ap=average_precision(ranking),
        inp=inverse_negative_penalty(ranking),
        cmc=tuple(cmc_at(ranking, k) for k in CMC_RANKS),
        rank1=rank1,
    )


def evaluate_trial(table: EmbeddingTable, looq: Sequence[LooqTrial], trial_index: int = 0,
                   metric: str = "euclidean", normalize: bool = False,
                   workers: int = 1) -> Tuple[TrialMetrics, List[int]]:
    """
    评估一次配对试验

    Returns:
        (该试验的平均指标, 每个 probe 的 rank-1 命中)

    Raises:
        MissingEmbeddingError: 某个 pair id 没有特征
        InvalidDatasetError: 所有 probe 都没有正样本
    """
    if metric not in METRICS:
        raise InvalidArgumentError(f"未知的距离度量: {metric}")
    if not looq:
        raise InvalidArgumentError("LOOQ 试验为空")
    num_pairs = looq[0].num_pairs
    rows = _rows_for(table, num_pairs)
    features = table.rows[rows]
    if normalize:
        features = l2_normalize(features)
    identities = np.asarray(table.identities, dtype=np.int64)[rows]

    def run(trial: LooqTrial) -> QueryResult:
        return _evaluate_probe(trial, features, identities, metric)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, looq))
    else:
        results = [run(t) for t in looq]

    kept = [r for r in results if not r.excluded]
    excluded = len(results) - len(kept)
    if excluded:
        logger.info("试验 %d: %d 个查询没有正样本，不计入平均", trial_index, excluded)
    if not kept:
        raise InvalidDatasetError(f"试验 {trial_index} 中所有查询都没有正样本")

    n = len(kept)
    metrics = TrialMetrics(
        trial_index=trial_index,
        mAP=math.fsum(r.ap for r in kept) / n,
        mINP=math.fsum(r.inp for r in kept) / n,
        cmc={k: math.fsum(r.cmc[j] for r in kept) / n for j, k in enumerate(CMC_RANKS)},
        num_queries=n,
        num_excluded=excluded,
    )
    return metrics, [r.rank1 for r in results]


def evaluate_with_outcomes(tables: Sequence[EmbeddingTable], looq: Sequence[Sequence[LooqTrial]],
                           metric: str = "euclidean", normalize: bool = False, workers: int = 1,
                           corruption_mode: str = "clean", policy_name: str = "") -> EvaluationResult:
    """evaluate_trials，同时返回逐 probe 的 rank-1 命中"""
    if len(tables) != len(looq):
        raise InvalidArgumentError(f"特征表数量 {len(tables)} 与试验数量 {len(looq)} 不一致")
    if not tables:
        raise InvalidArgumentError("没有可评估的试验")

    trials: List[TrialMetrics] = []
    outcomes: List[List[int]] = []
    for t, (table, trial_looq) in enumerate(zip(tables, looq)):
        metrics, hits = evaluate_trial(table, trial_looq, trial_index=t, metric=metric,
                                       normalize=normalize, workers=workers)
        trials.append(metrics)
        outcomes.append(hits)

    report = EvalReport(trials=trials, metric=metric, corruption_mode=corruption_mode,
                        policy_name=policy_name).recompute_aggregate()
    logger.info("评估完成: %d 次试验, mAP=%.4f, mINP=%.4f", len(trials),
                report.aggregate["mAP"].mean, report.aggregate["mINP"].mean)
    return EvaluationResult(report, outcomes)


def evaluate_trials(tables: Sequence[EmbeddingTable], looq: Optional[Sequence[Sequence[LooqTrial]]] = None,
                    metric: str = "euclidean", normalize: bool = False, workers: int = 1,
                    corruption_mode: str = "clean", policy_name: str = "") -> EvalReport:
    """
    多次配对试验的 LOOQ 评估

    Args:
        tables: 每次试验一张特征表
        looq: 每次试验的 LOOQ 列表；为 None 时按特征表行数生成
        metric: euclidean 或 cosine
        normalize: 匹配前是否 L2 归一化
        workers: probe 级并行线程数
        corruption_mode: 写入报告的腐蚀模式
        policy_name: 写入报告的增强策略名

    Returns:
        EvalReport，汇总为各试验的均值 ± 样本标准差
    """
    if looq is None:
        looq = [default_looq(len(table)) for table in tables]
    return evaluate_with_outcomes(tables, looq, metric, normalize, workers,
                                  corruption_mode, policy_name).report


def default_looq(num_pairs: int) -> List[LooqTrial]:
    if num_pairs < 2:
        raise InvalidArgumentError(f"LOOQ 至少需要 2 个 pair，实际为 {num_pairs}")
    return [LooqTrial(probe=t, num_pairs=num_pairs) for t in range(num_pairs)]
