"""评估指标：排序、mAP / mINP / CMC、显著性检验、损失参考值与特征文件"""

from .embeddings import decode_embeddings, encode_embeddings, read_embeddings, write_embeddings
from .evaluate import EvaluationResult, evaluate_trial, evaluate_trials, evaluate_with_outcomes
from .losses import batch_hard_triplet_loss, label_smoothed_ce
from .ranking import (
    METRICS,
    average_precision,
    cmc_at,
    concat_embeddings,
    distances,
    inverse_negative_penalty,
    l2_normalize,
    rank_gallery,
)
from .significance import (
    chi2_sf,
    cochran_q,
    mcnemar,
    outcome_matrix,
    read_outcomes,
    significance_tests,
    write_outcomes,
)

__all__ = [
    "METRICS",
    "concat_embeddings",
    "l2_normalize",
    "distances",
    "rank_gallery",
    "average_precision",
    "inverse_negative_penalty",
    "cmc_at",
    "evaluate_trial",
    "evaluate_trials",
    "evaluate_with_outcomes",
    "EvaluationResult",
    "chi2_sf",
    "cochran_q",
    "mcnemar",
    "outcome_matrix",
    "significance_tests",
    "write_outcomes",
    "read_outcomes",
    "batch_hard_triplet_loss",
    "label_smoothed_ce",
    "read_embeddings",
    "write_embeddings",
    "encode_embeddings",
    "decode_embeddings",
]
