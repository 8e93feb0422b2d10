"""
显著性检验：Cochran Q 与 McNemar

两者的 p 值都来自卡方分布的生存函数，由正则化上不完全伽马函数计算。
"""

import math
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import ValidationError
from scipy.special import gammaincc

from ..exceptions import InvalidArgumentError
from ..models import BinaryOutcomeMatrix, SignificanceResult


def chi2_sf(x: float, df: int) -> float:
    """自由度为 df 的卡方分布生存函数 P(X > x)"""
    if df < 1:
        raise InvalidArgumentError(f"自由度必须 ≥ 1，实际为 {df}")
    if x <= 0:
        return 1.0
    return float(min(max(gammaincc(df / 2.0, x / 2.0), 0.0), 1.0))


def outcome_matrix(columns: Sequence[Sequence[int]],
                   models: Optional[Sequence[str]] = None) -> BinaryOutcomeMatrix:
    """
    由各模型的 rank-1 命中序列构建结果矩阵

    Args:
        columns: 每个模型一列，长度必须一致
        models: 模型名

    Returns:
        BinaryOutcomeMatrix，行为查询、列为模型
    """
    if not columns:
        raise InvalidArgumentError("至少需要一个模型的结果")
    lengths = {len(c) for c in columns}
    if len(lengths) != 1:
        raise InvalidArgumentError(f"各模型的查询数不一致: {sorted(lengths)}")
    if models is not None and len(models) != len(columns):
        raise InvalidArgumentError("模型名数量与结果列数不一致")
    try:
        return BinaryOutcomeMatrix(
            data=np.column_stack([np.asarray(c, dtype=np.int64) for c in columns]),
            models=list(models) if models is not None else None,
        )
    except ValidationError as e:
        raise InvalidArgumentError(str(e)) from e


def cochran_q(m: BinaryOutcomeMatrix) -> Tuple[float, float]:
    """
    Cochran Q 检验

    Q = k(k-1)·Σ_j (G_j - Ḡ)² / (k·ΣL_i - ΣL_i²)，G_j 为列和，L_i 为行和。
    所有行取值都相同时分母为 0，返回 (0, 1)。

    Returns:
        (Q, p)
    """
    k = m.num_models
    if k < 2:
        raise InvalidArgumentError(f"Cochran Q 至少需要 2 个模型，实际为 {k}")
    if m.num_queries < 1:
        raise InvalidArgumentError("结果矩阵没有查询")

    col_sums = m.data.sum(axis=0).astype(np.float64)
    row_sums = m.data.sum(axis=1).astype(np.float64)
    denominator = k * math.fsum(row_sums) - math.fsum(row_sums * row_sums)
    if denominator == 0:
        return 0.0, 1.0
    mean = math.fsum(col_sums) / k
    q = k * (k - 1) * math.fsum((g - mean) ** 2 for g in col_sums) / denominator
    return q, chi2_sf(q, k - 1)


def mcnemar(a: Sequence[int], b: Sequence[int]) -> Tuple[float, float]:
    """
    不带连续性校正的 McNemar 检验

    统计量 (n01 - n10)² / (n01 + n10)，两模型结果完全一致时返回 (0, 1)。
    """
    m = outcome_matrix([a, b])
    n10 = int(np.sum((m.data[:, 0] == 1) & (m.data[:, 1] == 0)))
    n01 = int(np.sum((m.data[:, 0] == 0) & (m.data[:, 1] == 1)))
    if n10 + n01 == 0:
        return 0.0, 1.0
    stat = (n10 - n01) ** 2 / (n10 + n01)
    return float(stat), chi2_sf(stat, 1)


def significance_tests(columns: Sequence[Sequence[int]], models: Sequence[str]) -> List[SignificanceResult]:
    """Cochran Q；恰好两个模型时附加 McNemar"""
    m = outcome_matrix(columns, models)
    q, p = cochran_q(m)
    results = [SignificanceResult(test="cochran_q", models=list(models), statistic=q,
                                  p_value=p, num_queries=m.num_queries)]
    if m.num_models == 2:
        stat, p2 = mcnemar(columns[0], columns[1])
        results.append(SignificanceResult(test="mcnemar", models=list(models), statistic=stat,
                                          p_value=p2, num_queries=m.num_queries))
    return results


def write_outcomes(outcomes: Sequence[Sequence[int]], path: Union[str, Path], model: str = "") -> Path:
    """
    写出逐查询 rank-1 命中结果

    每行 `trial<TAB>probe<TAB>correct`。
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"# model={model}\n")
        for trial, row in enumerate(outcomes):
            for probe, hit in enumerate(row):
                f.write(f"{trial}\t{probe}\t{int(hit)}\n")
    return path


def read_outcomes(path: Union[str, Path]) -> Tuple[str, List[int]]:
    """读取 write_outcomes 的文件，返回 (模型名, 按行顺序展平的命中序列)"""
    model = Path(path).stem
    hits: List[int] = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                text = line.lstrip("#").strip()
                if text.startswith("model=") and text[6:]:
                    model = text[6:]
                continue
            fields = line.split("\t")
            if len(fields) != 3 or fields[2] not in ("0", "1"):
                raise InvalidArgumentError(f"{path} 第 {lineno} 行格式错误")
            hits.append(int(fields[2]))
    return model, hits
