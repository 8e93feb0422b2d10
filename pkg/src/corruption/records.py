"""腐蚀记录日志读写（制表符分隔，无表头）"""

from pathlib import Path
from typing import Iterable, List, Union

from pydantic import ValidationError

from ..exceptions import InvalidArgumentError
from ..models import CorruptionRecord

RECORD_LOG_NAME = "corruption_records.tsv"


def write_records(records: Iterable[CorruptionRecord], path: Union[str, Path]) -> Path:
    """按给定顺序写出记录，每行一条"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for record in records:
            f.write(record.to_line() + "\n")
    return path


def read_records(path: Union[str, Path]) -> List[CorruptionRecord]:
    """读取记录日志，空行忽略"""
    records = []
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                records.append(CorruptionRecord.from_line(line))
            except (ValueError, ValidationError) as e:
                raise InvalidArgumentError(f"{path} 第 {lineno} 行无法解析: {e}") from e
    return records
