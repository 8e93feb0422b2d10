"""
数据集级腐蚀

每张图像的随机流由 (master_seed, 图像序号) 派生，输出与并行度、调度顺序无关。
腐蚀后的图像一律保存为 PNG，路径镜像输入目录结构（后缀改为 .png），两张图像落到同一输出文件时报 ManifestError。
"""

import logging
import shutil
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, Field

from ..exceptions import ManifestError
from ..imaging.io import load_image, save_image
from ..imaging.rng import Rng
from ..models import CorruptionPolicy, CorruptionRecord, DatasetManifest, ManifestRecord
from .kinds import SeverityTable, load_severity_table
from .policy import corrupt_image, replay_record
from .records import RECORD_LOG_NAME, write_records

logger = logging.getLogger(__name__)


class ItemError(BaseModel):
    """单张图像处理失败"""

    image_id: str
    path: str
    message: str


class CorruptionRunResult(BaseModel):
    """一次数据集腐蚀的结果"""

    records: List[CorruptionRecord] = Field(default_factory=list)
    errors: List[ItemError] = Field(default_factory=list)
    written: List[str] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


def corrupted_path(output_dir: Union[str, Path], relative: str) -> Path:
    """腐蚀图像的输出路径：镜像相对路径，后缀改为 .png"""
    return Path(output_dir) / Path(relative).with_suffix(".png")


def _as_records(manifest: Union[DatasetManifest, Sequence[ManifestRecord]]) -> List[ManifestRecord]:
    if isinstance(manifest, DatasetManifest):
        return list(manifest.records)
    return list(manifest)


def _check_targets(targets: Iterable[Tuple[str, Path]]) -> None:
    """不同图像映射到同一输出文件时报错（如同目录下的 a.jpg 与 a.png）"""
    seen: Dict[Path, str] = {}
    for image_id, target in targets:
        other = seen.setdefault(target, image_id)
        if other != image_id:
            raise ManifestError(f"图像 {other} 与 {image_id} 的输出路径相同: {target}")


def corrupt_dataset(manifest: Union[DatasetManifest, Sequence[ManifestRecord]],
                    policy: CorruptionPolicy,
                    master_seed: int,
                    output_dir: Union[str, Path],
                    image_root: Union[str, Path] = ".",
                    workers: int = 1,
                    copy_unchanged: bool = False,
                    table: Optional[SeverityTable] = None) -> CorruptionRunResult:
    """
    按策略腐蚀清单中的全部图像

    Args:
        manifest: 清单或其记录子集，序号即列表下标
        policy: 腐蚀策略
        master_seed: 主种子
        output_dir: 输出目录
        image_root: 清单中相对路径的根目录
        workers: 并行线程数
        copy_unchanged: 策略不作用的图像是否原样复制到输出目录
        table: 严重等级参数表

    Returns:
        CorruptionRunResult；记录按图像序号排序，并写入 output_dir/corruption_records.tsv
    """
    items = _as_records(manifest)
    output_dir = Path(output_dir)
    image_root = Path(image_root)
    table = table or load_severity_table()
    _check_targets(
        (item.image_id, corrupted_path(output_dir, item.path) if policy.mode.corrupts(item.modality)
         else output_dir / item.path)
        for item in items
        if copy_unchanged or policy.mode.corrupts(item.modality)
    )
    output_dir.mkdir(parents=True, exist_ok=True)

    def process(indexed: Tuple[int, ManifestRecord]):
        index, item = indexed
        source = image_root / item.path
        try:
            if not policy.mode.corrupts(item.modality):
                if copy_unchanged:
                    target = output_dir / item.path
                    target.parent.mkdir(parents=True, exist_ok=True)
                    shutil.copyfile(source, target)
                    return None, None, str(target)
                return None, None, None
            img = load_image(source, item.modality)
            out, record = corrupt_image(img, item.image_id, policy, Rng.derive(master_seed, index), table)
            target = save_image(out, corrupted_path(output_dir, item.path))
            return record, None, str(target)
        except (OSError, ValueError) as e:
            logger.warning("图像 %s 处理失败: %s", item.image_id, e)
            return None, ItemError(image_id=item.image_id, path=str(source), message=str(e)), None

    indexed = list(enumerate(items))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(process, indexed))
    else:
        outcomes = [process(entry) for entry in indexed]

    result = CorruptionRunResult()
    for record, error, written in outcomes:
        if record is not None:
            result.records.append(record)
        if error is not None:
            result.errors.append(error)
        if written is not None:
            result.written.append(written)

    write_records(result.records, output_dir / RECORD_LOG_NAME)
    logger.info("腐蚀完成: mode=%s, %d 条记录, %d 个错误",
                policy.mode.value, len(result.records), len(result.errors))
    return result


def replay_records(records: Iterable[CorruptionRecord],
                   manifest: Union[DatasetManifest, Sequence[ManifestRecord]],
                   image_root: Union[str, Path],
                   output_dir: Union[str, Path],
                   table: Optional[SeverityTable] = None) -> List[Path]:
    """
    按记录日志重新生成腐蚀图像

    Returns:
        写出的文件路径列表，与 records 顺序一致
    """
    records = list(records)
    lookup = {r.image_id: r for r in _as_records(manifest)}
    table = table or load_severity_table()
    _check_targets((r.image_id, corrupted_path(output_dir, lookup[r.image_id].path))
                   for r in records if r.image_id in lookup)
    written = []
    for record in records:
        item = lookup.get(record.image_id)
        if item is None:
            raise KeyError(f"清单中没有图像 {record.image_id}")
        img = load_image(Path(image_root) / item.path, item.modality)
        out = replay_record(img, record, table)
        written.append(save_image(out, corrupted_path(output_dir, item.path)))
    return written
