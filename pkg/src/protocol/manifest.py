"""
数据集清单读写

格式：首行可选表头 `# dataset_kind=SYSU<TAB>paired_cameras=true`，
其后每行一条记录 `image_id<TAB>identity<TAB>camera<TAB>modality<TAB>path`。
空行与其他 # 开头的行忽略。
"""

import logging
from pathlib import Path
from typing import Dict, List, Union

from pydantic import ValidationError

from ..exceptions import ManifestError
from ..models import DatasetKind, DatasetManifest, ManifestRecord, ModalityTag

logger = logging.getLogger(__name__)

TRUE_VALUES = {"1", "true", "yes", "y"}


def _parse_header(text: str) -> Dict[str, str]:
    fields = {}
    for token in text.lstrip("#").strip().split("\t"):
        token = token.strip()
        if not token:
            continue
        if "=" not in token:
            return {}
        key, value = token.split("=", 1)
        fields[key.strip()] = value.strip()
    return fields


def parse_manifest(lines: List[str], source: str = "<manifest>") -> DatasetManifest:
    """解析清单文本行"""
    dataset_kind = DatasetKind.CUSTOM
    paired = False
    records: List[ManifestRecord] = []
    seen: Dict[str, int] = {}

    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        if line.startswith("#"):
            header = _parse_header(line)
            if "dataset_kind" in header:
                try:
                    dataset_kind = DatasetKind.parse(header["dataset_kind"])
                except ValueError as e:
                    raise ManifestError(str(e), line=lineno) from e
            if "paired_cameras" in header:
                paired = header["paired_cameras"].lower() in TRUE_VALUES
            continue

        fields = line.split("\t")
        if len(fields) != 5:
            raise ManifestError(f"需要 5 列（制表符分隔），实际 {len(fields)} 列", line=lineno)
        image_id, identity, camera, modality, path = (f.strip() for f in fields)
        if image_id in seen:
            raise ManifestError(f"image_id 重复: {image_id}（首次出现于第 {seen[image_id]} 行）", line=lineno)
        try:
            record = ManifestRecord(
                image_id=image_id,
                identity=int(identity),
                camera=camera,
                modality=ModalityTag.parse(modality),
                path=path,
            )
        except (ValueError, ValidationError) as e:
            raise ManifestError(f"无法解析记录: {e}", line=lineno) from e
        seen[image_id] = lineno
        records.append(record)

    manifest = DatasetManifest(dataset_kind=dataset_kind, paired_cameras=paired, records=records)
    validate_manifest(manifest)
    logger.debug("已加载清单 %s: %d 条记录, %d 个身份",
                 source, len(records), len(manifest.identities()))
    return manifest


def validate_manifest(manifest: DatasetManifest):
    """每个身份至少要有一张可见光和一张红外图像"""
    if not manifest.records:
        raise ManifestError("清单为空")
    for identity, (visible, infrared) in manifest.group_by_identity().items():
        if not visible:
            raise ManifestError(f"身份 {identity} 缺少可见光图像")
        if not infrared:
            raise ManifestError(f"身份 {identity} 缺少红外图像")


def load_manifest(path: Union[str, Path]) -> DatasetManifest:
    """
    读取并校验清单文件

    Raises:
        ManifestError: 解析失败、image_id 重复、身份缺少某一模态
        OSError: 文件无法读取
    """
    with open(path, "r", encoding="utf-8") as f:
        return parse_manifest(f.readlines(), source=str(path))


def manifest_header(manifest: DatasetManifest) -> str:
    paired = "true" if manifest.paired_cameras else "false"
    return f"# dataset_kind={manifest.dataset_kind.value}\tpaired_cameras={paired}"


def write_manifest(manifest: DatasetManifest, path: Union[str, Path]) -> Path:
    """写出清单（表头 + 记录）"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(manifest_header(manifest) + "\n")
        for record in manifest.records:
            f.write(record.to_line() + "\n")
    return path
