"""
特征文件读写

二进制格式（小端）：
    magic    8 字节  b"VIREMB\\x00\\x01"
    version  uint32
    rows     uint64
    dim      uint32
    每行     int64 pair id, int64 identity, dim × float32

文本格式（调试用）：首行 `# vireid-embeddings version=1 dim=D`，
每行 `pair_id<TAB>identity<TAB>空格分隔的特征值`，
或带相机标签的 `pair_id<TAB>identity<TAB>camera<TAB>特征值`（全文件列数一致）。
二进制格式不含相机标签。
"""

import logging
import struct
from pathlib import Path
from typing import Optional, Union

import numpy as np
from pydantic import ValidationError

from ..exceptions import EmbeddingFormatError
from ..models import EmbeddingTable

logger = logging.getLogger(__name__)

MAGIC = b"VIREMB\x00\x01"
VERSION = 1
HEADER = struct.Struct("<8sIQI")
TEXT_HEADER = "# vireid-embeddings"
TEXT_SUFFIXES = {".txt", ".tsv"}


def row_dtype(dim: int) -> np.dtype:
    return np.dtype([("id", "<i8"), ("identity", "<i8"), ("vector", "<f4", (dim,))])


def encode_embeddings(table: EmbeddingTable) -> bytes:
    """编码为二进制格式"""
    records = np.zeros(len(table), dtype=row_dtype(table.dim))
    records["id"] = table.ids
    records["identity"] = table.identities
    records["vector"] = table.rows.astype("<f4")
    return HEADER.pack(MAGIC, VERSION, len(table), table.dim) + records.tobytes()


def decode_embeddings(data: bytes) -> EmbeddingTable:
    """
    解码二进制格式

    Raises:
        EmbeddingFormatError: magic / 版本不符、长度不符、存在非有限值，附带出错的字节偏移
    """
    if len(data) < HEADER.size:
        raise EmbeddingFormatError(f"文件过短，头部需要 {HEADER.size} 字节", offset=len(data))
    magic, version, rows, dim = HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise EmbeddingFormatError(f"magic 不匹配: {magic!r}", offset=0)
    if version != VERSION:
        raise EmbeddingFormatError(f"不支持的版本 {version}", offset=8)
    if dim < 1:
        raise EmbeddingFormatError("特征维度必须 ≥ 1", offset=20)

    dtype = row_dtype(dim)
    expected = HEADER.size + rows * dtype.itemsize
    if len(data) < expected:
        complete = (len(data) - HEADER.size) // dtype.itemsize
        raise EmbeddingFormatError(f"声明 {rows} 行，实际只有 {complete} 行完整数据",
                                   offset=HEADER.size + complete * dtype.itemsize)
    if len(data) > expected:
        raise EmbeddingFormatError(f"文件末尾多出 {len(data) - expected} 字节", offset=expected)

    records = np.frombuffer(data, dtype=dtype, count=rows, offset=HEADER.size)
    finite = np.all(np.isfinite(records["vector"]), axis=1)
    if not finite.all():
        bad = int(np.argmin(finite))
        raise EmbeddingFormatError(f"第 {bad} 行存在非有限值", offset=HEADER.size + bad * dtype.itemsize)
    return _build(records["id"].tolist(), records["identity"].tolist(),
                  records["vector"].astype(np.float64), offset=HEADER.size)


def _build(ids, identities, rows, offset: int, cameras=None) -> EmbeddingTable:
    try:
        return EmbeddingTable(ids=ids, identities=identities, rows=rows, cameras=cameras)
    except ValidationError as e:
        raise EmbeddingFormatError(f"特征表不合法: {e.errors()[0]['msg']}", offset=offset) from e


def parse_text_embeddings(text: str) -> EmbeddingTable:
    """解析文本格式"""
    ids, identities, rows, cameras = [], [], [], []
    dim = None
    columns = None
    offset = 0
    for line in text.splitlines(keepends=True):
        start = offset
        offset += len(line.encode("utf-8"))
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            for token in stripped.lstrip("#").split():
                if token.startswith("dim="):
                    dim = int(token[4:])
            continue
        fields = stripped.split("\t")
        if len(fields) not in (3, 4):
            raise EmbeddingFormatError("每行需要 3 列（pair_id, identity, 特征）或 4 列（另加 camera）", offset=start)
        if columns is None:
            columns = len(fields)
        if len(fields) != columns:
            raise EmbeddingFormatError(f"列数应为 {columns}，实际 {len(fields)}", offset=start)
        if columns == 4:
            cameras.append(fields[2])
        try:
            vector = [float(v) for v in fields[-1].split()]
            ids.append(int(fields[0]))
            identities.append(int(fields[1]))
        except ValueError as e:
            raise EmbeddingFormatError(f"无法解析数值: {e}", offset=start) from e
        if dim is None:
            dim = len(vector)
        if len(vector) != dim:
            raise EmbeddingFormatError(f"特征维度应为 {dim}，实际 {len(vector)}", offset=start)
        rows.append(vector)
    if not rows:
        raise EmbeddingFormatError("没有特征行", offset=offset)
    return _build(ids, identities, np.asarray(rows, dtype=np.float64), offset=0,
                  cameras=cameras if columns == 4 else None)


def format_text_embeddings(table: EmbeddingTable) -> str:
    lines = [f"{TEXT_HEADER} version={VERSION} dim={table.dim}"]
    cameras = table.cameras or [None] * len(table)
    for pid, identity, camera, row in zip(table.ids, table.identities, cameras, table.rows):
        prefix = f"{pid}\t{identity}\t" if camera is None else f"{pid}\t{identity}\t{camera}\t"
        lines.append(prefix + " ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def read_embeddings(path: Union[str, Path]) -> EmbeddingTable:
    """读取特征文件，.txt / .tsv 或以文本表头开头的文件按文本格式解析，其余按二进制"""
    data = Path(path).read_bytes()
    is_text = Path(path).suffix.lower() in TEXT_SUFFIXES or data.startswith(TEXT_HEADER.encode())
    if not is_text:
        table = decode_embeddings(data)
    else:
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise EmbeddingFormatError("文本特征文件不是有效的 UTF-8", offset=e.start) from e
        table = parse_text_embeddings(text)
    logger.debug("已读取特征 %s: %d 行, dim=%d", path, len(table), table.dim)
    return table


def write_embeddings(table: EmbeddingTable, path: Union[str, Path], text: Optional[bool] = None) -> Path:
    """
    写出特征文件

    text 为 None 时按后缀决定：.txt / .tsv 为文本，其余为二进制。
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if text is None:
        text = path.suffix.lower() in TEXT_SUFFIXES
    if text:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(format_text_embeddings(table))
    else:
        path.write_bytes(encode_embeddings(table))
    return path
