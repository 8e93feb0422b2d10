"""图像编解码（PNG / JPEG，8 位）"""

import logging
from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image

from ..models import ImageBuffer, ModalityTag
from .ops import gray_pixels

logger = logging.getLogger(__name__)

SUPPORTED_SUFFIXES = {".png", ".jpg", ".jpeg"}


def from_pil(image: Image.Image, modality: ModalityTag = ModalityTag.VISIBLE) -> ImageBuffer:
    """
    PIL 图像转换为 ImageBuffer

    红外图像无论以 1 通道还是 3 通道存储，都归一化为 R=G=B 的三通道。
    """
    if modality == ModalityTag.INFRARED and image.mode in ("L", "I", "I;16", "F"):
        pixels = np.asarray(image.convert("L"))
        return ImageBuffer(pixels=pixels, modality=modality)

    pixels = np.asarray(image.convert("RGB"))
    if modality == ModalityTag.INFRARED:
        pixels = gray_pixels(pixels)
    return ImageBuffer(pixels=pixels, modality=modality)


def to_pil(img: ImageBuffer) -> Image.Image:
    """ImageBuffer 转换为 PIL 图像；红外图像以单通道 L 模式表示"""
    if img.modality == ModalityTag.INFRARED:
        return Image.fromarray(np.ascontiguousarray(img.pixels[:, :, 0]))
    return Image.fromarray(np.ascontiguousarray(img.pixels))


def load_image(path: Union[str, Path], modality: ModalityTag) -> ImageBuffer:
    """
    读取 PNG / JPEG 图像

    Args:
        path: 文件路径
        modality: 图像模态

    Returns:
        解码后的 ImageBuffer

    Raises:
        OSError: 文件不存在或无法解码
    """
    path = Path(path)
    with Image.open(path) as image:
        image.load()
        return from_pil(image, modality)


def save_image(img: ImageBuffer, path: Union[str, Path], quality: int = 95) -> Path:
    """
    按后缀保存为 PNG 或 JPEG，自动创建父目录

    PNG 输出不写入时间等元数据，同样的像素总是得到同样的字节。
    """
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix not in SUPPORTED_SUFFIXES:
        raise ValueError(f"不支持的图像格式: {path.suffix}")
    path.parent.mkdir(parents=True, exist_ok=True)

    pil = to_pil(img)
    if suffix == ".png":
        pil.save(path, format="PNG", optimize=False)
    else:
        pil.save(path, format="JPEG", quality=quality)
    logger.debug("已保存图像 %s", path)
    return path
