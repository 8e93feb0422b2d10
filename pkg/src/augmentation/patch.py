"""补丁混合：S-PATCH、MS-PATCH 与跨模态 M-PATCH"""

import logging
from typing import Optional, Tuple

import numpy as np

from ..exceptions import InvalidArgumentError
from ..imaging.ops import gray_pixels
from ..imaging.rng import Rng
from ..models import ImageBuffer, ImagePair, ModalityTag, PatchParams, PatchVariant, Rect, RectLog
from .rects import sample_position, sample_size

logger = logging.getLogger(__name__)

V2I = "v2i"
I2V = "i2v"


def _paste(pixels: np.ndarray, patch: np.ndarray, dst: Rect) -> np.ndarray:
    out = pixels.copy()
    out[dst.slices()] = patch
    return out


def _size(width: int, height: int, params: PatchParams, rng: Rng,
          patch_size: Optional[Tuple[int, int]]) -> Optional[Tuple[int, int]]:
    if patch_size is not None:
        w, h = patch_size
        if not (1 <= w <= width and 1 <= h <= height):
            raise InvalidArgumentError(f"补丁尺寸 {patch_size} 超出图像 {(width, height)}")
        return w, h
    return sample_size(width, height, params.area_ratio_range, params.aspect_range, rng)


def self_patch_mix(img: ImageBuffer, rng: Rng,
                   params: Optional[PatchParams] = None,
                   src: Optional[Rect] = None,
                   dst: Optional[Rect] = None,
                   log: Optional[RectLog] = None,
                   operator: str = "s_patch") -> ImageBuffer:
    """
    S-PATCH：从图像随机位置取一块，贴到同一图像的随机位置

    源区域在写入前读取。src / dst 可指定，指定 src 时 dst 沿用其尺寸。
    """
    params = params or PatchParams()
    if not rng.bernoulli(params.probability):
        return img
    width, height = img.size

    if src is None:
        size = _size(width, height, params, rng, None if dst is None else (dst.w, dst.h))
        if size is None:
            return img
        src = sample_position(size[0], size[1], width, height, rng)
    if dst is None:
        dst = sample_position(src.w, src.h, width, height, rng)
    if (src.w, src.h) != (dst.w, dst.h):
        raise InvalidArgumentError("源矩形与目标矩形尺寸不一致")
    if not (src.fits(width, height) and dst.fits(width, height)):
        raise InvalidArgumentError("矩形超出图像范围")

    if log is not None:
        log.add(operator, img.modality, src, role="src")
        log.add(operator, img.modality, dst, role="dst")
    patch = img.pixels[src.slices()].copy()
    return img.with_pixels(_paste(img.pixels, patch, dst))


def ms_patch(pair: ImagePair, rng: Rng, params: Optional[PatchParams] = None,
             log: Optional[RectLog] = None) -> ImagePair:
    """MS-PATCH：两个模态各自独立做 S-PATCH"""
    visible = self_patch_mix(pair.visible, rng, params, log=log, operator="ms_patch")
    infrared = self_patch_mix(pair.infrared, rng, params, log=log, operator="ms_patch")
    if visible is pair.visible and infrared is pair.infrared:
        return pair
    return pair.replace(visible=visible, infrared=infrared)


def m_patch(pair: ImagePair, variant: PatchVariant, rng: Rng,
            params: Optional[PatchParams] = None,
            patch_size: Optional[Tuple[int, int]] = None,
            log: Optional[RectLog] = None) -> ImagePair:
    """
    M-PATCH：跨模态交换补丁

    可见光补丁贴到红外图像（贴入时灰度化），红外补丁贴到可见光图像。
        SS  源 = 目标，两个方向共用同一矩形
        SD  两个方向共用源矩形，目标位置各自独立
        DD  源、目标位置全部独立

    Args:
        pair: 图像对，两图尺寸必须相同
        variant: SS / SD / DD
        rng: 随机数发生器
        params: 补丁参数
        patch_size: 指定补丁 (w, h)，为空时按参数抽取
        log: 矩形日志，每次触发写入 4 条 (模态, src/dst, 方向)

    Returns:
        新图像对
    """
    if not pair.same_size:
        raise InvalidArgumentError(f"图像对尺寸不一致: {pair.visible.size} vs {pair.infrared.size}")
    params = params or PatchParams()
    variant = PatchVariant(variant)
    if not rng.bernoulli(params.probability):
        return pair
    width, height = pair.visible.size

    size_v2i = _size(width, height, params, rng, patch_size)
    if size_v2i is None:
        return pair
    if variant is PatchVariant.SS:
        rect = sample_position(*size_v2i, width, height, rng)
        src_v = dst_i = src_i = dst_v = rect
    elif variant is PatchVariant.SD:
        src_v = src_i = sample_position(*size_v2i, width, height, rng)
        dst_i = sample_position(*size_v2i, width, height, rng)
        dst_v = sample_position(*size_v2i, width, height, rng)
    else:
        size_i2v = _size(width, height, params, rng, patch_size)
        if size_i2v is None:
            return pair
        src_v = sample_position(*size_v2i, width, height, rng)
        dst_i = sample_position(*size_v2i, width, height, rng)
        src_i = sample_position(*size_i2v, width, height, rng)
        dst_v = sample_position(*size_i2v, width, height, rng)

    if log is not None:
        log.add("m_patch", ModalityTag.VISIBLE, src_v, role="src", direction=V2I)
        log.add("m_patch", ModalityTag.INFRARED, dst_i, role="dst", direction=V2I)
        log.add("m_patch", ModalityTag.INFRARED, src_i, role="src", direction=I2V)
        log.add("m_patch", ModalityTag.VISIBLE, dst_v, role="dst", direction=I2V)

    # 两个补丁都在写入前读取
    patch_v = gray_pixels(pair.visible.pixels[src_v.slices()])
    patch_i = pair.infrared.pixels[src_i.slices()].copy()
    infrared = pair.infrared.with_pixels(_paste(pair.infrared.pixels, patch_v, dst_i))
    visible = pair.visible.with_pixels(_paste(pair.visible.pixels, patch_i, dst_v))
    return pair.replace(visible=visible, infrared=infrared)
