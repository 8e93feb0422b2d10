"""软随机擦除：S-REA 与 MS-REA"""

import logging
from typing import Optional

import numpy as np

from ..exceptions import InvalidArgumentError
from ..imaging.ops import round_half_up
from ..imaging.rng import Rng
from ..models import EraseParams, ImageBuffer, ImagePair, ModalityTag, Rect, RectLog
from .rects import sample_rect

logger = logging.getLogger(__name__)


def soft_random_erase(img: ImageBuffer, params: EraseParams, rng: Rng,
                      rect: Optional[Rect] = None,
                      log: Optional[RectLog] = None,
                      operator: str = "s_rea") -> ImageBuffer:
    """
    S-REA：矩形内按比例随机替换像素

    矩形内恰好 round(pixel_fill_fraction × 面积) 个像素（不放回均匀抽取）被替换为
    独立均匀随机值；红外图像的替换值为灰度。矩形外像素不变。

    Args:
        img: 输入图像
        params: 擦除参数
        rng: 随机数发生器
        rect: 指定矩形；为空时按参数抽取
        log: 矩形日志
        operator: 写入日志的算子名

    Returns:
        新图像
    """
    if not rng.bernoulli(params.probability):
        return img
    if rect is None:
        rect = sample_rect(img.width, img.height, params.area_ratio_range, params.aspect_range, rng)
        if rect is None:
            return img
    elif not rect.fits(img.width, img.height):
        raise InvalidArgumentError(f"矩形 {rect} 超出图像 {img.size}")

    count = round_half_up(params.pixel_fill_fraction * rect.area)
    if log is not None:
        log.add(operator, img.modality, rect)
    if count == 0:
        return img

    picked = rng.sample_without_replacement(rect.area, count)
    rows = rect.y + picked // rect.w
    cols = rect.x + picked % rect.w
    if img.modality == ModalityTag.INFRARED:
        values = np.repeat(rng.byte_array((count, 1)), 3, axis=1)
    else:
        values = rng.byte_array((count, 3))

    pixels = img.pixels.copy()
    pixels[rows, cols] = values
    return img.with_pixels(pixels)


def ms_rea(pair: ImagePair, params: EraseParams, rng: Rng,
           log: Optional[RectLog] = None) -> ImagePair:
    """MS-REA：两个模态各自独立触发、独立抽取矩形"""
    visible = soft_random_erase(pair.visible, params, rng, log=log, operator="ms_rea")
    infrared = soft_random_erase(pair.infrared, params, rng, log=log, operator="ms_rea")
    if visible is pair.visible and infrared is pair.infrared:
        return pair
    return pair.replace(visible=visible, infrared=infrared)
