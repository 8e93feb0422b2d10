"""矩形采样"""

import logging
import math
from typing import Optional, Tuple

from ..imaging.ops import round_half_up
from ..imaging.rng import Rng
from ..models import Rect

logger = logging.getLogger(__name__)

MAX_RECT_ATTEMPTS = 64


def sample_size(width: int, height: int,
                area_ratio_range: Tuple[float, float],
                aspect_range: Tuple[float, float],
                rng: Rng) -> Optional[Tuple[int, int]]:
    """
    按面积比例和宽高比抽取矩形尺寸

    超出图像边界时重抽，最多 64 次；仍失败返回 None。

    Returns:
        (w, h) 或 None
    """
    area = width * height
    for _ in range(MAX_RECT_ATTEMPTS):
        target = rng.uniform(*area_ratio_range) * area
        aspect = rng.uniform(*aspect_range)
        h = round_half_up(math.sqrt(target * aspect))
        w = round_half_up(math.sqrt(target / aspect))
        if 1 <= w <= width and 1 <= h <= height:
            return w, h
    logger.debug("%d 次尝试均未得到合法矩形 (%d×%d)", MAX_RECT_ATTEMPTS, width, height)
    return None


def sample_position(w: int, h: int, width: int, height: int, rng: Rng) -> Rect:
    """给定尺寸，在图像内均匀抽取位置"""
    x = rng.integers(0, width - w + 1)
    y = rng.integers(0, height - h + 1)
    return Rect(x=x, y=y, w=w, h=h)


def sample_rect(width: int, height: int,
                area_ratio_range: Tuple[float, float],
                aspect_range: Tuple[float, float],
                rng: Rng) -> Optional[Rect]:
    """抽取尺寸和位置；失败返回 None"""
    size = sample_size(width, height, area_ratio_range, aspect_range, rng)
    if size is None:
        return None
    return sample_position(size[0], size[1], width, height, rng)
