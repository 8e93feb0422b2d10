"""
确定性几何 / 像素基本操作

所有函数都是 (输入, rng 状态) 的纯函数，返回新的 ImageBuffer，不修改输入。
浮点计算的结果统一按"四舍五入（0.5 进位）+ 截断到 [0, 255]"写回。
"""

import math
from typing import Tuple

import numpy as np
from scipy import ndimage

from ..exceptions import InvalidArgumentError
from ..models import ImageBuffer
from .rng import Rng

# ITU-R BT.601 亮度权重
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


def to_uint8(values: np.ndarray) -> np.ndarray:
    """浮点数组写回 8 位：0.5 进位后截断"""
    return np.clip(np.floor(np.asarray(values, dtype=np.float64) + 0.5), 0, 255).astype(np.uint8)


def float_to_uint8(values: np.ndarray) -> np.ndarray:
    """[0, 1] 浮点数组写回 8 位"""
    return to_uint8(np.asarray(values, dtype=np.float64) * 255.0)


def round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def luminance(pixels: np.ndarray) -> np.ndarray:
    """(H, W, 3) -> (H, W) 浮点亮度"""
    return np.asarray(pixels, dtype=np.float64) @ LUMA_WEIGHTS


def resize(img: ImageBuffer, w: int, h: int) -> ImageBuffer:
    """
    双线性缩放（半像素中心对齐，边缘像素钳制）

    Args:
        img: 输入图像
        w: 目标宽度
        h: 目标高度

    Returns:
        w × h 的新图像，模态不变
    """
    if w < 1 or h < 1:
        raise InvalidArgumentError(f"缩放尺寸必须 ≥ 1，实际为 {w}×{h}")
    if (w, h) == img.size:
        return img

    src = img.pixels.astype(np.float64)
    in_h, in_w = img.height, img.width

    def _axis(out_len: int, in_len: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        pos = (np.arange(out_len) + 0.5) * in_len / out_len - 0.5
        pos = np.clip(pos, 0, in_len - 1)
        lo = np.floor(pos).astype(np.int64)
        hi = np.minimum(lo + 1, in_len - 1)
        return lo, hi, pos - lo

    y0, y1, wy = _axis(h, in_h)
    x0, x1, wx = _axis(w, in_w)
    wx = wx[None, :, None]
    top = src[y0][:, x0] * (1 - wx) + src[y0][:, x1] * wx
    bottom = src[y1][:, x0] * (1 - wx) + src[y1][:, x1] * wx
    wy = wy[:, None, None]
    return img.with_pixels(to_uint8(top * (1 - wy) + bottom * wy))


def sample_crop_offset(pad: int, rng: Rng) -> Tuple[int, int]:
    """在补零后的图像上均匀抽取裁剪窗口偏移 (dx, dy)"""
    if pad < 0:
        raise InvalidArgumentError(f"pad 必须 ≥ 0，实际为 {pad}")
    dx = rng.integers(0, 2 * pad + 1)
    dy = rng.integers(0, 2 * pad + 1)
    return dx, dy


def crop_with_padding(img: ImageBuffer, pad: int, dx: int, dy: int) -> ImageBuffer:
    """四周补 pad 个零像素后，在偏移 (dx, dy) 处裁出原尺寸窗口"""
    if pad == 0:
        return img
    padded = np.pad(img.pixels, ((pad, pad), (pad, pad), (0, 0)), mode="constant")
    return img.with_pixels(padded[dy:dy + img.height, dx:dx + img.width])


def random_crop_with_padding(img: ImageBuffer, pad: int, rng: Rng) -> ImageBuffer:
    """补零随机裁剪，输出尺寸与输入相同"""
    dx, dy = sample_crop_offset(pad, rng)
    return crop_with_padding(img, pad, dx, dy)


def flip_columns(img: ImageBuffer) -> ImageBuffer:
    return img.with_pixels(img.pixels[:, ::-1])


def horizontal_flip(img: ImageBuffer, p: float, rng: Rng) -> ImageBuffer:
    """以概率 p 水平翻转"""
    if not 0.0 <= p <= 1.0:
        raise InvalidArgumentError(f"翻转概率必须在 [0, 1] 内，实际为 {p}")
    if rng.bernoulli(p):
        return flip_columns(img)
    return img


def gray_pixels(pixels: np.ndarray) -> np.ndarray:
    """像素数组灰度化，返回 R=G=B 的 uint8 数组"""
    y = to_uint8(luminance(pixels))
    return np.repeat(y[:, :, None], 3, axis=2)


def to_grayscale(img: ImageBuffer) -> ImageBuffer:
    """BT.601 灰度化，模态不变"""
    return img.with_pixels(gray_pixels(img.pixels))


def psnr(a: ImageBuffer, b: ImageBuffer) -> float:
    """
    峰值信噪比（峰值 255）

    Returns:
        分贝值；两图完全相同时返回 math.inf
    """
    if a.size != b.size:
        raise InvalidArgumentError(f"图像尺寸不一致: {a.size} vs {b.size}")
    diff = a.pixels.astype(np.float64) - b.pixels.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0 ** 2 / mse)


def gaussian_blur(img: ImageBuffer, sigma: float) -> ImageBuffer:
    """逐通道高斯模糊，边界取最近像素"""
    if sigma <= 0:
        return img
    out = ndimage.gaussian_filter(img.pixels.astype(np.float64), sigma=(sigma, sigma, 0), mode="nearest")
    return img.with_pixels(to_uint8(out))


def enhance_brightness(img: ImageBuffer, factor: float) -> ImageBuffer:
    """亮度增强：像素值乘以 factor 后截断"""
    if factor < 0:
        raise InvalidArgumentError(f"亮度系数必须 ≥ 0，实际为 {factor}")
    return img.with_pixels(to_uint8(img.pixels.astype(np.float64) * factor))


def blank_like(img: ImageBuffer) -> ImageBuffer:
    """同尺寸同模态的全零图像"""
    return img.with_pixels(np.zeros_like(img.pixels))
