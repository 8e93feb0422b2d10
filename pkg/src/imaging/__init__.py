"""图像基本操作模块"""

from .rng import Rng, derive_seed
from .ops import (
    resize, random_crop_with_padding, crop_with_padding, sample_crop_offset,
    horizontal_flip, flip_columns, to_grayscale, gray_pixels, psnr,
    gaussian_blur, enhance_brightness, blank_like, to_uint8, float_to_uint8,
    round_half_up, luminance,
)
from .io import load_image, save_image, from_pil, to_pil

__all__ = [
    "Rng", "derive_seed",
    "resize", "random_crop_with_padding", "crop_with_padding", "sample_crop_offset",
    "horizontal_flip", "flip_columns", "to_grayscale", "gray_pixels", "psnr",
    "gaussian_blur", "enhance_brightness", "blank_like", "to_uint8", "float_to_uint8",
    "round_half_up", "luminance",
    "load_image", "save_image", "from_pil", "to_pil",
]
