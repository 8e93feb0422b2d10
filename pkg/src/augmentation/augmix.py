"""
Augmix

width 条随机变换链的 Dirichlet 加权平均，再与原图按 Beta 权重混合。
操作集只含几何变换和通道对称的强度变换（不含与测试腐蚀重复的颜色 / 对比度 / 亮度 / 锐化），
红外图像以 L 模式处理，输出保持 R=G=B。
"""

from typing import Callable, List, NamedTuple, Optional

import numpy as np
from PIL import Image, ImageOps

from ..exceptions import InvalidArgumentError
from ..imaging.io import from_pil, to_pil
from ..imaging.ops import to_uint8
from ..imaging.rng import Rng
from ..models import ImageBuffer

AugmixOp = Callable[[Image.Image, int, Rng], Image.Image]


def _level(severity: int, rng: Rng) -> float:
    return rng.uniform(0.1, float(severity))


def _int_parameter(level: float, maxval: float) -> int:
    return int(level * maxval / 10)


def _float_parameter(level: float, maxval: float) -> float:
    return float(level) * maxval / 10.0


def _signed(value, rng: Rng):
    return -value if rng.random() > 0.5 else value


def _fill(image: Image.Image):
    return 0 if image.mode == "L" else (0, 0, 0)


def autocontrast(image: Image.Image, severity: int, rng: Rng) -> Image.Image:
    return ImageOps.autocontrast(image)


def equalize(image: Image.Image, severity: int, rng: Rng) -> Image.Image:
    return ImageOps.equalize(image)


def posterize(image: Image.Image, severity: int, rng: Rng) -> Image.Image:
    bits = 4 - _int_parameter(_level(severity, rng), 4)
    return ImageOps.posterize(image, max(1, bits))


def rotate(image: Image.Image, severity: int, rng: Rng) -> Image.Image:
    degrees = _signed(_int_parameter(_level(severity, rng), 30), rng)
    return image.rotate(degrees, resample=Image.Resampling.BILINEAR, fillcolor=_fill(image))


def solarize(image: Image.Image, severity: int, rng: Rng) -> Image.Image:
    threshold = 256 - _int_parameter(_level(severity, rng), 256)
    return ImageOps.solarize(image, threshold)


def _affine(image: Image.Image, coeffs) -> Image.Image:
    return image.transform(image.size, Image.Transform.AFFINE, coeffs,
                           resample=Image.Resampling.BILINEAR, fillcolor=_fill(image))


def shear_x(image: Image.Image, severity: int, rng: Rng) -> Image.Image:
    level = _signed(_float_parameter(_level(severity, rng), 0.3), rng)
    return _affine(image, (1, level, 0, 0, 1, 0))


def shear_y(image: Image.Image, severity: int, rng: Rng) -> Image.Image:
    level = _signed(_float_parameter(_level(severity, rng), 0.3), rng)
    return _affine(image, (1, 0, 0, level, 1, 0))


def translate_x(image: Image.Image, severity: int, rng: Rng) -> Image.Image:
    level = _signed(_int_parameter(_level(severity, rng), image.size[0] / 3), rng)
    return _affine(image, (1, 0, level, 0, 1, 0))


def translate_y(image: Image.Image, severity: int, rng: Rng) -> Image.Image:
    level = _signed(_int_parameter(_level(severity, rng), image.size[1] / 3), rng)
    return _affine(image, (1, 0, 0, 0, 1, level))


AUGMIX_OPS: List[AugmixOp] = [
    autocontrast, equalize, posterize, rotate, solarize,
    shear_x, shear_y, translate_x, translate_y,
]


class AugmixDraw(NamedTuple):
    """一次 Augmix 的全部抽样结果"""

    weights: np.ndarray
    mix: float
    chains: List[np.ndarray]


def augmix_chains(img: ImageBuffer, width: int, depth: int, severity: int, rng: Rng,
                  alpha: float = 1.0) -> AugmixDraw:
    """
    抽取混合权重并生成各条变换链的结果

    抽样顺序：Dirichlet 链权重 → Beta 混合权重 → 逐链（链长 → 逐个操作）。
    depth ≤ 0 时每条链长度在 [1, 3] 中均匀抽取。
    """
    if width < 1:
        raise InvalidArgumentError(f"width 必须 ≥ 1，实际为 {width}")
    if depth == 0 or depth > 16:
        raise InvalidArgumentError(f"depth 必须 ≥ 1 或为 -1（随机），实际为 {depth}")
    weights = rng.dirichlet([alpha] * width)
    mix = rng.beta(alpha, alpha)
    chains = []
    for _ in range(width):
        image = to_pil(img)
        length = depth if depth > 0 else rng.integers(1, 4)
        for _ in range(length):
            op = AUGMIX_OPS[rng.choice_index(len(AUGMIX_OPS))]
            image = op(image, severity, rng)
        chains.append(from_pil(image, img.modality).pixels.astype(np.float64))
    return AugmixDraw(weights=weights, mix=mix, chains=chains)


def augmix(img: ImageBuffer, width: int = 3, depth: int = -1, severity: int = 3,
           rng: Optional[Rng] = None, alpha: float = 1.0,
           original_weight: Optional[float] = None) -> ImageBuffer:
    """
    Augmix 混合

    Args:
        img: 输入图像
        width: 变换链条数
        depth: 每条链的操作数，-1 表示在 [1, 3] 中随机
        severity: 操作强度
        rng: 随机数发生器
        alpha: Dirichlet / Beta 参数
        original_weight: 强制原图的混合权重；1.0 时输出与输入相同

    Returns:
        新图像
    """
    rng = rng or Rng(0)
    draw = augmix_chains(img, width, depth, severity, rng, alpha)
    mixed_chain = np.zeros(img.pixels.shape, dtype=np.float64)
    for weight, chain in zip(draw.weights, draw.chains):
        mixed_chain += weight * chain
    mix = draw.mix if original_weight is None else 1.0 - original_weight
    out = (1.0 - mix) * img.pixels.astype(np.float64) + mix * mixed_chain
    return img.with_pixels(to_uint8(out))
