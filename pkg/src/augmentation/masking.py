"""模态掩蔽与直观增强（模糊、亮度 / 饱和度）"""

from typing import Optional, Tuple

from ..exceptions import InvalidArgumentError
from ..imaging.ops import blank_like, enhance_brightness, gaussian_blur
from ..imaging.rng import Rng
from ..models import ImagePair, ModalityTag

DEFAULT_INTUITIVE_PROBABILITY = 1.0 / 8.0
BLUR_RADIUS = 3.0


def _check_probability(p: float):
    if not 0.0 <= p <= 1.0:
        raise InvalidArgumentError(f"概率必须在 [0, 1] 内，实际为 {p}")


def _pick_modality(rng: Rng, target: Optional[ModalityTag]) -> ModalityTag:
    """等概率选择一个模态；target 非空时直接使用（仍消耗一次抽样）"""
    drawn = ModalityTag.VISIBLE if rng.random() < 0.5 else ModalityTag.INFRARED
    return ModalityTag(target) if target is not None else drawn


def modality_mask(pair: ImagePair, masking_probability: float, rng: Rng,
                  target: Optional[ModalityTag] = None) -> ImagePair:
    """
    模态掩蔽：以给定概率把其中一个模态替换为全零图像

    Args:
        pair: 图像对
        masking_probability: 触发概率
        rng: 随机数发生器
        target: 指定被掩蔽的模态；为空时等概率选择

    Returns:
        新图像对；不会同时掩蔽两个模态
    """
    _check_probability(masking_probability)
    if not rng.bernoulli(masking_probability):
        return pair
    modality = _pick_modality(rng, target)
    return pair.with_image(modality, blank_like(pair.get(modality)))


def intuitive_blur(pair: ImagePair, probability: float, rng: Rng,
                   radius: float = BLUR_RADIUS,
                   target: Optional[ModalityTag] = None) -> ImagePair:
    """以给定概率对等概率选中的一个模态做固定强度高斯模糊"""
    _check_probability(probability)
    if not rng.bernoulli(probability):
        return pair
    modality = _pick_modality(rng, target)
    return pair.with_image(modality, gaussian_blur(pair.get(modality), radius))


def intuitive_lum_sat(pair: ImagePair, probability: float, rng: Rng,
                      visible_factors: Tuple[float, float] = (2.0, 0.5),
                      infrared_factor: float = 1.5,
                      target: Optional[ModalityTag] = None) -> ImagePair:
    """
    亮度 / 饱和度直观增强

    可见光：亮度系数在 visible_factors 中等概率选择；
    红外：以 infrared_factor 执行亮度传递函数（热成像的"饱和"）。
    """
    _check_probability(probability)
    if not rng.bernoulli(probability):
        return pair
    modality = _pick_modality(rng, target)
    if modality == ModalityTag.VISIBLE:
        factor = visible_factors[0] if rng.random() < 0.5 else visible_factors[1]
    else:
        factor = infrared_factor
    return pair.with_image(modality, enhance_brightness(pair.get(modality), factor))
