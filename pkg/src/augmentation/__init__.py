"""多模态数据增强模块"""

from .rects import MAX_RECT_ATTEMPTS, sample_position, sample_rect, sample_size
from .erase import ms_rea, soft_random_erase
from .patch import m_patch, ms_patch, self_patch_mix
from .masking import intuitive_blur, intuitive_lum_sat, modality_mask
from .augmix import AUGMIX_OPS, augmix, augmix_chains
from .presets import PRESET_DESCRIPTIONS, get_preset, list_presets
from .pipeline import OPERATORS, AugmentedPair, apply_policy, augment_batch, validate_policy

__all__ = [
    "MAX_RECT_ATTEMPTS", "sample_position", "sample_rect", "sample_size",
    "ms_rea", "soft_random_erase",
    "m_patch", "ms_patch", "self_patch_mix",
    "intuitive_blur", "intuitive_lum_sat", "modality_mask",
    "AUGMIX_OPS", "augmix", "augmix_chains",
    "PRESET_DESCRIPTIONS", "get_preset", "list_presets",
    "OPERATORS", "AugmentedPair", "apply_policy", "augment_batch", "validate_policy",
]
