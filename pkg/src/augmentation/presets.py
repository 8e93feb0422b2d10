"""增强策略预设"""

from collections import OrderedDict
from typing import Dict, List

from ..config import Config
from ..exceptions import InvalidArgumentError
from ..models import AugmentPolicy, OperatorSpec


def _standard() -> List[OperatorSpec]:
    return [
        OperatorSpec(name="resize", params={"w": Config.IMAGE_WIDTH, "h": Config.IMAGE_HEIGHT}),
        OperatorSpec(name="random_crop", params={"pad": Config.CROP_PADDING}),
        OperatorSpec(name="horizontal_flip", params={"p": 0.5}),
    ]


def _augmix() -> List[OperatorSpec]:
    return _standard() + [
        OperatorSpec(name="augmix", params={"width": 3, "depth": -1, "severity": 3,
                                            "alpha": 1.0, "probability": 1.0}),
    ]


def _op(name: str, **params) -> OperatorSpec:
    return OperatorSpec(name=name, params=params)


# 预设名 -> 算子序列构造函数
_PRESETS = OrderedDict([
    ("Standard", lambda: _standard()),
    ("Augmix", lambda: _augmix()),
    ("Augmix+S-REA", lambda: _augmix() + [_op("s_rea", modality="visible")]),
    ("Augmix+MS-REA", lambda: _augmix() + [_op("ms_rea")]),
    ("Augmix+S-PATCH", lambda: _augmix() + [_op("s_patch", modality="visible")]),
    ("Augmix+MS-PATCH", lambda: _augmix() + [_op("ms_patch")]),
    ("Augmix+M-PATCH-SS", lambda: _augmix() + [_op("m_patch", variant="SS")]),
    ("Augmix+M-PATCH-SD", lambda: _augmix() + [_op("m_patch", variant="SD")]),
    ("Augmix+M-PATCH-DD", lambda: _augmix() + [_op("m_patch", variant="DD")]),
    ("Augmix+Masking", lambda: _augmix() + [_op("modality_mask")]),
    ("ML-MDA", lambda: _augmix() + [_op("ms_rea"), _op("modality_mask")]),
    ("Blur", lambda: _augmix() + [_op("intuitive_blur", probability=1.0 / 8.0)]),
    ("LumSat", lambda: _augmix() + [_op("intuitive_lum_sat", probability=1.0 / 8.0)]),
    ("Augmix+MS-REA+M-PATCH-SS", lambda: _augmix() + [_op("ms_rea"), _op("m_patch", variant="SS")]),
    ("ML-MDA+M-PATCH-SS", lambda: _augmix() + [_op("ms_rea"), _op("m_patch", variant="SS"),
                                              _op("modality_mask")]),
])

PRESET_DESCRIPTIONS: Dict[str, str] = {
    "Standard": "仅缩放、补零裁剪、水平翻转",
    "Augmix": "Standard + Augmix",
    "Augmix+S-REA": "Augmix + 可见光软随机擦除",
    "Augmix+MS-REA": "Augmix + 双模态独立软随机擦除",
    "Augmix+S-PATCH": "Augmix + 可见光自补丁混合",
    "Augmix+MS-PATCH": "Augmix + 双模态独立自补丁混合",
    "Augmix+M-PATCH-SS": "Augmix + 跨模态补丁（同源同位）",
    "Augmix+M-PATCH-SD": "Augmix + 跨模态补丁（同源异位）",
    "Augmix+M-PATCH-DD": "Augmix + 跨模态补丁（异源异位）",
    "Augmix+Masking": "Augmix + 模态掩蔽",
    "ML-MDA": "Augmix + MS-REA + 模态掩蔽",
    "Blur": "Augmix + 固定强度高斯模糊",
    "LumSat": "Augmix + 亮度 / 红外饱和度变化",
    "Augmix+MS-REA+M-PATCH-SS": "Augmix + MS-REA + M-PATCH-SS",
    "ML-MDA+M-PATCH-SS": "ML-MDA + M-PATCH-SS",
}


def list_presets() -> List[str]:
    """全部预设名，按声明顺序"""
    return list(_PRESETS)


def get_preset(name: str) -> AugmentPolicy:
    """
    按名称获取预设策略（大小写不敏感）

    Raises:
        InvalidArgumentError: 未知预设，消息中列出全部预设
    """
    for preset in _PRESETS:
        if preset.lower() == str(name).strip().lower():
            return AugmentPolicy(name=preset, operators=_PRESETS[preset]())
    raise InvalidArgumentError(f"未知的增强预设: {name}（可选: {', '.join(_PRESETS)}）")
