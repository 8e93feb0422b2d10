"""
策略执行

算子按策略声明顺序执行，每个算子的触发与参数抽样都来自同一个 Rng，顺序固定：
    resize           无抽样
    random_crop      同步几何时抽一次 (dx, dy)，否则可见光、红外各抽一次
    horizontal_flip  同步几何时抽一次，否则可见光、红外各抽一次
    augmix           可见光、红外依次：触发 → Dirichlet → Beta → 各链
    其余局部算子     见各自函数说明，可见光先于红外
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence

from ..config import Config
from ..exceptions import InvalidArgumentError
from ..imaging.ops import crop_with_padding, flip_columns, horizontal_flip, resize, sample_crop_offset
from ..imaging.rng import Rng
from ..models import (
    AugmentPolicy, EraseParams, ImagePair, ModalityTag, PatchParams, PatchVariant, RectLog,
)
from .augmix import augmix
from .erase import ms_rea, soft_random_erase
from .masking import DEFAULT_INTUITIVE_PROBABILITY, intuitive_blur, intuitive_lum_sat, modality_mask
from .patch import m_patch, ms_patch, self_patch_mix

logger = logging.getLogger(__name__)

OperatorFn = Callable[[ImagePair, Dict[str, Any], AugmentPolicy, Rng, RectLog], ImagePair]

_ERASE_FIELDS = set(EraseParams.model_fields)
_PATCH_FIELDS = set(PatchParams.model_fields)


def _pick(params: Dict[str, Any], fields) -> Dict[str, Any]:
    return {k: v for k, v in params.items() if k in fields}


def _both(pair: ImagePair, fn) -> ImagePair:
    return pair.replace(visible=fn(pair.visible), infrared=fn(pair.infrared))


def _op_resize(pair, params, policy, rng, log):
    w = int(params.get("w", Config.IMAGE_WIDTH))
    h = int(params.get("h", Config.IMAGE_HEIGHT))
    return _both(pair, lambda img: resize(img, w, h))


def _op_random_crop(pair, params, policy, rng, log):
    pad = int(params.get("pad", Config.CROP_PADDING))
    if policy.sync_geometry:
        dx, dy = sample_crop_offset(pad, rng)
        return _both(pair, lambda img: crop_with_padding(img, pad, dx, dy))
    visible = crop_with_padding(pair.visible, pad, *sample_crop_offset(pad, rng))
    infrared = crop_with_padding(pair.infrared, pad, *sample_crop_offset(pad, rng))
    return pair.replace(visible=visible, infrared=infrared)


def _op_horizontal_flip(pair, params, policy, rng, log):
    p = float(params.get("p", 0.5))
    if policy.sync_geometry:
        if not 0.0 <= p <= 1.0:
            raise InvalidArgumentError(f"翻转概率必须在 [0, 1] 内，实际为 {p}")
        return _both(pair, flip_columns) if rng.bernoulli(p) else pair
    return pair.replace(visible=horizontal_flip(pair.visible, p, rng),
                        infrared=horizontal_flip(pair.infrared, p, rng))


def _op_augmix(pair, params, policy, rng, log):
    probability = float(params.get("probability", 1.0))
    kwargs = {
        "width": int(params.get("width", 3)),
        "depth": int(params.get("depth", -1)),
        "severity": int(params.get("severity", 3)),
        "alpha": float(params.get("alpha", 1.0)),
    }
    images = {}
    for key in ("visible", "infrared"):
        img = getattr(pair, key)
        images[key] = augmix(img, rng=rng, **kwargs) if rng.bernoulli(probability) else img
    return pair.replace(**images)


def _single_modality(params: Dict[str, Any]) -> ModalityTag:
    return ModalityTag.parse(params.get("modality", "visible"))


def _op_s_rea(pair, params, policy, rng, log):
    modality = _single_modality(params)
    erased = soft_random_erase(pair.get(modality), EraseParams(**_pick(params, _ERASE_FIELDS)),
                               rng, log=log, operator="s_rea")
    return pair.with_image(modality, erased)


def _op_ms_rea(pair, params, policy, rng, log):
    return ms_rea(pair, EraseParams(**_pick(params, _ERASE_FIELDS)), rng, log=log)


def _op_s_patch(pair, params, policy, rng, log):
    modality = _single_modality(params)
    mixed = self_patch_mix(pair.get(modality), rng, PatchParams(**_pick(params, _PATCH_FIELDS)),
                           log=log, operator="s_patch")
    return pair.with_image(modality, mixed)


def _op_ms_patch(pair, params, policy, rng, log):
    return ms_patch(pair, rng, PatchParams(**_pick(params, _PATCH_FIELDS)), log=log)


def _op_m_patch(pair, params, policy, rng, log):
    variant = PatchVariant(params.get("variant", "SS"))
    return m_patch(pair, variant, rng, PatchParams(**_pick(params, _PATCH_FIELDS)), log=log)


def _op_modality_mask(pair, params, policy, rng, log):
    return modality_mask(pair, float(params.get("probability", policy.masking_probability)), rng)


def _op_intuitive_blur(pair, params, policy, rng, log):
    return intuitive_blur(pair, float(params.get("probability", DEFAULT_INTUITIVE_PROBABILITY)), rng,
                          radius=float(params.get("radius", 3.0)))


def _op_intuitive_lum_sat(pair, params, policy, rng, log):
    return intuitive_lum_sat(pair, float(params.get("probability", DEFAULT_INTUITIVE_PROBABILITY)), rng)


OPERATORS: Dict[str, OperatorFn] = {
    "resize": _op_resize,
    "random_crop": _op_random_crop,
    "horizontal_flip": _op_horizontal_flip,
    "augmix": _op_augmix,
    "s_rea": _op_s_rea,
    "ms_rea": _op_ms_rea,
    "s_patch": _op_s_patch,
    "ms_patch": _op_ms_patch,
    "m_patch": _op_m_patch,
    "modality_mask": _op_modality_mask,
    "intuitive_blur": _op_intuitive_blur,
    "intuitive_lum_sat": _op_intuitive_lum_sat,
}


def validate_policy(policy: AugmentPolicy):
    """检查策略中的算子名是否都已注册"""
    unknown = [name for name in policy.operator_names() if name not in OPERATORS]
    if unknown:
        raise InvalidArgumentError(f"策略 {policy.name} 含未知算子: {', '.join(unknown)}")


def apply_policy(pair: ImagePair, policy: AugmentPolicy, rng: Rng,
                 log: Optional[RectLog] = None) -> ImagePair:
    """
    按声明顺序执行策略中的全部算子

    Args:
        pair: 输入图像对
        policy: 增强策略
        rng: 随机数发生器
        log: 矩形日志

    Returns:
        增强后的图像对
    """
    validate_policy(policy)
    log = log if log is not None else RectLog()
    for spec in policy.operators:
        pair = OPERATORS[spec.name](pair, spec.params, policy, rng, log)
    return pair


class AugmentedPair(NamedTuple):
    pair: ImagePair
    log: RectLog


def augment_batch(pairs: Sequence[ImagePair], policy: AugmentPolicy, master_seed: int,
                  workers: int = 1) -> List[AugmentedPair]:
    """
    批量增强，第 i 个图像对使用 Rng.derive(master_seed, i)

    输出与 workers 无关，顺序与输入一致。
    """
    validate_policy(policy)

    def run(index: int) -> AugmentedPair:
        log = RectLog()
        out = apply_policy(pairs[index], policy, Rng.derive(master_seed, index), log)
        return AugmentedPair(out, log)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(len(pairs))))
    else:
        results = [run(i) for i in range(len(pairs))]
    logger.info("已增强 %d 个图像对 (preset=%s)", len(results), policy.name)
    return results
