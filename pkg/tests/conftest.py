"""测试公共夹具：合成图像、图像对与小型清单数据集"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.imaging import save_image  # noqa: E402
from src.models import DatasetKind, DatasetManifest, ImageBuffer, ImagePair, ManifestRecord, ModalityTag  # noqa: E402
from src.protocol import write_manifest  # noqa: E402


def _random_pixels(width: int, height: int, seed: int, gray: bool) -> np.ndarray:
    gen = np.random.default_rng(seed)
    if gray:
        y = gen.integers(0, 256, size=(height, width), dtype=np.uint8)
        return np.repeat(y[:, :, None], 3, axis=2)
    return gen.integers(0, 256, size=(height, width, 3), dtype=np.uint8)


@pytest.fixture
def make_image():
    """make_image(width, height, modality, seed) -> 随机纹理图像"""

    def factory(width: int = 24, height: int = 48, modality: ModalityTag = ModalityTag.VISIBLE,
                seed: int = 0) -> ImageBuffer:
        pixels = _random_pixels(width, height, seed, gray=modality == ModalityTag.INFRARED)
        return ImageBuffer(pixels=pixels, modality=modality)

    return factory


@pytest.fixture
def make_pair(make_image):
    """make_pair(width, height, seed) -> 同尺寸的可见光 + 红外图像对"""

    def factory(width: int = 24, height: int = 48, seed: int = 0, identity: int = 0) -> ImagePair:
        return ImagePair(
            visible=make_image(width, height, ModalityTag.VISIBLE, seed),
            infrared=make_image(width, height, ModalityTag.INFRARED, seed + 1),
            identity=identity,
            visible_id=f"v{seed}",
            infrared_id=f"i{seed}",
        )

    return factory


@pytest.fixture
def probe_image():
    """平滑渐变 + 中灰的 48×96 可见光图像，用于 PSNR 单调性检查"""
    yy, xx = np.mgrid[0:96, 0:48]
    r = 60 + 100 * xx / 47
    g = 60 + 100 * yy / 95
    b = np.full_like(r, 128.0)
    pixels = np.stack([r, g, b], axis=-1).round().astype(np.uint8)
    return ImageBuffer(pixels=pixels, modality=ModalityTag.VISIBLE)


def build_dataset(root: Path, identities: int = 4, per_modality=(2, 2),
                  kind: DatasetKind = DatasetKind.CUSTOM, paired: bool = False,
                  size=(16, 32)) -> Path:
    """在 root 下写出 PNG 图像和清单，返回清单路径"""
    width, height = size
    records = []
    seed = 0
    for identity in range(identities):
        for modality, count, camera in ((ModalityTag.VISIBLE, per_modality[0], "cam1"),
                                        (ModalityTag.INFRARED, per_modality[1], "cam3")):
            for k in range(count):
                tag = "v" if modality == ModalityTag.VISIBLE else "i"
                image_id = f"{identity:04d}_{tag}{k}"
                rel = f"{identity:04d}/{tag}{k}.png"
                pixels = _random_pixels(width, height, seed, gray=modality == ModalityTag.INFRARED)
                save_image(ImageBuffer(pixels=pixels, modality=modality), root / rel)
                records.append(ManifestRecord(image_id=image_id, identity=identity, camera=camera,
                                              modality=modality, path=rel))
                seed += 1
    manifest = DatasetManifest(dataset_kind=kind, paired_cameras=paired, records=records)
    return write_manifest(manifest, root / "manifest.tsv")


@pytest.fixture
def dataset_dir(tmp_path):
    """4 个身份、每个身份 2 张可见光 + 2 张红外图像的小型数据集"""
    root = tmp_path / "data"
    manifest_path = build_dataset(root)
    return manifest_path, root


def synthetic_manifest(identities: int, per_modality=(2, 2), kind: DatasetKind = DatasetKind.CUSTOM,
                       paired: bool = False) -> DatasetManifest:
    """不落盘的合成清单（只用于协议层测试）"""
    records = []
    for identity in range(identities):
        for modality, count in ((ModalityTag.VISIBLE, per_modality[0]), (ModalityTag.INFRARED, per_modality[1])):
            tag = "v" if modality == ModalityTag.VISIBLE else "i"
            for k in range(count):
                records.append(ManifestRecord(image_id=f"{identity}_{tag}{k}", identity=identity,
                                              camera="c1" if tag == "v" else "c3",
                                              modality=modality, path=f"{identity}/{tag}{k}.png"))
    return DatasetManifest(dataset_kind=kind, paired_cameras=paired, records=records)


@pytest.fixture
def manifest_factory():
    return synthetic_manifest


@pytest.fixture
def dataset_factory():
    return build_dataset
