"""图像数据模型"""

from enum import Enum
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class ModalityTag(str, Enum):
    """成像模态"""

    VISIBLE = "visible"
    INFRARED = "infrared"

    @classmethod
    def parse(cls, value: str) -> "ModalityTag":
        """解析模态字符串，兼容 V/I 缩写"""
        text = str(value).strip().lower()
        aliases = {"v": cls.VISIBLE, "rgb": cls.VISIBLE, "i": cls.INFRARED, "ir": cls.INFRARED}
        if text in aliases:
            return aliases[text]
        return cls(text)


class Rect(BaseModel):
    """矩形区域（像素坐标，左上角为原点）"""

    model_config = ConfigDict(frozen=True)

    x: int = Field(ge=0)
    y: int = Field(ge=0)
    w: int = Field(ge=1)
    h: int = Field(ge=1)

    def fits(self, width: int, height: int) -> bool:
        """是否完整落在 width × height 的图像内"""
        return self.x + self.w <= width and self.y + self.h <= height

    def slices(self) -> Tuple[slice, slice]:
        """返回 (行切片, 列切片)"""
        return slice(self.y, self.y + self.h), slice(self.x, self.x + self.w)

    @property
    def area(self) -> int:
        return self.w * self.h

    def as_tsv(self) -> str:
        return f"{self.x}\t{self.y}\t{self.w}\t{self.h}"


class ImageBuffer(BaseModel):
    """
    解码后的 8 位三通道图像

    pixels 形状为 (height, width, 3)，dtype 为 uint8，构造后只读。
    红外图像必须满足 R=G=B。
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    pixels: np.ndarray
    modality: ModalityTag = ModalityTag.VISIBLE

    @field_validator("pixels", mode="before")
    @classmethod
    def _coerce_pixels(cls, value) -> np.ndarray:
        arr = np.array(value, dtype=np.uint8, copy=True)
        if arr.ndim == 2:
            arr = np.repeat(arr[:, :, None], 3, axis=2)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"像素数组形状必须为 (H, W, 3)，实际为 {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("图像宽高必须 ≥ 1")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        return arr

    @model_validator(mode="after")
    def _check_single_channel(self) -> "ImageBuffer":
        if self.modality == ModalityTag.INFRARED and not self.is_single_channel():
            raise ValueError("红外图像必须满足 R=G=B")
        return self

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def channels(self) -> int:
        return 3

    @property
    def size(self) -> Tuple[int, int]:
        """(width, height)"""
        return self.width, self.height

    def is_single_channel(self) -> bool:
        """三个通道是否逐像素相等"""
        px = self.pixels
        return bool(np.array_equal(px[:, :, 0], px[:, :, 1]) and np.array_equal(px[:, :, 0], px[:, :, 2]))

    def with_pixels(self, pixels: np.ndarray) -> "ImageBuffer":
        """用新像素构造同模态图像"""
        return ImageBuffer(pixels=pixels, modality=self.modality)

    def to_float(self) -> np.ndarray:
        """转换为 [0, 1] 浮点数组（可写副本）"""
        return self.pixels.astype(np.float64) / 255.0

    def __eq__(self, other) -> bool:
        if not isinstance(other, ImageBuffer):
            return NotImplemented
        return self.modality == other.modality and np.array_equal(self.pixels, other.pixels)

    __hash__ = None


class ImagePair(BaseModel):
    """同一身份的可见光 + 红外图像对，多模态增强与 LOOQ 的基本单元"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    visible: ImageBuffer
    infrared: ImageBuffer
    identity: int = 0
    camera_v: str = ""
    camera_i: str = ""
    visible_id: str = ""
    infrared_id: str = ""

    @model_validator(mode="after")
    def _check_modalities(self) -> "ImagePair":
        if self.visible.modality != ModalityTag.VISIBLE:
            raise ValueError("visible 字段必须是可见光图像")
        if self.infrared.modality != ModalityTag.INFRARED:
            raise ValueError("infrared 字段必须是红外图像")
        return self

    def get(self, modality: ModalityTag) -> ImageBuffer:
        return self.visible if modality == ModalityTag.VISIBLE else self.infrared

    def replace(self, **images: ImageBuffer) -> "ImagePair":
        """替换其中一个或两个模态，其余字段保持不变"""
        return self.model_copy(update=images)

    def with_image(self, modality: ModalityTag, image: ImageBuffer) -> "ImagePair":
        key = "visible" if modality == ModalityTag.VISIBLE else "infrared"
        return self.replace(**{key: image})

    @property
    def same_size(self) -> bool:
        return self.visible.size == self.infrared.size
