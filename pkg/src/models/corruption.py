"""腐蚀相关数据模型"""

from enum import Enum
from typing import Annotated, Optional

from pydantic import BaseModel, ConfigDict, Field

from .image import ModalityTag


SeverityLevel = Annotated[int, Field(ge=1, le=5)]


class CorruptionKind(str, Enum):
    """20 种 RGB 腐蚀类型"""

    GAUSSIAN_NOISE = "gaussian_noise"
    SHOT_NOISE = "shot_noise"
    IMPULSE_NOISE = "impulse_noise"
    SPECKLE_NOISE = "speckle_noise"
    DEFOCUS_BLUR = "defocus_blur"
    GLASS_BLUR = "glass_blur"
    MOTION_BLUR = "motion_blur"
    ZOOM_BLUR = "zoom_blur"
    GAUSSIAN_BLUR = "gaussian_blur"
    SNOW = "snow"
    FROST = "frost"
    FOG = "fog"
    RAIN = "rain"
    SPATTER = "spatter"
    BRIGHTNESS = "brightness"
    CONTRAST = "contrast"
    ELASTIC_TRANSFORM = "elastic_transform"
    PIXELATE = "pixelate"
    JPEG_COMPRESSION = "jpeg_compression"
    SATURATE = "saturate"

    @property
    def applies_to_infrared(self) -> bool:
        # 热成像不受环境亮度影响
        return self is not CorruptionKind.BRIGHTNESS


class CorruptionMode(str, Enum):
    """测试集腐蚀模式"""

    CLEAN = "clean"
    RGB_ONLY = "c"
    BOTH = "c-star"
    IR_ONLY = "ir"

    def corrupts(self, modality: ModalityTag) -> bool:
        if self is CorruptionMode.BOTH:
            return True
        if self is CorruptionMode.RGB_ONLY:
            return modality == ModalityTag.VISIBLE
        if self is CorruptionMode.IR_ONLY:
            return modality == ModalityTag.INFRARED
        return False


class CorruptionPolicy(BaseModel):
    """
    腐蚀策略

    severity 为 None 表示在 [1, 5] 中均匀随机（UniformRandom），否则为固定等级。
    腐蚀类型总是在该模态适用的类型中均匀抽取。
    """

    model_config = ConfigDict(frozen=True)

    mode: CorruptionMode = CorruptionMode.BOTH
    severity: Optional[SeverityLevel] = None

    @property
    def severity_rule(self) -> str:
        return "random" if self.severity is None else f"fixed:{self.severity}"


class CorruptionRecord(BaseModel):
    """单张图像的腐蚀记录，可按记录逐字节重放"""

    model_config = ConfigDict(frozen=True)

    image_id: str
    modality: ModalityTag
    kind: CorruptionKind
    severity: SeverityLevel
    seed: int = Field(ge=0, lt=2**64)

    def to_line(self) -> str:
        return "\t".join([self.image_id, self.modality.value, self.kind.value,
                          str(self.severity), str(self.seed)])

    @classmethod
    def from_line(cls, line: str) -> "CorruptionRecord":
        fields = line.rstrip("\n").split("\t")
        if len(fields) != 5:
            raise ValueError(f"腐蚀记录需要 5 列，实际 {len(fields)} 列")
        image_id, modality, kind, severity, seed = fields
        return cls(
            image_id=image_id,
            modality=ModalityTag.parse(modality),
            kind=CorruptionKind(kind),
            severity=int(severity),
            seed=int(seed),
        )
