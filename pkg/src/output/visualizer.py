"""增强预览图生成模块"""

from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.patches as mpatches  # noqa: E402
import matplotlib.pyplot as plt  # noqa: E402

from ..models import ImagePair, ModalityTag, RectLog  # noqa: E402

# 按 RectLog 的 role 区分矩形框颜色
ROLE_COLORS = {"src": "#3498db", "dst": "#e74c3c", "rect": "#f39c12"}


class PreviewVisualizer:
    """增强前后对比图生成器"""

    def __init__(self, output_dir: Path, dpi: int = 100):
        """
        初始化可视化器

        Args:
            output_dir: 输出目录（由调用方负责创建）
            dpi: 输出分辨率
        """
        self.output_dir = Path(output_dir)
        self.dpi = dpi

    def _draw_rects(self, ax, log: RectLog, modality: ModalityTag):
        for entry in log:
            if entry.modality != modality:
                continue
            r = entry.rect
            ax.add_patch(mpatches.Rectangle(
                (r.x - 0.5, r.y - 0.5), r.w, r.h,
                fill=False, linewidth=1.2, edgecolor=ROLE_COLORS.get(entry.role, "#2ecc71"),
            ))

    def save_pair_grid(self, before: ImagePair, after: ImagePair, output_file: str,
                       log: Optional[RectLog] = None, title: str = "") -> Path:
        """
        生成一张 1×4 的对比图：可见光原图、可见光增强、红外原图、红外增强

        Args:
            before: 增强前的图像对
            after: 增强后的图像对
            output_file: 输出文件名
            log: 矩形日志，非空时在增强图上画出矩形
            title: 图标题

        Returns:
            输出文件路径
        """
        fig, axes = plt.subplots(1, 4, figsize=(8, 4.5))
        panels = [
            (before.visible, "V 原图", None),
            (after.visible, "V 增强", ModalityTag.VISIBLE),
            (before.infrared, "I 原图", None),
            (after.infrared, "I 增强", ModalityTag.INFRARED),
        ]
        for ax, (img, label, modality) in zip(axes, panels):
            ax.imshow(img.pixels, interpolation="nearest")
            ax.set_title(label, fontsize=9)
            ax.set_xticks([])
            ax.set_yticks([])
            if log is not None and modality is not None:
                self._draw_rects(ax, log, modality)
        if title:
            fig.suptitle(title, fontsize=11)

        filepath = self.output_dir / output_file
        # 去掉软件版本元数据，重复运行得到相同文件
        fig.savefig(filepath, dpi=self.dpi, bbox_inches="tight", metadata={"Software": None})
        plt.close(fig)

        return filepath
