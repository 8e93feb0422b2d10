"""输出模块"""

from .formatter import ReportFormatter
from .visualizer import PreviewVisualizer

__all__ = ["ReportFormatter", "PreviewVisualizer"]
