"""vireid-bench - 可见光-红外行人重识别腐蚀基准与多模态数据增强"""

__version__ = "0.1.0"
