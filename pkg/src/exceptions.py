"""异常定义模块"""

from typing import Optional


class ViReidError(Exception):
    """所有业务异常的基类（CLI 映射为数据错误，退出码 2）"""


class InvalidArgumentError(ViReidError, ValueError):
    """参数不合法"""


class NotApplicableError(ViReidError, ValueError):
    """腐蚀类型不适用于该模态"""


class InvalidDatasetError(ViReidError, ValueError):
    """数据集规模或结构不满足协议要求"""


class ManifestError(ViReidError, ValueError):
    """清单文件解析或校验失败"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"第 {line} 行: {message}"
        super().__init__(message)


class EmbeddingFormatError(ViReidError, ValueError):
    """特征文件格式错误"""

    def __init__(self, message: str, offset: int = 0):
        self.offset = offset
        super().__init__(f"{message} (偏移 {offset})")


class MissingEmbeddingError(ViReidError, KeyError):
    """缺少某个 pair 的特征"""

    def __init__(self, pair_id: int):
        self.pair_id = pair_id
        super().__init__(f"缺少 pair id {pair_id} 的特征")

    def __str__(self) -> str:
        return self.args[0]


class ExcludedQueryError(ViReidError):
    """查询在图库中没有正样本，不计入平均值"""
