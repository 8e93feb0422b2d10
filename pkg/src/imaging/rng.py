"""
确定性随机数发生器

算法固定为 Philox-4×32-10（计数器型），以 64 位种子作为密钥、计数器从 0 开始。
同一种子在任何平台上产生相同的抽样序列。
并行场景下每张图像使用 derive_seed(master_seed, index) 派生独立流，无共享状态。
"""

import hashlib
import struct
from typing import Optional, Sequence, Tuple, Union

import numpy as np

SEED_MASK = (1 << 64) - 1


def derive_seed(master_seed: int, index: int) -> int:
    """
    由主种子和序号派生 64 位子种子

    Args:
        master_seed: 主种子
        index: 图像 / pair / 试验序号

    Returns:
        blake2b-64(master_seed ‖ index) 的小端整数
    """
    payload = struct.pack("<QQ", master_seed & SEED_MASK, index & SEED_MASK)
    digest = hashlib.blake2b(payload, digest_size=8).digest()
    return int.from_bytes(digest, "little")


class Rng:
    """Philox 计数器型随机数发生器的薄封装"""

    ALGORITHM = "philox4x32-10"

    def __init__(self, seed: int = 0):
        self.seed = int(seed) & SEED_MASK
        self._gen = np.random.Generator(np.random.Philox(key=self.seed))

    @classmethod
    def derive(cls, master_seed: int, index: int) -> "Rng":
        """按 (主种子, 序号) 派生独立的发生器"""
        return cls(derive_seed(master_seed, index))

    @property
    def generator(self) -> np.random.Generator:
        """底层 numpy Generator，用于数组抽样"""
        return self._gen

    def random(self) -> float:
        """[0, 1) 均匀分布"""
        return float(self._gen.random())

    def bernoulli(self, p: float) -> bool:
        """以概率 p 返回 True；总是消耗一次抽样"""
        return self.random() < p

    def uniform(self, low: float, high: float) -> float:
        return float(self._gen.uniform(low, high))

    def integers(self, low: int, high: int) -> int:
        """[low, high) 中的均匀整数"""
        return int(self._gen.integers(low, high))

    def choice_index(self, n: int) -> int:
        return self.integers(0, n)

    def sample_without_replacement(self, n: int, k: int) -> np.ndarray:
        """从 range(n) 中不放回抽取 k 个下标"""
        return self._gen.choice(n, size=k, replace=False)

    def permutation(self, n: Union[int, Sequence]) -> np.ndarray:
        return self._gen.permutation(n)

    def normal(self, loc: float = 0.0, scale: float = 1.0,
               size: Optional[Tuple[int, ...]] = None) -> np.ndarray:
        return self._gen.normal(loc, scale, size)

    def uniform_array(self, low: float, high: float, size: Tuple[int, ...]) -> np.ndarray:
        return self._gen.uniform(low, high, size)

    def byte_array(self, size: Tuple[int, ...]) -> np.ndarray:
        """[0, 255] 均匀整数数组"""
        return self._gen.integers(0, 256, size=size, dtype=np.uint8)

    def poisson(self, lam: np.ndarray) -> np.ndarray:
        return self._gen.poisson(lam)

    def dirichlet(self, alpha: Sequence[float]) -> np.ndarray:
        return self._gen.dirichlet(alpha)

    def beta(self, a: float, b: float) -> float:
        return float(self._gen.beta(a, b))

    def next_seed(self) -> int:
        """抽取一个 64 位种子，用于为子操作建立独立的发生器"""
        return int(self._gen.integers(0, 1 << 64, dtype=np.uint64))

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed}, algorithm={self.ALGORITHM})"
