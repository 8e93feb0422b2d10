"""身份划分与 k 折"""

import logging
from pathlib import Path
from typing import Dict, List, Tuple, Union

from ..exceptions import InvalidArgumentError, InvalidDatasetError
from ..imaging.ops import round_half_up
from ..imaging.rng import Rng, derive_seed
from ..models import DatasetKind, DatasetManifest, SplitSpec

logger = logging.getLogger(__name__)

# (训练身份数, 测试身份数)
SPLIT_SIZES: Dict[DatasetKind, Tuple[int, int]] = {
    DatasetKind.SYSU: (395, 96),
    DatasetKind.REGDB: (206, 206),
    DatasetKind.TWORLD: (325, 84),
}
CUSTOM_TRAIN_RATIO = 395 / 491

# make_folds 使用的子流序号，与划分本身的流区分
_FOLD_STREAM = 1


def split_sizes(kind: DatasetKind, num_identities: int) -> Tuple[int, int]:
    """某数据集类型要求的 (训练, 测试) 身份数"""
    if kind in SPLIT_SIZES:
        return SPLIT_SIZES[kind]
    train = round_half_up(num_identities * CUSTOM_TRAIN_RATIO)
    train = min(max(train, 1), num_identities - 1)
    return train, num_identities - train


def split_identities(manifest: DatasetManifest, seed: int) -> SplitSpec:
    """
    按固定规模随机划分训练 / 测试身份

    Args:
        manifest: 数据集清单
        seed: 随机种子

    Returns:
        SplitSpec（folds 为空，由 make_folds 填充）

    Raises:
        InvalidDatasetError: 身份数不足
    """
    identities = manifest.identities()
    n = len(identities)
    if manifest.dataset_kind == DatasetKind.CUSTOM and n < 2:
        raise InvalidDatasetError(f"自定义数据集至少需要 2 个身份，实际 {n} 个")
    n_train, n_test = split_sizes(manifest.dataset_kind, n)
    required = n_train + n_test
    if n < required:
        raise InvalidDatasetError(
            f"{manifest.dataset_kind.value} 需要 {required} 个身份（{n_train}/{n_test}），实际只有 {n} 个")
    if n > required:
        logger.warning("%s 清单有 %d 个身份，多出的 %d 个不参与划分",
                       manifest.dataset_kind.value, n, n - required)

    order = Rng(seed).permutation(n)
    train = sorted(identities[i] for i in order[:n_train])
    test = sorted(identities[i] for i in order[n_train:required])
    return SplitSpec(dataset_kind=manifest.dataset_kind, seed=seed,
                     train_identities=train, test_identities=test)


def fold_sizes(n: int, k: int) -> List[int]:
    """n 个身份分成 k 折，余数分给前面的折"""
    base, rem = divmod(n, k)
    return [base + 1 if i < rem else base for i in range(k)]


def make_folds(split: SplitSpec, k: int = 5, seed: int = 0) -> SplitSpec:
    """
    把训练身份随机划分为 k 个互不相交的折

    Raises:
        InvalidArgumentError: k < 2 或 k 大于训练身份数
    """
    train = list(split.train_identities)
    if k < 2:
        raise InvalidArgumentError(f"折数必须 ≥ 2，实际为 {k}")
    if k > len(train):
        raise InvalidArgumentError(f"折数 {k} 大于训练身份数 {len(train)}")

    order = Rng(derive_seed(seed, _FOLD_STREAM)).permutation(len(train))
    folds = []
    start = 0
    for size in fold_sizes(len(train), k):
        folds.append(sorted(train[i] for i in order[start:start + size]))
        start += size
    return SplitSpec(dataset_kind=split.dataset_kind, seed=split.seed,
                     train_identities=split.train_identities,
                     test_identities=split.test_identities, folds=folds)


def write_split(split: SplitSpec, path: Union[str, Path]) -> Path:
    """
    写出划分审计文件

    每行 `set<TAB>identity<TAB>fold`，set 为 train / test，测试身份与未分折时 fold 为 -。
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fold_of = {identity: i for i, fold in enumerate(split.folds) for identity in fold}
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"# dataset_kind={split.dataset_kind.value}\tseed={split.seed}\t"
                f"train={len(split.train_identities)}\ttest={len(split.test_identities)}\t"
                f"folds={len(split.folds)}\n")
        for identity in split.train_identities:
            fold = fold_of.get(identity)
            f.write(f"train\t{identity}\t{'-' if fold is None else fold}\n")
        for identity in split.test_identities:
            f.write(f"test\t{identity}\t-\n")
    return path


def read_split(path: Union[str, Path]) -> SplitSpec:
    """读取 write_split 写出的文件"""
    header: Dict[str, str] = {}
    train: List[int] = []
    test: List[int] = []
    folds: Dict[int, List[int]] = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                for token in line.lstrip("#").strip().split("\t"):
                    if "=" in token:
                        key, value = token.split("=", 1)
                        header[key.strip()] = value.strip()
                continue
            fields = line.split("\t")
            if len(fields) != 3 or fields[0] not in ("train", "test"):
                raise InvalidArgumentError(f"{path} 第 {lineno} 行格式错误")
            identity = int(fields[1])
            if fields[0] == "test":
                test.append(identity)
                continue
            train.append(identity)
            if fields[2] != "-":
                folds.setdefault(int(fields[2]), []).append(identity)

    return SplitSpec(
        dataset_kind=DatasetKind.parse(header.get("dataset_kind", "Custom")),
        seed=int(header.get("seed", 0)),
        train_identities=train,
        test_identities=test,
        folds=[sorted(folds[i]) for i in sorted(folds)],
    )
