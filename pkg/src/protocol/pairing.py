"""
可见光-红外配对与 LOOQ 试验

配对约束：同一张图像不能出现在两个配对中，因此每个身份的配对数为 min(可见光数, 红外数)。
"""

import logging
from pathlib import Path
from typing import Dict, Iterable, List, Union

from pydantic import ValidationError

from ..exceptions import InvalidArgumentError
from ..imaging.rng import Rng, derive_seed
from ..models import DatasetManifest, LooqTrial, PairEntry, PairingResult

logger = logging.getLogger(__name__)

PAIRING_COLUMNS = ("pair_id", "identity", "visible_id", "infrared_id", "camera_v", "camera_i")


def pair_images(manifest: DatasetManifest, identity_set: Iterable[int], seed: int) -> PairingResult:
    """
    为给定身份生成一次配对

    共址相机数据集（paired_cameras）按清单顺序逐一对应，与种子无关；
    其余数据集对每个身份用 Rng.derive(seed, identity) 分别打乱两种模态后对齐。

    Args:
        manifest: 数据集清单
        identity_set: 参与配对的身份
        seed: 随机种子

    Returns:
        PairingResult，按身份升序排列
    """
    groups = manifest.group_by_identity()
    wanted = sorted(set(identity_set))
    unknown = [i for i in wanted if i not in groups]
    if unknown:
        raise InvalidArgumentError(f"清单中不存在的身份: {unknown[:10]}")

    pairs: List[PairEntry] = []
    for identity in wanted:
        visible, infrared = groups[identity]
        count = min(len(visible), len(infrared))
        if manifest.paired_cameras:
            v_order = range(count)
            i_order = range(count)
        else:
            rng = Rng.derive(seed, identity)
            v_order = rng.permutation(len(visible))[:count]
            i_order = rng.permutation(len(infrared))[:count]
        for vi, ii in zip(v_order, i_order):
            v, i = visible[int(vi)], infrared[int(ii)]
            pairs.append(PairEntry(identity=identity, visible_id=v.image_id, infrared_id=i.image_id,
                                   camera_v=v.camera, camera_i=i.camera))
    return PairingResult(pairs=pairs)


def repeated_pairings(manifest: DatasetManifest, identity_set: Iterable[int], trials: int,
                      master_seed: int) -> List[PairingResult]:
    """
    生成多次试验的配对

    非共址数据集第 t 次试验使用 derive_seed(master_seed, t)；共址数据集的配对是确定的，直接重复。
    """
    if trials < 1:
        raise InvalidArgumentError(f"试验次数必须 ≥ 1，实际为 {trials}")
    identities = sorted(set(identity_set))
    if manifest.paired_cameras:
        base = pair_images(manifest, identities, master_seed)
        return [PairingResult(pairs=base.pairs, trial_index=t) for t in range(trials)]

    results = []
    for t in range(trials):
        pairing = pair_images(manifest, identities, derive_seed(master_seed, t))
        results.append(PairingResult(pairs=pairing.pairs, trial_index=t))
    logger.debug("已生成 %d 次配对，每次 %d 对", trials, len(results[0]))
    return results


def looq_trials(pairing: PairingResult) -> List[LooqTrial]:
    """每个 pair 轮流作为 probe，其余 pair 组成图库"""
    n = len(pairing)
    if n < 2:
        raise InvalidArgumentError(f"LOOQ 至少需要 2 个 pair，实际为 {n}")
    return [LooqTrial(probe=t, num_pairs=n) for t in range(n)]


def write_pairings(pairing: PairingResult, path: Union[str, Path]) -> Path:
    """写出配对审计文件"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"# trial_index={pairing.trial_index}\tpairs={len(pairing)}\n")
        f.write("# " + "\t".join(PAIRING_COLUMNS) + "\n")
        for pair_id, p in enumerate(pairing.pairs):
            f.write("\t".join([str(pair_id), str(p.identity), p.visible_id, p.infrared_id,
                               p.camera_v, p.camera_i]) + "\n")
    return path


def read_pairings(path: Union[str, Path]) -> PairingResult:
    """读取 write_pairings 写出的文件，pair id 必须从 0 连续递增"""
    header: Dict[str, str] = {}
    pairs: List[PairEntry] = []
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
            if len(fields) != len(PAIRING_COLUMNS):
                raise InvalidArgumentError(f"{path} 第 {lineno} 行应有 {len(PAIRING_COLUMNS)} 列")
            if int(fields[0]) != len(pairs):
                raise InvalidArgumentError(f"{path} 第 {lineno} 行 pair id 不连续")
            pairs.append(PairEntry(identity=int(fields[1]), visible_id=fields[2], infrared_id=fields[3],
                                   camera_v=fields[4], camera_i=fields[5]))
    try:
        return PairingResult(pairs=pairs, trial_index=int(header.get("trial_index", 0)))
    except ValidationError as e:
        raise InvalidArgumentError(f"{path}: {e}") from e
