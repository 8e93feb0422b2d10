"""腐蚀基准测试"""

import filecmp
from collections import Counter

import numpy as np
import pytest
from scipy.stats import chi2_contingency

from src.corruption import (
    RECORD_LOG_NAME, apply_corruption, corrupt_dataset, corrupt_image, corrupt_pair, draw_corruption,
    load_severity_table, read_records, replay_record, replay_records, write_records,
)
from src.exceptions import InvalidArgumentError, ManifestError, NotApplicableError
from src.imaging import Rng, float_to_uint8, psnr
from src.models import CorruptionKind, CorruptionMode, CorruptionPolicy, CorruptionRecord, ModalityTag
from src.corruption.kinds import applicable_kinds
from src.protocol import load_manifest


def _tree_bytes(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


class TestApplicability:
    def test_kind_counts(self):
        assert len(applicable_kinds(ModalityTag.VISIBLE)) == 20
        ir = applicable_kinds(ModalityTag.INFRARED)
        assert len(ir) == 19
        assert CorruptionKind.BRIGHTNESS not in ir
        assert CorruptionKind.SATURATE in ir

    def test_brightness_rejected_on_infrared(self, make_image):
        with pytest.raises(NotApplicableError):
            apply_corruption(make_image(modality=ModalityTag.INFRARED), CorruptionKind.BRIGHTNESS, 3, Rng(0))

    @pytest.mark.parametrize("severity", [0, 6])
    def test_severity_range(self, make_image, severity):
        with pytest.raises(InvalidArgumentError):
            apply_corruption(make_image(), CorruptionKind.GAUSSIAN_NOISE, severity, Rng(0))


class TestApplyCorruption:
    @pytest.mark.parametrize("severity", range(1, 6))
    @pytest.mark.parametrize("kind", applicable_kinds(ModalityTag.INFRARED))
    def test_infrared_stays_single_channel(self, make_image, kind, severity):
        img = make_image(32, 64, ModalityTag.INFRARED, seed=3)
        out = apply_corruption(img, kind, severity, Rng(11))
        assert out.size == img.size
        assert out.modality == ModalityTag.INFRARED
        px = out.pixels.astype(np.int64)
        assert np.abs(px[:, :, 0] - px[:, :, 1]).max() == 0
        assert np.abs(px[:, :, 0] - px[:, :, 2]).max() == 0

    @pytest.mark.parametrize("kind", list(CorruptionKind))
    def test_visible_is_deterministic(self, make_image, kind):
        img = make_image(32, 64, seed=4)
        a = apply_corruption(img, kind, 3, Rng(21))
        b = apply_corruption(img, kind, 3, Rng(21))
        assert a == b
        assert a.size == img.size

    def test_infrared_saturate_uses_brightness_transfer(self, make_image):
        img = make_image(32, 64, ModalityTag.INFRARED, seed=5)
        shift = load_severity_table().params(CorruptionKind.BRIGHTNESS, 3)
        out = apply_corruption(img, CorruptionKind.SATURATE, 3, Rng(0))
        expected = float_to_uint8(np.clip(img.to_float() + shift, 0, 1))
        assert np.array_equal(out.pixels, expected)

    def test_gaussian_noise_psnr_ordering(self, probe_image):
        scores = {s: psnr(probe_image, apply_corruption(probe_image, CorruptionKind.GAUSSIAN_NOISE, s, Rng(1)))
                  for s in (1, 3, 5)}
        assert scores[5] < scores[3] < scores[1]

    @pytest.mark.parametrize("kind", [
        CorruptionKind.GAUSSIAN_NOISE, CorruptionKind.SHOT_NOISE,
        CorruptionKind.GAUSSIAN_BLUR, CorruptionKind.DEFOCUS_BLUR,
    ])
    def test_severity_monotonicity(self, make_image, kind):
        probes = [make_image(32, 64, seed=100 + i) for i in range(16)]
        means = []
        for severity in range(1, 6):
            values = [psnr(img, apply_corruption(img, kind, severity, Rng(i)))
                      for i, img in enumerate(probes)]
            means.append(float(np.mean(values)))
        assert all(a > b for a, b in zip(means, means[1:]))


class TestCorruptPair:
    def test_clean_is_identity(self, make_pair):
        pair = make_pair()
        out, records = corrupt_pair(pair, CorruptionPolicy(mode=CorruptionMode.CLEAN), Rng(0))
        assert out.visible == pair.visible and out.infrared == pair.infrared
        assert records == []

    def test_rgb_only_leaves_infrared(self, make_pair):
        pair = make_pair()
        out, records = corrupt_pair(pair, CorruptionPolicy(mode=CorruptionMode.RGB_ONLY, severity=3), Rng(2))
        assert out.infrared == pair.infrared
        assert len(records) == 1
        assert records[0].modality == ModalityTag.VISIBLE
        assert records[0].severity == 3

    def test_both_records_each_modality(self, make_pair):
        out, records = corrupt_pair(make_pair(), CorruptionPolicy(mode=CorruptionMode.BOTH), Rng(3))
        assert [r.modality for r in records] == [ModalityTag.VISIBLE, ModalityTag.INFRARED]
        assert records[1].kind != CorruptionKind.BRIGHTNESS
        assert out.infrared.is_single_channel()

    def test_record_replays_exactly(self, make_image):
        img = make_image(32, 64, seed=8)
        out, record = corrupt_image(img, "x", CorruptionPolicy(), Rng(12))
        restored = CorruptionRecord.from_line(record.to_line())
        assert replay_record(img, restored) == out


class TestDrawStatistics:
    def _draws(self, n=10000):
        policy = CorruptionPolicy(mode=CorruptionMode.BOTH)
        pairs = []
        for i in range(n):
            rng = Rng.derive(2024, i)
            v = draw_corruption(ModalityTag.VISIBLE, policy, rng)
            ir = draw_corruption(ModalityTag.INFRARED, policy, rng)
            pairs.append((v, ir))
        return pairs

    def test_visible_kinds_uniform(self):
        counts = Counter(v[0] for v, _ in self._draws())
        assert set(counts) == set(CorruptionKind)
        # 10000 次、20 类，标准差约 21.8
        assert all(abs(c - 500) <= 100 for c in counts.values())

    def test_modalities_are_independent(self):
        draws = self._draws()
        v_kinds = list(CorruptionKind)
        i_kinds = applicable_kinds(ModalityTag.INFRARED)
        table = np.zeros((len(v_kinds), len(i_kinds)))
        severity_table = np.zeros((5, 5))
        for v, ir in draws:
            table[v_kinds.index(v[0]), i_kinds.index(ir[0])] += 1
            severity_table[v[1] - 1, ir[1] - 1] += 1
        assert chi2_contingency(table)[1] > 0.001
        assert chi2_contingency(severity_table)[1] > 0.001


class TestCorruptDataset:
    def test_records_and_files(self, dataset_dir, tmp_path):
        manifest_path, root = dataset_dir
        manifest = load_manifest(manifest_path)
        out = tmp_path / "out"
        result = corrupt_dataset(manifest, CorruptionPolicy(), 7, out, image_root=root)
        assert result.ok
        assert len(result.records) == len(manifest.records) == 16
        assert len(result.written) == 16
        assert read_records(out / RECORD_LOG_NAME) == result.records
        assert [r.image_id for r in result.records] == [m.image_id for m in manifest.records]

    def test_deterministic_and_worker_independent(self, dataset_factory, tmp_path):
        root = tmp_path / "data"
        manifest = load_manifest(dataset_factory(root, identities=25, per_modality=(2, 2)))
        assert len(manifest.records) == 100
        corrupt_dataset(manifest, CorruptionPolicy(), 7, tmp_path / "a", image_root=root)
        corrupt_dataset(manifest, CorruptionPolicy(), 7, tmp_path / "b", image_root=root)
        corrupt_dataset(manifest, CorruptionPolicy(), 7, tmp_path / "c", image_root=root, workers=8)
        a = _tree_bytes(tmp_path / "a")
        assert a == _tree_bytes(tmp_path / "b")
        assert a == _tree_bytes(tmp_path / "c")

    def test_rgb_only_skips_infrared(self, dataset_dir, tmp_path):
        manifest_path, root = dataset_dir
        manifest = load_manifest(manifest_path)
        out = tmp_path / "out"
        result = corrupt_dataset(manifest, CorruptionPolicy(mode=CorruptionMode.RGB_ONLY), 1, out, image_root=root)
        assert len(result.records) == 8
        assert all(r.modality == ModalityTag.VISIBLE for r in result.records)
        assert not list(out.rglob("i*.png"))

    def test_replay_reproduces_files(self, dataset_dir, tmp_path):
        manifest_path, root = dataset_dir
        manifest = load_manifest(manifest_path)
        result = corrupt_dataset(manifest, CorruptionPolicy(), 9, tmp_path / "first", image_root=root)
        records = read_records(tmp_path / "first" / RECORD_LOG_NAME)
        written = replay_records(records, manifest, root, tmp_path / "replay")
        assert len(written) == len(result.records)
        for original in result.written:
            rel = original[len(str(tmp_path / "first")) + 1:]
            assert filecmp.cmp(original, tmp_path / "replay" / rel, shallow=False)

    def test_undecodable_file_is_collected(self, dataset_dir, tmp_path):
        manifest_path, root = dataset_dir
        manifest = load_manifest(manifest_path)
        broken = root / manifest.records[0].path
        broken.write_bytes(b"not an image")
        result = corrupt_dataset(manifest, CorruptionPolicy(), 7, tmp_path / "out", image_root=root)
        assert not result.ok
        assert [e.image_id for e in result.errors] == [manifest.records[0].image_id]
        assert len(result.records) == 15

    def test_same_stem_in_one_directory_is_rejected(self, manifest_factory, tmp_path):
        manifest = manifest_factory(2)
        records = list(manifest.records)
        # 0/v1 改成 0/v0.jpg，腐蚀后与 0/v0.png 同名
        records[1] = records[1].model_copy(update={"path": "0/v0.jpg"})
        manifest = manifest.model_copy(update={"records": records})
        out = tmp_path / "out"
        with pytest.raises(ManifestError, match="0_v0"):
            corrupt_dataset(manifest, CorruptionPolicy(), 7, out)
        assert not out.exists()

        replayed = [CorruptionRecord(image_id=r.image_id, modality=r.modality, kind=CorruptionKind.FOG,
                                     severity=1, seed=0) for r in records[:2]]
        with pytest.raises(ManifestError):
            replay_records(replayed, manifest, tmp_path, out)

    def test_same_stem_without_corruption_is_allowed(self, manifest_factory, tmp_path):
        manifest = manifest_factory(1)
        records = list(manifest.records)
        # 红外图像在 C 模式下不写出，不会与可见光输出冲突
        records[2] = records[2].model_copy(update={"path": "0/v0.jpg"})
        manifest = manifest.model_copy(update={"records": records})
        result = corrupt_dataset(manifest, CorruptionPolicy(mode=CorruptionMode.RGB_ONLY), 7, tmp_path / "out",
                                 image_root=tmp_path)
        # 图像文件不存在，逐张记为错误而不是整体失败
        assert [e.image_id for e in result.errors] == ["0_v0", "0_v1"]


class TestSeverityTable:
    def test_default_table_has_all_kinds(self):
        table = load_severity_table()
        for kind in CorruptionKind:
            assert table.params(kind, 1) is not None

    def test_unknown_version_rejected(self, tmp_path):
        path = tmp_path / "table.yaml"
        path.write_text("version: 2\nkinds: {}\n", encoding="utf-8")
        with pytest.raises(InvalidArgumentError):
            load_severity_table(path)

    def test_record_log_written_in_order(self, tmp_path):
        records = [
            CorruptionRecord(image_id="b", modality=ModalityTag.INFRARED, kind=CorruptionKind.FOG,
                             severity=2, seed=5),
            CorruptionRecord(image_id="a", modality=ModalityTag.VISIBLE, kind=CorruptionKind.SNOW,
                             severity=5, seed=2 ** 64 - 1),
        ]
        path = write_records(records, tmp_path / "log.tsv")
        assert path.read_text(encoding="utf-8").splitlines()[0] == "b\tinfrared\tfog\t2\t5"
        assert read_records(path) == records
