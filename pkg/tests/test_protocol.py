"""实验协议测试：清单、划分、配对、LOOQ、P×K 采样"""

from collections import Counter

import numpy as np
import pytest

from src.exceptions import InvalidArgumentError, InvalidDatasetError, ManifestError
from src.models import DatasetKind, DatasetManifest, ManifestRecord, ModalityTag
from src.protocol import (
    fold_sizes, load_manifest, looq_trials, make_folds, pair_images, parse_manifest, pk_batches,
    read_pairings, read_split, repeated_pairings, split_identities, write_pairings, write_split,
)

VALID_LINES = [
    "# dataset_kind=SYSU\tpaired_cameras=false\n",
    "0001_v0\t1\tcam1\tV\t0001/v0.jpg\n",
    "0001_i0\t1\tcam3\tI\t0001/i0.jpg\n",
    "0002_v0\t2\tcam2\tvisible\t0002/v0.jpg\n",
    "0002_i0\t2\tcam6\tinfrared\t0002/i0.jpg\n",
]


class TestManifest:
    def test_valid_manifest(self):
        manifest = parse_manifest(VALID_LINES)
        assert len(manifest.records) == 4
        assert manifest.dataset_kind == DatasetKind.SYSU
        assert not manifest.paired_cameras
        assert manifest.identities() == [1, 2]
        assert manifest.records[1].modality == ModalityTag.INFRARED

    def test_duplicate_image_id(self):
        lines = VALID_LINES + ["0001_v0\t1\tcam1\tV\tother.jpg\n"]
        with pytest.raises(ManifestError, match="0001_v0"):
            parse_manifest(lines)

    def test_identity_without_infrared(self):
        lines = VALID_LINES + ["0003_v0\t3\tcam1\tV\t0003/v0.jpg\n"]
        with pytest.raises(ManifestError, match="身份 3"):
            parse_manifest(lines)

    def test_wrong_column_count_reports_line(self):
        lines = VALID_LINES[:2] + ["0001_i0\t1\tcam3\tI\n"]
        with pytest.raises(ManifestError) as info:
            parse_manifest(lines)
        assert info.value.line == 3

    def test_unknown_modality(self):
        with pytest.raises(ManifestError):
            parse_manifest(["x\t1\tc\tdepth\tx.png\n"])

    def test_empty_manifest(self):
        with pytest.raises(ManifestError):
            parse_manifest(["# dataset_kind=Custom\n"])

    def test_load_from_disk(self, dataset_dir):
        manifest_path, _ = dataset_dir
        manifest = load_manifest(manifest_path)
        assert manifest.dataset_kind == DatasetKind.CUSTOM
        assert len(manifest.records) == 16


class TestSplits:
    @pytest.mark.parametrize("kind, total, expected", [
        (DatasetKind.SYSU, 491, (395, 96)),
        (DatasetKind.REGDB, 412, (206, 206)),
        (DatasetKind.TWORLD, 409, (325, 84)),
    ])
    def test_published_sizes(self, manifest_factory, kind, total, expected):
        split = split_identities(manifest_factory(total, (1, 1), kind), seed=0)
        assert (len(split.train_identities), len(split.test_identities)) == expected
        assert not set(split.train_identities) & set(split.test_identities)

    def test_too_few_identities(self, manifest_factory):
        with pytest.raises(InvalidDatasetError):
            split_identities(manifest_factory(100, (1, 1), DatasetKind.SYSU), seed=0)

    def test_custom_needs_two_identities(self, manifest_factory):
        with pytest.raises(InvalidDatasetError):
            split_identities(manifest_factory(1, (1, 1)), seed=0)

    def test_custom_ratio(self, manifest_factory):
        split = split_identities(manifest_factory(10, (1, 1)), seed=3)
        assert len(split.train_identities) == 8
        assert len(split.test_identities) == 2

    def test_seed_changes_membership(self, manifest_factory):
        manifest = manifest_factory(491, (1, 1), DatasetKind.SYSU)
        a = split_identities(manifest, seed=0)
        assert a == split_identities(manifest, seed=0)
        assert a.test_identities != split_identities(manifest, seed=1).test_identities

    @pytest.mark.parametrize("kind, total, sizes", [
        (DatasetKind.SYSU, 491, [79] * 5),
        (DatasetKind.TWORLD, 409, [65] * 5),
        (DatasetKind.REGDB, 412, [42, 41, 41, 41, 41]),
    ])
    def test_folds(self, manifest_factory, kind, total, sizes):
        split = make_folds(split_identities(manifest_factory(total, (1, 1), kind), seed=0), k=5, seed=0)
        assert [len(f) for f in split.folds] == sizes
        seen = [i for fold in split.folds for i in fold]
        assert len(seen) == len(set(seen))
        assert set(seen) == set(split.train_identities)

    def test_fold_count_range(self, manifest_factory):
        split = split_identities(manifest_factory(10, (1, 1)), seed=0)
        with pytest.raises(InvalidArgumentError):
            make_folds(split, k=1)
        with pytest.raises(InvalidArgumentError):
            make_folds(split, k=9)

    def test_fold_sizes(self):
        assert fold_sizes(206, 5) == [42, 41, 41, 41, 41]
        assert sum(fold_sizes(17, 4)) == 17

    def test_split_file(self, manifest_factory, tmp_path):
        split = make_folds(split_identities(manifest_factory(20, (1, 1)), seed=4), k=4, seed=4)
        assert read_split(write_split(split, tmp_path / "split.tsv")) == split


class TestPairing:
    def test_uneven_identity(self, manifest_factory):
        manifest = manifest_factory(1, (10, 6))
        pairing = pair_images(manifest, [0], seed=5)
        assert len(pairing) == 6
        ids = [p.visible_id for p in pairing.pairs] + [p.infrared_id for p in pairing.pairs]
        assert len(set(ids)) == 12

    def test_co_registered_pairs_ignore_seed(self, manifest_factory):
        manifest = manifest_factory(3, (10, 10), DatasetKind.REGDB, paired=True)
        a = pair_images(manifest, manifest.identities(), seed=1)
        b = pair_images(manifest, manifest.identities(), seed=2)
        assert a.pairs == b.pairs
        assert all(p.visible_id.split("_v")[1] == p.infrared_id.split("_i")[1] for p in a.pairs)

    def test_seeds_change_unpaired_pairing(self, manifest_factory):
        manifest = manifest_factory(10, (5, 5), DatasetKind.SYSU)
        a = pair_images(manifest, manifest.identities(), seed=1)
        b = pair_images(manifest, manifest.identities(), seed=2)
        assert a.pairs != b.pairs
        assert len(a) == len(b) == 50

    def test_unknown_identity(self, manifest_factory):
        with pytest.raises(InvalidArgumentError):
            pair_images(manifest_factory(2), [7], seed=0)

    def test_looq(self, manifest_factory):
        pairing = pair_images(manifest_factory(3, (2, 2)), [0, 1, 2], seed=0)
        trials = looq_trials(pairing)
        assert len(trials) == 6
        assert sorted(t.probe for t in trials) == list(range(6))
        identities = pairing.identities()
        for t in trials:
            assert len(t.gallery) == 5
            assert t.probe not in t.gallery
            assert sum(identities[g] == identities[t.probe] for g in t.gallery) == 1

    def test_looq_needs_two_pairs(self, manifest_factory):
        pairing = pair_images(manifest_factory(1, (1, 1)), [0], seed=0)
        with pytest.raises(InvalidArgumentError):
            looq_trials(pairing)

    def test_repeated_unpaired(self, manifest_factory):
        manifest = manifest_factory(10, (3, 3), DatasetKind.SYSU)
        results = repeated_pairings(manifest, manifest.identities(), 30, master_seed=9)
        assert [r.trial_index for r in results] == list(range(30))
        assert len({tuple(r.pairs) for r in results}) > 1
        assert [r.pairs for r in results] == [r.pairs for r in repeated_pairings(manifest, manifest.identities(), 30, 9)]

    def test_repeated_co_registered(self, manifest_factory):
        manifest = manifest_factory(4, (10, 10), DatasetKind.REGDB, paired=True)
        results = repeated_pairings(manifest, manifest.identities(), 30, master_seed=9)
        assert len(results) == 30
        assert all(r.pairs == results[0].pairs for r in results)

    def test_pairing_file(self, manifest_factory, tmp_path):
        pairing = repeated_pairings(manifest_factory(3), [0, 1, 2], 2, master_seed=0)[1]
        path = write_pairings(pairing, tmp_path / "pairs.tsv")
        restored = read_pairings(path)
        assert restored.pairs == pairing.pairs
        assert restored.trial_index == 1

    def test_pairing_file_needs_contiguous_ids(self, tmp_path):
        path = tmp_path / "pairs.tsv"
        path.write_text("# trial_index=0\tpairs=2\n0\t1\ta\tb\tc1\tc3\n2\t1\tc\td\tc1\tc3\n", encoding="utf-8")
        with pytest.raises(InvalidArgumentError):
            read_pairings(path)


class TestPkBatches:
    def test_batch_shape(self, manifest_factory):
        manifest = manifest_factory(20, (4, 4))
        pairing = pair_images(manifest, manifest.identities(), seed=0)
        batches = pk_batches(pairing, P=8, K=4, seed=1)
        assert len(batches) == 2
        for batch in batches:
            assert len(batch) == 32
            counts = Counter(p.identity for p in batch)
            assert len(counts) == 8
            assert set(counts.values()) == {4}

    def test_small_identity_repeats_own_pairs(self, manifest_factory):
        manifest = manifest_factory(8, (2, 2))
        pairing = pair_images(manifest, manifest.identities(), seed=0)
        (batch,) = pk_batches(pairing, P=8, K=4, seed=2)
        own = {0: {(p.visible_id, p.infrared_id) for p in pairing.pairs if p.identity == 0}}
        picked = [(p.visible_id, p.infrared_id) for p in batch if p.identity == 0]
        assert len(picked) == 4
        assert set(picked) <= own[0]

    def test_not_enough_identities(self, manifest_factory):
        manifest = manifest_factory(4, (2, 2))
        pairing = pair_images(manifest, manifest.identities(), seed=0)
        with pytest.raises(InvalidArgumentError):
            pk_batches(pairing, P=8, K=4, seed=0)

    def test_random_hetero_keeps_identity(self, manifest_factory):
        manifest = manifest_factory(8, (3, 5))
        pairing = pair_images(manifest, manifest.identities(), seed=0)
        lookup = manifest.lookup()
        for batch in pk_batches(pairing, P=4, K=2, seed=3, epochs=2, random_hetero=True, manifest=manifest):
            for p in batch:
                record = lookup[p.infrared_id]
                assert record.identity == p.identity
                assert record.modality == ModalityTag.INFRARED


def test_pairing_constraint_on_random_identities():
    gen = np.random.default_rng(17)
    records, counts = [], {}
    for identity in range(500):
        nv, ni = (int(n) for n in gen.integers(1, 8, size=2))
        counts[identity] = min(nv, ni)
        for tag, modality, n in (("v", ModalityTag.VISIBLE, nv), ("i", ModalityTag.INFRARED, ni)):
            records.extend(ManifestRecord(image_id=f"{identity}_{tag}{k}", identity=identity, camera="c",
                                          modality=modality, path=f"{identity}/{tag}{k}.png") for k in range(n))
    manifest = DatasetManifest(dataset_kind=DatasetKind.SYSU, paired_cameras=False, records=records)
    pairing = pair_images(manifest, manifest.identities(), seed=3)
    assert Counter(p.identity for p in pairing.pairs) == Counter(counts)
    used = [p.visible_id for p in pairing.pairs] + [p.infrared_id for p in pairing.pairs]
    assert len(used) == len(set(used))
