"""命令行测试：退出码、输出文件与完整流程"""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from main import EXIT_DATA, EXIT_IO, EXIT_OK, EXIT_USAGE, cli
from src.corruption import RECORD_LOG_NAME, read_records
from src.metrics import write_embeddings
from src.models import EmbeddingTable, ModalityTag
from src.protocol import read_pairings, read_split


def _tree_bytes(root, skip=("run_config.yaml",)):
    return {p.relative_to(root).as_posix(): p.read_bytes()
            for p in sorted(root.rglob("*")) if p.is_file() and p.name not in skip}


def _one_hot_embeddings(pairing_path, target, drop=None, camera=None):
    pairing = read_pairings(pairing_path)
    classes = sorted({p.identity for p in pairing.pairs})
    ids, identities, rows = [], [], []
    for pid, entry in enumerate(pairing.pairs):
        if pid == drop:
            continue
        row = np.zeros(len(classes))
        row[classes.index(entry.identity)] = 1.0
        ids.append(pid)
        identities.append(entry.identity)
        rows.append(row)
    cameras = [camera] * len(ids) if camera is not None else None
    return write_embeddings(EmbeddingTable(ids=ids, identities=identities, rows=rows, cameras=cameras), target)


@pytest.fixture
def runner():
    return CliRunner()


class TestListings:
    def test_presets(self, runner):
        result = runner.invoke(cli, ["presets"])
        assert result.exit_code == EXIT_OK
        for name in ("Standard", "ML-MDA", "Augmix+MS-REA", "Augmix+M-PATCH-SD"):
            assert name in result.output

    def test_kinds(self, runner):
        result = runner.invoke(cli, ["kinds"])
        assert result.exit_code == EXIT_OK
        assert "brightness" in result.output

    def test_infrared_kinds(self, runner):
        result = runner.invoke(cli, ["kinds", "--modality", ModalityTag.INFRARED.value])
        assert result.exit_code == EXIT_OK
        assert "19" in result.output
        assert "brightness" not in result.output


class TestCorruptCommand:
    def test_runs_are_reproducible(self, runner, dataset_dir, tmp_path):
        manifest, _ = dataset_dir
        for name in ("a", "b"):
            result = runner.invoke(cli, ["corrupt", "--manifest", str(manifest), "--seed", "5",
                                         "--out", str(tmp_path / name)])
            assert result.exit_code == EXIT_OK, result.output
        a = _tree_bytes(tmp_path / "a")
        assert RECORD_LOG_NAME in a
        assert a == _tree_bytes(tmp_path / "b")

    def test_rgb_only_mode(self, runner, dataset_dir, tmp_path):
        manifest, _ = dataset_dir
        out = tmp_path / "out"
        result = runner.invoke(cli, ["corrupt", "--manifest", str(manifest), "--mode", "c",
                                     "--severity", "2", "--out", str(out)])
        assert result.exit_code == EXIT_OK, result.output
        assert not list(out.rglob("i*.png"))
        records = read_records(out / RECORD_LOG_NAME)
        assert len(records) == 8
        assert {r.severity for r in records} == {2}

    def test_trials_write_subdirectories(self, runner, dataset_dir, tmp_path):
        manifest, _ = dataset_dir
        out = tmp_path / "out"
        result = runner.invoke(cli, ["corrupt", "--manifest", str(manifest), "--trials", "2", "--out", str(out)])
        assert result.exit_code == EXIT_OK, result.output
        first = read_records(out / "trial_00" / RECORD_LOG_NAME)
        second = read_records(out / "trial_01" / RECORD_LOG_NAME)
        assert len(first) == len(second) == 16
        assert first != second

    def test_broken_image_exit_code(self, runner, dataset_dir, tmp_path):
        manifest, root = dataset_dir
        (root / "0000" / "v0.png").write_bytes(b"broken")
        result = runner.invoke(cli, ["corrupt", "--manifest", str(manifest), "--out", str(tmp_path / "out")])
        assert result.exit_code == EXIT_IO

    def test_missing_manifest_is_usage_error(self, runner, tmp_path):
        result = runner.invoke(cli, ["corrupt", "--out", str(tmp_path / "out")])
        assert result.exit_code == EXIT_USAGE

    def test_bad_manifest_is_data_error(self, runner, tmp_path):
        path = tmp_path / "manifest.tsv"
        path.write_text("a\t1\tc1\tV\n", encoding="utf-8")
        result = runner.invoke(cli, ["corrupt", "--manifest", str(path), "--out", str(tmp_path / "out")])
        assert result.exit_code == EXIT_DATA


class TestAugmentPreview:
    def test_preview_files(self, runner, dataset_dir, tmp_path):
        manifest, _ = dataset_dir
        out = tmp_path / "out"
        result = runner.invoke(cli, ["augment-preview", "--manifest", str(manifest), "--preset", "ML-MDA",
                                     "--samples", "2", "--out", str(out)])
        assert result.exit_code == EXIT_OK, result.output
        assert (out / "preview_000.png").is_file()
        assert (out / "preview_001_rects.tsv").is_file()
        assert not (out / "preview_002.png").exists()

    def test_unknown_preset(self, runner, dataset_dir, tmp_path):
        manifest, _ = dataset_dir
        result = runner.invoke(cli, ["augment-preview", "--manifest", str(manifest), "--preset", "nope",
                                     "--out", str(tmp_path / "out")])
        assert result.exit_code == EXIT_USAGE

    def test_bad_override(self, runner, dataset_dir, tmp_path):
        manifest, _ = dataset_dir
        result = runner.invoke(cli, ["augment-preview", "--manifest", str(manifest), "--set", "no_equals_sign",
                                     "--out", str(tmp_path / "out")])
        assert result.exit_code == EXIT_USAGE


class TestWorkflow:
    def test_split_pair_evaluate(self, runner, dataset_factory, tmp_path):
        manifest = dataset_factory(tmp_path / "data", identities=10)
        split_out = tmp_path / "split"
        result = runner.invoke(cli, ["split", "--manifest", str(manifest), "--folds", "2", "--seed", "3",
                                     "--out", str(split_out)])
        assert result.exit_code == EXIT_OK, result.output
        spec = read_split(split_out / "split.tsv")
        assert len(spec.train_identities) == 8
        assert len(spec.folds) == 2

        pair_out = tmp_path / "pair"
        result = runner.invoke(cli, ["pair", "--manifest", str(manifest), "--subset", "all", "--trials", "2",
                                     "--out", str(pair_out)])
        assert result.exit_code == EXIT_OK, result.output
        pairing_files = sorted((pair_out / "pairings").iterdir())
        assert [p.name for p in pairing_files] == ["pairs_trial_00.tsv", "pairs_trial_01.tsv"]

        emb_dir = tmp_path / "emb"
        for k, path in enumerate(pairing_files):
            _one_hot_embeddings(path, emb_dir / f"emb_{k:02d}.txt")

        eval_out = tmp_path / "eval"
        result = runner.invoke(cli, ["evaluate", "--pairings", str(pair_out / "pairings"),
                                     "--embeddings", str(emb_dir), "--name", "one-hot",
                                     "--out", str(eval_out)])
        assert result.exit_code == EXIT_OK, result.output
        for name in ("report.jsonl", "report.md", "rank1_outcomes.tsv"):
            assert (eval_out / name).is_file()
        records = [json.loads(line) for line in (eval_out / "report.jsonl").read_text(encoding="utf-8").splitlines()]
        aggregate = {r["name"]: r for r in records if r["record"] == "aggregate"}
        assert aggregate["mAP"]["mean"] == 1.0
        assert aggregate["mINP"]["mean"] == 1.0
        assert aggregate["mAP"]["trials"] == 2

    def test_missing_embedding_is_data_error(self, runner, dataset_factory, tmp_path):
        manifest = dataset_factory(tmp_path / "data", identities=3)
        pair_out = tmp_path / "pair"
        result = runner.invoke(cli, ["pair", "--manifest", str(manifest), "--subset", "all", "--out", str(pair_out)])
        assert result.exit_code == EXIT_OK, result.output
        pairing_file = pair_out / "pairings" / "pairs_trial_00.tsv"
        embeddings = _one_hot_embeddings(pairing_file, tmp_path / "emb.txt", drop=2)
        result = runner.invoke(cli, ["evaluate", "--pairings", str(pairing_file), "--embeddings", str(embeddings),
                                     "--out", str(tmp_path / "eval")])
        assert result.exit_code == EXIT_DATA

    @pytest.mark.parametrize("camera, code", [("cam1+cam3", EXIT_OK), ("cam2+cam3", EXIT_DATA)])
    def test_embedding_cameras_checked_against_pairing(self, runner, dataset_factory, tmp_path, camera, code):
        manifest = dataset_factory(tmp_path / "data", identities=3)
        pair_out = tmp_path / "pair"
        result = runner.invoke(cli, ["pair", "--manifest", str(manifest), "--subset", "all", "--out", str(pair_out)])
        assert result.exit_code == EXIT_OK, result.output
        pairing_file = pair_out / "pairings" / "pairs_trial_00.tsv"
        embeddings = _one_hot_embeddings(pairing_file, tmp_path / "emb.txt", camera=camera)
        result = runner.invoke(cli, ["evaluate", "--pairings", str(pairing_file), "--embeddings", str(embeddings),
                                     "--out", str(tmp_path / "eval")])
        assert result.exit_code == code, result.output

    def test_mismatched_file_counts(self, runner, dataset_factory, tmp_path):
        manifest = dataset_factory(tmp_path / "data", identities=3)
        pair_out = tmp_path / "pair"
        runner.invoke(cli, ["pair", "--manifest", str(manifest), "--subset", "all", "--trials", "2",
                            "--out", str(pair_out)])
        embeddings = _one_hot_embeddings(pair_out / "pairings" / "pairs_trial_00.tsv", tmp_path / "emb.txt")
        result = runner.invoke(cli, ["evaluate", "--pairings", str(pair_out / "pairings"),
                                     "--embeddings", str(embeddings), "--out", str(tmp_path / "eval")])
        assert result.exit_code == EXIT_USAGE

    def test_significance(self, runner, tmp_path):
        a = tmp_path / "a.tsv"
        b = tmp_path / "b.tsv"
        a.write_text("# model=A\n0\t0\t1\n0\t1\t1\n0\t2\t1\n0\t3\t0\n", encoding="utf-8")
        b.write_text("# model=B\n0\t0\t0\n0\t1\t0\n0\t2\t1\n0\t3\t0\n", encoding="utf-8")
        out = tmp_path / "sig"
        result = runner.invoke(cli, ["significance", str(a), str(b), "--out", str(out)])
        assert result.exit_code == EXIT_OK, result.output
        lines = [json.loads(line) for line in (out / "significance.jsonl").read_text(encoding="utf-8").splitlines()]
        assert [r["test"] for r in lines] == ["cochran_q", "mcnemar"]
        assert lines[0]["statistic"] == pytest.approx(2.0)
        assert lines[0]["models"] == ["A", "B"]

    def test_significance_needs_two_files(self, runner, tmp_path):
        a = tmp_path / "a.tsv"
        a.write_text("0\t0\t1\n", encoding="utf-8")
        result = runner.invoke(cli, ["significance", str(a)])
        assert result.exit_code == EXIT_USAGE
