# -*- coding: utf-8 -*-
"""命令行接口模块"""

import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import click
import yaml
from pydantic import ValidationError

# Windows 编码处理
if sys.platform == "win32":
    import io
    sys.stdout = io.TextIOWrapper(sys.stdout.buffer, encoding="utf-8", errors="replace")
    sys.stderr = io.TextIOWrapper(sys.stderr.buffer, encoding="utf-8", errors="replace")

# 添加项目根目录到 Python 路径
sys.path.insert(0, str(Path(__file__).parent))

from src.augmentation import PRESET_DESCRIPTIONS, augment_batch, get_preset, list_presets  # noqa: E402
from src.config import Config, RunConfig, parse_overrides  # noqa: E402
from src.corruption import corrupt_dataset, load_severity_table  # noqa: E402
from src.exceptions import InvalidArgumentError, ViReidError  # noqa: E402
from src.imaging import derive_seed, load_image  # noqa: E402
from src.metrics import (  # noqa: E402
    evaluate_with_outcomes, read_embeddings, read_outcomes, significance_tests, write_outcomes,
)
from src.models import (  # noqa: E402
    CorruptionKind, CorruptionPolicy, DatasetKind, DatasetManifest, EmbeddingTable, ImagePair, ModalityTag,
    PairingResult,
)
from src.output import PreviewVisualizer, ReportFormatter  # noqa: E402
from src.protocol import (  # noqa: E402
    fold_sizes, load_manifest, looq_trials, make_folds, pair_images, read_pairings, read_split,
    repeated_pairings, split_identities, write_pairings, write_split,
)

logger = logging.getLogger("vireid")

# 退出码
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_IO = 3

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"


class BenchGroup(click.Group):
    """把异常映射为固定退出码的命令组"""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        if not standalone_mode:
            return super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
        try:
            rv = super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
        except click.exceptions.Abort:
            click.echo(click.style("已中止", fg="yellow"), err=True)
            sys.exit(EXIT_USAGE)
        except click.ClickException as e:
            e.show()
            sys.exit(EXIT_USAGE)
        except ValidationError as e:
            click.echo(click.style(f"❌ 配置错误: {e}", fg="red"), err=True)
            sys.exit(EXIT_USAGE)
        except (ViReidError, yaml.YAMLError) as e:
            click.echo(click.style(f"❌ 数据错误: {e}", fg="red"), err=True)
            sys.exit(EXIT_DATA)
        except OSError as e:
            click.echo(click.style(f"❌ I/O 错误: {e}", fg="red"), err=True)
            sys.exit(EXIT_IO)
        sys.exit(rv if isinstance(rv, int) else EXIT_OK)


def _setup_logging(level: str):
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO),
                        format=LOG_FORMAT, stream=sys.stderr, force=True)


def _resolve(config_file: Optional[str], verbose: bool, **flags: Any) -> RunConfig:
    """合并配置并初始化日志"""
    if verbose:
        flags["log_level"] = "DEBUG"
    cfg = RunConfig.resolve(config_file, flags)
    _setup_logging(cfg.log_level)
    logger.debug("运行配置:\n%s", cfg.to_yaml())
    return cfg


def _load_manifest(cfg: RunConfig) -> DatasetManifest:
    if not cfg.manifest:
        raise click.UsageError("需要 --manifest（或在 --config 中指定 manifest）")
    manifest = load_manifest(cfg.manifest)
    if cfg.dataset_kind is not None and cfg.dataset_kind != manifest.dataset_kind:
        manifest = manifest.model_copy(update={"dataset_kind": cfg.dataset_kind})
    return manifest


def _image_root(cfg: RunConfig) -> Path:
    return Path(cfg.image_root) if cfg.image_root else Path(cfg.manifest).parent


def _prepare_output(cfg: RunConfig, command: str) -> Path:
    out = cfg.output_dir(command)
    Config.ensure_dirs(out)
    cfg.save(out)
    return out


def _expand(paths: Sequence[str]) -> List[Path]:
    """展开参数中的目录（取其中排序后的文件）"""
    files: List[Path] = []
    for p in paths:
        path = Path(p)
        if path.is_dir():
            files.extend(sorted(f for f in path.iterdir() if f.is_file()))
        else:
            files.append(path)
    return files


def common_options(fn):
    """各子命令共用的参数"""
    options = [
        click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False),
                     default=None, help="YAML 配置文件"),
        click.option("--out", default=None, help="输出目录"),
        click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None, help="主随机种子"),
        click.option("--workers", type=click.IntRange(min=1), default=None, help="并行线程数"),
        click.option("-v", "--verbose", is_flag=True, help="输出 DEBUG 日志"),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def manifest_options(fn):
    options = [
        click.option("--manifest", default=None, help="数据集清单文件"),
        click.option("--dataset", "dataset_kind", type=click.Choice([k.value for k in DatasetKind],
                                                                   case_sensitive=False),
                     default=None, help="数据集类型（默认取清单表头）"),
        click.option("--image-root", default=None, help="清单相对路径的根目录（默认为清单所在目录）"),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


@click.group(cls=BenchGroup)
@click.version_option(version="0.1.0")
def cli():
    """vireid-bench - 可见光-红外行人重识别腐蚀基准与多模态数据增强"""
    pass


@cli.command()
@manifest_options
@common_options
@click.option("--mode", type=click.Choice(Config.MODE_OPTIONS), default=None, help="腐蚀模式")
@click.option("--severity", type=click.Choice(Config.SEVERITY_OPTIONS), default=None, help="严重等级")
@click.option("--severity-table", default=None, help="严重等级参数表（YAML）")
@click.option("--trials", type=click.IntRange(min=1), default=None, help="试验次数（SYSU 默认 30）")
@click.option("--redraw/--reuse", "redraw_corruption", default=None,
              help="多次试验时是否每次重新抽取腐蚀")
@click.option("--copy-unchanged", is_flag=True, help="未腐蚀的图像也复制到输出目录")
def corrupt(config_file, out, seed, workers, verbose, manifest, dataset_kind, image_root,
            mode, severity, severity_table, trials, redraw_corruption, copy_unchanged):
    """按腐蚀模式生成腐蚀图像与记录日志"""
    cfg = _resolve(config_file, verbose, manifest=manifest, dataset_kind=dataset_kind, image_root=image_root,
                   out=out, seed=seed, workers=workers, mode=mode, severity=severity,
                   severity_table=severity_table, trials=trials, redraw_corruption=redraw_corruption)
    data = _load_manifest(cfg)
    table = load_severity_table(cfg.severity_table)
    policy = CorruptionPolicy(mode=cfg.mode, severity=cfg.severity_level)
    output_dir = _prepare_output(cfg, "corrupt")

    trial_count = cfg.trials_for(data.dataset_kind) if cfg.redraw_corruption else 1
    click.echo(f"🌫️  腐蚀模式 {cfg.mode.value}，严重等级 {cfg.severity}，{len(data.records)} 张图像，"
               f"{trial_count} 次试验")

    errors = []
    for t in range(trial_count):
        if trial_count == 1:
            target, trial_seed = output_dir, cfg.seed
        else:
            target, trial_seed = output_dir / f"trial_{t:02d}", derive_seed(cfg.seed, t)
        result = corrupt_dataset(data, policy, trial_seed, target, image_root=_image_root(cfg),
                                 workers=cfg.workers, copy_unchanged=copy_unchanged, table=table)
        errors.extend(result.errors)
        click.echo(f"  ✅ {target}: {len(result.records)} 张已腐蚀")

    if errors:
        click.echo(click.style(f"❌ {len(errors)} 张图像处理失败:", fg="red"), err=True)
        for e in errors:
            click.echo(f"   {e.image_id}\t{e.path}\t{e.message}", err=True)
        return EXIT_IO
    click.echo(click.style(f"📁 输出目录: {output_dir}", fg="green"))


@cli.command("augment-preview")
@manifest_options
@common_options
@click.option("--preset", default=None, help="增强预设名（见 presets 命令）")
@click.option("--set", "overrides", multiple=True, help="覆盖算子参数，形如 op.param=value")
@click.option("--samples", type=click.IntRange(min=1), default=None, help="预览的图像对数量")
def augment_preview(config_file, out, seed, workers, verbose, manifest, dataset_kind, image_root,
                    preset, overrides, samples):
    """生成增强前后对比图与矩形日志"""
    try:
        override_map = parse_overrides(overrides)
    except (ValueError, yaml.YAMLError) as e:
        raise click.BadParameter(str(e), param_hint="--set")
    cfg = _resolve(config_file, verbose, manifest=manifest, dataset_kind=dataset_kind, image_root=image_root,
                   out=out, seed=seed, workers=workers, preset=preset, samples=samples,
                   overrides=override_map or None)
    try:
        policy = get_preset(cfg.preset)
    except InvalidArgumentError as e:
        raise click.BadParameter(str(e), param_hint="--preset")
    try:
        policy = policy.with_overrides(cfg.overrides)
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint="--set")

    data = _load_manifest(cfg)
    root = _image_root(cfg)
    lookup = data.lookup()
    pairing = pair_images(data, data.identities(), cfg.seed)
    chosen = pairing.pairs[:cfg.samples]

    pairs = []
    for entry in chosen:
        v, i = lookup[entry.visible_id], lookup[entry.infrared_id]
        pairs.append(ImagePair(
            visible=load_image(root / v.path, ModalityTag.VISIBLE),
            infrared=load_image(root / i.path, ModalityTag.INFRARED),
            identity=entry.identity, camera_v=entry.camera_v, camera_i=entry.camera_i,
            visible_id=entry.visible_id, infrared_id=entry.infrared_id,
        ))

    output_dir = _prepare_output(cfg, "augment-preview")
    click.echo(f"🎨 预设 {policy.name}: {', '.join(policy.operator_names())}")
    results = augment_batch(pairs, policy, cfg.seed, workers=cfg.workers)

    viz = PreviewVisualizer(output_dir)
    for index, (before, (after, log)) in enumerate(zip(pairs, results)):
        name = f"preview_{index:03d}"
        grid = viz.save_pair_grid(before, after, f"{name}.png", log=log,
                                  title=f"{policy.name} | id {before.identity}")
        with open(output_dir / f"{name}_rects.tsv", "w", encoding="utf-8", newline="\n") as f:
            f.writelines(line + "\n" for line in log.to_lines())
        click.echo(f"  🖼️  {grid}")
    click.echo(click.style(f"✅ 已生成 {len(results)} 张对比图", fg="green"))


@cli.command()
@manifest_options
@common_options
@click.option("--folds", type=click.IntRange(min=2), default=None, help="训练集折数")
def split(config_file, out, seed, workers, verbose, manifest, dataset_kind, image_root, folds):
    """划分训练 / 测试身份并生成 k 折"""
    cfg = _resolve(config_file, verbose, manifest=manifest, dataset_kind=dataset_kind, image_root=image_root,
                   out=out, seed=seed, workers=workers, folds=folds)
    data = _load_manifest(cfg)
    spec = make_folds(split_identities(data, cfg.seed), cfg.folds, cfg.seed)
    output_dir = _prepare_output(cfg, "split")
    path = write_split(spec, output_dir / "split.tsv")

    sizes = ", ".join(str(n) for n in fold_sizes(len(spec.train_identities), cfg.folds))
    click.echo(f"🧩 {data.dataset_kind.value}: 训练 {len(spec.train_identities)} 个身份，"
               f"测试 {len(spec.test_identities)} 个身份")
    click.echo(f"   {cfg.folds} 折: {sizes}")
    click.echo(click.style(f"📄 已保存到: {path}", fg="green"))


@cli.command()
@manifest_options
@common_options
@click.option("--trials", type=click.IntRange(min=1), default=None, help="配对试验次数（SYSU 默认 30）")
@click.option("--split-file", default=None, help="split 命令生成的划分文件（默认按种子重新划分）")
@click.option("--subset", type=click.Choice(["test", "train", "all"]), default="test", help="参与配对的身份")
def pair(config_file, out, seed, workers, verbose, manifest, dataset_kind, image_root, trials,
         split_file, subset):
    """生成可见光-红外配对（LOOQ 的输入）"""
    cfg = _resolve(config_file, verbose, manifest=manifest, dataset_kind=dataset_kind, image_root=image_root,
                   out=out, seed=seed, workers=workers, trials=trials)
    data = _load_manifest(cfg)

    if subset == "all":
        identities = data.identities()
    else:
        spec = read_split(split_file) if split_file else split_identities(data, cfg.seed)
        identities = spec.test_identities if subset == "test" else spec.train_identities

    count = cfg.trials_for(data.dataset_kind)
    pairings = repeated_pairings(data, identities, count, cfg.seed)
    output_dir = _prepare_output(cfg, "pair")
    for pairing in pairings:
        write_pairings(pairing, output_dir / "pairings" / f"pairs_trial_{pairing.trial_index:02d}.tsv")

    click.echo(f"🔗 {data.dataset_kind.value} {subset}: {len(identities)} 个身份，"
               f"{count} 次试验，每次 {len(pairings[0])} 对")
    click.echo(click.style(f"📁 已保存到: {output_dir / 'pairings'}", fg="green"))


def _join_pairing(pairing: PairingResult, table: EmbeddingTable, source: Path) -> EmbeddingTable:
    """
    核对特征表与配对文件的身份和相机，特征表没有相机标签时从配对文件补上

    Raises:
        InvalidArgumentError: 同一 pair id 的身份或相机不一致
    """
    index = table.index()
    cameras = list(table.cameras) if table.cameras is not None else [""] * len(table)
    for pid, entry in enumerate(pairing.pairs):
        row = index.get(pid)
        if row is None:
            continue
        if table.identities[row] != entry.identity:
            raise InvalidArgumentError(
                f"{source}: pair id {pid} 的身份为 {table.identities[row]}，配对文件中为 {entry.identity}")
        if table.cameras is None:
            cameras[row] = entry.camera
        elif cameras[row] != entry.camera:
            raise InvalidArgumentError(
                f"{source}: pair id {pid} 的相机为 {cameras[row]}，配对文件中为 {entry.camera}")
    return table.model_copy(update={"cameras": cameras})


@cli.command()
@common_options
@click.option("--pairings", "pairing_paths", multiple=True, required=True,
              help="配对文件或目录（每次试验一个文件）")
@click.option("--embeddings", "embedding_paths", multiple=True, required=True,
              help="特征文件或目录，与配对文件一一对应")
@click.option("--metric", type=click.Choice(Config.METRIC_OPTIONS), default=None, help="距离度量")
@click.option("--normalize/--no-normalize", default=None, help="匹配前对拼接特征做 L2 归一化")
@click.option("--mode", type=click.Choice(Config.MODE_OPTIONS), default=None, help="报告中记录的腐蚀模式")
@click.option("--preset", default=None, help="报告中记录的增强策略名")
@click.option("--name", "model_name", default=None, help="模型名（写入 rank-1 结果文件）")
def evaluate(config_file, out, seed, workers, verbose, pairing_paths, embedding_paths, metric,
             normalize, mode, preset, model_name):
    """LOOQ 评估：mAP / mINP / CMC"""
    cfg = _resolve(config_file, verbose, out=out, seed=seed, workers=workers, metric=metric,
                   normalize=normalize, mode=mode, preset=preset)
    pairing_files = _expand(pairing_paths)
    embedding_files = _expand(embedding_paths)
    if len(pairing_files) != len(embedding_files):
        raise click.UsageError(f"配对文件 {len(pairing_files)} 个，特征文件 {len(embedding_files)} 个，数量必须一致")

    tables, looq = [], []
    for pairing_file, embedding_file in zip(pairing_files, embedding_files):
        pairing = read_pairings(pairing_file)
        table = read_embeddings(embedding_file)
        tables.append(_join_pairing(pairing, table, embedding_file))
        looq.append(looq_trials(pairing))

    result = evaluate_with_outcomes(tables, looq, metric=cfg.metric, normalize=cfg.normalize,
                                    workers=cfg.workers, corruption_mode=cfg.mode.value,
                                    policy_name=cfg.preset)
    output_dir = _prepare_output(cfg, "evaluate")
    formatter = ReportFormatter(use_color=True)
    plain = ReportFormatter(use_color=False)
    plain.save_to_file(plain.format_jsonl(result.report), output_dir / "report.jsonl")
    plain.save_to_file(plain.format_markdown(result.report), output_dir / "report.md")
    write_outcomes(result.outcomes, output_dir / "rank1_outcomes.tsv", model=model_name or cfg.preset)

    click.echo(formatter.format_table(result.report))
    click.echo(click.style(f"📄 报告已保存到: {output_dir}", fg="green"))


@cli.command()
@click.argument("outcome_files", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", default=None, help="把结果写入该目录的 significance.jsonl")
@click.option("-v", "--verbose", is_flag=True, help="输出 DEBUG 日志")
def significance(outcome_files, out, verbose):
    """对多个模型的 rank-1 结果做 Cochran Q 检验（两个模型时附加 McNemar）"""
    _setup_logging("DEBUG" if verbose else "INFO")
    if len(outcome_files) < 2:
        raise click.UsageError("至少需要 2 个结果文件")
    models, columns = [], []
    for path in outcome_files:
        name, hits = read_outcomes(path)
        models.append(name)
        columns.append(hits)

    results = significance_tests(columns, models)
    formatter = ReportFormatter(use_color=True)
    click.echo(formatter.format_significance(results))
    if out:
        path = Path(out) / "significance.jsonl"
        formatter.save_to_file("".join(r.model_dump_json() + "\n" for r in results), path)
        click.echo(click.style(f"📄 已保存到: {path}", fg="green"))


@cli.command()
def presets():
    """列出全部增强预设"""
    formatter = ReportFormatter(use_color=True)
    items = {name: PRESET_DESCRIPTIONS.get(name, "") for name in list_presets()}
    click.echo(formatter.format_listing("🎛️  增强预设", items))


@cli.command()
@click.option("--modality", type=click.Choice([m.value for m in ModalityTag]), default=None,
              help="只列出适用于该模态的类型")
def kinds(modality):
    """列出腐蚀类型"""
    formatter = ReportFormatter(use_color=True)
    items: Dict[str, str] = {}
    for kind in CorruptionKind:
        if modality == ModalityTag.INFRARED.value and not kind.applies_to_infrared:
            continue
        items[kind.value] = "可见光 + 红外" if kind.applies_to_infrared else "仅可见光"
    click.echo(formatter.format_listing(f"🌫️  腐蚀类型（{len(items)} 种）", items))


if __name__ == "__main__":
    cli()
