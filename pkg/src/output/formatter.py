"""报告格式化模块"""

import json
from pathlib import Path
from typing import Dict, List, Sequence

from ..models import CMC_RANKS, METRIC_NAMES, EvalReport, SignificanceResult


class ReportFormatter:
    """评估报告格式化器"""

    def __init__(self, use_color: bool = True):
        """
        初始化格式化器

        Args:
            use_color: 是否使用颜色
        """
        self.use_color = use_color

        # ANSI 颜色代码
        self.colors = {
            "reset": "\033[0m",
            "bold": "\033[1m",
            "dim": "\033[2m",
            "red": "\033[31m",
            "green": "\033[32m",
            "yellow": "\033[33m",
            "cyan": "\033[36m",
        }

    def _colorize(self, text: str, color: str) -> str:
        """给文本添加颜色"""
        if not self.use_color:
            return text
        return f"{self.colors.get(color, '')}{text}{self.colors['reset']}"

    @staticmethod
    def _pct(value: float) -> str:
        return f"{value * 100:6.2f}"

    def _separator(self, header: str) -> str:
        return "─" * len(header)

    def format_table(self, report: EvalReport) -> str:
        """
        格式化为终端表格：每次试验一行，最后一行为均值 ± 标准差（百分数）

        Args:
            report: 评估报告

        Returns:
            表格字符串
        """
        if not report.trials:
            return self._colorize("报告中没有试验结果", "yellow")

        header = (f" {'试验':<6} | {'mAP':>7} | {'mINP':>7} | "
                  + " | ".join(f"{'R' + str(k):>7}" for k in CMC_RANKS)
                  + f" | {'查询':>5} | {'排除':>4}")
        lines = [
            self._colorize(f"📊 {report.policy_name or '-'} / {report.corruption_mode} / {report.metric}", "cyan"),
            header,
            self._separator(header),
        ]
        for t in report.trials:
            cmc = " | ".join(f"{self._pct(t.cmc[k]):>7}" for k in CMC_RANKS)
            lines.append(f" {t.trial_index:<6} | {self._pct(t.mAP):>7} | {self._pct(t.mINP):>7} | "
                         f"{cmc} | {t.num_queries:>5} | {t.num_excluded:>4}")

        lines.append(self._separator(header))
        agg = report.aggregate
        summary = "  ".join(
            f"{name} {self._colorize(self._pct(agg[name].mean).strip(), 'green')}"
            f"±{agg[name].std * 100:.2f}"
            for name in METRIC_NAMES if name in agg
        )
        lines.append(f" 均值 ({len(report.trials)} 次): {summary}")
        if report.excluded_queries:
            lines.append(self._colorize(f" ⚠️  {report.excluded_queries} 个查询没有正样本，未计入平均", "yellow"))

        if report.significance:
            lines.append("")
            lines.append(self.format_significance(report.significance))
        return "\n".join(lines)

    def format_significance(self, results: Sequence[SignificanceResult]) -> str:
        """格式化显著性检验结果"""
        lines = [self._colorize("📐 显著性检验", "cyan")]
        for r in results:
            color = "green" if r.p_value < 0.05 else "dim"
            lines.append(f"  {r.test:<10} 模型: {', '.join(r.models)}  "
                         f"统计量={r.statistic:.4f}  p={self._colorize(f'{r.p_value:.4g}', color)}  "
                         f"查询数={r.num_queries}")
        return "\n".join(lines)

    def format_jsonl(self, report: EvalReport) -> str:
        """
        格式化为 JSON Lines：每次试验、每个汇总指标、每个检验各一行

        不含时间戳，相同输入得到逐字节相同的输出。
        """
        records: List[Dict] = []
        for t in report.trials:
            record = {"record": "trial", "trial_index": t.trial_index,
                      "num_queries": t.num_queries, "num_excluded": t.num_excluded}
            record.update({name: t.value(name) for name in METRIC_NAMES})
            records.append(record)
        for name in METRIC_NAMES:
            if name in report.aggregate:
                summary = report.aggregate[name]
                records.append({"record": "aggregate", "name": name, "mean": summary.mean,
                                "std": summary.std, "trials": len(report.trials)})
        records.append({"record": "run", "metric": report.metric,
                        "corruption_mode": report.corruption_mode, "policy": report.policy_name,
                        "excluded_queries": report.excluded_queries})
        for r in report.significance:
            records.append({"record": "significance", **r.model_dump()})
        return "".join(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n" for r in records)

    def format_markdown(self, report: EvalReport, title: str = "评估结果") -> str:
        """
        格式化为 Markdown（mAP | mINP 两列，均值 ± 标准差）

        Args:
            report: 评估报告
            title: 标题

        Returns:
            Markdown 字符串
        """
        agg = report.aggregate
        lines = [
            f"# {title}",
            "",
            f"*距离: {report.metric} | 腐蚀模式: {report.corruption_mode} | 试验次数: {len(report.trials)}*",
            "",
            "| 策略 | 模式 | mAP | mINP |",
            "|---|---|---|---|",
        ]
        cells = []
        for name in ("mAP", "mINP"):
            s = agg.get(name)
            cells.append(f"{s.mean * 100:.2f} ± {s.std * 100:.2f}" if s else "-")
        lines.append(f"| {report.policy_name or '-'} | {report.corruption_mode} | {cells[0]} | {cells[1]} |")

        if report.excluded_queries:
            lines += ["", f"> {report.excluded_queries} 个查询没有正样本，未计入平均。"]
        if report.significance:
            lines += ["", "## 显著性检验", "", "| 检验 | 模型 | 统计量 | p |", "|---|---|---|---|"]
            for r in report.significance:
                lines.append(f"| {r.test} | {', '.join(r.models)} | {r.statistic:.4f} | {r.p_value:.4g} |")
        return "\n".join(lines) + "\n"

    def format_listing(self, title: str, items: Dict[str, str]) -> str:
        """格式化名称 → 说明的列表（预设、腐蚀类型）"""
        width = max((len(name) for name in items), default=0)
        lines = [self._colorize(title, "cyan")]
        for name, description in items.items():
            lines.append(f"  • {self._colorize(name.ljust(width), 'bold')}  {description}")
        return "\n".join(lines)

    def save_to_file(self, content: str, filepath: Path):
        """
        保存内容到文件

        Args:
            content: 文件内容
            filepath: 文件路径
        """
        filepath = Path(filepath)
        filepath.parent.mkdir(parents=True, exist_ok=True)

        with open(filepath, "w", encoding="utf-8", newline="\n") as f:
            f.write(content)
