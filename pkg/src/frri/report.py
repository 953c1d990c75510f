"""Experiment report files: per-fold CSV, aggregate tables, tests and the retention curve."""

from __future__ import annotations

import csv
import io
import json
import warnings
from pathlib import Path
from typing import Sequence

import numpy as np

from .evaluation import FoldResult, Variant, aggregate
from .stats import conover_posthoc, friedman_test, wilcoxon_signed_rank

METRICS = {
    "balanced_accuracy": ("Balanced accuracy", "{:.3f}", "greater"),
    "rule_count": ("Average number of rules", "{:.0f}", "less"),
    "mean_rule_length": ("Average rule length", "{:.2f}", "less"),
}

CONOVER_NOTE = ("Conover post-hoc: classical Conover-Iman t statistic on Friedman rank sums, "
                "(n-1)(k-1) degrees of freedom, two-sided, no p-value adjustment.")


def _ordered(items: Sequence[str]) -> list[str]:
    return list(dict.fromkeys(items))


def metric_matrix(summary: dict, datasets: Sequence[str], variants: Sequence[str], metric: str) -> np.ndarray:
    return np.array([[summary[(d, v)][metric] for v in variants] for d in datasets])


def statistical_tests(summary: dict, datasets: list[str], variants: list[str]) -> dict:
    out = {}
    if len(datasets) < 2 or len(variants) < 2:
        return out
    for metric, (_, _, better) in METRICS.items():
        m = metric_matrix(summary, datasets, variants, metric)
        fr = friedman_test(m)
        co = conover_posthoc(m)
        entry = {"friedman": {"statistic": fr.statistic, "p_value": fr.p_value, "verdict": fr.verdict},
                 "mean_ranks": dict(zip(variants, co.mean_ranks.tolist())),
                 "conover": {a: {b: float(co.pairwise[i, j]) for j, b in enumerate(variants)}
                             for i, a in enumerate(variants)},
                 "wilcoxon_vs_control": {}}
        if "control" in variants:
            c = variants.index("control")
            for j, v in enumerate(variants):
                if j == c:
                    continue
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")  # small n is recorded in the entry
                    w = wilcoxon_signed_rank(m[:, j], m[:, c], alternative=better)
                entry["wilcoxon_vs_control"][v] = {"alternative": better, "statistic": w.statistic,
                                                   "p_value": w.p_value, "method": w.method, "n": w.n,
                                                   "verdict": w.verdict}
        out[metric] = entry
    return out


def directional_flags(summary: dict, datasets: list[str], variants: list[str]) -> dict:
    if "control" not in variants or "ofrfs-0" not in variants:
        return {}
    mean = lambda v, m: float(np.mean([summary[(d, v)][m] for d in datasets]))
    return {
        "lower_balanced_accuracy": mean("ofrfs-0", "balanced_accuracy") < mean("control", "balanced_accuracy"),
        "more_rules": mean("ofrfs-0", "rule_count") > mean("control", "rule_count"),
        "shorter_rules": mean("ofrfs-0", "mean_rule_length") < mean("control", "mean_rule_length"),
    }


def retention_curve(summary: dict, datasets: list[str], variants: list[str], method: str = "ofrfs") -> list[dict]:
    points = []
    for v in variants:
        var = Variant.parse(v)
        if var.method.value != method or var.retention is None:
            continue
        points.append({"variant": v, "retention": var.retention,
                       "mean_balanced_accuracy": float(np.mean([summary[(d, v)]["balanced_accuracy"]
                                                                for d in datasets]))})
    return sorted(points, key=lambda p: p["retention"])


def markdown_tables(summary: dict, datasets: list[str], variants: list[str]) -> str:
    parts = []
    for metric, (title, fmt, better) in METRICS.items():
        m = metric_matrix(summary, datasets, variants, metric)
        pick = np.max if better == "greater" else np.min
        lines = [f"### {title}", "", "| dataset | " + " | ".join(variants) + " |",
                 "|---" * (len(variants) + 1) + "|"]
        for d, row in zip(datasets + ["mean"], np.vstack([m, m.mean(axis=0)])):
            best = pick(row)
            cells = [f"**{fmt.format(x)}**" if x == best else fmt.format(x) for x in row]
            lines.append(f"| {d} | " + " | ".join(cells) + " |")
        parts.append("\n".join(lines))
    return "\n\n".join(parts) + "\n"


def tests_markdown(tests: dict, variants: list[str]) -> str:
    lines = ["## Significance tests", "", CONOVER_NOTE, ""]
    for metric, entry in tests.items():
        fr = entry["friedman"]
        lines += [f"### {METRICS[metric][0]}", "",
                  f"Friedman: chi2 = {fr['statistic']:.4f}, p = {fr['p_value']:.4g} ({fr['verdict']})", "",
                  "Conover pairwise p-values:", "", "| | " + " | ".join(variants) + " |",
                  "|---" * (len(variants) + 1) + "|"]
        for a in variants:
            lines.append(f"| {a} | " + " | ".join(f"{entry['conover'][a][b]:.3g}" for b in variants) + " |")
        if entry["wilcoxon_vs_control"]:
            lines += ["", "Wilcoxon signed-rank vs control:", ""]
            for v, w in entry["wilcoxon_vs_control"].items():
                lines.append(f"- {v} ({w['alternative']}): p = {w['p_value']:.4g}, {w['verdict']}")
        lines.append("")
    return "\n".join(lines)


def _csv(rows: list[dict], header_comment: str = "") -> str:
    buf = io.StringIO()
    buf.write(header_comment)
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()


def write_report(out_dir: str | Path, config_text: str, results: Sequence[FoldResult],
                 failures: dict[str, str] | None = None) -> dict:
    """Write all report files; returns the JSON summary that was written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    failures = failures or {}
    comment = "".join(f"# {line}\n" for line in config_text.splitlines())
    summary = aggregate(results)
    datasets = _ordered([r.dataset for r in results])
    variants = _ordered([r.variant for r in results])
    tests = statistical_tests(summary, datasets, variants)
    flags = directional_flags(summary, datasets, variants)
    curve = retention_curve(summary, datasets, variants)

    (out / "config.txt").write_text(config_text, encoding="utf-8")
    (out / "folds.csv").write_text(_csv([r.row() for r in results], comment), encoding="utf-8")
    agg_rows = [{"dataset": d, "variant": v, **summary[(d, v)]} for d in datasets for v in variants]
    (out / "summary.csv").write_text(_csv(agg_rows, comment), encoding="utf-8")
    (out / "fig1.csv").write_text(_csv(curve, comment), encoding="utf-8")
    md = ["# FRRI experiment report", "", "## Configuration", "", "```", config_text.rstrip(), "```", ""]
    if failures:
        md += ["## Failed datasets", ""] + [f"- {d}: {msg}" for d, msg in failures.items()] + [""]
    if datasets:
        md += ["## Results", "", markdown_tables(summary, datasets, variants)]
        md += [tests_markdown(tests, variants)]
    if flags:
        md += ["## ofrfs-0 versus control", ""] + [f"- {k}: {v}" for k, v in flags.items()] + [""]
    (out / "report.md").write_text("\n".join(md), encoding="utf-8")
    doc = {"config": config_text, "datasets": datasets, "variants": variants,
           "summary": [{"dataset": d, "variant": v, **summary[(d, v)]} for d in datasets for v in variants],
           "tests": tests, "directional_flags": flags, "retention_curve": curve,
           "failures": failures, "significance_levels": {"alpha": 0.05, "weak": 0.10}}
    (out / "report.json").write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")
    return doc
